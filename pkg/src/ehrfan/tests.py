import json
import tempfile
from io import StringIO
from pathlib import Path

from django.conf import settings
from django.test import SimpleTestCase
from rest_framework.exceptions import APIException

from core.exceptions import (
    InternalInconsistencyError,
    MalformedInputError,
    NotEhrhartError,
)
from ehrfan.renderers import CanonicalJSONRenderer
from ehrfan.runner import run_command

DATA = settings.BASE_DIR.parent / "data"

TORSION_FAN = {
    "ambient_dim": 2,
    "rays": [[1, 0], [1, 2]],
    "maximal_cones": [[0], [1]],
}


class CommandTestCase(SimpleTestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmp.cleanup)

    def sample(self, name: str) -> str:
        return str(DATA / name)

    def document(self, name: str, content) -> str:
        path = Path(self.tmp.name) / name
        text = content if isinstance(content, str) else json.dumps(content)
        path.write_text(text)
        return str(path)

    def run_ehrfan(self, *argv) -> tuple[int, dict, str]:
        stdout, stderr = StringIO(), StringIO()
        code = run_command(list(argv), stdout=stdout, stderr=stderr)
        return code, json.loads(stdout.getvalue()), stdout.getvalue()

    def assertError(self, argv, exit_code: int, error_code: str) -> dict:
        code, payload, _ = self.run_ehrfan(*argv)
        self.assertEqual(code, exit_code)
        self.assertEqual(payload["error"]["code"], error_code)
        return payload["error"]


class FanCommandTests(CommandTestCase):
    def test_validate(self):
        code, payload, _ = self.run_ehrfan(
            "fan", "validate", "--fan", self.sample("pentagon_fan.json")
        )
        self.assertEqual(code, 0)
        self.assertEqual(
            payload,
            {
                "ambient_dim": 2,
                "complete": True,
                "dim": 2,
                "maximal_cones": 5,
                "pure": True,
                "rays": 5,
                "unimodular": True,
                "valid": True,
            },
        )

    def test_validate_reports_bad_rays(self):
        fan = self.document(
            "fan.json",
            {"ambient_dim": 1, "rays": [[2], [-1]], "maximal_cones": [[0]]},
        )
        self.assertError(
            ["fan", "validate", "--fan", fan], 1, "NON_PRIMITIVE_RAY"
        )

    def test_star(self):
        code, payload, _ = self.run_ehrfan(
            "fan",
            "star",
            "--fan",
            self.sample("pentagon_fan.json"),
            "--cone",
            "1",
        )
        self.assertEqual(code, 0)
        self.assertEqual(payload["ray_lift"], [0, 2])
        self.assertEqual(payload["fan"]["ambient_dim"], 1)
        self.assertEqual(len(payload["fan"]["maximal_cones"]), 2)

    def test_subdivide(self):
        code, payload, _ = self.run_ehrfan(
            "fan",
            "subdivide",
            "--fan",
            self.sample("pentagon_fan.json"),
            "--cone",
            "0,1",
        )
        self.assertEqual(code, 0)
        self.assertEqual(payload["new_ray"], 5)
        self.assertEqual(payload["fan"]["rays"][5], [2, 1])

    def test_cone_not_in_fan(self):
        self.assertError(
            [
                "fan",
                "star",
                "--fan",
                self.sample("pentagon_fan.json"),
                "--cone",
                "0,2",
            ],
            1,
            "CONE_NOT_IN_FAN",
        )

    def test_product(self):
        line = self.sample("projective_line_fan.json")
        code, payload, _ = self.run_ehrfan(
            "fan", "product", "--fan", line, "--fan2", line
        )
        self.assertEqual(code, 0)
        self.assertEqual(payload["fan"]["ambient_dim"], 2)
        self.assertEqual(len(payload["fan"]["maximal_cones"]), 4)

    def test_balanced(self):
        code, payload, _ = self.run_ehrfan(
            "fan",
            "balanced",
            "--fan",
            self.sample("balanced_non_ehrhart_fan.json"),
        )
        self.assertEqual(code, 0)
        self.assertEqual(
            payload, {"balanced": True, "residual": None, "ridge": None}
        )


class EhrhartCommandTests(CommandTestCase):
    def test_eval_pentagon(self):
        code, payload, raw = self.run_ehrfan(
            "ehrhart",
            "eval",
            "--fan",
            self.sample("pentagon_fan.json"),
            "--pl",
            self.sample("pentagon_ones.json"),
        )
        self.assertEqual(code, 0)
        self.assertEqual(raw, '{"chi":8}\n')

    def test_check_pentagon(self):
        code, payload, _ = self.run_ehrfan(
            "ehrhart", "check", "--fan", self.sample("pentagon_fan.json")
        )
        self.assertEqual(code, 0)
        self.assertTrue(payload["ehrhart"])
        self.assertEqual(payload["dimension"], 2)

    def test_check_balanced_non_ehrhart_fan(self):
        error = self.assertError(
            [
                "ehrhart",
                "check",
                "--fan",
                self.sample("balanced_non_ehrhart_fan.json"),
            ],
            1,
            "NOT_EHRHART",
        )
        self.assertEqual(error["witness"]["residual"], [-4, -2, -2, -2])

    def test_poly(self):
        code, payload, _ = self.run_ehrfan(
            "ehrhart",
            "poly",
            "--fan",
            self.sample("projective_line_fan.json"),
        )
        self.assertEqual(code, 0)
        self.assertEqual(
            payload["polynomial"],
            {
                "terms": [
                    {"alpha": {}, "c": 1},
                    {"alpha": {"0": 1}, "c": 1},
                    {"alpha": {"1": 1}, "c": 1},
                ],
                "vars": [0, 1],
            },
        )

    def test_acknowledge_choice_dependence(self):
        fan = self.document("torsion.json", TORSION_FAN)
        zero = self.document("zero.json", {"values": [0, 0]})
        argv = ["ehrhart", "eval", "--fan", fan, "--pl", zero]
        self.assertError(argv, 1, "NOT_EHRHART")
        code, payload, _ = self.run_ehrfan(
            *argv, "--acknowledge-choice-dependence"
        )
        self.assertEqual(code, 0)
        self.assertEqual(payload, {"chi": 1})

    def test_volume(self):
        code, payload, _ = self.run_ehrfan(
            "volume",
            "eval",
            "--fan",
            self.sample("pentagon_fan.json"),
            "--pl",
            self.sample("pentagon_ones.json"),
        )
        self.assertEqual(code, 0)
        self.assertEqual(payload, {"volume": 7})


class PolytopeCommandTests(CommandTestCase):
    def test_count_from_inequalities(self):
        triangle = self.sample("triangle_polytope.json")
        code, payload, _ = self.run_ehrfan(
            "polytope", "count", "--polytope", triangle
        )
        self.assertEqual(code, 0)
        self.assertEqual(payload, {"count": 10, "interior": False})
        _, payload, _ = self.run_ehrfan(
            "polytope", "count", "--polytope", triangle, "--interior"
        )
        self.assertEqual(payload, {"count": 1, "interior": True})

    def test_count_from_function(self):
        code, payload, _ = self.run_ehrfan(
            "polytope",
            "count",
            "--fan",
            self.sample("pentagon_fan.json"),
            "--pl",
            self.sample("pentagon_ones.json"),
        )
        self.assertEqual(code, 0)
        self.assertEqual(payload["count"], 8)

    def test_count_needs_an_input(self):
        self.assertError(["polytope", "count"], 2, "MALFORMED_INPUT")

    def test_altsum(self):
        argv = [
            "polytope",
            "altsum",
            "--fan",
            self.sample("pentagon_fan.json"),
            "--pl",
            self.sample("pentagon_ones.json"),
        ]
        code, payload, _ = self.run_ehrfan(*argv)
        self.assertEqual(code, 0)
        self.assertEqual(payload, {"chi": 8})
        self.assertError(
            argv + ["--max-shells", "1"], 1, "SHELL_LIMIT_EXCEEDED"
        )


class MatroidCommandTests(CommandTestCase):
    def test_bergman(self):
        code, payload, _ = self.run_ehrfan(
            "matroid", "bergman", "--matroid", self.sample("u23.json")
        )
        self.assertEqual(code, 0)
        self.assertEqual(payload["flats"], [[0], [1], [2]])
        self.assertEqual(
            payload["fan"]["rays"], [[1, 0], [0, 1], [-1, -1]]
        )

    def test_chi_of_zero(self):
        argv = [
            "matroid",
            "chi",
            "--matroid",
            self.sample("u23.json"),
            "--pl",
            self.sample("u23_zero.json"),
        ]
        for extra in ([], ["--slow-path"]):
            code, payload, _ = self.run_ehrfan(*argv, *extra)
            self.assertEqual(code, 0)
            self.assertEqual(payload, {"chi": 1})

    def test_missing_keys(self):
        matroid = self.document("matroid.json", {"type": "uniform"})
        error = self.assertError(
            ["matroid", "bergman", "--matroid", matroid],
            2,
            "MALFORMED_INPUT",
        )
        self.assertIn("rank", error["witness"])

    def test_invalid_bases(self):
        matroid = self.document(
            "matroid.json",
            {"type": "bases", "ground_size": 3, "bases": [[0, 1], [2]]},
        )
        self.assertError(
            ["matroid", "bergman", "--matroid", matroid],
            1,
            "INVALID_MATROID",
        )


class PECommandTests(CommandTestCase):
    def test_normal_form_and_chi(self):
        fan = self.sample("projective_line_fan.json")
        pe = self.sample("line_exchange_pe.json")
        code, payload, _ = self.run_ehrfan(
            "pe", "normalform", "--fan", fan, "--pe", pe
        )
        self.assertEqual(code, 0)
        self.assertEqual(payload, {"terms": []})
        _, payload, _ = self.run_ehrfan("pe", "chi", "--fan", fan, "--pe", pe)
        self.assertEqual(payload, {"chi": 0})

    def test_verify_maxmin(self):
        fan = self.sample("projective_line_fan.json")
        f = self.document("f.json", {"values": [1, 0]})
        g = self.document("g.json", {"values": [0, 1]})
        code, payload, _ = self.run_ehrfan(
            "pe", "verify-maxmin", "--fan", fan, "--pl", f, "--pl2", g
        )
        self.assertEqual(code, 0)
        self.assertEqual(payload, {"holds": True})

    def test_refinement_required(self):
        fan = self.sample("pentagon_fan.json")
        pe = self.document(
            "pe.json",
            {
                "terms": [
                    {"c": 1, "values": [1, 1, 1, 1, 1]},
                    {"c": 1, "values": [2, 0, 2, 0, 0]},
                ]
            },
        )
        self.assertError(
            ["pe", "normalform", "--fan", fan, "--pe", pe],
            1,
            "REFINEMENT_REQUIRED",
        )


class MalformedInputTests(CommandTestCase):
    def test_missing_file(self):
        self.assertError(
            ["fan", "validate", "--fan", "/nonexistent/fan.json"],
            2,
            "MALFORMED_INPUT",
        )

    def test_invalid_json(self):
        fan = self.document("fan.json", "{not json")
        self.assertError(
            ["fan", "validate", "--fan", fan], 2, "MALFORMED_INPUT"
        )

    def test_wrong_number_of_values(self):
        pl = self.document("pl.json", {"values": [1, 1]})
        error = self.assertError(
            [
                "ehrhart",
                "eval",
                "--fan",
                self.sample("pentagon_fan.json"),
                "--pl",
                pl,
            ],
            2,
            "MALFORMED_INPUT",
        )
        self.assertIn("values", error["witness"])

    def test_non_integer_entries(self):
        fan = self.document(
            "fan.json",
            {"ambient_dim": 1, "rays": [["x"]], "maximal_cones": [[0]]},
        )
        self.assertError(
            ["fan", "validate", "--fan", fan], 2, "MALFORMED_INPUT"
        )

    def test_ray_of_the_wrong_length(self):
        fan = self.document(
            "fan.json",
            {"ambient_dim": 2, "rays": [[1, 0], [1]], "maximal_cones": []},
        )
        error = self.assertError(
            ["fan", "validate", "--fan", fan], 2, "MALFORMED_INPUT"
        )
        self.assertIn("rays", error["witness"])

    def test_unknown_command(self):
        self.assertError(["fan", "explode"], 2, "MALFORMED_INPUT")
        self.assertError([], 2, "MALFORMED_INPUT")

    def test_missing_flag(self):
        self.assertError(["ehrhart", "eval"], 2, "MALFORMED_INPUT")

    def test_bad_cone(self):
        self.assertError(
            [
                "fan",
                "star",
                "--fan",
                self.sample("pentagon_fan.json"),
                "--cone",
                "a,b",
            ],
            2,
            "MALFORMED_INPUT",
        )


class RendererTests(SimpleTestCase):
    def test_sorted_compact_output(self):
        rendered = CanonicalJSONRenderer().render(
            {"b": [1, 2], "a": {"y": None, "x": True}}
        )
        self.assertEqual(rendered, b'{"a":{"x":true,"y":null},"b":[1,2]}')

    def test_wide_integers_become_strings(self):
        rendered = CanonicalJSONRenderer().render(
            {"small": 2**63 - 1, "large": 2**70, "negative": -(2**64)}
        )
        self.assertEqual(
            json.loads(rendered),
            {
                "large": "1180591620717411303424",
                "negative": "-18446744073709551616",
                "small": 9223372036854775807,
            },
        )

    def test_deterministic(self):
        argv = [
            "ehrhart",
            "poly",
            "--fan",
            str(DATA / "pentagon_fan.json"),
        ]
        outputs = set()
        for _ in range(2):
            stdout = StringIO()
            run_command(argv, stdout=stdout, stderr=StringIO())
            outputs.add(stdout.getvalue())
        self.assertEqual(len(outputs), 1)


class ErrorTests(SimpleTestCase):
    def test_errors_are_api_exceptions(self):
        error = NotEhrhartError(witness={"a": [1]})
        self.assertIsInstance(error, APIException)
        self.assertEqual(error.code, "NOT_EHRHART")
        self.assertEqual(
            error.as_dict(),
            {
                "code": "NOT_EHRHART",
                "message": "Fan is not Ehrhart.",
                "witness": {"a": [1]},
            },
        )
        self.assertEqual(str(error), "NOT_EHRHART: Fan is not Ehrhart.")

    def test_status_codes(self):
        self.assertEqual(NotEhrhartError.status_code, 422)
        self.assertEqual(MalformedInputError.status_code, 400)
        self.assertEqual(InternalInconsistencyError.status_code, 500)

    def test_explicit_detail_and_code(self):
        error = MalformedInputError("bad", code="CUSTOM")
        self.assertEqual(error.as_dict()["message"], "bad")
        self.assertEqual(error.code, "CUSTOM")
