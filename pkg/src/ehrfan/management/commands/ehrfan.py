import argparse
import json
import logging
import sys
from pathlib import Path

from django.conf import settings
from django.core.management.base import BaseCommand, CommandError
from rest_framework import serializers

from core.exceptions import EhrfanError, MalformedInputError
from ehrfan.renderers import CanonicalJSONRenderer
from ehrfan.serializers import (
    FanSerializer,
    MatroidSerializer,
    PESerializer,
    PLSerializer,
    PolytopeSerializer,
)
from ehrhart.services import (
    EhrhartFailure,
    ehrhart_polynomial,
    eval_chi,
    is_ehrhart,
    volume_eval as eval_volume,
)
from fans.fan import (
    is_balanced,
    is_complete,
    product_fan,
    star_fan,
    stellar_subdivision,
)
from matroids.bergman import bergman_fan, chi_matroid
from pering.elements import chi_tilde, pe_normal_form, verify_maxmin_relation
from polytopes.lattice_points import (
    chi_via_alternating_sum,
    count_lattice_points,
    polytope_from_pl,
)

logger = logging.getLogger(__name__)

EXIT_DOMAIN_ERROR = 1
EXIT_MALFORMED = 2


def ray_indices(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(part) for part in text.split(",") if part.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"expected comma separated ray indices, got {text!r}"
        )


FLAGS = {
    "fan": (("--fan",), {"metavar": "FILE", "help": "fan JSON document"}),
    "fan2": (
        ("--fan2",),
        {"metavar": "FILE", "help": "second factor of a product"},
    ),
    "pl": (("--pl",), {"metavar": "FILE", "help": "PL function JSON"}),
    "pl2": (("--pl2",), {"metavar": "FILE", "help": "second PL function"}),
    "pe": (("--pe",), {"metavar": "FILE", "help": "PE element JSON"}),
    "matroid": (("--matroid",), {"metavar": "FILE", "help": "matroid JSON"}),
    "polytope": (
        ("--polytope",),
        {"metavar": "FILE", "help": "H-polytope JSON"},
    ),
    "cone": (
        ("--cone",),
        {"type": ray_indices, "help": "comma separated ray indices"},
    ),
    "interior": (
        ("--interior",),
        {"action": "store_true", "help": "count interior points only"},
    ),
    "acknowledge": (
        ("--acknowledge-choice-dependence",),
        {
            "action": "store_true",
            "help": "evaluate without certifying the fan; the value may "
            "depend on the reference cone and the ray order",
        },
    ),
    "max_shells": (
        ("--max-shells",),
        {"type": int, "help": "shell limit of the alternating sum"},
    ),
    "slow_path": (
        ("--slow-path",),
        {
            "action": "store_true",
            "help": "evaluate through the general recursion",
        },
    ),
}

# group -> action -> (required inputs, optional inputs)
COMMANDS = {
    "fan": {
        "validate": (("fan",), ()),
        "star": (("fan", "cone"), ()),
        "subdivide": (("fan", "cone"), ()),
        "product": (("fan", "fan2"), ()),
        "balanced": (("fan",), ()),
    },
    "ehrhart": {
        "check": (("fan",), ()),
        "poly": (("fan",), ()),
        "eval": (("fan", "pl"), ("acknowledge",)),
    },
    "volume": {
        "eval": (("fan", "pl"), ()),
    },
    "polytope": {
        "count": ((), ("fan", "pl", "polytope", "interior")),
        "altsum": (("fan", "pl"), ("max_shells",)),
    },
    "matroid": {
        "bergman": (("matroid",), ()),
        "chi": (("matroid", "pl"), ("slow_path",)),
    },
    "pe": {
        "normalform": (("fan", "pe"), ()),
        "chi": (("fan", "pe"), ()),
        "verify-maxmin": (("fan", "pl", "pl2"), ()),
    },
}


class Command(BaseCommand):
    help = (
        "Exact computations on unimodular fans: validation, Ehrhart "
        "certification and evaluation, volumes, lattice point counts, "
        "Bergman fans of matroids and piecewise-exponential elements. "
        "Prints one JSON document."
    )
    requires_system_checks = []

    def add_arguments(self, parser):
        groups = parser.add_subparsers(
            dest="group", metavar="group", required=True
        )
        for group, actions in COMMANDS.items():
            group_parser = groups.add_parser(group)
            action_parsers = group_parser.add_subparsers(
                dest="action", metavar="action", required=True
            )
            for action, (required, optional) in actions.items():
                action_parser = action_parsers.add_parser(action)
                for name in required + optional:
                    flags, kwargs = FLAGS[name]
                    kwargs = dict(kwargs)
                    if name in required:
                        kwargs["required"] = True
                    if name == "max_shells":
                        kwargs["default"] = settings.EHRFAN_MAX_SHELLS
                    action_parser.add_argument(*flags, **kwargs)

    def run_from_argv(self, argv):
        """
        Parse ``argv`` and run it, exiting with the command's status.

        Argument errors are reported as ``MALFORMED_INPUT`` JSON rather
        than argparse usage text.
        """
        parser = self.create_parser(argv[0], argv[1])
        try:
            options = vars(parser.parse_args(argv[2:]))
        except CommandError as exc:
            message = str(exc).removeprefix("Error: ")
            self.report(MalformedInputError(message))
            sys.exit(EXIT_MALFORMED)
        args = options.pop("args", ())
        try:
            self.execute(*args, **options)
        except CommandError as exc:
            sys.exit(exc.returncode)

    def handle(self, *args, **options):
        group, action = options["group"], options["action"]
        handler = getattr(self, f"{group}_{action.replace('-', '_')}")
        try:
            result = handler(options)
        except serializers.ValidationError as exc:
            error = MalformedInputError(
                "invalid input document", witness=exc.detail
            )
            self.report(error)
            raise CommandError("malformed input", returncode=EXIT_MALFORMED)
        except MalformedInputError as exc:
            self.report(exc)
            raise CommandError(exc.detail, returncode=EXIT_MALFORMED)
        except EhrfanError as exc:
            self.report(exc)
            raise CommandError(exc.detail, returncode=EXIT_DOMAIN_ERROR)
        logger.info("%s %s: %s", group, action, result)
        self.emit(result)

    # output

    def emit(self, data) -> None:
        self.stdout.write(CanonicalJSONRenderer().render(data).decode())

    def report(self, error: EhrfanError) -> None:
        logger.warning("%s", error)
        self.emit({"error": error.as_dict()})

    # input

    def load(self, path: str):
        try:
            return json.loads(Path(path).read_text())
        except OSError as exc:
            raise MalformedInputError(
                f"cannot read {path}: {exc.strerror}", witness=path
            )
        except json.JSONDecodeError as exc:
            raise MalformedInputError(
                f"{path} is not JSON: {exc.msg}",
                witness={"file": path, "line": exc.lineno},
            )

    def read(self, serializer_class, path: str, **context):
        serializer = serializer_class(data=self.load(path), context=context)
        serializer.is_valid(raise_exception=True)
        return serializer

    def read_fan(self, options, key: str = "fan", **kwargs):
        return self.read(FanSerializer, options[key]).build(**kwargs)

    def read_pl(self, fan, options, key: str = "pl"):
        return self.read(PLSerializer, options[key], fan=fan).build()

    # fan

    def fan_validate(self, options):
        fan = self.read_fan(options, require_unimodular=False)
        return {
            "valid": True,
            "ambient_dim": fan.ambient_dim,
            "dim": fan.dim,
            "rays": len(fan.rays),
            "maximal_cones": len([c for c in fan.maximal_cones if c]),
            "pure": fan.is_pure,
            "unimodular": fan.is_unimodular,
            "complete": is_complete(fan),
        }

    def fan_star(self, options):
        star = star_fan(self.read_fan(options), options["cone"])
        return {"fan": star.fan.to_json(), "ray_lift": list(star.ray_lift)}

    def fan_subdivide(self, options):
        fine, new_ray = stellar_subdivision(
            self.read_fan(options), options["cone"]
        )
        return {"fan": fine.to_json(), "new_ray": new_ray}

    def fan_product(self, options):
        first = self.read_fan(options)
        second = self.read_fan(options, "fan2")
        return {"fan": product_fan(first, second).to_json()}

    def fan_balanced(self, options):
        return is_balanced(self.read_fan(options)).to_json()

    # ehrhart

    def ehrhart_check(self, options):
        outcome = is_ehrhart(self.read_fan(options))
        if isinstance(outcome, EhrhartFailure):
            raise outcome.as_error()
        return outcome.to_json()

    def ehrhart_poly(self, options):
        polynomial = ehrhart_polynomial(self.read_fan(options))
        return {"polynomial": polynomial.to_json()}

    def ehrhart_eval(self, options):
        f = self.read_pl(self.read_fan(options), options)
        return {
            "chi": eval_chi(
                f,
                acknowledge_choice_dependence=options[
                    "acknowledge_choice_dependence"
                ],
            )
        }

    def volume_eval(self, options):
        f = self.read_pl(self.read_fan(options), options)
        return {"volume": eval_volume(f)}

    # polytope

    def polytope_count(self, options):
        if options["polytope"]:
            if options["fan"] or options["pl"]:
                raise MalformedInputError(
                    "give either --polytope or --fan with --pl"
                )
            polytope = self.read(PolytopeSerializer, options["polytope"])
            polytope = polytope.build()
        elif options["fan"] and options["pl"]:
            f = self.read_pl(self.read_fan(options), options)
            polytope, _ = polytope_from_pl(f)
        else:
            raise MalformedInputError(
                "polytope count needs --polytope or --fan with --pl"
            )
        return {
            "count": count_lattice_points(
                polytope, interior=options["interior"]
            ),
            "interior": options["interior"],
        }

    def polytope_altsum(self, options):
        f = self.read_pl(self.read_fan(options), options)
        return {
            "chi": chi_via_alternating_sum(
                f, max_shells=options["max_shells"]
            )
        }

    # matroid

    def matroid_bergman(self, options):
        matroid = self.read(MatroidSerializer, options["matroid"]).build()
        bergman = bergman_fan(matroid)
        return {
            "fan": bergman.fan.to_json(),
            "flats": [sorted(flat) for flat in bergman.flats],
        }

    def matroid_chi(self, options):
        matroid = self.read(MatroidSerializer, options["matroid"]).build()
        f = self.read_pl(bergman_fan(matroid).fan, options)
        return {
            "chi": chi_matroid(matroid, f, fast_path=not options["slow_path"])
        }

    # piecewise-exponential elements

    def read_pe(self, options):
        fan = self.read_fan(options)
        return self.read(PESerializer, options["pe"], fan=fan).build()

    def pe_normalform(self, options):
        return pe_normal_form(self.read_pe(options)).to_json()

    def pe_chi(self, options):
        return {"chi": chi_tilde(self.read_pe(options))}

    def pe_verify_maxmin(self, options):
        fan = self.read_fan(options)
        f = self.read_pl(fan, options)
        g = self.read_pl(fan, options, "pl2")
        return {"holds": verify_maxmin_relation(f, g)}
