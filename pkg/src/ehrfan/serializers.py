"""
Input documents of the command line.

The serializers only check the shape of a document (keys, integer
entries, list nesting). Mathematical validation stays with the library,
so that a well-formed but invalid fan is reported with its own error code.
"""

from rest_framework import serializers

from fans.fan import Fan, fan_from_json
from matroids.matroid import Matroid, matroid_from_json
from pering.elements import PEElement
from plfunctions.functions import PLFunction
from polytopes.lattice_points import HPolytope


def integer_list(**kwargs) -> serializers.ListField:
    return serializers.ListField(child=serializers.IntegerField(), **kwargs)


class FanSerializer(serializers.Serializer):
    """
    Validation:
    - ``ambient_dim`` is a nonnegative integer.
    - ``rays`` is a list of integer vectors of length ``ambient_dim``.
    - ``maximal_cones`` is a list of lists of nonnegative ray indices.

    Notes:
    - Primitivity, simpliciality, unimodularity and the intersection
      condition are checked when the fan is built.
    """

    ambient_dim = serializers.IntegerField(min_value=0)
    rays = serializers.ListField(child=integer_list(), allow_empty=True)
    maximal_cones = serializers.ListField(
        child=serializers.ListField(
            child=serializers.IntegerField(min_value=0), allow_empty=True
        ),
        allow_empty=True,
    )

    def validate(self, attrs):
        mismatched = [
            index
            for index, ray in enumerate(attrs["rays"])
            if len(ray) != attrs["ambient_dim"]
        ]
        if mismatched:
            raise serializers.ValidationError(
                {
                    "rays": f"rays {mismatched} do not have "
                    f"{attrs['ambient_dim']} entries"
                }
            )
        return attrs

    def build(self, require_unimodular: bool = True) -> Fan:
        return fan_from_json(
            self.validated_data, require_unimodular=require_unimodular
        )


class PLSerializer(serializers.Serializer):
    """
    Validation:
    - ``values`` holds one integer per ray of the fan it is read against.
    """

    values = integer_list(allow_empty=True)

    def validate_values(self, value):
        fan = self.context["fan"]
        if len(value) != len(fan.rays):
            raise serializers.ValidationError(
                f"expected {len(fan.rays)} values, got {len(value)}"
            )
        return value

    def build(self) -> PLFunction:
        return PLFunction(self.context["fan"], self.validated_data["values"])


class PETermSerializer(serializers.Serializer):
    c = serializers.IntegerField()
    values = integer_list(allow_empty=True)


class PESerializer(serializers.Serializer):
    """
    Validation:
    - every term carries an integer coefficient ``c`` and one value per
      ray of the fan it is read against.
    """

    terms = PETermSerializer(many=True, allow_empty=True)

    def validate_terms(self, value):
        rays = len(self.context["fan"].rays)
        for position, term in enumerate(value):
            if len(term["values"]) != rays:
                raise serializers.ValidationError(
                    f"term {position}: expected {rays} values"
                )
        return value

    def build(self) -> PEElement:
        return PEElement.from_json(self.context["fan"], self.validated_data)


class InequalitySerializer(serializers.Serializer):
    normal = integer_list(allow_empty=False)
    bound = serializers.IntegerField()


class PolytopeSerializer(serializers.Serializer):
    """
    Validation:
    - at least one inequality; all normals have the same length.
    """

    inequalities = InequalitySerializer(many=True, allow_empty=False)

    def validate_inequalities(self, value):
        if len({len(row["normal"]) for row in value}) != 1:
            raise serializers.ValidationError(
                "normals have different lengths"
            )
        return value

    def build(self) -> HPolytope:
        return HPolytope.from_json(self.validated_data)


class MatroidSerializer(serializers.Serializer):
    """
    Validation:
    - ``type`` is one of ``uniform``, ``bases`` or ``graphic`` and the keys
      that type needs are present.

    Notes:
    - The matroid axioms are checked by ``matroid_from_json``.
    """

    REQUIRED = {
        "uniform": ("rank", "n"),
        "bases": ("ground_size", "bases"),
        "graphic": ("vertices", "edges"),
    }

    type = serializers.ChoiceField(choices=sorted(REQUIRED))
    rank = serializers.IntegerField(min_value=0, required=False)
    n = serializers.IntegerField(min_value=0, required=False)
    ground_size = serializers.IntegerField(min_value=0, required=False)
    bases = serializers.ListField(
        child=integer_list(allow_empty=True), required=False
    )
    vertices = serializers.IntegerField(min_value=0, required=False)
    edges = serializers.ListField(
        child=serializers.ListField(
            child=serializers.IntegerField(min_value=0),
            min_length=2,
            max_length=2,
        ),
        required=False,
    )

    def validate(self, attrs):
        missing = [
            key for key in self.REQUIRED[attrs["type"]] if key not in attrs
        ]
        if missing:
            raise serializers.ValidationError(
                {key: "This field is required." for key in missing}
            )
        return attrs

    def build(self) -> Matroid:
        return matroid_from_json(dict(self.validated_data))
