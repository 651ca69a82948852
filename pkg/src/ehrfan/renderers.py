from collections.abc import Mapping, Set
from fractions import Fraction

from rest_framework.compat import SHORT_SEPARATORS
from rest_framework.renderers import JSONRenderer
from rest_framework.utils import json

INT64_MIN = -(2**63)
INT64_MAX = 2**63 - 1


def widen(data):
    """Integers outside the signed 64-bit range become decimal strings."""
    if isinstance(data, bool) or data is None or isinstance(data, str):
        return data
    if isinstance(data, int):
        return data if INT64_MIN <= data <= INT64_MAX else str(data)
    if isinstance(data, Fraction):
        return str(data)
    if isinstance(data, Mapping):
        return {str(key): widen(value) for key, value in data.items()}
    if isinstance(data, Set):
        return [widen(value) for value in sorted(data)]
    if isinstance(data, (list, tuple)):
        return [widen(value) for value in data]
    return data


class CanonicalJSONRenderer(JSONRenderer):
    """Compact JSON with sorted keys, byte-for-byte stable."""

    def render(self, data, accepted_media_type=None, renderer_context=None):
        return json.dumps(
            widen(data),
            cls=self.encoder_class,
            sort_keys=True,
            separators=SHORT_SEPARATORS,
            ensure_ascii=self.ensure_ascii,
            allow_nan=False,
        ).encode()
