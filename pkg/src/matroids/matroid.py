"""
Matroids on the ground set ``{0, ..., k - 1}`` given by a rank oracle.

Three backings are supported: uniform matroids, explicit bases and graphs
(edges are the elements). Flats are enumerated eagerly from closures of all
subsets, which keeps the module to desk-scale ground sets.
"""

import hashlib
import itertools
import logging
import random
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Iterable, Sequence

from django.conf import settings

from core.exceptions import (
    InvalidMatroidError,
    MalformedInputError,
    NotAFlatError,
)

logger = logging.getLogger(__name__)

Flat = frozenset[int]
RankFunction = Callable[[frozenset[int]], int]


def flat_order(flat: Iterable[int]) -> tuple[int, tuple[int, ...]]:
    """Sort key of flats: cardinality, then lexicographic."""
    flat = tuple(sorted(flat))
    return len(flat), flat


class Matroid:
    def __init__(
        self, ground_size: int, rank_function: RankFunction, backing: dict
    ):
        if ground_size < 0:
            raise InvalidMatroidError(witness={"ground_size": ground_size})
        self.ground_size = ground_size
        self.backing = backing
        self._rank_function = rank_function
        self._ranks: dict[frozenset[int], int] = {}

    def __repr__(self):
        return f"Matroid(ground_size={self.ground_size}, rank={self.rank()})"

    def __eq__(self, other):
        return isinstance(other, Matroid) and self.key == other.key

    def __hash__(self):
        return hash(self.key)

    @classmethod
    def uniform(cls, rank: int, ground_size: int) -> "Matroid":
        if not 0 <= rank <= ground_size:
            raise InvalidMatroidError(
                "rank must lie between 0 and the ground size",
                witness={"rank": rank, "n": ground_size},
            )
        return cls(
            ground_size,
            lambda subset: min(len(subset), rank),
            {"type": "uniform", "rank": rank, "n": ground_size},
        )

    @classmethod
    def from_bases(
        cls, ground_size: int, bases: Iterable[Iterable[int]]
    ) -> "Matroid":
        """
        Validation:
        - at least one basis, all of the same size, within the ground set
        - the basis exchange axiom
        """
        bases = sorted({frozenset(b) for b in bases}, key=flat_order)
        if not bases:
            raise InvalidMatroidError("the basis list is empty")
        size = len(bases[0])
        for basis in bases:
            if len(basis) != size:
                raise InvalidMatroidError(
                    "bases of different sizes",
                    witness=[sorted(bases[0]), sorted(basis)],
                )
            if any(not 0 <= e < ground_size for e in basis):
                raise InvalidMatroidError(
                    "basis element outside the ground set",
                    witness=sorted(basis),
                )
        known = set(bases)
        for first, second in itertools.permutations(bases, 2):
            for x in first - second:
                if not any(
                    (first - {x}) | {y} in known for y in second - first
                ):
                    raise InvalidMatroidError(
                        "basis exchange fails",
                        witness={
                            "bases": [sorted(first), sorted(second)],
                            "element": x,
                        },
                    )
        return cls(
            ground_size,
            lambda subset: max(len(subset & b) for b in bases),
            {
                "type": "bases",
                "ground_size": ground_size,
                "bases": [sorted(b) for b in bases],
            },
        )

    @classmethod
    def graphic(
        cls, vertices: int, edges: Sequence[Sequence[int]]
    ) -> "Matroid":
        edges = [tuple(e) for e in edges]
        for edge in edges:
            if len(edge) != 2 or any(not 0 <= v < vertices for v in edge):
                raise InvalidMatroidError(
                    "edge outside the vertex set", witness=list(edge)
                )

        def rank(subset: frozenset[int]) -> int:
            parent = list(range(vertices))

            def find(v):
                while parent[v] != v:
                    parent[v] = parent[parent[v]]
                    v = parent[v]
                return v

            merged = 0
            for e in subset:
                a, b = (find(v) for v in edges[e])
                if a != b:
                    parent[a] = b
                    merged += 1
            return merged

        return cls(
            len(edges),
            rank,
            {
                "type": "graphic",
                "vertices": vertices,
                "edges": [list(e) for e in edges],
            },
        )

    @property
    def ground_set(self) -> Flat:
        return frozenset(range(self.ground_size))

    @cached_property
    def key(self) -> str:
        ranks = ",".join(
            str(self.rank(s))
            for size in range(self.ground_size + 1)
            for s in itertools.combinations(range(self.ground_size), size)
        )
        return hashlib.sha1(
            f"{self.ground_size}:{ranks}".encode()
        ).hexdigest()

    def rank(self, subset: Iterable[int] | None = None) -> int:
        subset = self.ground_set if subset is None else frozenset(subset)
        value = self._ranks.get(subset)
        if value is None:
            value = self._rank_function(subset)
            self._ranks[subset] = value
        return value

    def validate(self) -> "Matroid":
        """Spot-check the rank axioms on random pairs of subsets."""
        if self.rank(()) != 0:
            raise InvalidMatroidError("rank of the empty set is not zero")
        rng = random.Random(settings.EHRFAN_MATROID_SEED)
        elements = list(range(self.ground_size))
        for _ in range(settings.EHRFAN_MATROID_SPOT_CHECKS):
            a = frozenset(e for e in elements if rng.random() < 0.5)
            b = frozenset(e for e in elements if rng.random() < 0.5)
            if self.rank(a | b) + self.rank(a & b) > self.rank(a) + self.rank(
                b
            ):
                raise InvalidMatroidError(
                    "rank is not submodular",
                    witness=[sorted(a), sorted(b)],
                )
            if self.rank(a & b) > self.rank(a) or self.rank(a) > len(a):
                raise InvalidMatroidError(
                    "rank is not monotone and bounded", witness=sorted(a)
                )
        return self

    def closure(self, subset: Iterable[int]) -> Flat:
        subset = frozenset(subset)
        r = self.rank(subset)
        return subset | {
            e
            for e in range(self.ground_size)
            if e not in subset and self.rank(subset | {e}) == r
        }

    def is_flat(self, subset: Iterable[int]) -> bool:
        subset = frozenset(subset)
        return self.closure(subset) == subset

    @cached_property
    def flats(self) -> tuple[Flat, ...]:
        found = {
            self.closure(s)
            for size in range(self.ground_size + 1)
            for s in itertools.combinations(range(self.ground_size), size)
        }
        return tuple(sorted(found, key=flat_order))

    @cached_property
    def proper_flats(self) -> tuple[Flat, ...]:
        return tuple(f for f in self.flats if f and f != self.ground_set)

    def loops(self) -> Flat:
        return frozenset(
            e for e in range(self.ground_size) if self.rank({e}) == 0
        )

    def is_loopless(self) -> bool:
        return not self.loops()

    def _require_proper_flat(self, flat: Iterable[int]) -> list[int]:
        flat = frozenset(flat)
        if flat not in self.proper_flats:
            raise NotAFlatError(witness=sorted(flat))
        return sorted(flat)

    def restriction(self, flat: Iterable[int]) -> "Matroid":
        """``M^F`` on ``F``, relabelled by sorted order."""
        elements = self._require_proper_flat(flat)
        return Matroid(
            len(elements),
            lambda subset: self.rank(elements[i] for i in subset),
            {"type": "restriction", "flat": elements},
        )

    def contraction(self, flat: Iterable[int]) -> "Matroid":
        """``M_F`` on ``E - F``, relabelled by sorted order."""
        contracted = self._require_proper_flat(flat)
        rest = sorted(self.ground_set - set(contracted))
        base = self.rank(contracted)

        def rank(subset: frozenset[int]) -> int:
            lifted = {rest[i] for i in subset} | set(contracted)
            return self.rank(lifted) - base

        return Matroid(
            len(rest), rank, {"type": "contraction", "flat": contracted}
        )

    def maximal_chains(self) -> list["FlatChain"]:
        """Maximal chains of proper flats, grown rank by rank."""
        top = self.rank() - 1
        by_rank: dict[int, list[Flat]] = {}
        for flat in self.proper_flats:
            by_rank.setdefault(self.rank(flat), []).append(flat)
        chains = [(flat,) for flat in by_rank.get(1, [])]
        for r in range(2, top + 1):
            chains = [
                chain + (flat,)
                for chain in chains
                for flat in by_rank.get(r, [])
                if chain[-1] < flat
            ]
        return [FlatChain(chain) for chain in chains]


@dataclass(frozen=True)
class FlatChain:
    flats: tuple[Flat, ...]

    def __post_init__(self):
        for smaller, larger in zip(self.flats, self.flats[1:]):
            if not smaller < larger:
                raise NotAFlatError(
                    "chain is not strictly increasing",
                    witness=[sorted(smaller), sorted(larger)],
                )


def matroid_from_json(document: dict) -> Matroid:
    kind = document.get("type")
    try:
        if kind == "uniform":
            matroid = Matroid.uniform(
                int(document["rank"]), int(document["n"])
            )
        elif kind == "bases":
            matroid = Matroid.from_bases(
                int(document["ground_size"]), document["bases"]
            )
        elif kind == "graphic":
            matroid = Matroid.graphic(
                int(document["vertices"]), document["edges"]
            )
        else:
            raise MalformedInputError(
                "unknown matroid type", witness={"type": kind}
            )
    except (KeyError, TypeError, ValueError) as exc:
        raise MalformedInputError(str(exc), witness=document) from exc
    return matroid.validate()
