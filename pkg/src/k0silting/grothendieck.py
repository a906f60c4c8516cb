"""Free abelian groups on summand labels, finitely presented abelian groups, and a
seeded sampler that presents K_0 of the homotopy category by cone relations."""

from __future__ import annotations

import logging
import random
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .exactmath import IntMatrix, smith_normal_form
from .homotopycat import (
    ComplexMap,
    ProjComplex,
    cone,
    find_isomorphism,
    hom_space,
    minimal_form,
    random_chain_map,
    shift,
)
from .pathalgebra import Algebra

log = logging.getLogger(__name__)


class K0Element(Mapping[str, int]):
    """A finitely supported integer vector over summand labels (an element of K_0^sp)."""

    __slots__ = ("_c",)

    def __init__(self, coefficients: Mapping[str, int] | Iterable[tuple[str, int]] = ()):
        items = coefficients.items() if isinstance(coefficients, Mapping) else coefficients
        c: dict[str, int] = {}
        for k, v in items:
            c[k] = c.get(k, 0) + int(v)
        self._c = {k: v for k, v in c.items() if v}

    @classmethod
    def of(cls, label: str, n: int = 1) -> "K0Element":
        return cls({label: n})

    @classmethod
    def from_labels(cls, labels: Iterable[str], sign: int = 1) -> "K0Element":
        out: dict[str, int] = {}
        for lab in labels:
            out[lab] = out.get(lab, 0) + sign
        return cls(out)

    def __getitem__(self, k):
        return self._c.get(k, 0)

    def __iter__(self):
        return iter(self._c)

    def __len__(self):
        return len(self._c)

    def __add__(self, other: Mapping[str, int]) -> "K0Element":
        return K0Element(list(self._c.items()) + list(other.items()))

    def __neg__(self) -> "K0Element":
        return K0Element({k: -v for k, v in self._c.items()})

    def __sub__(self, other):
        return self + (-K0Element(other))

    def __mul__(self, n: int) -> "K0Element":
        return K0Element({k: n * v for k, v in self._c.items()})

    __rmul__ = __mul__

    def __eq__(self, other):
        if isinstance(other, Mapping):
            return self._c == {k: v for k, v in other.items() if v}
        return NotImplemented

    def __hash__(self):
        return hash(frozenset(self._c.items()))

    def is_zero(self) -> bool:
        return not self._c

    def vector(self, labels: Sequence[str]) -> list[int]:
        unknown = set(self._c) - set(labels)
        if unknown:
            raise KeyError(f"unknown labels {sorted(unknown)}")
        return [self._c.get(k, 0) for k in labels]

    def to_json(self) -> dict[str, int]:
        return dict(sorted(self._c.items()))

    def __str__(self):
        if not self._c:
            return "0"
        return ", ".join(f"{k}: {v:+d}" for k, v in self._c.items())

    def __repr__(self):
        return f"K0Element({self._c})"


@dataclass(frozen=True)
class GroupInvariants:
    rank: int
    torsion: tuple[int, ...] = ()

    def to_json(self, generators: Sequence[str] = ()) -> dict:
        return {"rank": self.rank, "torsion": list(self.torsion), "generators": list(generators)}

    def __str__(self):
        parts = [f"Z^{self.rank}"] + [f"Z/{t}" for t in self.torsion]
        return " + ".join(parts)


@dataclass
class AbelianGroupPresentation:
    generators: list[str]
    relations: list[list[int]] = field(default_factory=list)

    def __post_init__(self):
        for row in self.relations:
            if len(row) != len(self.generators):
                raise ValueError("relation row width must equal the generator count")

    def relation_matrix(self) -> IntMatrix:
        return IntMatrix.from_rows(self.relations, cols=len(self.generators))


def group_invariants(p: AbelianGroupPresentation) -> GroupInvariants:
    """Free rank and torsion factors of Z^generators / <relations> via Smith form."""
    snf = smith_normal_form(p.relation_matrix())
    nonzero = [d for d in snf.diagonal if d]
    return GroupInvariants(len(p.generators) - len(nonzero), tuple(d for d in nonzero if d > 1))


def quotient_group(labels: Sequence[str], subgroup: Iterable[Mapping[str, int]]) -> GroupInvariants:
    """Invariants of the free group on ``labels`` modulo the span of ``subgroup``."""
    labels = list(labels)
    rows = [K0Element(g).vector(labels) for g in subgroup]
    return group_invariants(AbelianGroupPresentation(labels, rows))


# --------------------------------------------------------------------------
# sampled presentation of K_0(K^b(proj))


@dataclass
class SamplerConfig:
    samples: int = 200
    seed: int = 0
    max_pool_size: int = 6
    iso_trials: int = 32
    shift_probability: float = 0.3
    zero_map_probability: float = 0.1


@dataclass
class SampledTriangle:
    """``Sigma^{-1} X' --f--> Y --> cone(f)``, recorded with its relation
    ``[cone(f)] - [X'] - [Y]`` (``X' = Sigma X``)."""

    suspended_source: ProjComplex
    target: ProjComplex
    map: ComplexMap
    cone: ProjComplex
    relation: dict[int, int]


@dataclass
class SampledPresentation:
    presentation: AbelianGroupPresentation
    triangles: list[SampledTriangle]
    representatives: list[ProjComplex]
    unknown_verdicts: int = 0

    @property
    def invariants(self) -> GroupInvariants:
        return group_invariants(self.presentation)


class _Buckets:
    def __init__(self, trials: int):
        self.reps: list[ProjComplex] = []
        self.by_key: dict[tuple, list[int]] = {}
        self.trials = trials
        self.unknown = 0

    def index(self, x: ProjComplex) -> int | None:
        m = minimal_form(x)
        if m.is_literally_zero():
            return None
        key = m.graded_labels()
        for idx in self.by_key.get(key, ()):
            verdict, _ = find_isomorphism(m, self.reps[idx], self.trials)
            if verdict == "iso":
                return idx
            if verdict == "unknown":
                self.unknown += 1
                log.info("iso_test returned unknown for %r vs bucket %d; opening a new bucket", m, idx)
        self.reps.append(m)
        self.by_key.setdefault(key, []).append(len(self.reps) - 1)
        return len(self.reps) - 1


def _label(x: ProjComplex) -> str:
    return " ".join(f"{n}:P{v}x{k}" if k > 1 else f"{n}:P{v}" for n, v, k in x.graded_labels())


def sampled_k0_presentation(algebra: Algebra, config: SamplerConfig | None = None) -> SampledPresentation:
    """Present K_0 by cone relations over a pool grown from the stalk projectives.

    Each step picks ``X'`` and ``Y`` from the pool and a random chain map
    ``f: Sigma^{-1} X' -> Y`` (or an identity, producing a shift relation), and
    records ``[cone f] - [X'] - [Y]``.  Objects are bucketed up to isomorphism.
    """
    cfg = config or SamplerConfig()
    rng = random.Random(cfg.seed)
    buckets = _Buckets(cfg.iso_trials)
    pool: list[int] = []
    for v in algebra.vertices:
        idx = buckets.index(ProjComplex.stalk(algebra, v))
        pool.append(idx)
    triangles: list[SampledTriangle] = []
    for _ in range(cfg.samples):
        xp = buckets.reps[rng.choice(pool)]
        u = rng.random()
        if u < cfg.shift_probability / 2:
            # Sigma^{-1} X' --id--> Sigma^{-1} X': relation -[X'] - [Sigma^{-1} X']
            x = shift(xp, -1)
            y = x
            f = ComplexMap.identity(x)
        elif u < cfg.shift_probability:
            # X' itself as source: the cone of id on X' relates X' and Sigma X'
            x = xp
            xp = shift(xp, 1)
            y = x
            f = ComplexMap.identity(x)
        else:
            x = shift(xp, -1)
            y = buckets.reps[rng.choice(pool)]
            if u < cfg.shift_probability + cfg.zero_map_probability:
                f = ComplexMap.zero(x, y)
            else:
                f = random_chain_map(x, y, rng, hom_space(x, y))
        z = minimal_form(cone(f).Z)
        rel: dict[int, int] = {}
        for obj, sign in ((z, 1), (xp, -1), (y, -1)):
            idx = buckets.index(obj)
            if idx is not None:
                rel[idx] = rel.get(idx, 0) + sign
                if idx not in pool and obj.size() <= cfg.max_pool_size:
                    pool.append(idx)
        triangles.append(SampledTriangle(xp, y, f, z, {k: v for k, v in rel.items() if v}))
    gens = [_label(r) for r in buckets.reps]
    seen: dict[str, int] = {}
    for i, g in enumerate(gens):
        seen[g] = seen.get(g, 0) + 1
        if seen[g] > 1:
            gens[i] = f"{g} #{seen[g]}"
    rows = [[t.relation.get(i, 0) for i in range(len(gens))] for t in triangles]
    pres = AbelianGroupPresentation(gens, rows)
    return SampledPresentation(pres, triangles, buckets.reps, buckets.unknown)
