"""Presilting and d-rigid collections, filtrations by shifted summands, and the
alternating-sum invariant gamma built from them.

A filtration of ``X`` of length ``n`` is a tower ``0 = X_n -> ... -> X_1 -> X_0 = X``
with triangles ``X_{i+1} -> X_i -> Sigma^{-i} M_i -> Sigma X_{i+1}`` and factors
``M_i`` that are formal direct sums of the collection's summands.  It is computed
by iterated universal left approximations: ``M_i`` stacks a basis of
``Hom(X_i, Sigma^{-i} T_j)`` for every summand ``T_j``, and ``X_{i+1}`` is the
desuspended cone of the assembled map.
"""

from __future__ import annotations

import json
import random
from collections import Counter
from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping, Sequence

from .grothendieck import (
    GroupInvariants,
    K0Element,
    SampledPresentation,
    SamplerConfig,
    quotient_group,
    sampled_k0_presentation,
)
from .homotopycat import (
    ComplexMap,
    ProjComplex,
    ProjMap,
    Triangle,
    complement_basis,
    cone,
    direct_sum,
    hom_space,
    minimal_form,
    shift,
)
from .exactmath import FieldMatrix
from .pathalgebra import Algebra


class SiltingError(Exception):
    """Base class for failures of the filtration engine."""


class NotInF(SiltingError):
    """No filtration was found within the allowed number of stages."""


class PreconditionError(SiltingError):
    """An operation was called on a collection lacking the required verification."""


class CertificateError(SiltingError):
    """The normalizing-shift search for a class exceeded its bound."""


# --------------------------------------------------------------------------
# collections


@dataclass
class SiltingCollection:
    """Named indecomposable summands ``T_j`` of ``M = add(T)``.

    ``d`` is the rigidity parameter; ``None`` means the collection is declared
    presilting.
    """

    algebra: Algebra
    summands: dict[str, ProjComplex]
    d: int | None = None
    verified_presilting: bool = False
    verified_d_rigid: bool = False

    def __post_init__(self):
        if self.d is not None and self.d < 2:
            raise ValueError("rigidity parameter d must be >= 2")
        normalized = {}
        for name, t in self.summands.items():
            if t.algebra is not self.algebra:
                raise ValueError(f"summand {name} lives over a different algebra")
            m = minimal_form(t)
            if m.is_literally_zero():
                raise ValueError(f"summand {name} is zero in the homotopy category")
            normalized[name] = m
        self.summands = normalized

    @property
    def labels(self) -> list[str]:
        return list(self.summands)

    @property
    def presilting(self) -> bool:
        return self.d is None

    def stalk_labels(self) -> dict[str, str] | None:
        """vertex -> label when the collection is exactly the stalk projectives in degree 0."""
        out: dict[str, str] = {}
        for name, t in self.summands.items():
            if list(t.terms) != [0] or len(t.terms[0]) != 1:
                return None
            out[t.terms[0][0]] = name
        if len(out) != len(self.summands) or set(out) != set(self.algebra.vertices):
            return None
        return out

    def support_bounds(self) -> tuple[int, int]:
        lows = [t.support()[0] for t in self.summands.values()]
        highs = [t.support()[1] for t in self.summands.values()]
        return min(lows), max(highs)

    def k_max(self) -> int:
        """Past this shift every ``Hom(T_i, Sigma^k T_j)`` vanishes for degree reasons."""
        k = max(tj.support()[1] - ti.support()[0] for ti in self.summands.values() for tj in self.summands.values())
        return max(k, 1)

    def max_stage_length(self) -> int | None:
        """The longest filtration the collection's verification licenses (None = unbounded)."""
        if self.verified_presilting:
            return None
        if self.verified_d_rigid:
            return self.d
        raise PreconditionError("collection unverified: run verify_hom_vanishing first")

    def to_json(self) -> dict:
        return {
            "d": "presilting" if self.d is None else self.d,
            "summands": {k: t.to_json() for k, t in self.summands.items()},
        }

    @classmethod
    def from_json(cls, algebra: Algebra, data: Mapping) -> "SiltingCollection":
        d = data.get("d", "presilting")
        d = None if d in ("presilting", None) else int(d)
        summands = {str(k): ProjComplex.from_json(algebra, v) for k, v in data["summands"].items()}
        return cls(algebra, summands, d)


def load_collection(algebra: Algebra, source) -> SiltingCollection:
    if isinstance(source, Mapping):
        return SiltingCollection.from_json(algebra, source)
    with open(str(source), encoding="utf-8") as fh:
        return SiltingCollection.from_json(algebra, json.load(fh))


def stalk_collection(algebra: Algebra) -> SiltingCollection:
    """The stalk projectives ``P_v`` in degree 0, labelled ``P<v>``; presilting by degree reasons."""
    m = SiltingCollection(algebra, {f"P{v}": ProjComplex.stalk(algebra, v) for v in algebra.vertices})
    return verify_hom_vanishing(m).collection


# --------------------------------------------------------------------------
# Hom vanishing


@dataclass
class HomVanishingReport:
    collection: SiltingCollection
    shifts: list[int]
    dimensions: dict[tuple[str, str, int], int]
    passed: bool

    @property
    def nonzero(self) -> list[tuple[str, str, int, int]]:
        return [(a, b, k, dim) for (a, b, k), dim in self.dimensions.items() if dim]

    @property
    def first_failure(self) -> int | None:
        ks = [k for (_, _, k), dim in self.dimensions.items() if dim]
        return min(ks) if ks else None

    def to_json(self) -> dict:
        return {
            "shifts": self.shifts,
            "passed": self.passed,
            "first_failing_shift": self.first_failure,
            "nonzero": [{"source": a, "target": b, "shift": k, "dim": dim} for a, b, k, dim in self.nonzero],
            "verified_presilting": self.collection.verified_presilting,
            "verified_d_rigid": self.collection.verified_d_rigid,
        }


def verify_hom_vanishing(m: SiltingCollection, shifts: Iterable[int] | None = None) -> HomVanishingReport:
    """Compute ``dim Hom(T_i, Sigma^k T_j)`` for all pairs and shifts; returns flags set accordingly.

    Default shifts: ``1..k_max`` for presilting declarations, ``1..d-1`` for d-rigid ones.
    """
    if shifts is None:
        shifts = range(1, m.k_max() + 1) if m.d is None else range(1, m.d)
    shifts = sorted(set(shifts))
    dims = {}
    for k in shifts:
        for a, ta in m.summands.items():
            for b, tb in m.summands.items():
                dims[(a, b, k)] = hom_space(ta, shift(tb, k)).dimension
    passed = not any(dims.values())
    covered = set(shifts)
    presilting_ok = passed and set(range(1, m.k_max() + 1)) <= covered
    rigid_ok = passed and m.d is not None and set(range(1, m.d)) <= covered
    updated = replace(m, verified_presilting=presilting_ok or m.verified_presilting,
                      verified_d_rigid=rigid_ok or m.verified_d_rigid)
    return HomVanishingReport(updated, shifts, dims, passed)


# --------------------------------------------------------------------------
# filtrations


def fiber_triangle(f: ComplexMap) -> Triangle:
    """``Sigma^{-1} cone(f) -> X --f--> Y -> cone(f)``: the cone triangle rotated backwards."""
    t = cone(f)
    x, y, c = f.source, f.target, t.Z
    fib = shift(c, -1)
    alg = x.algebra
    # (Sigma^{-1} C)^n = X^n + Y^{n-1}
    a = ComplexMap(fib, x, {n: ProjMap.block(alg, [x.term(n)], [x.term(n), y.term(n - 1)],
                                             [[-ProjMap.identity(alg, x.term(n)), None]]) for n in fib.terms})
    h_ba = ComplexMap(fib, y, {n: ProjMap.block(alg, [y.term(n - 1)], [x.term(n), y.term(n - 1)],
                                                [[None, ProjMap.identity(alg, y.term(n - 1))]]) for n in fib.terms}, -1)
    return Triangle(a, f, t.b, h_ba, t.ba_homotopy)


@dataclass
class Stage:
    index: int
    source: ProjComplex          # X_i (minimal)
    factor: list[str]            # labels of M_i, with multiplicity
    approximation: ComplexMap    # X_i -> Sigma^{-i} M_i
    triangle: Triangle           # X_{i+1} -> X_i -> Sigma^{-i} M_i -> Sigma X_{i+1}
    next: ProjComplex            # minimal form of X_{i+1}


@dataclass
class Filtration:
    x: ProjComplex
    stages: list[Stage]
    method: str = "minimal"

    @property
    def length(self) -> int:
        return len(self.stages)

    def factors(self) -> list[list[str]]:
        return [s.factor for s in self.stages]

    def extended(self, extra: int) -> "Filtration":
        """Append ``extra`` trivial stages (zero factors)."""
        stages = list(self.stages)
        alg = self.x.algebra
        zero = ProjComplex.zero(alg)
        for k in range(extra):
            f = ComplexMap.zero(zero, zero)
            stages.append(Stage(len(stages), zero, [], f, fiber_triangle(f), zero))
        return Filtration(self.x, stages, self.method + "+zeros")

    def verify(self, m: SiltingCollection) -> bool:
        """Structural invariants: X_0 = min(x), chained stages, factor objects, triangles, X_n = 0."""
        cur = minimal_form(self.x)
        for i, st in enumerate(self.stages):
            if st.index != i or st.source != cur:
                return False
            expected = direct_sum([shift(m.summands[lab], -i) for lab in st.factor], self.x.algebra)
            if st.approximation.target != expected or st.triangle.b is not st.approximation:
                return False
            if not st.triangle.verify():
                return False
            if st.next != minimal_form(st.triangle.X):
                return False
            cur = st.next
        return cur.is_literally_zero()

    def to_json(self) -> dict:
        return {
            "length": self.length,
            "method": self.method,
            "stages": [{"index": s.index, "factor": s.factor, "X_i": s.source.to_json()} for s in self.stages],
        }


def gamma(f: Filtration) -> K0Element:
    """Alternating sum of the factor classes."""
    total = K0Element()
    for st in f.stages:
        total = total + K0Element.from_labels(st.factor, -1 if st.index % 2 else 1)
    return total


def _assemble(x: ProjComplex, targets: list[ProjComplex], maps: list[ComplexMap]) -> tuple[ProjComplex, ComplexMap]:
    alg = x.algebra
    target = direct_sum(targets, alg)
    comps = {}
    for n in x.terms:
        grid = [[mp[n]] for mp in maps]
        if grid:
            comps[n] = ProjMap.block(alg, [t.term(n) for t in targets], [x.term(n)], grid)
    return target, ComplexMap(x, target, comps)


def default_max_len(x: ProjComplex, m: SiltingCollection) -> int:
    """Stage budget: twice the width plus slack, extended so that stage ``i`` can reach
    the top degree of ``x`` (``Sigma^{-i} T_j`` starts in degree ``i + min deg T_j``)."""
    mx = minimal_form(x)
    if mx.is_literally_zero():
        return 0
    lo, hi = mx.support()
    mlo, mhi = m.support_bounds()
    return max(2 * mx.width() + 2, hi - mlo + (mhi - mlo) + 2)


def _scalar_eigenvalue(f: ComplexMap):
    """The unique eigenvalue of the scalar parts of an endomorphism of an indecomposable."""
    field = f.algebra.field
    x = f.source
    for n, labels in x.terms.items():
        mat = f[n].scalar_matrix()
        size = len(labels)
        trace = sum((mat.entries[i * size + i] for i in range(size)), field.zero)
        inv = field(size)
        if inv:
            return trace / inv
    # every term size is divisible by the characteristic: search the prime field
    n, labels = next(iter(x.terms.items()))
    mat = f[n].scalar_matrix()
    for k in range(field.characteristic):
        size, lam = len(labels), field(k)
        shifted = FieldMatrix(size, size, tuple(
            e - lam if idx % (size + 1) == 0 else e for idx, e in enumerate(mat.entries)), field)
        power = shifted
        for _ in range(size - 1):
            power = power @ shifted
        if power.is_zero():
            return field(k)
    raise SiltingError("endomorphism has no eigenvalue in the prime field")


def radical_maps(m: SiltingCollection, source: str, target: str) -> list[ComplexMap]:
    """A spanning set of the radical ``rad(T_source, T_target)``.

    Summands are indecomposable and pairwise non-isomorphic, so the radical is all of
    ``Hom`` between distinct summands and the non-invertible endomorphisms otherwise.
    """
    key = (id(m), source, target)
    cached = _RADICAL_CACHE.get(key)
    if cached is not None and cached[0] is m:
        return cached[1]
    hs = hom_space(m.summands[source], m.summands[target])
    if source != target:
        out = list(hs.basis)
    else:
        lams = [_scalar_eigenvalue(b) for b in hs.basis]
        pivot = next((k for k, lam in enumerate(lams) if lam), None)
        if pivot is None:
            out = list(hs.basis)
        else:
            b0, l0 = hs.basis[pivot], lams[pivot]
            out = [b - b0.scale(lam / l0) for k, (b, lam) in enumerate(zip(hs.basis, lams)) if k != pivot]
    _RADICAL_CACHE[key] = (m, out)
    return out


_RADICAL_CACHE: dict = {}


def _approximation(x: ProjComplex, m: SiltingCollection, i: int, minimal: bool):
    """Triples ``(label, Sigma^{-i} T_j, map)`` assembling a left approximation of ``x``."""
    spaces = {lab: (shift(t, -i), hom_space(x, shift(t, -i))) for lab, t in m.summands.items()}
    for lab, (st, hs) in spaces.items():
        basis = hs.basis
        if minimal and basis:
            through = []
            for other, (_, ho) in spaces.items():
                for h in radical_maps(m, other, lab):
                    hi = h.shifted(-i)
                    through.extend(hi.compose(b) for b in ho.basis)
            basis = complement_basis(hs, through)
        for b in basis:
            yield lab, st, b


def extract_filtration(x: ProjComplex, m: SiltingCollection, max_len: int | None = None,
                       padding: Mapping[int, Sequence[str]] | None = None,
                       method: str = "auto") -> Filtration:
    """Filtration of ``x`` by ``Sigma^{-i}`` of the collection's summands.

    ``method`` is ``"minimal"`` (left approximations by generators of
    ``Hom(X_i, Sigma^{-i} M)`` modulo the radical of ``M``), ``"universal"``
    (every basis map, a non-minimal approximation), ``"truncation"`` (brutal
    truncation; stalk-projective collections only) or ``"auto"`` (truncation
    when applicable and no padding is requested, else minimal).
    ``padding`` maps a stage index to extra labels approximated by zero maps.

    Raises :class:`NotInF` when ``max_len`` stages do not reach zero.
    """
    licensed = m.max_stage_length()
    if max_len is None:
        max_len = default_max_len(x, m)
        if licensed is not None:
            max_len = min(max_len, licensed)
    elif licensed is not None and max_len > licensed:
        raise PreconditionError(f"max_len {max_len} exceeds d = {licensed} for a d-rigid collection")
    stalks = m.stalk_labels()
    if method == "auto":
        method = "truncation" if stalks is not None and not padding else "minimal"
    if method == "truncation":
        if stalks is None:
            raise PreconditionError("truncation needs the stalk-projective collection")
        return _truncation_filtration(x, m, stalks, max_len)
    if method not in ("minimal", "universal"):
        raise ValueError(f"unknown filtration method {method!r}")
    padding = padding or {}
    for labs in padding.values():
        for lab in labs:
            if lab not in m.summands:
                raise KeyError(f"unknown label {lab!r}")
    cur = minimal_form(x)
    stages: list[Stage] = []
    i = 0
    while not cur.is_literally_zero():
        if i >= max_len:
            raise NotInF(f"not in F within max_len={max_len}")
        targets, maps, labels = [], [], []
        for lab, st, b in _approximation(cur, m, i, method == "minimal"):
            targets.append(st)
            maps.append(b)
            labels.append(lab)
        for lab in padding.get(i, ()):
            st = shift(m.summands[lab], -i)
            targets.append(st)
            maps.append(ComplexMap.zero(cur, st))
            labels.append(lab)
        _, f = _assemble(cur, targets, maps)
        tri = fiber_triangle(f)
        nxt = minimal_form(tri.X)
        stages.append(Stage(i, cur, labels, f, tri, nxt))
        cur = nxt
        i += 1
    return Filtration(x, stages, method)


def _truncation_filtration(x: ProjComplex, m: SiltingCollection, stalks: Mapping[str, str],
                           max_len: int) -> Filtration:
    alg = x.algebra
    cur = minimal_form(x)
    s = cur.support()
    if s is not None and (s[0] < 0 or s[1] + 1 > max_len):
        raise NotInF(f"not in F within max_len={max_len}")
    stages = []
    for i in range(0 if s is None else s[1] + 1):
        labels = [stalks[v] for v in cur.term(i)]
        targets = [shift(m.summands[lab], -i) for lab in labels]
        maps = []
        for k, t in enumerate(targets):
            row = ProjMap.identity(alg, cur.term(i)).restrict([k], range(len(cur.term(i))))
            maps.append(ComplexMap(cur, t, {i: row}))
        _, f = _assemble(cur, targets, maps)
        tri = fiber_triangle(f)
        nxt = minimal_form(tri.X)
        stages.append(Stage(i, cur, labels, f, tri, nxt))
        cur = nxt
    return Filtration(x, stages, "truncation")


def truncation_gamma(x: ProjComplex, m: SiltingCollection) -> K0Element:
    """Closed form for the stalk collection: alternating sum of the minimal complex's labels."""
    stalks = m.stalk_labels()
    if stalks is None:
        raise PreconditionError("closed form needs the stalk-projective collection")
    total = K0Element()
    for n, vs in minimal_form(x).terms.items():
        total = total + K0Element.from_labels([stalks[v] for v in vs], -1 if n % 2 else 1)
    return total


def approximation_hom_vanishing(f: Filtration, m: SiltingCollection) -> bool:
    """``Hom(X, Sigma T_j) = 0 = Hom(X_1, T_j)`` for every summand."""
    x1 = f.stages[0].next if f.stages else f.x
    for t in m.summands.values():
        if hom_space(f.x, shift(t, 1)).dimension or hom_space(x1, t).dimension:
            return False
    return True


# --------------------------------------------------------------------------
# Jordan-Hoelder style comparison and the horseshoe check


@dataclass
class EquivalenceReport:
    gammas: dict[str, K0Element]
    equal: bool

    def to_json(self) -> dict:
        return {"equal": self.equal, "gammas": {k: v.to_json() for k, v in self.gammas.items()}}


def verify_filtration_equivalence(x: ProjComplex, m: SiltingCollection, trials: int = 3,
                                  rng: random.Random | None = None) -> EquivalenceReport:
    """Compare gamma over distinct filtrations: minimal, universal, truncation
    (stalks), zero-extended, and ``trials`` filtrations padded by a redundant summand."""
    rng = rng or random.Random(0)
    licensed = m.max_stage_length()
    roomy = default_max_len(x, m) + 4 if licensed is None else licensed
    base = extract_filtration(x, m, method="minimal")
    gammas = {"minimal": gamma(base), "zero-extended": gamma(base.extended(2))}
    gammas["universal"] = gamma(extract_filtration(x, m, max_len=roomy, method="universal"))
    if m.stalk_labels() is not None:
        gammas["truncation"] = gamma(extract_filtration(x, m, method="truncation"))
    for t in range(trials):
        if base.length == 0:
            break
        stage = rng.randrange(base.length)
        lab = rng.choice(m.labels)
        try:
            padded = extract_filtration(x, m, max_len=roomy, padding={stage: [lab]}, method="minimal")
        except NotInF:
            continue
        gammas[f"padded[{stage}:{lab}]#{t}"] = gamma(padded)
    values = list(gammas.values())
    return EquivalenceReport(gammas, all(v == values[0] for v in values))


@dataclass
class HorseshoeReport:
    checks: list[dict] = field(default_factory=list)
    tolerated: int = 0

    @property
    def passed(self) -> bool:
        return all(c["additive"] for c in self.checks)

    def to_json(self) -> dict:
        return {"passed": self.passed, "tolerated": self.tolerated, "checks": self.checks}


def extension(w: ComplexMap) -> ProjComplex:
    """``Y = Sigma^{-1} cone(w)`` for ``w: Z -> Sigma X``, sitting in ``X -> Y -> Z -> Sigma X``."""
    return shift(cone(w).Z, -1)


def verify_horseshoe(x: ProjComplex, z: ProjComplex, m: SiltingCollection, samples: int = 3,
                     rng: random.Random | None = None, max_len: int | None = None) -> HorseshoeReport:
    """gamma(Y) == gamma(X) + gamma(Z) for extensions ``X -> Y -> Z -> Sigma X`` given by
    zero, each basis map, and random combinations ``w: Z -> Sigma X``."""
    rng = rng or random.Random(0)
    report = HorseshoeReport()
    gx = gamma(extract_filtration(x, m, max_len=max_len))
    gz = gamma(extract_filtration(z, m, max_len=max_len))
    hs = hom_space(z, shift(x, 1))
    ws = [("zero", ComplexMap.zero(z, shift(x, 1)))]
    ws += [(f"basis{k}", b) for k, b in enumerate(hs.basis)]
    if hs.dimension:
        ws += [(f"random{k}", hs.combination([rng.choice((-2, -1, 1, 2)) for _ in range(hs.dimension)]))
               for k in range(samples)]
    for name, w in ws:
        y = extension(w)
        try:
            gy = gamma(extract_filtration(y, m, max_len=max_len))
        except NotInF:
            if m.verified_presilting:
                report.checks.append({"w": name, "additive": False, "error": "extension not in F"})
            else:
                report.tolerated += 1
            continue
        report.checks.append({"w": name, "additive": gy == gx + gz, "gamma_Y": gy.to_json()})
    return report


# --------------------------------------------------------------------------
# classes in K_0^sp and the generation certificate


@dataclass
class ClassResult:
    value: K0Element
    shift: int
    filtration: Filtration

    @property
    def sign(self) -> int:
        return -1 if self.shift % 2 else 1


def default_shift_bound(x: ProjComplex, m: SiltingCollection) -> int:
    mx = minimal_form(x)
    if mx.is_literally_zero():
        return 0
    lo, hi = mx.support()
    mlo, mhi = m.support_bounds()
    return max(0, mhi - lo) + (hi - lo) + (mhi - mlo) + 4


def class_in_k0sp(x: ProjComplex, m: SiltingCollection, bound: int | None = None,
                  method: str = "auto", start: int = 0) -> ClassResult:
    """``(-1)^n gamma(Sigma^{-n} x)`` for the least ``n >= start`` with ``Sigma^{-n} x`` filtered."""
    if not m.verified_presilting:
        raise PreconditionError("class_in_k0sp needs a verified presilting collection")
    bound = max(default_shift_bound(x, m), start) if bound is None else bound
    for n in range(start, bound + 1):
        xs = shift(x, -n)
        try:
            filt = extract_filtration(xs, m, method=method)
        except NotInF:
            continue
        g = gamma(filt)
        return ClassResult(-g if n % 2 else g, n, filt)
    raise CertificateError(f"silting certificate violated for {x!r}: no shift up to {bound}")


@dataclass
class CertificateReport:
    shifts: dict[str, int | None]

    @property
    def certified(self) -> bool:
        return all(v is not None for v in self.shifts.values())

    def to_json(self) -> dict:
        return {"certified": self.certified, "shifts": self.shifts}


def silting_certificate(m: SiltingCollection, bound: int = 10) -> CertificateReport:
    """For each stalk ``P_v`` find ``n <= bound`` with ``Sigma^{-n} P_v`` filtered.

    Success for every vertex shows the collection generates the category.
    """
    licensed = m.max_stage_length()
    shifts: dict[str, int | None] = {}
    for v in m.algebra.vertices:
        p = ProjComplex.stalk(m.algebra, v)
        shifts[v] = None
        for n in range(bound + 1):
            try:
                extract_filtration(shift(p, -n), m, max_len=licensed, method="auto")
            except NotInF:
                continue
            shifts[v] = n
            break
    return CertificateReport(shifts)


# --------------------------------------------------------------------------
# F_m membership, extension closure of F_d, and the subgroup N


@dataclass
class Membership:
    verdict: str                 # "member" | "non-member" | "unknown"
    filtration: Filtration | None = None
    obstruction: str | None = None

    def to_json(self) -> dict:
        out = {"verdict": self.verdict}
        if self.filtration is not None:
            out["length"] = self.filtration.length
            out["factors"] = self.filtration.factors()
        if self.obstruction:
            out["obstruction"] = self.obstruction
        return out


def _label_decompositions(target: Counter, pieces: list[Counter], bound: int) -> bool:
    """Whether ``target`` is a sum of pieces, each used at most ``bound`` times."""

    def rec(k: int, remaining: Counter) -> bool:
        if not +remaining:
            return True
        if k == len(pieces):
            return False
        piece = pieces[k]
        rem = remaining
        for _ in range(bound + 1):
            if rec(k + 1, rem):
                return True
            rem = rem - piece if all(rem[key] >= c for key, c in piece.items()) else None
            if rem is None:
                return False
        return False

    return rec(0, target)


def membership_in_Fm(x: ProjComplex, m: SiltingCollection, length: int, multiplicity_bound: int = 4) -> Membership:
    """Decide ``x in F_length`` where possible.

    ``member`` when extraction finishes within ``length`` stages; ``non-member``
    when no sum of at most ``multiplicity_bound`` copies of each
    ``Sigma^{-i} T_j`` (``i < length``) has the graded labels of ``min(x)``.
    """
    licensed = m.max_stage_length()
    if licensed is not None and length > licensed:
        raise PreconditionError(f"length {length} exceeds d = {licensed}")
    try:
        filt = extract_filtration(x, m, max_len=length, method="minimal")
        return Membership("member", filt)
    except NotInF:
        pass
    target = Counter({(n, v): k for n, v, k in minimal_form(x).graded_labels()})
    pieces = []
    for i in range(length):
        for t in m.summands.values():
            pieces.append(Counter({(n, v): k for n, v, k in shift(t, -i).graded_labels()}))
    if _label_decompositions(target, pieces, multiplicity_bound):
        return Membership("unknown")
    return Membership("non-member", obstruction=(
        f"no sum of <= {multiplicity_bound} copies of each Sigma^-i T_j (i < {length}) "
        f"matches the graded labels {sorted(target.items())}"))


@dataclass
class ClosureReport:
    d: int
    tallies: Counter
    cases: list[dict]

    @property
    def closed(self) -> bool:
        return self.tallies["non-member"] == 0 and self.tallies["unknown"] == 0

    def to_json(self) -> dict:
        return {"d": self.d, "closed": self.closed, "tallies": dict(self.tallies), "cases": self.cases}


def _extension_maps(m: SiltingCollection, d: int, samples: int, rng: random.Random, include_zero: bool):
    """Yield ``(j1, j2, name, w)`` with ``w: Sigma^{-(d-1)} T_{j2} -> Sigma T_{j1}``."""
    for j1, t1 in m.summands.items():
        for j2, t2 in m.summands.items():
            src, tgt = shift(t2, -(d - 1)), shift(t1, 1)
            hs = hom_space(src, tgt)
            if include_zero:
                yield j1, j2, "zero", ComplexMap.zero(src, tgt)
            for k, b in enumerate(hs.basis):
                yield j1, j2, f"basis{k}", b
            if hs.dimension:
                for k in range(samples):
                    w = hs.combination([rng.choice((-2, -1, 1, 2)) for _ in range(hs.dimension)])
                    yield j1, j2, f"random{k}", w


def verify_fd_extension_closure(m: SiltingCollection, d: int, samples: int = 2,
                                rng: random.Random | None = None) -> ClosureReport:
    """Test ``M * Sigma^{-(d-1)} M`` inside ``F_d`` on basis and sampled extensions."""
    if not (m.verified_presilting or (m.verified_d_rigid and m.d is not None and d <= m.d)):
        raise PreconditionError("closure check needs a verified d-rigid collection")
    rng = rng or random.Random(0)
    tallies: Counter = Counter({"member": 0, "non-member": 0, "unknown": 0})
    cases = []
    for j1, j2, name, w in _extension_maps(m, d, samples, rng, include_zero=False):
        e = extension(w)
        verdict = membership_in_Fm(e, m, d)
        tallies[verdict.verdict] += 1
        cases.append({"M1": j1, "M2": j2, "w": name, "E": repr(minimal_form(e)), **verdict.to_json()})
    return ClosureReport(d, tallies, cases)


@dataclass
class NSubgroupReport:
    labels: list[str]
    generators: list[K0Element]
    quotient: GroupInvariants
    details: list[dict]

    def to_json(self) -> dict:
        return {
            "generators": [g.to_json() for g in self.generators],
            "quotient": self.quotient.to_json(self.labels),
            "details": self.details,
        }


def compute_N_subgroup(m: SiltingCollection, d: int, samples: int = 2, rng: random.Random | None = None,
                       closure: ClosureReport | None = None) -> NSubgroupReport:
    """Generators ``gamma(E) - <T_j1> - (-1)^{d-1} <T_j2>`` over extensions
    ``T_j1 -> E -> Sigma^{-(d-1)} T_j2 -> Sigma T_j1``, and the quotient by their span."""
    rng = rng or random.Random(0)
    closure = closure or verify_fd_extension_closure(m, d, samples, random.Random(rng.random()))
    if not closure.closed:
        raise PreconditionError("F_d is not closed under extensions")
    sign = -1 if (d - 1) % 2 else 1
    gens, details = [], []
    for j1, j2, name, w in _extension_maps(m, d, samples, rng, include_zero=True):
        e = extension(w)
        try:
            filt = extract_filtration(e, m, max_len=d, method="minimal")
        except NotInF as exc:
            raise PreconditionError(f"extension {j1},{j2},{name} not in F_{d}: {exc}") from exc
        g = gamma(filt) - K0Element.of(j1) - K0Element.of(j2, sign)
        gens.append(g)
        details.append({"M1": j1, "M2": j2, "w": name, "generator": g.to_json()})
    return NSubgroupReport(m.labels, gens, quotient_group(m.labels, gens), details)


# --------------------------------------------------------------------------
# the isomorphism K_0^sp(M) = K_0(T)


@dataclass
class K0IsomorphismReport:
    labels: list[str]
    certificate: CertificateReport
    split_rank: int
    sampled: SampledPresentation
    additivity_failures: list[int]
    surjectivity: dict[str, bool]
    method: str

    @property
    def checks(self) -> dict[str, bool]:
        inv = self.sampled.invariants
        return {
            "silting_certificate": self.certificate.certified,
            "split_rank_equals_labels": self.split_rank == len(self.labels),
            "sampled_invariants_match": inv.rank == len(self.labels) and not inv.torsion,
            "class_additive_on_samples": not self.additivity_failures,
            "generators_hit": all(self.surjectivity.values()),
        }

    @property
    def passed(self) -> bool:
        return all(self.checks.values())

    def to_json(self) -> dict:
        inv = self.sampled.invariants
        return {
            "passed": self.passed,
            "checks": self.checks,
            "rank": inv.rank,
            "torsion": list(inv.torsion),
            "split_rank": self.split_rank,
            "samples": len(self.sampled.triangles),
            "sampled_generators": len(self.sampled.presentation.generators),
            "additivity_failures": self.additivity_failures,
            "filtration_method": self.method,
            "certificate": self.certificate.to_json(),
        }


def verify_k0_isomorphism(m: SiltingCollection, config: SamplerConfig | None = None,
                     method: str = "auto") -> K0IsomorphismReport:
    """Sampled K_0 presentation vs the split group of the collection, plus additivity of
    the class map on every sampled triangle."""
    if not m.verified_presilting:
        raise PreconditionError("the K_0 comparison needs a verified presilting collection")
    cert = silting_certificate(m)
    if not cert.certified:
        raise PreconditionError("collection is not certified silting")
    cfg = config or SamplerConfig()
    split = quotient_group(m.labels, [])
    sampled = sampled_k0_presentation(m.algebra, cfg)
    cache: dict[int, K0Element] = {}

    def cls(x: ProjComplex) -> K0Element:
        key = id(x)
        if key not in cache:
            cache[key] = class_in_k0sp(x, m, method=method).value
        return cache[key]

    failures = []
    for i, t in enumerate(sampled.triangles):
        if cls(t.cone) != cls(t.suspended_source) + cls(t.target):
            failures.append(i)
    surj = {lab: class_in_k0sp(t, m, method=method).value == K0Element.of(lab) for lab, t in m.summands.items()}
    return K0IsomorphismReport(m.labels, cert, split.rank, sampled, failures, surj, method)


# --------------------------------------------------------------------------
# the worked A3 example


def worked_example(algebra: Algebra, s1: ProjComplex, s3: ProjComplex, x: ProjComplex) -> dict:
    """End-to-end check of the A3 example: ``add(S1 + S3)`` is 2-rigid but not
    presilting, the triangle ``S3 -> X -> Sigma^{-1} S1 -> Sigma S3`` exists,
    ``X`` lies outside ``F_2``, so ``F_2`` is not closed under extensions."""
    from .homotopycat import cohomology_dimensions, find_isomorphism, null_homotopy

    checks: dict[str, bool] = {}
    m = SiltingCollection(algebra, {"S1": s1, "S3": s3}, d=2)
    rigid = verify_hom_vanishing(m)
    m = rigid.collection
    checks["two_rigid"] = rigid.passed and m.verified_d_rigid
    full = verify_hom_vanishing(m, range(1, m.k_max() + 1))
    checks["presilting_fails_at_2"] = not full.passed and full.first_failure == 2
    checks["resolutions_exact"] = (cohomology_dimensions(s1) == {-2: 0, -1: 0, 0: 1}
                                   and cohomology_dimensions(s3) == {0: 1})

    hs = hom_space(shift(s1, -1), shift(s3, 1))
    checks["ext_one_dimensional"] = hs.dimension == 1
    w = hs.basis[0]
    t = cone(w)
    e = shift(t.Z, -1)
    # rotate twice backwards: S3 -> Sigma^{-1} C -> Sigma^{-1} S1 -> Sigma S3
    a, b = t.b.shifted(-1), t.c.shifted(-1)
    c = ComplexMap(b.target, shift(s3, 1), w.components)
    ba, cb = null_homotopy(b.compose(a)), null_homotopy(c.compose(b))
    triangle = None
    if ba is not None and cb is not None:
        triangle = Triangle(a, b, c, ba, cb)
    checks["cone_triangle_verified"] = t.verify()
    checks["rotated_triangle_verified"] = triangle is not None and triangle.verify()
    verdict, iso = find_isomorphism(minimal_form(e), minimal_form(x))
    checks["middle_term_is_X"] = verdict == "iso"

    member = membership_in_Fm(x, m, 2)
    checks["X_not_in_F2"] = member.verdict == "non-member"
    try:
        extract_filtration(x, m, max_len=2)
        checks["extraction_refuses_X"] = False
    except NotInF:
        checks["extraction_refuses_X"] = True
    closure = verify_fd_extension_closure(m, 2)
    checks["F2_not_extension_closed"] = not closure.closed
    return {
        "passed": all(checks.values()),
        "checks": checks,
        "closure": {"closed": closure.closed, "tallies": dict(closure.tallies)},
        "hom_vanishing": rigid.to_json(),
        "presilting": full.to_json(),
        "membership": member.to_json(),
        "extension": repr(minimal_form(e)),
    }


# --------------------------------------------------------------------------
# seeded samples, one independent stream per index


def sample_rng(seed: int, index: int) -> random.Random:
    return random.Random(f"{seed}:{index}")


def normalized_random_object(m: SiltingCollection, rng: random.Random, low: int = 0, high: int = 2) -> ProjComplex:
    """A random complex, desuspended by its least normalizing shift so that it lies in F."""
    from .homotopycat import random_complex

    x = random_complex(m.algebra, rng, low, high)
    return shift(x, -class_in_k0sp(x, m).shift)


def jordan_holder_sample(m: SiltingCollection, seed: int, index: int, trials: int = 3) -> dict:
    rng = sample_rng(seed, index)
    x = normalized_random_object(m, rng)
    report = verify_filtration_equivalence(x, m, trials, rng)
    return {"index": index, "x": repr(x), **report.to_json()}


def horseshoe_sample(m: SiltingCollection, seed: int, index: int, samples: int = 1) -> dict:
    """One pair ``(X, Z)`` in F; ``X`` is drawn one degree higher so ``Hom(Z, Sigma X)`` is often nonzero."""
    rng = sample_rng(seed, index)
    x = normalized_random_object(m, rng, 1, 3)
    z = normalized_random_object(m, rng)
    report = verify_horseshoe(x, z, m, samples, rng)
    return {"index": index, "x": repr(x), "z": repr(z), **report.to_json()}
