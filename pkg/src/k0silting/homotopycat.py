"""The bounded homotopy category of finitely generated projectives.

Grading is cohomological: ``d^n: X^n -> X^{n+1}``.  Suspension is
``(Sigma X)^n = X^{n+1}`` with differential ``-d``, and the mapping cone of
``f: X -> Y`` is ``X^{n+1} + Y^n`` with differential ``[[-d_X, 0], [f, d_Y]]``.

A map between direct sums of indecomposable projectives is a :class:`ProjMap`:
a sparse matrix whose entry ``(row, col)`` is the :class:`AlgebraElement`
giving ``P_{source[col]} -> P_{target[row]}`` (see :mod:`.pathalgebra` for
the path conventions).
"""

from __future__ import annotations

import itertools
import json
import random
from collections import Counter
from dataclasses import dataclass
from functools import lru_cache
from typing import Mapping, Sequence

from .exactmath import FieldMatrix, rank_kernel, rref, solve
from .pathalgebra import Algebra, AlgebraElement, Path

COEFFICIENTS = (-2, -1, 0, 1, 2)
EXHAUSTIVE_LIMIT = 4096
FINITE_FIELD_EXTRA_TRIALS = 512


class ComplexError(ValueError):
    """Raised for malformed complexes or maps (d^2 != 0, label mismatch, ...)."""


# --------------------------------------------------------------------------
# maps between direct sums of projectives


class ProjMap:
    __slots__ = ("algebra", "source", "target", "entries")

    def __init__(self, algebra: Algebra, source: Sequence[str], target: Sequence[str],
                 entries: Mapping[tuple[int, int], AlgebraElement] | None = None):
        self.algebra = algebra
        self.source = tuple(source)
        self.target = tuple(target)
        self.entries = {k: v for k, v in (entries or {}).items() if v}

    @classmethod
    def zero(cls, algebra, source, target) -> "ProjMap":
        return cls(algebra, source, target, {})

    @classmethod
    def identity(cls, algebra, labels) -> "ProjMap":
        return cls(algebra, labels, labels, {(i, i): algebra.identity(v) for i, v in enumerate(labels)})

    def check(self):
        for (r, c), e in self.entries.items():
            if (e.source, e.target) != (self.target[r], self.source[c]):
                raise ComplexError(
                    f"entry ({r},{c}) runs {e.source}->{e.target}, expected a path "
                    f"{self.target[r]}->{self.source[c]}"
                )

    def __getitem__(self, rc) -> AlgebraElement:
        r, c = rc
        e = self.entries.get(rc)
        return e if e is not None else self.algebra.zero(self.target[r], self.source[c])

    def is_zero(self) -> bool:
        return not self.entries

    def __eq__(self, other):
        if not isinstance(other, ProjMap):
            return NotImplemented
        return self.source == other.source and self.target == other.target and self.entries == other.entries

    def __add__(self, other: "ProjMap") -> "ProjMap":
        if (self.source, self.target) != (other.source, other.target):
            raise ComplexError("adding maps with different source/target")
        out = dict(self.entries)
        for k, v in other.entries.items():
            out[k] = out[k] + v if k in out else v
        return ProjMap(self.algebra, self.source, self.target, out)

    def __neg__(self) -> "ProjMap":
        return ProjMap(self.algebra, self.source, self.target, {k: -v for k, v in self.entries.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "ProjMap":
        return ProjMap(self.algebra, self.source, self.target, {k: v.scale(c) for k, v in self.entries.items()})

    def compose(self, other: "ProjMap") -> "ProjMap":
        """``self o other``."""
        if other.target != self.source:
            raise ComplexError("composing maps with mismatched middle object")
        by_row: dict[int, list[tuple[int, AlgebraElement]]] = {}
        for (k, c), e in other.entries.items():
            by_row.setdefault(k, []).append((c, e))
        out: dict[tuple[int, int], AlgebraElement] = {}
        alg = self.algebra
        for (r, k), g in self.entries.items():
            for c, f in by_row.get(k, ()):
                gf = alg.compose_maps(g, f)
                if gf:
                    out[(r, c)] = out[(r, c)] + gf if (r, c) in out else gf
        return ProjMap(alg, other.source, self.target, out)

    def restrict(self, rows: Sequence[int], cols: Sequence[int]) -> "ProjMap":
        rpos = {r: i for i, r in enumerate(rows)}
        cpos = {c: j for j, c in enumerate(cols)}
        out = {(rpos[r], cpos[c]): e for (r, c), e in self.entries.items() if r in rpos and c in cpos}
        return ProjMap(self.algebra, [self.source[c] for c in cols], [self.target[r] for r in rows], out)

    def embed(self, source, target, rows: Sequence[int], cols: Sequence[int]) -> "ProjMap":
        """Place this map as the block at ``rows x cols`` of a bigger zero map."""
        out = {(rows[r], cols[c]): e for (r, c), e in self.entries.items()}
        return ProjMap(self.algebra, source, target, out)

    @classmethod
    def block(cls, algebra, row_labels: Sequence[Sequence[str]], col_labels: Sequence[Sequence[str]],
              grid: Sequence[Sequence["ProjMap | None"]]) -> "ProjMap":
        source = [v for labels in col_labels for v in labels]
        target = [v for labels in row_labels for v in labels]
        roff = [sum(len(x) for x in row_labels[:i]) for i in range(len(row_labels))]
        coff = [sum(len(x) for x in col_labels[:j]) for j in range(len(col_labels))]
        out = {}
        for i, row in enumerate(grid):
            for j, m in enumerate(row):
                if m is None:
                    continue
                if m.target != tuple(row_labels[i]) or m.source != tuple(col_labels[j]):
                    raise ComplexError(f"block ({i},{j}) has the wrong shape")
                for (r, c), e in m.entries.items():
                    out[(roff[i] + r, coff[j] + c)] = e
        return cls(algebra, source, target, out)

    def scalar_matrix(self) -> FieldMatrix:
        """Reduction modulo the radical: identity coefficients, zero between distinct vertices."""
        f = self.algebra.field
        rows = [[f.zero] * len(self.source) for _ in self.target]
        for (r, c), e in self.entries.items():
            rows[r][c] = e.identity_coefficient()
        return FieldMatrix.from_rows(rows, f, cols=len(self.source))

    def __repr__(self):
        body = ", ".join(f"({r},{c}): {e}" for (r, c), e in sorted(self.entries.items()))
        return f"ProjMap({list(self.source)} -> {list(self.target)}; {body})"


@lru_cache(maxsize=None)
def _coords(algebra: Algebra, source: tuple, target: tuple) -> tuple[tuple[int, int, Path], ...]:
    return tuple(
        (r, c, p)
        for r, tv in enumerate(target)
        for c, sv in enumerate(source)
        for p in algebra.hom_basis(sv, tv)
    )


def map_coordinates(algebra: Algebra, source, target) -> tuple[tuple[int, int, Path], ...]:
    """Basis of ``Hom(+P_source, +P_target)`` as ``(row, col, path)`` triples."""
    return _coords(algebra, tuple(source), tuple(target))


def _unit_map(algebra, source, target, r, c, p) -> ProjMap:
    e = AlgebraElement(algebra, p.source, p.target, {p: algebra.field.one})
    return ProjMap(algebra, source, target, {(r, c): e})


# --------------------------------------------------------------------------
# complexes


class ProjComplex:
    """A bounded complex of projectives; an object of K^b(proj Lambda)."""

    __slots__ = ("algebra", "terms", "diffs")

    def __init__(self, algebra: Algebra, terms: Mapping[int, Sequence[str]],
                 diffs: Mapping[int, ProjMap] | None = None, check: bool = True):
        self.algebra = algebra
        self.terms = {int(n): tuple(v) for n, v in sorted(terms.items()) if len(v)}
        diffs = diffs or {}
        self.diffs: dict[int, ProjMap] = {}
        for n, d in diffs.items():
            if d.is_zero():
                continue
            if d.source != self.term(n) or d.target != self.term(n + 1):
                raise ComplexError(f"differential d^{n} does not match terms {self.term(n)} -> {self.term(n + 1)}")
            self.diffs[int(n)] = d
        if check:
            for d in self.diffs.values():
                d.check()
            self.check_d_squared()

    @classmethod
    def zero(cls, algebra) -> "ProjComplex":
        return cls(algebra, {}, {}, check=False)

    @classmethod
    def stalk(cls, algebra, vertex: str, degree: int = 0) -> "ProjComplex":
        if vertex not in algebra.vertices:
            raise ComplexError(f"unknown vertex {vertex!r}")
        return cls(algebra, {degree: (vertex,)}, {}, check=False)

    def term(self, n: int) -> tuple[str, ...]:
        return self.terms.get(n, ())

    def d(self, n: int) -> ProjMap:
        m = self.diffs.get(n)
        return m if m is not None else ProjMap.zero(self.algebra, self.term(n), self.term(n + 1))

    def degrees(self) -> list[int]:
        return sorted(self.terms)

    def support(self) -> tuple[int, int] | None:
        if not self.terms:
            return None
        return min(self.terms), max(self.terms)

    def width(self) -> int:
        s = self.support()
        return 0 if s is None else s[1] - s[0] + 1

    def size(self) -> int:
        return sum(len(v) for v in self.terms.values())

    def check_d_squared(self):
        for n in self.diffs:
            if n + 1 in self.diffs and not self.diffs[n + 1].compose(self.diffs[n]).is_zero():
                raise ComplexError(f"d^{n + 1} o d^{n} != 0")

    def is_literally_zero(self) -> bool:
        return not self.terms

    def graded_labels(self) -> tuple[tuple[int, str, int], ...]:
        """Sorted ``(degree, vertex, multiplicity)`` triples."""
        c = Counter((n, v) for n, vs in self.terms.items() for v in vs)
        return tuple((n, v, k) for (n, v), k in sorted(c.items()))

    def __eq__(self, other):
        if not isinstance(other, ProjComplex):
            return NotImplemented
        return self.terms == other.terms and self.diffs == other.diffs

    def __repr__(self):
        parts = [f"{n}:{'+'.join('P' + v for v in vs)}" for n, vs in self.terms.items()]
        return f"ProjComplex({', '.join(parts) or '0'})"

    # -- io ------------------------------------------------------------------

    def to_json(self) -> dict:
        out = {"terms": {str(n): list(v) for n, v in self.terms.items()}, "differentials": {}}
        for n, d in self.diffs.items():
            out["differentials"][str(n)] = [
                [d[(r, c)].to_json() for c in range(len(d.source))] for r in range(len(d.target))
            ]
        return out

    @classmethod
    def from_json(cls, algebra: Algebra, data: Mapping) -> "ProjComplex":
        try:
            terms = {int(n): [str(v) for v in vs] for n, vs in data["terms"].items()}
        except (KeyError, TypeError, ValueError) as exc:
            raise ComplexError(f"malformed complex: {exc}") from exc
        for vs in terms.values():
            for v in vs:
                if v not in algebra.vertices:
                    raise ComplexError(f"complex uses unknown vertex {v!r}")
        diffs = {}
        for key, rows in (data.get("differentials") or {}).items():
            n = int(key)
            src, tgt = tuple(terms.get(n, ())), tuple(terms.get(n + 1, ()))
            if len(rows) != len(tgt) or any(len(row) != len(src) for row in rows):
                raise ComplexError(f"differential {n} should be a {len(tgt)}x{len(src)} matrix")
            entries = {}
            for r, row in enumerate(rows):
                for c, entry in enumerate(row):
                    e = _parse_entry(algebra, entry, src[c], tgt[r])
                    if e:
                        entries[(r, c)] = e
            diffs[n] = ProjMap(algebra, src, tgt, entries)
        return cls(algebra, terms, diffs)


def _parse_entry(algebra: Algebra, entry, source_vertex: str, target_vertex: str) -> AlgebraElement:
    """An entry of a map ``P_source -> P_target``: a path from target to source."""
    zero = algebra.zero(target_vertex, source_vertex)
    if entry in (None, 0, "0") or entry == []:
        return zero
    terms = [entry] if isinstance(entry, Mapping) else list(entry)
    total = zero
    for t in terms:
        arrows = tuple(t.get("path", ()))
        coeff = algebra.field(str(t.get("coeff", "1")))
        e = algebra.path_element(arrows, coeff, vertex=target_vertex)
        if (e.source, e.target) != (target_vertex, source_vertex):
            raise ComplexError(
                f"path {list(arrows)} cannot give a map P_{source_vertex} -> P_{target_vertex}"
            )
        total = total + e
    return total


def load_complex(algebra: Algebra, source) -> ProjComplex:
    if isinstance(source, Mapping):
        return ProjComplex.from_json(algebra, source)
    text = str(source)
    if text.lstrip().startswith("{"):
        return ProjComplex.from_json(algebra, json.loads(text))
    with open(text, encoding="utf-8") as fh:
        return ProjComplex.from_json(algebra, json.load(fh))


def shift(x: ProjComplex, k: int) -> ProjComplex:
    """``Sigma^k x``: ``(Sigma^k X)^n = X^{n+k}``, differential times ``(-1)^k``."""
    if k == 0:
        return x
    sign = -1 if k % 2 else 1
    terms = {n - k: v for n, v in x.terms.items()}
    diffs = {n - k: (d if sign == 1 else -d) for n, d in x.diffs.items()}
    return ProjComplex(x.algebra, terms, diffs, check=False)


def direct_sum(xs: Sequence[ProjComplex], algebra: Algebra | None = None) -> ProjComplex:
    if not xs:
        if algebra is None:
            raise ComplexError("empty direct sum needs an algebra")
        return ProjComplex.zero(algebra)
    alg = xs[0].algebra
    if any(x.algebra is not alg for x in xs):
        raise ComplexError("direct sum over different algebras")
    degrees = sorted({n for x in xs for n in x.terms})
    terms = {n: [v for x in xs for v in x.term(n)] for n in degrees}
    diffs = {}
    for n in degrees:
        grid = [[x.d(n) if i == j else None for j, x in enumerate(xs)] for i, x in enumerate(xs)]
        diffs[n] = ProjMap.block(alg, [x.term(n + 1) for x in xs], [x.term(n) for x in xs], grid)
    return ProjComplex(alg, terms, diffs, check=False)


# --------------------------------------------------------------------------
# graded maps (chain maps have degree 0, homotopies degree -1)


class ComplexMap:
    """Components ``f^n: X^n -> Y^{n+degree}``."""

    __slots__ = ("source", "target", "degree", "components")

    def __init__(self, source: ProjComplex, target: ProjComplex, components: Mapping[int, ProjMap] | None = None,
                 degree: int = 0):
        self.source = source
        self.target = target
        self.degree = degree
        self.components: dict[int, ProjMap] = {}
        for n, m in (components or {}).items():
            if m.is_zero():
                continue
            if m.source != source.term(n) or m.target != target.term(n + degree):
                raise ComplexError(f"component {n} has the wrong shape")
            self.components[n] = m

    @property
    def algebra(self):
        return self.source.algebra

    def __getitem__(self, n: int) -> ProjMap:
        m = self.components.get(n)
        if m is None:
            return ProjMap.zero(self.algebra, self.source.term(n), self.target.term(n + self.degree))
        return m

    @classmethod
    def identity(cls, x: ProjComplex) -> "ComplexMap":
        return cls(x, x, {n: ProjMap.identity(x.algebra, v) for n, v in x.terms.items()})

    @classmethod
    def zero(cls, x: ProjComplex, y: ProjComplex, degree: int = 0) -> "ComplexMap":
        return cls(x, y, {}, degree)

    def is_zero(self) -> bool:
        return not self.components

    def _same_shape(self, other):
        if other.degree != self.degree or other.source != self.source or other.target != self.target:
            raise ComplexError("maps have different shapes")

    def __add__(self, other: "ComplexMap") -> "ComplexMap":
        self._same_shape(other)
        keys = set(self.components) | set(other.components)
        return ComplexMap(self.source, self.target, {n: self[n] + other[n] for n in keys}, self.degree)

    def __neg__(self) -> "ComplexMap":
        return ComplexMap(self.source, self.target, {n: -m for n, m in self.components.items()}, self.degree)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "ComplexMap":
        return ComplexMap(self.source, self.target, {n: m.scale(c) for n, m in self.components.items()}, self.degree)

    def __eq__(self, other):
        if not isinstance(other, ComplexMap):
            return NotImplemented
        return (self.degree == other.degree and self.source == other.source and self.target == other.target
                and self.components == other.components)

    def compose(self, other: "ComplexMap") -> "ComplexMap":
        """``self o other``."""
        comps = {}
        for n, m in other.components.items():
            g = self.components.get(n + other.degree)
            if g is not None:
                comps[n] = g.compose(m)
        return ComplexMap(other.source, self.target, comps, self.degree + other.degree)

    def boundary(self) -> "ComplexMap":
        """``d_Y f - (-1)^deg f d_X``; zero exactly for chain maps of degree 0."""
        x, y, k = self.source, self.target, self.degree
        comps = {}
        for n in x.terms:
            m = y.d(n + k).compose(self[n])
            if x.term(n + 1):
                tail = self[n + 1].compose(x.d(n))
                m = m + tail if k % 2 else m - tail
            comps[n] = m
        return ComplexMap(x, y, comps, k + 1)

    def is_chain_map(self) -> bool:
        return self.degree == 0 and self.boundary().is_zero()

    def shifted(self, k: int) -> "ComplexMap":
        """``Sigma^k`` applied to this map (signed by ``(-1)^{k*degree}``)."""
        sign = -1 if (k * self.degree) % 2 else 1
        comps = {n - k: (m if sign == 1 else -m) for n, m in self.components.items()}
        return ComplexMap(shift(self.source, k), shift(self.target, k), comps, self.degree)

    def scalar_matrices(self) -> dict[int, FieldMatrix]:
        return {n: self[n].scalar_matrix() for n in set(self.source.terms) | set(self.target.terms)}

    def __repr__(self):
        return f"ComplexMap(deg {self.degree}: {self.source!r} -> {self.target!r}, {len(self.components)} components)"


def identity_map(x: ProjComplex) -> ComplexMap:
    return ComplexMap.identity(x)


# --------------------------------------------------------------------------
# linear algebra on spaces of graded maps


def _graded_coords(x: ProjComplex, y: ProjComplex, k: int) -> list[tuple[int, int, int, Path]]:
    alg = x.algebra
    return [(n, r, c, p) for n in x.terms for (r, c, p) in map_coordinates(alg, x.term(n), y.term(n + k))]


def _to_vector(f: ComplexMap, index: Mapping) -> list:
    zero = f.algebra.field.zero
    v = [zero] * len(index)
    for n, m in f.components.items():
        for (r, c), e in m.entries.items():
            for p, coeff in e.terms.items():
                v[index[(n, r, c, p)]] = coeff
    return v


def _from_vector(x: ProjComplex, y: ProjComplex, k: int, coords, vec) -> ComplexMap:
    alg = x.algebra
    per_degree: dict[int, dict[tuple[int, int], dict[Path, object]]] = {}
    for (n, r, c, p), coeff in zip(coords, vec):
        if coeff:
            per_degree.setdefault(n, {}).setdefault((r, c), {})[p] = coeff
    comps = {}
    for n, ents in per_degree.items():
        src, tgt = x.term(n), y.term(n + k)
        comps[n] = ProjMap(alg, src, tgt, {
            (r, c): AlgebraElement(alg, tgt[r], src[c], terms) for (r, c), terms in ents.items()
        })
    return ComplexMap(x, y, comps, k)


def _boundary_columns(x: ProjComplex, y: ProjComplex, k: int):
    """Matrix of ``h -> d_Y h - (-1)^k h d_X`` from degree-k maps to degree-(k+1) maps.

    Returns ``(rows, domain_coords, codomain_coords)`` with rows over the codomain.
    """
    alg = x.algebra
    zero = alg.field.zero
    dom = _graded_coords(x, y, k)
    cod = _graded_coords(x, y, k + 1)
    cindex = {key: i for i, key in enumerate(cod)}
    sign = 1 if k % 2 else -1  # coefficient of h d_X
    ycols: dict[int, dict[int, list]] = {}
    for n, d in y.diffs.items():
        for (r2, r), e in d.entries.items():
            ycols.setdefault(n, {}).setdefault(r, []).append((r2, e))
    xrows: dict[int, dict[int, list]] = {}
    for n, d in x.diffs.items():
        for (c, c2), e in d.entries.items():
            xrows.setdefault(n, {}).setdefault(c, []).append((c2, e))
    rows = [[zero] * len(dom) for _ in cod]
    for j, (n, r, c, p) in enumerate(dom):
        unit = AlgebraElement(alg, p.source, p.target, {p: alg.field.one})
        for r2, e in ycols.get(n + k, {}).get(r, ()):
            for q, coeff in alg.compose_maps(e, unit).terms.items():
                i = cindex[(n, r2, c, q)]
                rows[i][j] = rows[i][j] + coeff
        for c2, e in xrows.get(n - 1, {}).get(c, ()):
            for q, coeff in alg.compose_maps(unit, e).terms.items():
                i = cindex[(n - 1, r, c2, q)]
                rows[i][j] = rows[i][j] + sign * coeff
    return rows, dom, cod


def _columns_to_matrix(cols: list[list], nrows: int, field) -> FieldMatrix:
    return FieldMatrix(nrows, len(cols), tuple(col[i] for i in range(nrows) for col in cols), field)


@dataclass
class HomSpace:
    """``Hom_K(source, target)``; ``basis`` lifts a basis of homotopy classes."""

    source: ProjComplex
    target: ProjComplex
    basis: list[ComplexMap]
    dimension: int
    chain_map_dimension: int
    null_homotopic_dimension: int

    def combination(self, coeffs: Sequence) -> ComplexMap:
        f = ComplexMap.zero(self.source, self.target)
        for c, b in zip(coeffs, self.basis):
            if c:
                f = f + b.scale(c)
        return f


def hom_space(x: ProjComplex, y: ProjComplex) -> HomSpace:
    """Chain maps modulo null-homotopic maps, via two rank computations."""
    if x.algebra is not y.algebra:
        raise ComplexError("complexes over different algebras")
    field = x.algebra.field
    rows0, dom0, _ = _boundary_columns(x, y, 0)
    cm = FieldMatrix.from_rows(rows0, field, cols=len(dom0)) if rows0 else FieldMatrix.zeros(0, len(dom0), field)
    _, kernel = rank_kernel(cm)
    z_cols = kernel.columns()
    rows_h, dom_h, _ = _boundary_columns(x, y, -1)
    b_cols = [[rows_h[i][j] for i in range(len(dom0))] for j in range(len(dom_h))]
    combined = b_cols + z_cols
    mat_rows = [[col[i] for col in combined] for i in range(len(dom0))]
    _, pivots = rref(mat_rows, len(combined))
    nb = len(b_cols)
    rank_b = sum(1 for p in pivots if p < nb)
    chosen = [combined[p] for p in pivots if p >= nb]
    basis = [_from_vector(x, y, 0, dom0, v) for v in chosen]
    return HomSpace(x, y, basis, len(basis), len(z_cols), rank_b)


def complement_basis(hs: HomSpace, subspace: Sequence[ComplexMap]) -> list[ComplexMap]:
    """Members of ``hs.basis`` whose classes form a basis of ``Hom / span(subspace)``."""
    if not hs.basis:
        return []
    x, y = hs.source, hs.target
    rows_h, dom_h, dom0 = _boundary_columns(x, y, -1)
    index = {key: i for i, key in enumerate(dom0)}
    cols = [[rows_h[i][j] for i in range(len(dom0))] for j in range(len(dom_h))]
    cols += [_to_vector(s, index) for s in subspace]
    offset = len(cols)
    cols += [_to_vector(b, index) for b in hs.basis]
    _, pivots = rref([[col[i] for col in cols] for i in range(len(dom0))], len(cols))
    return [hs.basis[p - offset] for p in pivots if p >= offset]


def hom_dimension(x: ProjComplex, y: ProjComplex) -> int:
    return hom_space(x, y).dimension


def null_homotopy(f: ComplexMap) -> ComplexMap | None:
    """Some ``h`` of degree -1 with ``d h + h d == f``, or None if f is not null-homotopic."""
    x, y = f.source, f.target
    if f.degree != 0:
        raise ComplexError("null_homotopy expects a degree-0 map")
    rows_h, dom_h, cod = _boundary_columns(x, y, -1)
    index = {key: i for i, key in enumerate(cod)}
    vec = _to_vector(f, index)
    field = x.algebra.field
    m = FieldMatrix.from_rows(rows_h, field, cols=len(dom_h)) if rows_h else FieldMatrix.zeros(0, len(dom_h), field)
    b = FieldMatrix(len(vec), 1, tuple(vec), field)
    sol = solve(m, b)
    if sol is None:
        return None
    return _from_vector(x, y, -1, dom_h, sol.column(0) if sol.cols else [])


def is_null_homotopic(f: ComplexMap) -> bool:
    return null_homotopy(f) is not None


# --------------------------------------------------------------------------
# cones and triangles


@dataclass
class Triangle:
    """``X --a--> Y --b--> Z --c--> Sigma X`` with null-homotopy witnesses for b.a and c.b."""

    a: ComplexMap
    b: ComplexMap
    c: ComplexMap
    ba_homotopy: ComplexMap
    cb_homotopy: ComplexMap

    @property
    def X(self) -> ProjComplex:
        return self.a.source

    @property
    def Y(self) -> ProjComplex:
        return self.b.source

    @property
    def Z(self) -> ProjComplex:
        return self.c.source

    def verify(self) -> bool:
        if not (self.a.target == self.b.source and self.b.target == self.c.source
                and self.c.target == shift(self.a.source, 1)):
            return False
        for m in (self.a, self.b, self.c):
            if not m.is_chain_map():
                return False
        return (self.ba_homotopy.boundary() == self.b.compose(self.a)
                and self.cb_homotopy.boundary() == self.c.compose(self.b))


def mapping_cone(f: ComplexMap) -> ProjComplex:
    return cone(f).Z


def cone(f: ComplexMap) -> Triangle:
    """The standard triangle ``X -> Y -> cone(f) -> Sigma X``."""
    if f.degree != 0:
        raise ComplexError("cone of a map of nonzero degree")
    if not f.is_chain_map():
        raise ComplexError("cone of a map that is not a chain map")
    x, y, alg = f.source, f.target, f.algebra
    degrees = sorted({n - 1 for n in x.terms} | set(y.terms))
    terms = {n: x.term(n + 1) + y.term(n) for n in degrees}
    diffs = {}
    for n in degrees:
        grid = [[-x.d(n + 1), None], [f[n + 1], y.d(n)]]
        diffs[n] = ProjMap.block(alg, [x.term(n + 2), y.term(n + 1)], [x.term(n + 1), y.term(n)], grid)
    z = ProjComplex(alg, terms, diffs, check=False)
    sx = shift(x, 1)
    incl = {n: ProjMap.block(alg, [x.term(n + 1), y.term(n)], [y.term(n)],
                             [[None], [ProjMap.identity(alg, y.term(n))]]) for n in y.terms}
    proj = {n: ProjMap.block(alg, [x.term(n + 1)], [x.term(n + 1), y.term(n)],
                             [[ProjMap.identity(alg, x.term(n + 1)), None]]) for n in degrees}
    hom = {n: ProjMap.block(alg, [x.term(n), y.term(n - 1)], [x.term(n)],
                            [[ProjMap.identity(alg, x.term(n))], [None]]) for n in x.terms}
    b = ComplexMap(y, z, incl)
    c = ComplexMap(z, sx, proj)
    return Triangle(f, b, c, ComplexMap(x, z, hom, -1), ComplexMap.zero(y, sx, -1))


def rotate(t: Triangle) -> Triangle:
    """``Y -> Z -> Sigma X -> Sigma Y`` with third map ``-Sigma(a)``."""
    new_c = -t.a.shifted(1)
    h = null_homotopy(new_c.compose(t.c))
    if h is None:  # pragma: no cover - impossible for genuine triangles
        raise ComplexError("rotated composite is not null-homotopic")
    return Triangle(t.b, t.c, new_c, t.cb_homotopy, h)


# --------------------------------------------------------------------------
# minimal reduction (Gaussian elimination of invertible differential entries)


def _local_inverse(e: AlgebraElement) -> AlgebraElement:
    """Inverse of ``c*e_v + r`` (r radical) in the local ring ``e_v Lambda e_v``."""
    alg = e.algebra
    c = e.identity_coefficient()
    if not c:
        raise ComplexError("element is not invertible")
    cinv = 1 / c
    one = alg.identity(e.source)
    nil = (e - one.scale(c)).scale(-cinv)
    total, power = one, one
    for _ in range(len(alg.basis) + 1):
        power = alg.compose(power, nil)
        if not power:
            break
        total = total + power
    return total.scale(cinv)


def _find_pivot(x: ProjComplex):
    for n in sorted(x.diffs):
        d = x.diffs[n]
        for (r, c) in sorted(d.entries):
            if x.terms[n][c] == x.terms[n + 1][r] and d.entries[(r, c)].identity_coefficient():
                return n, r, c
    return None


def _eliminate(x: ProjComplex, n: int, t: int, s: int, with_maps: bool):
    alg = x.algebra
    xn, xn1 = x.term(n), x.term(n + 1)
    d = x.d(n)
    v = xn[s]
    phi_inv = ProjMap(alg, (v,), (v,), {(0, 0): _local_inverse(d[(t, s)])})
    keep_b = [i for i in range(len(xn)) if i != s]
    keep_c = [j for j in range(len(xn1)) if j != t]
    gamma = d.restrict(keep_c, [s])
    delta = d.restrict([t], keep_b)
    new_d = d.restrict(keep_c, keep_b) - gamma.compose(phi_inv).compose(delta)
    terms = dict(x.terms)
    terms[n] = tuple(xn[i] for i in keep_b)
    terms[n + 1] = tuple(xn1[j] for j in keep_c)
    diffs = dict(x.diffs)
    diffs[n] = new_d
    if n - 1 in x.diffs:
        diffs[n - 1] = x.diffs[n - 1].restrict(keep_b, range(len(x.term(n - 1))))
    if n + 1 in x.diffs:
        diffs[n + 1] = x.diffs[n + 1].restrict(range(len(x.term(n + 2))), keep_c)
    y = ProjComplex(alg, terms, diffs, check=False)
    if not with_maps:
        return y, None, None, None
    yn, yn1 = y.term(n), y.term(n + 1)
    idn, idn1 = ProjMap.identity(alg, xn), ProjMap.identity(alg, xn1)
    f_comps = {m: ProjMap.identity(alg, x.term(m)) for m in x.terms if m not in (n, n + 1)}
    f_comps[n] = idn.restrict(keep_b, range(len(xn)))
    f_comps[n + 1] = idn1.restrict(keep_c, range(len(xn1))) - gamma.compose(phi_inv).embed(
        xn1, yn1, range(len(keep_c)), [t])
    g_comps = {m: ProjMap.identity(alg, x.term(m)) for m in x.terms if m not in (n, n + 1)}
    g_comps[n] = idn.restrict(range(len(xn)), keep_b) - phi_inv.compose(delta).embed(
        yn, xn, [s], range(len(keep_b)))
    g_comps[n + 1] = idn1.restrict(range(len(xn1)), keep_c)
    h = ComplexMap(x, x, {n + 1: phi_inv.embed(xn1, xn, [s], [t])}, -1)
    return y, ComplexMap(x, y, f_comps), ComplexMap(y, x, g_comps), h


@dataclass
class Reduction:
    """``to_minimal: X -> M``, ``from_minimal: M -> X`` with ``to o from = id`` and
    ``id - from o to = d h + h d`` for ``h = homotopy``."""

    source: ProjComplex
    minimal: ProjComplex
    to_minimal: ComplexMap
    from_minimal: ComplexMap
    homotopy: ComplexMap

    def verify(self) -> bool:
        f, g = self.to_minimal, self.from_minimal
        if not (f.is_chain_map() and g.is_chain_map()):
            return False
        if f.compose(g) != ComplexMap.identity(self.minimal):
            return False
        return ComplexMap.identity(self.source) - g.compose(f) == self.homotopy.boundary()


def minimal_form(x: ProjComplex) -> ProjComplex:
    """Minimal complex homotopy equivalent to ``x`` (no equivalence maps)."""
    while True:
        piv = _find_pivot(x)
        if piv is None:
            return x
        x = _eliminate(x, *piv, with_maps=False)[0]


def minimal_reduce(x: ProjComplex) -> Reduction:
    F = G = ComplexMap.identity(x)
    H = ComplexMap.zero(x, x, -1)
    cur = x
    while True:
        piv = _find_pivot(cur)
        if piv is None:
            return Reduction(x, cur, F, G, H)
        nxt, f, g, h = _eliminate(cur, *piv, with_maps=True)
        H = H + G.compose(h).compose(F)
        F = f.compose(F)
        G = G.compose(g)
        cur = nxt


def is_minimal(x: ProjComplex) -> bool:
    return _find_pivot(x) is None


def is_zero(x: ProjComplex) -> bool:
    return minimal_form(x).is_literally_zero()


def is_invertible_chain_map(f: ComplexMap) -> bool:
    """For maps between minimal complexes: every degree's scalar part is invertible."""
    x, y = f.source, f.target
    for n in set(x.terms) | set(y.terms):
        if len(x.term(n)) != len(y.term(n)):
            return False
        m = f[n].scalar_matrix()
        rank, _ = rank_kernel(m)
        if rank != m.rows:
            return False
    return True


def find_isomorphism(x: ProjComplex, y: ProjComplex, trials: int = 32, seed: int = 0) -> tuple[str, ComplexMap | None]:
    """Verdict ``iso`` / ``not-iso`` / ``unknown`` plus, for ``iso``, an invertible map
    between the minimal forms."""
    if x.algebra is not y.algebra:
        raise ComplexError("complexes over different algebras")
    mx, my = minimal_form(x), minimal_form(y)
    if mx.graded_labels() != my.graded_labels():
        return "not-iso", None
    if mx.is_literally_zero():
        return "iso", ComplexMap.zero(mx, my)
    hs = hom_space(mx, my)
    field = x.algebra.field
    rng = random.Random(seed)
    for trial in range(trials):
        if trial == 0:
            coeffs = [1] * hs.dimension
        elif field.characteristic:
            coeffs = [field(rng.randrange(field.characteristic)) for _ in range(hs.dimension)]
        else:
            coeffs = [rng.choice(COEFFICIENTS) for _ in range(hs.dimension)]
        f = hs.combination(coeffs)
        if is_invertible_chain_map(f):
            return "iso", f
    # over a small finite field the whole Hom space can be searched, giving an exact verdict
    if field.characteristic and field.characteristic ** hs.dimension <= EXHAUSTIVE_LIMIT:
        for coeffs in itertools.product(range(field.characteristic), repeat=hs.dimension):
            f = hs.combination([field(c) for c in coeffs])
            if is_invertible_chain_map(f):
                return "iso", f
        return "not-iso", None
    if field.characteristic:
        # invertible elements can be rare over tiny fields; spend a larger uniform budget
        for _ in range(FINITE_FIELD_EXTRA_TRIALS):
            f = hs.combination([field(rng.randrange(field.characteristic)) for _ in range(hs.dimension)])
            if is_invertible_chain_map(f):
                return "iso", f
    return "unknown", None


def iso_test(x: ProjComplex, y: ProjComplex, trials: int = 32, seed: int = 0) -> str:
    return find_isomorphism(x, y, trials, seed)[0]


# --------------------------------------------------------------------------
# cohomology of the underlying complex of vector spaces


def _vector_space_matrix(m: ProjMap) -> FieldMatrix:
    alg = m.algebra
    src = [(c, p) for c, v in enumerate(m.source) for p in alg.basis if p.source == v]
    tgt = [(r, p) for r, v in enumerate(m.target) for p in alg.basis if p.source == v]
    tindex = {key: i for i, key in enumerate(tgt)}
    f = alg.field
    rows = [[f.zero] * len(src) for _ in tgt]
    for j, (c, xp) in enumerate(src):
        for (r, cc), e in m.entries.items():
            if cc != c:
                continue
            for p, coeff in e.terms.items():
                q = alg.concat(xp, p)
                if q is not None:
                    i = tindex[(r, q)]
                    rows[i][j] = rows[i][j] + coeff
    return FieldMatrix.from_rows(rows, f, cols=len(src))


def cohomology_dimensions(x: ProjComplex) -> dict[int, int]:
    """Dimensions of ``H^n`` of ``x`` viewed as a complex of vector spaces (``P_v = Lambda e_v``)."""
    alg = x.algebra
    dims = {n: sum(1 for v in vs for p in alg.basis if p.source == v) for n, vs in x.terms.items()}
    ranks = {n: rank_kernel(_vector_space_matrix(d))[0] for n, d in x.diffs.items()}
    return {n: dims[n] - ranks.get(n, 0) - ranks.get(n - 1, 0) for n in dims}


# --------------------------------------------------------------------------
# seeded random objects


def _random_combination(rng: random.Random, basis: Sequence[Sequence], field, length: int) -> list:
    out = [field.zero] * length
    for vec in basis:
        c = rng.choice(COEFFICIENTS)
        if c:
            out = [o + c * v for o, v in zip(out, vec)]
    return out


def random_complex(algebra: Algebra, rng: random.Random, low: int = 0, high: int = 2,
                   max_summands: int = 2) -> ProjComplex:
    """A random nonzero complex supported in ``[low, high]`` with d^2 = 0 by construction."""
    terms: dict[int, tuple[str, ...]] = {}
    for n in range(low, high + 1):
        terms[n] = tuple(rng.choice(algebra.vertices) for _ in range(rng.randint(0, max_summands)))
    if not any(terms.values()):
        terms[rng.randint(low, high)] = (rng.choice(algebra.vertices),)
    field = algebra.field
    diffs: dict[int, ProjMap] = {}
    for n in range(low, high):
        src, tgt = terms[n], terms[n + 1]
        coords = map_coordinates(algebra, src, tgt)
        if not coords:
            continue
        prev = diffs.get(n - 1)
        if prev is None:
            basis = [[field.one if i == j else field.zero for i in range(len(coords))] for j in range(len(coords))]
        else:
            cod = map_coordinates(algebra, prev.source, tgt)
            cindex = {key: i for i, key in enumerate(cod)}
            cols = []
            for (r, c, p) in coords:
                comp = _unit_map(algebra, src, tgt, r, c, p).compose(prev)
                col = [field.zero] * len(cod)
                for (rr, cc), e in comp.entries.items():
                    for q, coeff in e.terms.items():
                        col[cindex[(rr, cc, q)]] = coeff
                cols.append(col)
            _, kernel = rank_kernel(_columns_to_matrix(cols, len(cod), field))
            basis = kernel.columns()
        vec = _random_combination(rng, basis, field, len(coords))
        entries: dict[tuple[int, int], dict] = {}
        for (r, c, p), coeff in zip(coords, vec):
            if coeff:
                entries.setdefault((r, c), {})[p] = coeff
        diffs[n] = ProjMap(algebra, src, tgt, {
            (r, c): AlgebraElement(algebra, tgt[r], src[c], t) for (r, c), t in entries.items()
        })
    return ProjComplex(algebra, terms, diffs)


def random_chain_map(x: ProjComplex, y: ProjComplex, rng: random.Random, hs: HomSpace | None = None) -> ComplexMap:
    """Random small-integer combination of a Hom-space basis (possibly zero)."""
    hs = hs or hom_space(x, y)
    return hs.combination([rng.choice(COEFFICIENTS) for _ in range(hs.dimension)])
