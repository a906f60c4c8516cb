"""Finite-dimensional path algebras kQ/I with monomial relations.

Conventions (fixed once, used everywhere):

* Paths compose right to left, like maps.  A path is stored as the tuple of
  its arrow names in composition order, so ``("beta", "alpha")`` is
  "alpha, then beta".  Relations in input files use the same order.
* Modules are LEFT modules and ``P_v = Lambda e_v`` is spanned by the paths
  starting at ``v``.
* ``Hom(P_a, P_b) = e_a Lambda e_b``: a path ``p`` from ``b`` to ``a`` acts by
  right multiplication ``x -> x p``.  The arrow ``alpha: 1 -> 2`` therefore
  gives the map ``P_2 -> P_1``.
* For morphisms ``f: P_a -> P_b`` and ``g: P_b -> P_c`` the composite
  ``g o f`` is the algebra product ``f g``, i.e. ``compose(f, g)``; use
  :meth:`Algebra.compose_maps` to avoid getting this backwards.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Mapping, NamedTuple

from .exactmath import QQ, format_scalar


class PresentationError(ValueError):
    """Structurally invalid or non-admissible algebra presentation."""


class Path(NamedTuple):
    source: str
    target: str
    arrows: tuple[str, ...]

    @property
    def length(self) -> int:
        return len(self.arrows)

    def __str__(self):
        return "*".join(self.arrows) if self.arrows else f"e{self.source}"


@dataclass(frozen=True)
class Arrow:
    name: str
    source: str
    target: str


DEFAULT_PATH_BOUND = 10_000


class Algebra:
    """A monomial quotient ``kQ/I`` together with its finite path basis."""

    def __init__(
        self,
        vertices: Iterable[str],
        arrows: Iterable[Arrow | tuple[str, str, str]],
        relations: Iterable[Iterable[str]] = (),
        field=QQ,
        path_bound: int = DEFAULT_PATH_BOUND,
    ):
        self.vertices = tuple(str(v) for v in vertices)
        if len(set(self.vertices)) != len(self.vertices):
            raise PresentationError("duplicate vertex label")
        self.arrows = tuple(a if isinstance(a, Arrow) else Arrow(*a) for a in arrows)
        self.field = field
        self.arrow_by_name = {a.name: a for a in self.arrows}
        if len(self.arrow_by_name) != len(self.arrows):
            raise PresentationError("duplicate arrow name")
        vs = set(self.vertices)
        for a in self.arrows:
            if a.source not in vs or a.target not in vs:
                raise PresentationError(f"arrow {a.name} references an undeclared vertex")
        self.relations = tuple(tuple(r) for r in relations)
        for rel in self.relations:
            if len(rel) < 2:
                raise PresentationError(f"relation {rel} has length < 2")
            for name in rel:
                if name not in self.arrow_by_name:
                    raise PresentationError(f"relation {rel} uses unknown arrow {name}")
            for later, earlier in zip(rel, rel[1:]):
                if self.arrow_by_name[earlier].target != self.arrow_by_name[later].source:
                    raise PresentationError(f"relation {rel} is not composable")
        self.path_bound = path_bound
        self.basis = self._enumerate_paths()
        self._index = {p: i for i, p in enumerate(self.basis)}
        self._slots: dict[tuple[str, str], list[Path]] = {(i, j): [] for i in self.vertices for j in self.vertices}
        for p in self.basis:
            self._slots[(p.source, p.target)].append(p)
        self._concat_cache: dict[tuple[Path, Path], Path | None] = {}

    # -- path enumeration ---------------------------------------------------

    def _contains_relation(self, arrows: tuple[str, ...]) -> bool:
        for rel in self.relations:
            k = len(rel)
            for start in range(len(arrows) - k + 1):
                if arrows[start:start + k] == rel:
                    return True
        return False

    def _enumerate_paths(self) -> list[Path]:
        paths = [Path(v, v, ()) for v in self.vertices]
        queue = deque(paths)
        out_arrows: dict[str, list[Arrow]] = {v: [] for v in self.vertices}
        for a in self.arrows:
            out_arrows[a.source].append(a)
        while queue:
            p = queue.popleft()
            for a in out_arrows[p.target]:
                arrows = (a.name,) + p.arrows
                if self._contains_relation(arrows):
                    continue
                q = Path(p.source, a.target, arrows)
                paths.append(q)
                if len(paths) > self.path_bound:
                    raise PresentationError(
                        f"more than {self.path_bound} nonzero paths; presentation is not admissible"
                    )
                queue.append(q)
        return paths

    # -- basis queries --------------------------------------------------------

    def paths(self, source: str, target: str) -> list[Path]:
        """Nonzero paths from ``source`` to ``target``, in a stable order."""
        return list(self._slots[(source, target)])

    def hom_basis(self, a: str, b: str) -> list[Path]:
        """Basis of ``Hom(P_a, P_b)``: the paths from ``b`` to ``a``."""
        return self._slots[(b, a)]

    def hom_dimension(self, i: str, j: str) -> int:
        """``dim Hom(P_i, P_j)``, the number of nonzero paths from j to i."""
        for v in (i, j):
            if v not in self.vertices:
                raise KeyError(f"unknown vertex {v!r}")
        return len(self._slots[(j, i)])

    def dimension(self) -> int:
        return len(self.basis)

    def idempotent(self, v: str) -> Path:
        return Path(v, v, ())

    def concat(self, p: Path, q: Path) -> Path | None:
        """``p`` after ``q`` (q first), or None when the product vanishes."""
        key = (p, q)
        try:
            return self._concat_cache[key]
        except KeyError:
            pass
        if q.target != p.source:
            raise ValueError(f"paths {p} and {q} are not composable")
        if not q.arrows:
            r = p
        elif not p.arrows:
            r = q
        else:
            arrows = p.arrows + q.arrows
            r = None if self._contains_relation(arrows) else Path(q.source, p.target, arrows)
        self._concat_cache[key] = r
        return r

    # -- elements -------------------------------------------------------------

    def element(self, terms: Mapping[Path, object] | Iterable[tuple[Path, object]], source: str, target: str) -> "AlgebraElement":
        items = terms.items() if isinstance(terms, Mapping) else terms
        clean: dict[Path, object] = {}
        for p, c in items:
            if p.source != source or p.target != target:
                raise ValueError(f"path {p} does not run {source} -> {target}")
            if p not in self._index:
                raise ValueError(f"{p} is not a nonzero basis path")
            c = self.field(c)
            if c:
                clean[p] = clean.get(p, self.field.zero) + c
        return AlgebraElement(self, source, target, {p: c for p, c in clean.items() if c})

    def path_element(self, arrows: Iterable[str], coeff=1, vertex: str | None = None) -> "AlgebraElement":
        """Element ``coeff * path``; ``vertex`` is required for the empty path."""
        arrows = tuple(arrows)
        if not arrows:
            if vertex is None:
                raise ValueError("identity path needs a vertex")
            p = Path(vertex, vertex, ())
        else:
            for later, earlier in zip(arrows, arrows[1:]):
                if self.arrow_by_name[earlier].target != self.arrow_by_name[later].source:
                    raise ValueError(f"arrows {arrows} are not composable")
            p = Path(self.arrow_by_name[arrows[-1]].source, self.arrow_by_name[arrows[0]].target, arrows)
            if p not in self._index:
                return self.zero(p.source, p.target)
        return self.element({p: coeff}, p.source, p.target)

    def zero(self, source: str, target: str) -> "AlgebraElement":
        return AlgebraElement(self, source, target, {})

    def identity(self, v: str) -> "AlgebraElement":
        return AlgebraElement(self, v, v, {Path(v, v, ()): self.field.one})

    def compose(self, a: "AlgebraElement", b: "AlgebraElement") -> "AlgebraElement":
        """Path product ``a o b``: apply ``b`` first.  Requires ``b.target == a.source``."""
        if b.target != a.source:
            raise ValueError(f"cannot compose: target {b.target} of b differs from source {a.source} of a")
        out: dict[Path, object] = {}
        for p, c in a.terms.items():
            for q, e in b.terms.items():
                r = self.concat(p, q)
                if r is not None:
                    out[r] = out.get(r, self.field.zero) + c * e
        return AlgebraElement(self, b.source, a.target, {p: c for p, c in out.items() if c})

    def compose_maps(self, g: "AlgebraElement", f: "AlgebraElement") -> "AlgebraElement":
        """Composite ``g o f`` of module maps ``f: P_a -> P_b``, ``g: P_b -> P_c``."""
        return self.compose(f, g)

    # -- io ------------------------------------------------------------------

    def to_json(self) -> dict:
        return {
            "vertices": list(self.vertices),
            "arrows": [{"name": a.name, "from": a.source, "to": a.target} for a in self.arrows],
            "relations": [list(r) for r in self.relations],
        }

    @classmethod
    def from_json(cls, data: Mapping, field=QQ, path_bound: int = DEFAULT_PATH_BOUND) -> "Algebra":
        try:
            vertices = [str(v) for v in data["vertices"]]
            arrows = [Arrow(str(a["name"]), str(a["from"]), str(a["to"])) for a in data.get("arrows", [])]
            relations = [[str(x) for x in r] for r in data.get("relations", [])]
        except (KeyError, TypeError) as exc:
            raise PresentationError(f"malformed algebra file: {exc}") from exc
        return cls(vertices, arrows, relations, field=field, path_bound=path_bound)

    def __repr__(self):
        return f"Algebra(vertices={list(self.vertices)}, arrows={len(self.arrows)}, relations={len(self.relations)}, dim={len(self.basis)})"


def load_algebra(source, field=QQ, path_bound: int = DEFAULT_PATH_BOUND) -> Algebra:
    """Load from a dict, a JSON string, or a path to a JSON file."""
    if isinstance(source, Mapping):
        return Algebra.from_json(source, field, path_bound)
    text = str(source)
    if text.lstrip().startswith("{"):
        return Algebra.from_json(json.loads(text), field, path_bound)
    with open(text, encoding="utf-8") as fh:
        return Algebra.from_json(json.load(fh), field, path_bound)


@dataclass(frozen=True, eq=False)
class AlgebraElement:
    """A linear combination of basis paths from ``source`` to ``target``."""

    algebra: Algebra = field(repr=False)
    source: str
    target: str
    terms: Mapping[Path, object]

    def __add__(self, other: "AlgebraElement") -> "AlgebraElement":
        self._check(other)
        out = dict(self.terms)
        for p, c in other.terms.items():
            out[p] = out.get(p, self.algebra.field.zero) + c
        return AlgebraElement(self.algebra, self.source, self.target, {p: c for p, c in out.items() if c})

    def __neg__(self) -> "AlgebraElement":
        return AlgebraElement(self.algebra, self.source, self.target, {p: -c for p, c in self.terms.items()})

    def __sub__(self, other: "AlgebraElement") -> "AlgebraElement":
        return self + (-other)

    def scale(self, c) -> "AlgebraElement":
        c = self.algebra.field(c)
        if not c:
            return self.algebra.zero(self.source, self.target)
        return AlgebraElement(self.algebra, self.source, self.target, {p: c * x for p, x in self.terms.items()})

    def _check(self, other):
        if (other.source, other.target) != (self.source, self.target):
            raise ValueError("elements live in different path slots")

    def __eq__(self, other):
        if not isinstance(other, AlgebraElement):
            return NotImplemented
        return (self.source, self.target) == (other.source, other.target) and dict(self.terms) == dict(other.terms)

    def __hash__(self):
        return hash((self.source, self.target, frozenset(self.terms.items())))

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def identity_coefficient(self):
        """Coefficient of the trivial path (zero unless source == target)."""
        if self.source != self.target:
            return self.algebra.field.zero
        return self.terms.get(Path(self.source, self.source, ()), self.algebra.field.zero)

    def in_radical(self) -> bool:
        return not self.identity_coefficient()

    def to_json(self) -> list[dict]:
        return [{"path": list(p.arrows), "coeff": format_scalar(c)} for p, c in self.terms.items()]

    def __str__(self):
        if not self.terms:
            return "0"
        return " + ".join(f"{format_scalar(c)}*{p}" for p, c in self.terms.items())
