"""Exact arithmetic over Q and F_p, dense field matrices, and integer Smith forms."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence


class Rationals:
    """The field Q, with elements stored as :class:`fractions.Fraction`."""

    name = "Q"
    characteristic = 0

    def __call__(self, value) -> Fraction:
        if isinstance(value, str):
            return parse_scalar(value)
        return Fraction(value)

    @property
    def zero(self) -> Fraction:
        return Fraction(0)

    @property
    def one(self) -> Fraction:
        return Fraction(1)

    def __eq__(self, other):
        return isinstance(other, Rationals)

    def __hash__(self):
        return hash("Q")

    def __repr__(self):
        return "Q"


QQ = Rationals()


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    i = 2
    while i * i <= p:
        if p % i == 0:
            return False
        i += 1
    return True


class PrimeField:
    """The field F_p."""

    def __init__(self, p: int):
        if not _is_prime(p):
            raise ValueError(f"{p} is not prime")
        self.p = p
        self.characteristic = p
        self.name = f"Fp:{p}"

    def __call__(self, value) -> "ModP":
        if isinstance(value, ModP):
            if value.p != self.p:
                raise ValueError("residue from a different prime field")
            return value
        if isinstance(value, str):
            value = parse_scalar(value)
        if isinstance(value, Fraction):
            num = ModP(value.numerator % self.p, self.p)
            den = value.denominator % self.p
            if den == 0:
                raise ZeroDivisionError(f"denominator divisible by {self.p}")
            return num / ModP(den, self.p)
        return ModP(int(value) % self.p, self.p)

    @property
    def zero(self) -> "ModP":
        return ModP(0, self.p)

    @property
    def one(self) -> "ModP":
        return ModP(1, self.p)

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self):
        return hash(("Fp", self.p))

    def __repr__(self):
        return f"GF({self.p})"


class ModP:
    """A residue class mod a prime, always reduced into [0, p-1]."""

    __slots__ = ("v", "p")

    def __init__(self, v: int, p: int):
        self.v = v % p
        self.p = p

    def _coerce(self, other) -> int:
        if isinstance(other, ModP):
            if other.p != self.p:
                raise ValueError("mixed prime fields")
            return other.v
        if isinstance(other, int):
            return other
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else ModP(self.v + o, self.p)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else ModP(self.v - o, self.p)

    def __rsub__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else ModP(o - self.v, self.p)

    def __mul__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else ModP(self.v * o, self.p)

    __rmul__ = __mul__

    def __neg__(self):
        return ModP(-self.v, self.p)

    def inverse(self) -> "ModP":
        if self.v == 0:
            raise ZeroDivisionError("inverse of 0 mod p")
        return ModP(pow(self.v, -1, self.p), self.p)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self * ModP(o, self.p).inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return ModP(o, self.p) * self.inverse()

    def __eq__(self, other):
        if isinstance(other, ModP):
            return self.p == other.p and self.v == other.v
        if isinstance(other, int):
            return self.v == other % self.p
        return NotImplemented

    def __hash__(self):
        return hash((self.v, self.p))

    def __bool__(self):
        return self.v != 0

    def __repr__(self):
        return f"{self.v} (mod {self.p})"

    def __str__(self):
        return str(self.v)


def make_field(spec: str):
    """Parse ``"Q"`` or ``"Fp:<p>"`` into a field object."""
    if spec in ("Q", "QQ"):
        return QQ
    if spec.startswith("Fp:"):
        return PrimeField(int(spec[3:]))
    raise ValueError(f"unknown field {spec!r}; expected 'Q' or 'Fp:<prime>'")


def format_scalar(x) -> str:
    """Serialize as ``num/den``, dropping the denominator when it is 1."""
    if isinstance(x, ModP):
        return str(x.v)
    x = Fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def parse_scalar(s: str) -> Fraction:
    s = s.strip()
    if "/" in s:
        num, den = s.split("/")
        return Fraction(int(num), int(den))
    return Fraction(int(s))


@dataclass(frozen=True)
class FieldMatrix:
    rows: int
    cols: int
    entries: tuple
    field: object = QQ

    def __post_init__(self):
        if len(self.entries) != self.rows * self.cols:
            raise ValueError("entry count must equal rows * cols")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence], field=QQ, cols: int | None = None) -> "FieldMatrix":
        rows = [list(r) for r in rows]
        if cols is None:
            cols = len(rows[0]) if rows else 0
        if any(len(r) != cols for r in rows):
            raise ValueError("ragged rows")
        return cls(len(rows), cols, tuple(field(x) for r in rows for x in r), field)

    @classmethod
    def zeros(cls, rows: int, cols: int, field=QQ) -> "FieldMatrix":
        return cls(rows, cols, (field.zero,) * (rows * cols), field)

    @classmethod
    def identity(cls, n: int, field=QQ) -> "FieldMatrix":
        return cls(n, n, tuple(field.one if i == j else field.zero for i in range(n) for j in range(n)), field)

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i * self.cols + j]

    def to_rows(self) -> list[list]:
        return [list(self.entries[i * self.cols:(i + 1) * self.cols]) for i in range(self.rows)]

    def column(self, j: int) -> list:
        return [self[i, j] for i in range(self.rows)]

    def columns(self) -> list[list]:
        return [self.column(j) for j in range(self.cols)]

    def __matmul__(self, other: "FieldMatrix") -> "FieldMatrix":
        if self.cols != other.rows:
            raise ValueError("dimension mismatch")
        a, b = self.to_rows(), other.to_rows()
        zero = self.field.zero
        out = []
        for i in range(self.rows):
            row = [zero] * other.cols
            for k, aik in enumerate(a[i]):
                if aik:
                    bk = b[k]
                    for j in range(other.cols):
                        if bk[j]:
                            row[j] = row[j] + aik * bk[j]
            out.append(row)
        return FieldMatrix(self.rows, other.cols, tuple(x for r in out for x in r), self.field)

    def is_zero(self) -> bool:
        return not any(self.entries)


def rref(rows: list[list], ncols: int) -> tuple[list[list], list[int]]:
    """Reduced row echelon form of a list of rows (copied); returns (rows, pivot columns)."""
    m = [list(r) for r in rows]
    pivots: list[int] = []
    r = 0
    nrows = len(m)
    for c in range(ncols):
        if r == nrows:
            break
        p = next((i for i in range(r, nrows) if m[i][c]), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        inv = 1 / m[r][c]
        pr = [x * inv for x in m[r]]
        m[r] = pr
        for i in range(nrows):
            if i != r and m[i][c]:
                f = m[i][c]
                mi = m[i]
                m[i] = [mi[j] - f * pr[j] if pr[j] else mi[j] for j in range(ncols)]
        pivots.append(c)
        r += 1
    return m[:r], pivots


def rank_kernel(m: FieldMatrix) -> tuple[int, FieldMatrix]:
    """Rank of ``m`` and a basis of its right kernel, as the columns of a matrix."""
    field = m.field
    red, pivots = rref(m.to_rows(), m.cols)
    free = [j for j in range(m.cols) if j not in set(pivots)]
    basis = []
    for fj in free:
        v = [field.zero] * m.cols
        v[fj] = field.one
        for row, pc in zip(red, pivots):
            v[pc] = -row[fj]
        basis.append(v)
    kernel = FieldMatrix(m.cols, len(basis), tuple(basis[j][i] for i in range(m.cols) for j in range(len(basis))), field)
    return len(pivots), kernel


def solve(m: FieldMatrix, b: FieldMatrix) -> FieldMatrix | None:
    """Some ``x`` with ``m @ x == b``, or None when the system is inconsistent."""
    if m.rows != b.rows:
        raise ValueError(f"row counts differ: {m.rows} vs {b.rows}")
    field = m.field
    n = m.cols
    aug = [ra + rb for ra, rb in zip(m.to_rows(), b.to_rows())]
    red, pivots = rref(aug, n + b.cols)
    if any(pc >= n for pc in pivots):
        return None
    x = [[field.zero] * b.cols for _ in range(n)]
    for row, pc in zip(red, pivots):
        x[pc] = row[n:]
    return FieldMatrix(n, b.cols, tuple(v for r in x for v in r), field)


# --- integer matrices and Smith normal form ---------------------------------


@dataclass(frozen=True)
class IntMatrix:
    rows: int
    cols: int
    entries: tuple[int, ...]

    def __post_init__(self):
        if len(self.entries) != self.rows * self.cols:
            raise ValueError("entry count must equal rows * cols")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], cols: int | None = None) -> "IntMatrix":
        rows = [list(r) for r in rows]
        if cols is None:
            cols = len(rows[0]) if rows else 0
        if any(len(r) != cols for r in rows):
            raise ValueError("ragged rows")
        return cls(len(rows), cols, tuple(int(x) for r in rows for x in r))

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        return cls(n, n, tuple(int(i == j) for i in range(n) for j in range(n)))

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i * self.cols + j]

    def to_rows(self) -> list[list[int]]:
        return [list(self.entries[i * self.cols:(i + 1) * self.cols]) for i in range(self.rows)]

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        if self.cols != other.rows:
            raise ValueError("dimension mismatch")
        a, b = self.to_rows(), other.to_rows()
        out = [[sum(a[i][k] * b[k][j] for k in range(self.cols)) for j in range(other.cols)] for i in range(self.rows)]
        return IntMatrix.from_rows(out, other.cols)


def int_determinant(a: IntMatrix) -> int:
    """Exact determinant by Bareiss fraction-free elimination."""
    if a.rows != a.cols:
        raise ValueError("determinant of a non-square matrix")
    n = a.rows
    m = a.to_rows()
    sign, prev = 1, 1
    for k in range(n - 1):
        if m[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if m[i][k]), None)
            if swap is None:
                return 0
            m[k], m[swap] = m[swap], m[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
        prev = m[k][k]
    return sign * m[n - 1][n - 1] if n else 1


@dataclass(frozen=True)
class SmithForm:
    """``U @ A @ V == D`` where D carries ``diagonal`` on its leading diagonal."""

    diagonal: tuple[int, ...]
    U: IntMatrix
    V: IntMatrix
    shape: tuple[int, int]

    def diagonal_matrix(self) -> IntMatrix:
        r, c = self.shape
        rows = [[0] * c for _ in range(r)]
        for i, d in enumerate(self.diagonal):
            rows[i][i] = d
        return IntMatrix.from_rows(rows, c)


def smith_normal_form(a: IntMatrix) -> SmithForm:
    """Smith normal form by row/column elimination, pivoting on the smallest nonzero entry.

    Only the nonzero invariant factors are kept in ``diagonal``.
    """
    nr, nc = a.rows, a.cols
    m = a.to_rows()
    U = IntMatrix.identity(nr).to_rows()
    V = IntMatrix.identity(nc).to_rows()

    def swap_rows(i, j):
        m[i], m[j] = m[j], m[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for row in m:
            row[i], row[j] = row[j], row[i]
        for row in V:
            row[i], row[j] = row[j], row[i]

    def add_row(src, dst, q):  # row[dst] += q * row[src]
        m[dst] = [x + q * y for x, y in zip(m[dst], m[src])]
        U[dst] = [x + q * y for x, y in zip(U[dst], U[src])]

    def add_col(src, dst, q):
        for row in m:
            row[dst] += q * row[src]
        for row in V:
            row[dst] += q * row[src]

    t = 0
    while t < min(nr, nc):
        nonzero = [(abs(m[i][j]), i, j) for i in range(t, nr) for j in range(t, nc) if m[i][j]]
        if not nonzero:
            break
        _, pi, pj = min(nonzero)
        swap_rows(t, pi)
        swap_cols(t, pj)
        while True:
            p = m[t][t]
            dirty = False
            for i in range(t + 1, nr):
                if m[i][t]:
                    add_row(t, i, -(m[i][t] // p))
                    dirty = dirty or m[i][t] != 0
            for j in range(t + 1, nc):
                if m[t][j]:
                    add_col(t, j, -(m[t][j] // p))
                    dirty = dirty or m[t][j] != 0
            if dirty:
                cands = [(abs(m[i][t]), i, t) for i in range(t + 1, nr) if m[i][t]]
                cands += [(abs(m[t][j]), t, j) for j in range(t + 1, nc) if m[t][j]]
                _, ci, cj = min(cands)
                if ci != t:
                    swap_rows(t, ci)
                else:
                    swap_cols(t, cj)
                continue
            # pivot isolated; enforce divisibility of the remaining block
            bad = next(((i, j) for i in range(t + 1, nr) for j in range(t + 1, nc) if m[i][j] % p), None)
            if bad is None:
                break
            add_row(bad[0], t, 1)
        if m[t][t] < 0:
            m[t] = [-x for x in m[t]]
            U[t] = [-x for x in U[t]]
        t += 1

    diagonal = tuple(m[i][i] for i in range(t))
    return SmithForm(diagonal, IntMatrix.from_rows(U, nr), IntMatrix.from_rows(V, nc), (nr, nc))
