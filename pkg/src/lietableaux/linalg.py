"""Dense exact linear algebra over the rationals.

Matrices hold fractions.Fraction entries (arbitrary-precision integers
underneath), so nothing here ever rounds.  Elimination clears denominators
row-wise and runs fraction-free (Bareiss one-step division), which keeps
intermediate integers to minor size instead of letting them swell; results
are normalized back to rationals at output.

Subspaces are stored with a reduced-row-echelon basis, so two subspaces are
equal iff their dataclass fields are equal.
"""

from __future__ import annotations

import hashlib
import random
from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from typing import Iterable, Optional, Sequence

from .errors import DimensionMismatch, InputError

Vec = tuple[Fraction, ...]


# ---------------------------------------------------------------------------
# rationals and vectors


def rat(x) -> Fraction:
    """Coerce an int, string 'p' / 'p/q', or Fraction to Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return parse_rational(x)
    raise InputError(f"cannot interpret {x!r} as a rational number")


def parse_rational(s: str) -> Fraction:
    """Parse 'p' or 'p/q'.  A zero denominator is rejected, not normalized."""
    text = s.strip()
    num, sep, den = text.partition("/")
    try:
        p = int(num)
        q = int(den) if sep else 1
    except ValueError:
        raise InputError(f"bad rational literal {s!r}") from None
    if q == 0:
        raise InputError(f"zero denominator in rational literal {s!r}")
    return Fraction(p, q)


def format_rational(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def vec(entries: Iterable) -> Vec:
    return tuple(rat(e) for e in entries)


def zero_vec(n: int) -> Vec:
    return (Fraction(0),) * n


def unit_vec(n: int, i: int) -> Vec:
    return tuple(Fraction(1 if j == i else 0) for j in range(n))


def vec_add(u: Vec, v: Vec) -> Vec:
    return tuple(a + b for a, b in zip(u, v, strict=True))


def vec_sub(u: Vec, v: Vec) -> Vec:
    return tuple(a - b for a, b in zip(u, v, strict=True))


def vec_scale(c: Fraction, u: Vec) -> Vec:
    return tuple(c * a for a in u)


def vec_dot(u: Vec, v: Vec) -> Fraction:
    return sum((a * b for a, b in zip(u, v, strict=True)), Fraction(0))


def is_zero_vec(u: Vec) -> bool:
    return all(a == 0 for a in u)


def derive_seed(*parts) -> int:
    """Deterministically mix labels and integers into an RNG seed.

    hash() is salted per process, so stable sub-seeds go through sha256.
    """
    blob = repr(parts).encode()
    return int.from_bytes(hashlib.sha256(blob).digest()[:8], "big")


# ---------------------------------------------------------------------------
# elimination core


def _integer_rows(rows: Sequence[Sequence[Fraction]]) -> list[list[int]]:
    # Row scaling preserves row space, rank and kernel.
    out = []
    for r in rows:
        m = lcm(*(x.denominator for x in r)) if r else 1
        out.append([int(x * m) for x in r])
    return out


def _echelon(rows_in: Sequence[Sequence[Fraction]]) -> tuple[list[list[int]], list[int]]:
    """Fraction-free echelon form of integer-scaled rows.

    Returns (nonzero echelon rows, pivot column indices).  The one-step
    Bareiss division by the previous pivot is exact; the divmod assert guards
    the invariant.
    """
    rows = _integer_rows(rows_in)
    m = len(rows)
    n = len(rows[0]) if m else 0
    pivots: list[int] = []
    r = 0
    prev = 1
    for c in range(n):
        if r == m:
            break
        p = next((i for i in range(r, m) if rows[i][c] != 0), None)
        if p is None:
            continue
        if p != r:
            rows[r], rows[p] = rows[p], rows[r]
        pivot = rows[r][c]
        for i in range(r + 1, m):
            fi = rows[i][c]
            ri, rr = rows[i], rows[r]
            for j in range(c, n):
                q, rem = divmod(pivot * ri[j] - fi * rr[j], prev)
                assert rem == 0, "fraction-free elimination lost exactness"
                ri[j] = q
        prev = pivot
        pivots.append(c)
        r += 1
    return [rows[i] for i in range(r)], pivots


def _rref(rows_in: Sequence[Sequence[Fraction]]) -> tuple[list[Vec], list[int]]:
    """Reduced row echelon form (unit pivots, zeros above), zero rows dropped."""
    ech, pivots = _echelon(rows_in)
    n = len(rows_in[0]) if rows_in else 0
    frows = [[Fraction(x) for x in row] for row in ech]
    for k in range(len(pivots) - 1, -1, -1):
        c = pivots[k]
        pv = frows[k][c]
        frows[k] = [x / pv for x in frows[k]]
        for i in range(k):
            f = frows[i][c]
            if f:
                frows[i] = [a - f * b for a, b in zip(frows[i], frows[k])]
    _ = n
    return [tuple(r) for r in frows], pivots


# ---------------------------------------------------------------------------
# matrices


@dataclass(frozen=True)
class Matrix:
    """Immutable dense rational matrix (row-major tuple of tuples)."""

    rows: int
    cols: int
    data: tuple[Vec, ...]

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence], cols: Optional[int] = None) -> "Matrix":
        data = tuple(vec(r) for r in rows)
        if data:
            width = len(data[0])
            if any(len(r) != width for r in data):
                raise DimensionMismatch("ragged rows")
            if cols is not None and cols != width:
                raise DimensionMismatch(f"expected {cols} columns, got {width}")
            cols = width
        elif cols is None:
            cols = 0
        return cls(len(data), cols, data)

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "Matrix":
        return cls(rows, cols, tuple(zero_vec(cols) for _ in range(rows)))

    @classmethod
    def identity(cls, n: int) -> "Matrix":
        return cls(n, n, tuple(unit_vec(n, i) for i in range(n)))

    @classmethod
    def from_cols(cls, cols: Sequence[Sequence]) -> "Matrix":
        return cls.from_rows([vec(c) for c in cols]).transpose()

    def entry(self, i: int, j: int) -> Fraction:
        return self.data[i][j]

    def row(self, i: int) -> Vec:
        return self.data[i]

    def col(self, j: int) -> Vec:
        return tuple(r[j] for r in self.data)

    def transpose(self) -> "Matrix":
        return Matrix(self.cols, self.rows, tuple(self.col(j) for j in range(self.cols)))

    def add(self, other: "Matrix") -> "Matrix":
        self._same_shape(other)
        return Matrix(self.rows, self.cols,
                      tuple(vec_add(a, b) for a, b in zip(self.data, other.data)))

    def sub(self, other: "Matrix") -> "Matrix":
        self._same_shape(other)
        return Matrix(self.rows, self.cols,
                      tuple(vec_sub(a, b) for a, b in zip(self.data, other.data)))

    def scale(self, c) -> "Matrix":
        c = rat(c)
        return Matrix(self.rows, self.cols, tuple(vec_scale(c, r) for r in self.data))

    def mul(self, other: "Matrix") -> "Matrix":
        if self.cols != other.rows:
            raise DimensionMismatch(f"cannot multiply {self.shape} by {other.shape}")
        ocols = [other.col(j) for j in range(other.cols)]
        return Matrix(self.rows, other.cols,
                      tuple(tuple(vec_dot(r, c) for c in ocols) for r in self.data))

    def mul_vec(self, v: Vec) -> Vec:
        if self.cols != len(v):
            raise DimensionMismatch(f"matrix has {self.cols} columns, vector length {len(v)}")
        return tuple(vec_dot(r, v) for r in self.data)

    def hstack(self, other: "Matrix") -> "Matrix":
        if self.rows != other.rows:
            raise DimensionMismatch("row counts differ")
        return Matrix(self.rows, self.cols + other.cols,
                      tuple(a + b for a, b in zip(self.data, other.data)))

    def vstack(self, other: "Matrix") -> "Matrix":
        if self.cols != other.cols:
            raise DimensionMismatch("column counts differ")
        return Matrix(self.rows + other.rows, self.cols, self.data + other.data)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    def is_zero(self) -> bool:
        return all(is_zero_vec(r) for r in self.data)

    def rank(self) -> int:
        return len(_echelon(self.data)[1])

    def rref(self) -> tuple["Matrix", tuple[int, ...]]:
        rows, pivots = _rref(self.data)
        return Matrix(len(rows), self.cols, tuple(rows)), tuple(pivots)

    def kernel_basis(self) -> "Subspace":
        """Right null space {v : M v = 0} as a subspace of R^cols."""
        R, pivots = self.rref()
        pivot_set = set(pivots)
        free = [j for j in range(self.cols) if j not in pivot_set]
        vecs = []
        for f in free:
            v = [Fraction(0)] * self.cols
            v[f] = Fraction(1)
            for k, c in enumerate(pivots):
                v[c] = -R.entry(k, f)
            vecs.append(tuple(v))
        return Subspace.from_vectors(self.cols, vecs)

    def image_basis(self) -> "Subspace":
        """Column span as a subspace of R^rows."""
        return Subspace.from_vectors(self.rows, self.transpose().data)

    def solve(self, b: Vec) -> Optional[Vec]:
        """One solution of M x = b, or None when inconsistent."""
        sol = solve_affine(self, b)
        return None if sol is None else sol[0]

    def inverse(self) -> "Matrix":
        if self.rows != self.cols:
            raise DimensionMismatch("only square matrices can be inverted")
        aug = self.hstack(Matrix.identity(self.rows))
        R, pivots = aug.rref()
        if tuple(pivots) != tuple(range(self.rows)):
            raise ValueError("matrix is singular")
        return Matrix(self.rows, self.rows,
                      tuple(r[self.rows:] for r in R.data))

    def _same_shape(self, other: "Matrix") -> None:
        if self.shape != other.shape:
            raise DimensionMismatch(f"shape {self.shape} vs {other.shape}")

    def to_json(self) -> list[list[str]]:
        return [[format_rational(x) for x in r] for r in self.data]

    @classmethod
    def from_json(cls, obj, rows: Optional[int] = None, cols: Optional[int] = None) -> "Matrix":
        if not isinstance(obj, list) or not all(isinstance(r, list) for r in obj):
            raise InputError("matrix JSON must be a list of rows")
        m = cls.from_rows(obj, cols=cols if not obj else None)
        if rows is not None and m.rows != rows:
            raise DimensionMismatch(f"expected {rows} rows, got {m.rows}")
        if cols is not None and obj and m.cols != cols:
            raise DimensionMismatch(f"expected {cols} columns, got {m.cols}")
        return m


# ---------------------------------------------------------------------------
# subspaces


@dataclass(frozen=True)
class Subspace:
    """Linear subspace of R^ambient_dim with a canonical (RREF) basis.

    The canonical basis makes equality of subspaces literal equality of the
    dataclass fields.
    """

    ambient_dim: int
    basis: tuple[Vec, ...]

    @classmethod
    def from_vectors(cls, ambient_dim: int, vectors: Iterable[Sequence]) -> "Subspace":
        vs = [vec(v) for v in vectors]
        for v in vs:
            if len(v) != ambient_dim:
                raise DimensionMismatch(
                    f"vector length {len(v)} in ambient dimension {ambient_dim}")
        rows, _ = _rref(vs)
        return cls(ambient_dim, tuple(rows))

    @classmethod
    def zero(cls, ambient_dim: int) -> "Subspace":
        return cls(ambient_dim, ())

    @classmethod
    def full(cls, ambient_dim: int) -> "Subspace":
        return cls(ambient_dim, tuple(unit_vec(ambient_dim, i) for i in range(ambient_dim)))

    @property
    def dim(self) -> int:
        return len(self.basis)

    def matrix(self) -> Matrix:
        return Matrix(self.dim, self.ambient_dim, self.basis)

    def pivots(self) -> tuple[int, ...]:
        return tuple(next(j for j, x in enumerate(row) if x != 0) for row in self.basis)

    def _reduce(self, v: Vec) -> Vec:
        """Subtract the basis components of v (valid because basis is RREF)."""
        w = list(v)
        for row, p in zip(self.basis, self.pivots()):
            c = w[p]
            if c:
                for j in range(p, self.ambient_dim):
                    w[j] -= c * row[j]
        return tuple(w)

    def contains(self, v: Sequence) -> bool:
        v = vec(v)
        if len(v) != self.ambient_dim:
            raise DimensionMismatch("vector length differs from ambient dimension")
        return is_zero_vec(self._reduce(v))

    def contains_subspace(self, other: "Subspace") -> bool:
        self._same_ambient(other)
        return all(self.contains(v) for v in other.basis)

    def coords_of(self, v: Sequence) -> Vec:
        """Coefficients of v in the canonical basis.  Raises if v is outside."""
        v = vec(v)
        coords = tuple(v[p] for p in self.pivots())
        if not is_zero_vec(self._reduce(v)):
            raise ValueError("vector not in subspace")
        return coords

    def add(self, other: "Subspace") -> "Subspace":
        self._same_ambient(other)
        return Subspace.from_vectors(self.ambient_dim, self.basis + other.basis)

    def intersect(self, other: "Subspace") -> "Subspace":
        self._same_ambient(other)
        d1, d2 = self.dim, other.dim
        if d1 == 0 or d2 == 0:
            return Subspace.zero(self.ambient_dim)
        # w in both spaces iff w = a.U = b.V; solve U^T a - V^T b = 0.
        sys_rows = []
        for i in range(self.ambient_dim):
            sys_rows.append(tuple(self.basis[j][i] for j in range(d1))
                            + tuple(-other.basis[j][i] for j in range(d2)))
        ker = Matrix.from_rows(sys_rows).kernel_basis()
        vecs = []
        for ab in ker.basis:
            w = zero_vec(self.ambient_dim)
            for j in range(d1):
                if ab[j]:
                    w = vec_add(w, vec_scale(ab[j], self.basis[j]))
            vecs.append(w)
        return Subspace.from_vectors(self.ambient_dim, vecs)

    def complement(self) -> "Subspace":
        """Deterministic complement: greedily adjoin standard basis vectors."""
        chosen: list[Vec] = []
        span = self
        for i in range(self.ambient_dim):
            if span.dim == self.ambient_dim:
                break
            e = unit_vec(self.ambient_dim, i)
            grown = span.add(Subspace.from_vectors(self.ambient_dim, [e]))
            if grown.dim > span.dim:
                chosen.append(e)
                span = grown
        return Subspace.from_vectors(self.ambient_dim, chosen)

    def annihilator(self) -> "Subspace":
        """{w : <w, v> = 0 for all v here} under the standard dot pairing."""
        if self.dim == 0:
            return Subspace.full(self.ambient_dim)
        return self.matrix().kernel_basis()

    def _same_ambient(self, other: "Subspace") -> None:
        if self.ambient_dim != other.ambient_dim:
            raise DimensionMismatch(
                f"ambient dimensions differ: {self.ambient_dim} vs {other.ambient_dim}")

    def to_json(self) -> list[list[str]]:
        return [[format_rational(x) for x in r] for r in self.basis]


# ---------------------------------------------------------------------------
# solvers and random data


def solve_affine(A: Matrix, b: Sequence) -> Optional[tuple[Vec, Subspace]]:
    """Solve A x = b exactly.

    Returns (particular solution, homogeneous solution space), or None when
    the system is inconsistent.
    """
    b = vec(b)
    if len(b) != A.rows:
        raise DimensionMismatch(f"matrix has {A.rows} rows, rhs length {len(b)}")
    aug = A.hstack(Matrix(A.rows, 1, tuple((x,) for x in b)))
    R, pivots = aug.rref()
    if A.cols in pivots:
        return None
    x = [Fraction(0)] * A.cols
    for k, c in enumerate(pivots):
        x[c] = R.entry(k, A.cols)
    return tuple(x), A.kernel_basis()


def seeded_random_matrix(rows: int, cols: int, seed: int, entry_bound: int = 10,
                         require_invertible: bool = False) -> Matrix:
    """Deterministic random integer matrix with entries in [-bound, bound].

    With require_invertible the draw is retried (with a derived sub-seed)
    until the matrix is square invertible.
    """
    if entry_bound < 1:
        raise ValueError("entry_bound must be at least 1")
    if require_invertible and rows != cols:
        raise DimensionMismatch("only square matrices can be required invertible")
    attempt = 0
    while True:
        rng = random.Random(derive_seed("matrix", rows, cols, seed, entry_bound, attempt))
        m = Matrix.from_rows(
            [[Fraction(rng.randint(-entry_bound, entry_bound)) for _ in range(cols)]
             for _ in range(rows)], cols=cols)
        if not require_invertible or m.rank() == rows:
            return m
        attempt += 1
