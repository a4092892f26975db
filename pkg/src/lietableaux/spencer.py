"""The complex b (x) S^q(a*) (x) L^p(a*) and its cohomology.

Conventions, fixed here once and used everywhere:

- dim a = n, dim b = s.  S^q(a*) is the space of degree-q homogeneous
  polynomials on a stored by plain monomial coefficients, so the directional
  derivative d_i multiplies the coefficient by the exponent of x_i.
- The coboundary differentiates and wedges on the right,
  delta(xi) = sum_i d_i(xi) ^ dx^i,  with delta = 0 on q = 0.
  Variants that carry a 1/2 prefactor on the antisymmetrization rescale the
  map by a nonzero constant and change no kernel, image or dimension.
- Monomials of one degree are ordered by combinations_with_replacement of
  the variable indices (graded-lexicographic within the degree); exterior
  indices are lexicographic p-subsets of 0..n-1.  A coordinate (b, mono, J)
  flattens to ((b * n_mono + mono_idx) * n_ext + ext_idx).

Cohomology is taken on the subcomplex C^{q,p}(A) = A^(q-1) (x) L^p(a*) of a
tableau A; those operations only need the duck-typed surface of a tableau
(fields n, s and the method prolongation_space(h)).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb
from typing import Iterable, Optional

from .errors import InputError
from .linalg import Matrix, Subspace, Vec, format_rational, rat, zero_vec

Mono = tuple[int, ...]  # exponent tuple, one slot per variable
ExtIdx = tuple[int, ...]  # strictly increasing indices in 0..n-1


# ---------------------------------------------------------------------------
# bases of the graded pieces


@lru_cache(maxsize=None)
def sym_monomials(n: int, q: int) -> tuple[Mono, ...]:
    """All degree-q exponent tuples in n variables, in a fixed order."""
    if q < 0:
        return ()
    out = []
    for combo in itertools.combinations_with_replacement(range(n), q):
        expo = [0] * n
        for i in combo:
            expo[i] += 1
        out.append(tuple(expo))
    return tuple(out)


@lru_cache(maxsize=None)
def ext_indices(n: int, p: int) -> tuple[ExtIdx, ...]:
    if p < 0 or p > n:
        return ()
    return tuple(itertools.combinations(range(n), p))


def sym_dim(n: int, q: int) -> int:
    return 0 if q < 0 else comb(n + q - 1, q)


def ext_dim(n: int, p: int) -> int:
    return 0 if (p < 0 or p > n) else comb(n, p)


def full_dim(n: int, s: int, q: int, p: int) -> int:
    return s * sym_dim(n, q) * ext_dim(n, p)


@lru_cache(maxsize=None)
def _mono_index(n: int, q: int) -> dict:
    return {m: i for i, m in enumerate(sym_monomials(n, q))}


@lru_cache(maxsize=None)
def _ext_index(n: int, p: int) -> dict:
    return {e: i for i, e in enumerate(ext_indices(n, p))}


def flat_index(n: int, s: int, q: int, p: int, b: int, mono: Mono, ext: ExtIdx) -> int:
    return (b * sym_dim(n, q) + _mono_index(n, q)[mono]) * ext_dim(n, p) + _ext_index(n, p)[ext]


def insert_sign(ext: ExtIdx, i: int) -> Optional[tuple[int, ExtIdx]]:
    """Sign and result of wedging dx^i onto e_ext from the right, or None."""
    if i in ext:
        return None
    bigger = sum(1 for j in ext if j > i)
    sign = -1 if bigger % 2 else 1
    return sign, tuple(sorted(ext + (i,)))


# ---------------------------------------------------------------------------
# cochains


@dataclass
class SpencerCochain:
    """Sparse element of b (x) S^q(a*) (x) L^p(a*).

    coords maps (b_index, exponent tuple, exterior index tuple) to a nonzero
    Fraction; zero coefficients are dropped on normalization.
    """

    n: int
    s: int
    q: int
    p: int
    coords: dict

    def __post_init__(self):
        clean = {}
        for (b, mono, ext), c in self.coords.items():
            c = rat(c)
            if c == 0:
                continue
            if not (0 <= b < self.s):
                raise InputError(f"b index {b} out of range")
            if len(mono) != self.n or any(e < 0 for e in mono) or sum(mono) != self.q:
                raise InputError(f"bad exponent tuple {mono} for degree {self.q}")
            if tuple(sorted(set(ext))) != tuple(ext) or len(ext) != self.p \
                    or any(not 0 <= i < self.n for i in ext):
                raise InputError(f"bad exterior index tuple {ext}")
            clean[(b, tuple(mono), tuple(ext))] = c
        self.coords = clean

    @classmethod
    def zero(cls, n: int, s: int, q: int, p: int) -> "SpencerCochain":
        return cls(n, s, q, p, {})

    def is_zero(self) -> bool:
        return not self.coords

    def space(self) -> tuple[int, int, int, int]:
        return (self.n, self.s, self.q, self.p)

    def add(self, other: "SpencerCochain") -> "SpencerCochain":
        assert self.space() == other.space()
        coords = dict(self.coords)
        for k, c in other.coords.items():
            coords[k] = coords.get(k, Fraction(0)) + c
        return SpencerCochain(self.n, self.s, self.q, self.p, coords)

    def scale(self, c) -> "SpencerCochain":
        c = rat(c)
        return SpencerCochain(self.n, self.s, self.q, self.p,
                              {k: c * v for k, v in self.coords.items()})

    def coboundary(self) -> "SpencerCochain":
        """delta(xi) = sum_i d_i(xi) ^ dx^i; lands in (q-1, p+1)."""
        out: dict = {}
        if self.q == 0:
            return SpencerCochain(self.n, self.s, self.q - 1, self.p + 1, {})
        for (b, mono, ext), c in self.coords.items():
            for i in range(self.n):
                e = mono[i]
                if e == 0:
                    continue
                ins = insert_sign(ext, i)
                if ins is None:
                    continue
                sign, new_ext = ins
                new_mono = mono[:i] + (e - 1,) + mono[i + 1:]
                key = (b, new_mono, new_ext)
                out[key] = out.get(key, Fraction(0)) + c * e * sign
        return SpencerCochain(self.n, self.s, self.q - 1, self.p + 1, out)

    def flatten(self) -> Vec:
        v = [Fraction(0)] * full_dim(self.n, self.s, self.q, self.p)
        for (b, mono, ext), c in self.coords.items():
            v[flat_index(self.n, self.s, self.q, self.p, b, mono, ext)] = c
        return tuple(v)

    @classmethod
    def from_flat(cls, n: int, s: int, q: int, p: int, v: Iterable) -> "SpencerCochain":
        v = list(v)
        if len(v) != full_dim(n, s, q, p):
            raise InputError("flat vector length does not match the graded piece")
        coords = {}
        monos = sym_monomials(n, q)
        exts = ext_indices(n, p)
        idx = 0
        for b in range(s):
            for mono in monos:
                for ext in exts:
                    c = rat(v[idx])
                    if c != 0:
                        coords[(b, mono, ext)] = c
                    idx += 1
        return cls(n, s, q, p, coords)

    def to_json(self) -> list:
        items = sorted(self.coords.items())
        return [[b, list(mono), list(ext), format_rational(c)]
                for (b, mono, ext), c in items]

    @classmethod
    def from_json(cls, n: int, s: int, q: int, p: int, obj) -> "SpencerCochain":
        if not isinstance(obj, list):
            raise InputError("cochain JSON must be a list of [b, expo, idx, coeff] items")
        coords = {}
        for item in obj:
            if not (isinstance(item, list) and len(item) == 4):
                raise InputError(f"bad cochain term {item!r}")
            b, mono, ext, c = item
            coords[(int(b), tuple(int(e) for e in mono), tuple(int(i) for i in ext))] = rat(c)
        return cls(n, s, q, p, coords)

    def __eq__(self, other):
        return isinstance(other, SpencerCochain) and self.space() == other.space() \
            and self.coords == other.coords


# ---------------------------------------------------------------------------
# coboundary as a matrix


@lru_cache(maxsize=None)
def coboundary_matrix(n: int, s: int, q: int, p: int) -> Matrix:
    """Matrix of delta^{q,p} from (q,p) to (q-1,p+1) in flattened coordinates."""
    src = full_dim(n, s, q, p)
    dst = full_dim(n, s, q - 1, p + 1)
    cols: list[Vec] = []
    monos = sym_monomials(n, q)
    exts = ext_indices(n, p)
    for b in range(s):
        for mono in monos:
            for ext in exts:
                basis_elt = SpencerCochain(n, s, q, p, {(b, mono, ext): Fraction(1)})
                img = basis_elt.coboundary()
                col = [Fraction(0)] * dst
                for (bb, mm, ee), c in img.coords.items():
                    col[flat_index(n, s, q - 1, p + 1, bb, mm, ee)] = c
                cols.append(tuple(col))
    if not cols:
        return Matrix.zeros(dst, src)
    return Matrix.from_cols(cols) if dst else Matrix.zeros(0, src)


# ---------------------------------------------------------------------------
# tableau subcomplex (duck-typed tableau: needs .n, .s, .prolongation_space)


def cochain_space(A, q: int, p: int) -> Subspace:
    """C^{q,p}(A) = A^(q-1) (x) L^p(a*) inside the full flattened piece."""
    n, s = A.n, A.s
    if not (0 <= p <= n) or q < 0:
        raise InputError(f"no graded piece at (q,p)=({q},{p})")
    sub = A.prolongation_space(q - 1)  # subspace of b (x) S^q, flattened
    nm, ne = sym_dim(n, q), ext_dim(n, p)
    vecs = []
    for v in sub.basis:
        for e_idx in range(ne):
            w = [Fraction(0)] * (s * nm * ne)
            for k, c in enumerate(v):
                if c:
                    w[k * ne + e_idx] = c
            vecs.append(tuple(w))
    return Subspace.from_vectors(s * nm * ne, vecs)


def _restricted_rank(n: int, s: int, q: int, p: int, space: Subspace) -> int:
    """Rank of delta^{q,p} restricted to the given subspace."""
    if space.dim == 0:
        return 0
    M = coboundary_matrix(n, s, q, p)
    img_cols = [M.mul_vec(v) for v in space.basis]
    return Matrix.from_cols(img_cols).rank() if M.rows else 0


def cohomology_dim(A, q: int, p: int) -> int:
    """dim H^{q,p}(A) = dim ker delta on C^{q,p} minus dim of the image from C^{q+1,p-1}."""
    n, s = A.n, A.s
    if not (0 <= p <= n) or q < 0:
        raise InputError(f"no cohomology at (q,p)=({q},{p})")
    C = cochain_space(A, q, p)
    if q == 0:
        z = C.dim  # delta vanishes on q = 0
    else:
        z = C.dim - _restricted_rank(n, s, q, p, C)
    if p == 0:
        b_rank = 0
    else:
        b_rank = _restricted_rank(n, s, q + 1, p - 1, cochain_space(A, q + 1, p - 1))
    return z - b_rank


def delta11_image(A) -> Subspace:
    """Image of delta^{1,1} on A (x) a*, inside flattened b (x) L^2(a*).

    This is the subspace torsion must fall in to be absorbable.
    """
    n, s = A.n, A.s
    C = cochain_space(A, 1, 1)
    M = coboundary_matrix(n, s, 1, 1)
    if C.dim == 0 or M.rows == 0:
        return Subspace.zero(full_dim(n, s, 0, 2))
    return Matrix.from_cols([M.mul_vec(v) for v in C.basis]).image_basis()


@dataclass(frozen=True)
class TorsionClass:
    """A class in H^{0,2}(A) = b (x) L^2 / delta(A (x) a*).

    class_coords are coefficients in a deterministic complement of the
    delta-image (standard basis vectors, greedily completed); empty iff zero.
    """

    is_zero: bool
    class_coords: tuple
    complement_pivots: tuple


def torsion_class(c: SpencerCochain, A) -> TorsionClass:
    if (c.q, c.p) != (0, 2) or c.n != A.n or c.s != A.s:
        raise InputError("torsion class needs a (0,2) cochain matching the tableau")
    img = delta11_image(A)
    v = c.flatten()
    if img.contains(v):
        return TorsionClass(True, (), ())
    comp = img.complement()
    comp_pivots = comp.pivots()
    stacked = img.matrix().vstack(comp.matrix()).transpose()
    sol = stacked.solve(v)
    assert sol is not None, "complement construction must span the ambient space"
    coords = tuple(sol[img.dim:])
    return TorsionClass(False, coords, comp_pivots)


# ---------------------------------------------------------------------------
# 2-acyclicity


@dataclass(frozen=True)
class TwoAcyclicityVerdict:
    """Outcome of checking H^{q,2}(A) = 0 for q = 1..q_max.

    status is one of:
      "certified"     all of H^{*,2} vanishes: the checks passed up to a level
                      whose prolongation is involutive, which kills the rest;
      "acyclic_up_to" every checked group vanished but no involutive level
                      appeared within the window;
      "fails_at"      some H^{q,2} is nonzero (failure holds its dimension).
    """

    status: str
    q_checked: int
    certified_at: Optional[int]
    failure: Optional[tuple[int, int]]

    @property
    def holds_in_window(self) -> bool:
        return self.status in ("certified", "acyclic_up_to")


def is_2acyclic(A, q_max: int = 4, trials: int = 5, seed: int = 1) -> TwoAcyclicityVerdict:
    from . import tableau as _tableau  # deferred: tableau builds on this module

    h0: Optional[int] = None
    for h in range(q_max + 1):
        if _tableau.cartan_test_at_level(A, h, trials=trials, seed=seed).involutive:
            h0 = h
            break
    upper = h0 if h0 is not None else q_max
    for q in range(1, upper + 1):
        d = cohomology_dim(A, q, 2)
        if d != 0:
            return TwoAcyclicityVerdict("fails_at", q, None, (q, d))
    if h0 is not None:
        return TwoAcyclicityVerdict("certified", upper, h0, None)
    return TwoAcyclicityVerdict("acyclic_up_to", q_max, None, None)
