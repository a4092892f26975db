"""Tableaux: linear subspaces A of Hom(a, b) and their invariants.

A tableau is stored by generators (s x n matrices, rows indexed by b, columns
by a) together with the subspace they span inside the flattened coordinate
space, flat index = b_index * n + a_index.  That flattening agrees with the
(q=1, p=0) piece of the symmetric-coefficient convention in spencer.py, so a
tableau literally is a subspace of b (x) S^1(a*).

Prolongations A^(h) live in b (x) S^(h+1)(a*):
    A^(h) = { P : d_i P in A^(h-1) for every i },  A^(-1) = b, A^(0) = A.
They are computed two independent ways and compared:
  * directly, by imposing the derivative constraints;
  * as the kernel of the coboundary delta on A^(h-1) (x) a*, pulled back to
    symmetric coordinates by the Euler map P = (1/deg) sum_i x_i F_i.

Characters come from random full flags: s_1 + ... + s_j is the codimension in
A of the elements vanishing on a generic j-plane; trials are pooled by taking
the maximal codimension (generic = smallest kernel).
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from . import spencer
from .errors import GenericityUnstable, InputError, NotInvolutive
from .linalg import (
    Matrix,
    Subspace,
    Vec,
    derive_seed,
    seeded_random_matrix,
    vec,
    zero_vec,
)

DEFAULT_TRIALS = 5
DEFAULT_SEED = 1
ENTRY_BOUND = 10  # entry range for random flags; documented, not tweakable per call


@dataclass(frozen=True)
class Characters:
    """Cartan characters s_1 >= ... >= s_n >= 0 with sum = dim A.

    cartan_integer is the largest j with s_j != 0 (0 for the zero tableau);
    principal is s_j at that index.
    """

    s_list: tuple[int, ...]
    principal: int
    cartan_integer: int
    trials_used: int
    seed: int

    @property
    def cumulative(self) -> tuple[int, ...]:
        out, total = [], 0
        for s in self.s_list:
            total += s
            out.append(total)
        return tuple(out)

    def cartan_bound(self) -> int:
        return sum((j + 1) * s for j, s in enumerate(self.s_list))


@dataclass(frozen=True)
class CartanTestResult:
    level: int
    dim_prolongation: int
    bound: int
    involutive: bool
    characters: Characters


class Tableau:
    """Subspace of Hom(a, b); immutable after construction, caches inside."""

    def __init__(self, n: int, s: int, generators: Sequence[Matrix]):
        if n < 1 or s < 0:
            raise InputError(f"need n >= 1 and s >= 0, got n={n}, s={s}")
        gens = []
        for g in generators:
            if g.shape != (s, n):
                raise InputError(f"generator shape {g.shape} does not match (s,n)=({s},{n})")
            gens.append(g)
        self.n = n
        self.s = s
        self.generators = tuple(gens)
        self.basis = Subspace.from_vectors(s * n, [flatten_hom(g) for g in gens])
        # prolongation spaces by degree; filled compute-then-publish
        self._prolongations: dict[int, Subspace] = {}
        self._char_cache: dict[tuple[int, int], Characters] = {}

    @property
    def dim(self) -> int:
        return self.basis.dim

    def basis_matrices(self) -> tuple[Matrix, ...]:
        return tuple(unflatten_hom(v, self.n, self.s) for v in self.basis.basis)

    # -- prolongation ------------------------------------------------------

    def prolongation_space(self, h: int) -> Subspace:
        """A^(h) flattened inside b (x) S^(h+1)(a*); h = -1 gives all of b."""
        if h < -1:
            raise InputError("prolongation order must be >= -1")
        if h == -1:
            return Subspace.full(self.s)
        if h == 0:
            return self.basis
        cached = self._prolongations.get(h)
        if cached is None:
            prev = self.prolongation_space(h - 1)
            cached = _prolong_step(self.n, self.s, h, prev)
            self._prolongations[h] = cached
        return cached

    def prolongation_dim(self, h: int) -> int:
        return self.prolongation_space(h).dim

    # -- characters --------------------------------------------------------

    def characters(self, trials: int = DEFAULT_TRIALS, seed: int = DEFAULT_SEED) -> Characters:
        key = (trials, seed)
        cached = self._char_cache.get(key)
        if cached is None:
            flags = [seeded_random_matrix(self.n, self.n, derive_seed("flag", seed, t),
                                          ENTRY_BOUND, require_invertible=True)
                     for t in range(trials)]
            cached = _characters_from_flags(self, flags, trials, seed)
            self._char_cache[key] = cached
        return cached

    def to_json(self) -> dict:
        return {"n": self.n, "s": self.s,
                "generators": [g.to_json() for g in self.generators]}

    @classmethod
    def from_json(cls, obj) -> "Tableau":
        try:
            n, s = int(obj["n"]), int(obj["s"])
            gens = obj.get("generators", [])
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"tableau JSON needs integer 'n', 's' and 'generators': {exc}")
        return cls(n, s, [Matrix.from_json(g, rows=s, cols=n) for g in gens])


def flatten_hom(g: Matrix) -> Vec:
    return tuple(x for row in g.data for x in row)


def unflatten_hom(v: Sequence, n: int, s: int) -> Matrix:
    v = vec(v)
    if len(v) != s * n:
        raise InputError("flat vector length does not match s*n")
    return Matrix.from_rows([v[b * n:(b + 1) * n] for b in range(s)], cols=n)


def make_tableau(n: int, s: int, generators: Sequence[Matrix]) -> Tableau:
    return Tableau(n, s, generators)


def tableau_from_subspace(n: int, s: int, space: Subspace) -> Tableau:
    if space.ambient_dim != s * n:
        raise InputError("subspace ambient dimension must be s*n")
    return Tableau(n, s, [unflatten_hom(v, n, s) for v in space.basis])


# ---------------------------------------------------------------------------
# prolongation internals


def _derivative_matrix(n: int, s: int, deg: int, i: int) -> Matrix:
    """Matrix of d_i from b (x) S^deg down to b (x) S^(deg-1)."""
    src_monos = spencer.sym_monomials(n, deg)
    rows = s * spencer.sym_dim(n, deg - 1)
    cols_out: list[Vec] = []
    for b in range(s):
        for mono in src_monos:
            col = [Fraction(0)] * rows
            e = mono[i]
            if e:
                tgt = mono[:i] + (e - 1,) + mono[i + 1:]
                col[b * spencer.sym_dim(n, deg - 1) + spencer._mono_index(n, deg - 1)[tgt]] = Fraction(e)
            cols_out.append(tuple(col))
    return Matrix.from_cols(cols_out)


def _multiply_by_var(n: int, s: int, deg: int, i: int, v: Vec) -> Vec:
    """Coefficients of x_i * P for P in b (x) S^deg, result in degree deg+1."""
    out = [Fraction(0)] * (s * spencer.sym_dim(n, deg + 1))
    src_monos = spencer.sym_monomials(n, deg)
    tgt_index = spencer._mono_index(n, deg + 1)
    sd, td = spencer.sym_dim(n, deg), spencer.sym_dim(n, deg + 1)
    for b in range(s):
        for m_idx, mono in enumerate(src_monos):
            c = v[b * sd + m_idx]
            if c:
                tgt = mono[:i] + (mono[i] + 1,) + mono[i + 1:]
                out[b * td + tgt_index[tgt]] += c
    return tuple(out)


def _prolong_step(n: int, s: int, h: int, prev: Subspace) -> Subspace:
    """A^(h) from A^(h-1), both flattened; two routes, compared exactly."""
    deg = h + 1  # symmetric degree of A^(h)

    # route 1: kernel of the coboundary on A^(h-1) (x) a*, pulled back by Euler
    M = spencer.coboundary_matrix(n, s, deg - 1, 1)
    ne = spencer.ext_dim(n, 1)
    restricted_cols: list[Vec] = []
    for v in prev.basis:
        for i in range(n):
            w = [Fraction(0)] * (len(v) * ne)
            for k, c in enumerate(v):
                if c:
                    w[k * ne + i] = c
            restricted_cols.append(M.mul_vec(tuple(w)) if M.rows else ())
    coeff_dim = prev.dim * n
    if coeff_dim == 0:
        via_spencer = Subspace.zero(s * spencer.sym_dim(n, deg))
    else:
        sysmat = Matrix.from_cols(restricted_cols) if M.rows else Matrix.zeros(0, coeff_dim)
        kernel = sysmat.kernel_basis()
        vecs = []
        for coeffs in kernel.basis:
            f_parts = []
            for i in range(n):
                fi = zero_vec(s * spencer.sym_dim(n, deg - 1))
                for r in range(prev.dim):
                    c = coeffs[r * n + i]
                    if c:
                        fi = tuple(a + c * b for a, b in zip(fi, prev.basis[r]))
                f_parts.append(fi)
            total = zero_vec(s * spencer.sym_dim(n, deg))
            for i in range(n):
                total = tuple(a + b for a, b in
                              zip(total, _multiply_by_var(n, s, deg - 1, i, f_parts[i])))
            vecs.append(tuple(x / deg for x in total))
        via_spencer = Subspace.from_vectors(s * spencer.sym_dim(n, deg), vecs)

    # route 2: directly impose d_i P in A^(h-1) for all i
    constraints = prev.annihilator()
    if constraints.dim == 0:
        via_constraints = Subspace.full(s * spencer.sym_dim(n, deg))
    else:
        K = constraints.matrix()
        blocks = [K.mul(_derivative_matrix(n, s, deg, i)) for i in range(n)]
        stacked = blocks[0]
        for blk in blocks[1:]:
            stacked = stacked.vstack(blk)
        via_constraints = stacked.kernel_basis()

    if via_spencer != via_constraints:
        raise RuntimeError(
            "prolongation routes disagree; this is a bug in the complex conventions")
    return via_constraints


# ---------------------------------------------------------------------------
# characters and the Cartan test


def kernel_restricted(A: Tableau, a_sub: Subspace) -> Subspace:
    """Elements of A vanishing on a_sub, in coordinates of A's canonical basis."""
    if a_sub.ambient_dim != A.n:
        raise InputError("flag subspace must live in the source space a")
    mats = A.basis_matrices()
    d = A.dim
    rows = []
    for v in a_sub.basis:
        images = [m.mul_vec(v) for m in mats]
        for b_idx in range(A.s):
            rows.append(tuple(images[r][b_idx] for r in range(d)))
    if not rows:
        return Subspace.full(d)
    return Matrix.from_rows(rows, cols=d).kernel_basis()


def _characters_from_flags(A: Tableau, flags: Sequence[Matrix], trials: int,
                           seed: int) -> Characters:
    n = A.n
    pooled = [0] * n
    for flag in flags:
        for j in range(1, n + 1):
            plane = Subspace.from_vectors(n, [flag.col(t) for t in range(j)])
            if plane.dim != j:
                continue  # degenerate draw; other trials cover this j
            codim = A.dim - kernel_restricted(A, plane).dim
            pooled[j - 1] = max(pooled[j - 1], codim)
    s_list = [pooled[0]] + [pooled[j] - pooled[j - 1] for j in range(1, n)]
    chars = Characters(tuple(s_list), 0, 0, trials, seed)
    nu = max((j + 1 for j, sj in enumerate(s_list) if sj != 0), default=0)
    chars = Characters(tuple(s_list), s_list[nu - 1] if nu else 0, nu, trials, seed)
    _validate_characters(A, chars)
    return chars


def _validate_characters(A: Tableau, chars: Characters) -> None:
    s_list = chars.s_list
    ok = all(s_list[j] >= s_list[j + 1] for j in range(len(s_list) - 1)) \
        and all(sj >= 0 for sj in s_list) \
        and (not s_list or s_list[0] <= A.s) \
        and sum(s_list) == A.dim
    if not ok:
        raise GenericityUnstable(
            f"character profile {s_list} is inconsistent (dim A = {A.dim}, s = {A.s}); "
            f"retry with another seed or more trials")


def hom_tableau(A: Tableau, level: int) -> Tableau:
    """A^(level) rewrapped as an ordinary tableau inside Hom(a, A^(level-1)).

    An element P maps X to d_X P, written in coordinates of the canonical
    basis of A^(level-1).  For level = 0 this is A itself.
    """
    if level == 0:
        return A
    prev = A.prolongation_space(level - 1)
    cur = A.prolongation_space(level)
    n, s = A.n, A.s
    gens = []
    for v in cur.basis:
        cols = []
        for i in range(n):
            dv = _derivative_matrix(n, s, level + 1, i).mul_vec(v)
            cols.append(prev.coords_of(dv))
        gens.append(Matrix.from_cols(cols))
    return Tableau(n, prev.dim, gens)


def cartan_test(A: Tableau, trials: int = DEFAULT_TRIALS, seed: int = DEFAULT_SEED) -> CartanTestResult:
    """dim A^(1) <= s_1 + 2 s_2 + ... + n s_n, with equality iff involutive."""
    chars = A.characters(trials, seed)
    bound = chars.cartan_bound()
    d1 = A.prolongation_dim(1)
    if d1 > bound:
        raise RuntimeError(
            f"dim A^(1) = {d1} exceeds the character bound {bound}; "
            f"this indicates a bug, the inequality is a theorem")
    return CartanTestResult(0, d1, bound, d1 == bound, chars)


def cartan_test_at_level(A: Tableau, h: int, trials: int = DEFAULT_TRIALS,
                         seed: int = DEFAULT_SEED) -> CartanTestResult:
    """Cartan test for the prolongation A^(h), rewrapped at level h."""
    T = hom_tableau(A, h)
    res = cartan_test(T, trials, seed)
    if T.prolongation_dim(1) != A.prolongation_dim(h + 1):
        raise RuntimeError("rewrapped prolongation dimension mismatch; bug")
    return CartanTestResult(h, res.dim_prolongation, res.bound, res.involutive,
                            res.characters)


def involutivity_order(A: Tableau, max_h: int = 4, trials: int = DEFAULT_TRIALS,
                       seed: int = DEFAULT_SEED) -> Optional[int]:
    """Least h <= max_h with A^(h) involutive, or None within the window."""
    for h in range(max_h + 1):
        if cartan_test_at_level(A, h, trials, seed).involutive:
            return h
    return None


def prolonged_characters_formula_check(A: Tableau, trials: int = DEFAULT_TRIALS,
                                       seed: int = DEFAULT_SEED) -> bool:
    """For involutive A: characters of A^(1) are s_j^(1) = s_j + ... + s_n.

    Also checks that the Cartan integer is preserved.  Raises NotInvolutive
    when A fails the Cartan test.
    """
    base = cartan_test(A, trials, seed)
    if not base.involutive:
        raise NotInvolutive("prolonged character formula only applies to involutive tableaux")
    s = base.characters.s_list
    expected = tuple(sum(s[j:]) for j in range(len(s)))
    got = cartan_test_at_level(A, 1, trials, seed).characters
    return got.s_list == expected and got.cartan_integer == base.characters.cartan_integer


# ---------------------------------------------------------------------------
# independent oracle: polynomial solution spaces of the dual PDE system


def polynomial_solutions_dim(A: Tableau, q: int) -> int:
    """Dimension of degree-(q+1) homogeneous polynomial solutions of the
    first-order system cut out by the annihilator of A.

    Writing B for a basis of the annihilator of A in Hom(a,b)*, the system is
    sum_{a,i} B^{lambda,i}_a  d y^a / d x^i = 0.  The solution space has the
    dimension of A^(q); this route never touches the prolongation code.
    """
    if q < 0:
        raise InputError("q must be >= 0")
    n, s = A.n, A.s
    symbols = A.basis.annihilator()  # rows w: w[a*n + i] = B^{i}_a
    monos = spencer.sym_monomials(n, q + 1)
    lower = spencer.sym_monomials(n, q)
    mono_pos = {m: k for k, m in enumerate(monos)}
    unknowns = s * len(monos)  # coefficients c^a_mu of the ansatz
    rows = []
    for w in symbols.basis:
        for beta in lower:
            row = [Fraction(0)] * unknowns
            for a_idx in range(s):
                for i in range(n):
                    coeff = w[a_idx * n + i]
                    if coeff:
                        mu = beta[:i] + (beta[i] + 1,) + beta[i + 1:]
                        row[a_idx * len(monos) + mono_pos[mu]] += coeff * (beta[i] + 1)
            rows.append(tuple(row))
    if not rows:
        return unknowns
    return Matrix.from_rows(rows, cols=unknowns).kernel_basis().dim


# ---------------------------------------------------------------------------
# seeded random tableaux (shared by tests and scripts)


def random_tableau(seed: int, n_max: int = 3, s_max: int = 3, dim_max: int = 6) -> Tableau:
    rng = random.Random(derive_seed("tableau", seed))
    n = rng.randint(1, n_max)
    s = rng.randint(1, s_max)
    d = rng.randint(0, min(dim_max, n * s))
    gens = [seeded_random_matrix(s, n, derive_seed("tableau-gen", seed, k), 5)
            for k in range(d)]
    return Tableau(n, s, gens)
