"""Built-in exactly-constructed instances used as fixtures everywhere else.

Each entry couples a LieTableau with an expectations block; every expected
value carries a source tag: "literature" for values quoted from published
results, "oracle" for values computed here by an independent method and
frozen, "definition" for immediate consequences of the construction.

The so(4,1) realization: 5x5 matrices X with X^T H + H X = 0 for the Gram
matrix H of the quadratic form -x0 x4 + (x1)^2 + (x2)^2 + (x3)^2.  Solving
the constraint leaves 10 parameters

    x00; x10, x20, x30; x01, x02, x03; x21, x31, x32

with X[0][4] = X[4][0] = 0, X[4][4] = -x00, X[i][4] = x0i/2, X[4][i] = 2 xi0,
and an antisymmetric middle 3x3 block.  The coframe

    al1 = X[1][0]   al2 = X[2][0]
    be1 = X[0][0]   be2 = X[0][1]   be3 = X[0][2]   be4 = X[2][1]
    ga1 = X[0][3]   ga2 = X[3][0]   ga3 = X[1][0] - X[3][1]   ga4 = X[2][0] + X[3][2]

is a basis of the dual; its dual basis (A1, A2, B1..B4, C1..C4) orders the
algebra so that a = span(A1, A2) and the complement carries the B's first.
Generators of the conformal-surface tableaux are written over (B1..B4):

    Q(q, p) = q1 (B4 (x) al1 + 2 B1 (x) al2) + q2 (-2 B1 (x) al1 + B4 (x) al2)
              + p1 B2 (x) al1 + p2 (-B3 (x) al1 + B2 (x) al2) + p3 B3 (x) al2.

The linear-relation family constrains (p1, p3) to an affine line with a
rational point on the circle: cos = (1 - t^2)/(1 + t^2), sin = 2t/(1 + t^2).
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional, Sequence

from . import lie as _lie
from . import lie_tableau as _lt
from .errors import InputError
from .linalg import Matrix, Subspace, format_rational, parse_rational, unit_vec
from .tableau import DEFAULT_SEED, DEFAULT_TRIALS, Tableau


@dataclass(frozen=True)
class Expectation:
    key: str
    value: object
    source: str  # "literature" | "oracle" | "definition"

    def __post_init__(self):
        if self.source not in ("literature", "oracle", "definition"):
            raise InputError(f"unknown expectation source {self.source!r}")


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    lie_tableau: _lt.LieTableau
    expected: tuple[Expectation, ...]

    def expectation(self, key: str) -> Optional[Expectation]:
        for e in self.expected:
            if e.key == key:
                return e
        return None


# ---------------------------------------------------------------------------
# so(4,1)

_SO41_PARAMS = ("x00", "x10", "x20", "x30", "x01", "x02", "x03", "x21", "x31", "x32")


def _so41_matrix(p: Sequence[Fraction]) -> Matrix:
    x00, x10, x20, x30, x01, x02, x03, x21, x31, x32 = p
    half = Fraction(1, 2)
    return Matrix.from_rows([
        [x00, x01, x02, x03, 0],
        [x10, 0, -x21, -x31, half * x01],
        [x20, x21, 0, -x32, half * x02],
        [x30, x31, x32, 0, half * x03],
        [0, 2 * x10, 2 * x20, 2 * x30, -x00],
    ])


_SO41_GRAM = Matrix.from_rows([
    [0, 0, 0, 0, Fraction(-1, 2)],
    [0, 1, 0, 0, 0],
    [0, 0, 1, 0, 0],
    [0, 0, 0, 1, 0],
    [Fraction(-1, 2), 0, 0, 0, 0],
])

# coframe functionals in the parameter coordinates above
_SO41_COFRAME = {
    "al1": {"x10": 1},
    "al2": {"x20": 1},
    "be1": {"x00": 1},
    "be2": {"x01": 1},
    "be3": {"x02": 1},
    "be4": {"x21": 1},
    "ga1": {"x03": 1},
    "ga2": {"x30": 1},
    "ga3": {"x10": 1, "x31": -1},
    "ga4": {"x20": 1, "x32": 1},
}
_SO41_COFRAME_ORDER = ("al1", "al2", "be1", "be2", "be3", "be4",
                       "ga1", "ga2", "ga3", "ga4")

_SO41_CACHE: list = []


def build_so41() -> _lt.SplitLieAlgebra:
    """so(4,1) with the dual basis (A1, A2, B1..B4, C1..C4) and its splitting."""
    if _SO41_CACHE:
        return _SO41_CACHE[0]
    idx = {name: k for k, name in enumerate(_SO41_PARAMS)}
    rows = []
    for name in _SO41_COFRAME_ORDER:
        row = [Fraction(0)] * 10
        for pname, c in _SO41_COFRAME[name].items():
            row[idx[pname]] = Fraction(c)
        rows.append(row)
    F = Matrix.from_rows(rows)
    dual_params = F.inverse().transpose().data  # row r = basis vector dual to coframe r
    mats = [_so41_matrix(v) for v in dual_params]
    for k, M in enumerate(mats):
        skew = M.transpose().mul(_SO41_GRAM).add(_SO41_GRAM.mul(M))
        if not skew.is_zero():
            raise RuntimeError(
                f"basis matrix {k} violates X^T H + H X = 0: residual {skew.data}")
    for r, name in enumerate(_SO41_COFRAME_ORDER):
        for c in range(10):
            val = sum((Fraction(coef) * mats[c].entry(*_entry_of(pname))
                       for pname, coef in _SO41_COFRAME[name].items()), Fraction(0))
            if val != (1 if r == c else 0):
                raise RuntimeError(f"duality pairing fails at ({name}, {c}): {val}")
    labels = ("A1", "A2", "B1", "B2", "B3", "B4", "C1", "C2", "C3", "C4")
    g = _lie.from_matrices(mats, labels=labels)
    if g.killing_form().rank() != 10:
        raise RuntimeError("Killing form of the realization is degenerate")
    split = _lt.SplitLieAlgebra(g, [unit_vec(10, 0), unit_vec(10, 1)],
                                [unit_vec(10, i) for i in range(2, 10)])
    _SO41_CACHE.append(split)
    return split


def _entry_of(pname: str) -> tuple[int, int]:
    # parameter x<ij> sits at matrix entry (i, j)
    return int(pname[1]), int(pname[2])


def _mobius_generators() -> list[Matrix]:
    def gen(entries: dict) -> Matrix:
        rows = [[Fraction(0)] * 2 for _ in range(8)]
        for (b, i), v in entries.items():
            rows[b][i] = Fraction(v)
        return Matrix.from_rows(rows)

    q1 = gen({(0, 1): 2, (3, 0): 1})
    q2 = gen({(0, 0): -2, (3, 1): 1})
    p1 = gen({(1, 0): 1})
    p2 = gen({(1, 1): 1, (2, 0): -1})
    p3 = gen({(2, 1): 1})
    return [q1, q2, p1, p2, p3]


def circle_point(t: Fraction) -> tuple[Fraction, Fraction]:
    """Rational point (cos, sin) from the tangent-half-angle parameter."""
    t = Fraction(t)
    d = 1 + t * t
    return (1 - t * t) / d, 2 * t / d


# ---------------------------------------------------------------------------
# entry builders


def _exp(key, value, source) -> Expectation:
    return Expectation(key, value, source)


def entry_zero() -> CatalogEntry:
    g = _lie.abelian(4)
    LT = _lt.make_lie_tableau(g, [unit_vec(4, 0), unit_vec(4, 1)],
                              [unit_vec(4, 2), unit_vec(4, 3)], [])
    return CatalogEntry("zero", LT, (
        _exp("dim", 0, "definition"),
        _exp("characters", (0, 0), "definition"),
        _exp("condition1", True, "definition"),
        _exp("condition2", True, "definition"),
    ))


def entry_full(n: int, s: int) -> CatalogEntry:
    if n < 1 or s < 0:
        raise InputError("full(n,s) needs n >= 1, s >= 0")
    g = _lie.abelian(n + s)
    gens = []
    for b in range(s):
        for i in range(n):
            rows = [[Fraction(0)] * n for _ in range(s)]
            rows[b][i] = Fraction(1)
            gens.append(Matrix.from_rows(rows, cols=n))
    LT = _lt.make_lie_tableau(g, [unit_vec(n + s, i) for i in range(n)],
                              [unit_vec(n + s, n + i) for i in range(s)], gens)
    return CatalogEntry(f"full({n},{s})", LT, (
        _exp("dim", n * s, "definition"),
        _exp("characters", (s,) * n, "definition"),
        _exp("condition1", True, "definition"),
        _exp("condition2", True, "definition"),
    ))


def entry_abelian_cr() -> CatalogEntry:
    g = _lie.abelian(4)
    gens = [Matrix.from_rows([[1, 0], [0, 1]]), Matrix.from_rows([[0, -1], [1, 0]])]
    LT = _lt.make_lie_tableau(g, [unit_vec(4, 0), unit_vec(4, 1)],
                              [unit_vec(4, 2), unit_vec(4, 3)], gens)
    return CatalogEntry("abelian_cr", LT, (
        _exp("dim", 2, "oracle"),
        _exp("characters", (2, 0), "oracle"),
        _exp("condition1", True, "oracle"),
        _exp("condition2", True, "definition"),
    ))


def entry_so41_mobius() -> CatalogEntry:
    split = build_so41()
    LT = _lt.LieTableau(split, Tableau(2, 8, _mobius_generators()))
    return CatalogEntry("so41_mobius", LT, (
        _exp("dim", 5, "literature"),
        _exp("characters", (4, 1), "oracle"),
        _exp("condition1", True, "literature"),
        _exp("condition2", True, "literature"),
        _exp("s0", 8, "definition"),
    ))


def entry_so41_willmore() -> CatalogEntry:
    split = build_so41()
    q1, q2, p1, p2, p3 = _mobius_generators()
    LT = _lt.LieTableau(split, Tableau(2, 8, [q1, q2, p1.add(p3), p2]))
    return CatalogEntry("so41_willmore", LT, (
        _exp("dim", 4, "literature"),
        _exp("characters", (4, 0), "literature"),
        _exp("condition1", True, "literature"),
        _exp("condition2", True, "literature"),
        _exp("s0", 8, "literature"),
    ))


def entry_so41_family(t, b1, b2, constrain_p2: bool = False) -> CatalogEntry:
    """Affine line in the (p1,p3)-plane with p2 free (the printed tableau).

    constrain_p2 flips to the alternative reading of the defining text,
    placing the line in the (p1,p2)-plane with p3 free instead.
    """
    t, b1, b2 = Fraction(t), Fraction(b1), Fraction(b2)
    split = build_so41()
    q1, q2, p1, p2, p3 = _mobius_generators()
    cos, sin = circle_point(t)
    if constrain_p2:
        line = p1.scale(cos).add(p2.scale(sin))
        offset = p1.scale(b1).add(p2.scale(b2))
        free = p3
    else:
        line = p1.scale(cos).add(p3.scale(sin))
        offset = p1.scale(b1).add(p3.scale(b2))
        free = p2
    gens = [q1, q2, line, free]
    LT = _lt.LieTableau(split, Tableau(2, 8, gens),
                        offset=None if offset.is_zero() else offset)
    name = f"so41_family({format_rational(t)},{format_rational(b1)},{format_rational(b2)})"
    return CatalogEntry(name, LT, (
        _exp("dim", 4, "literature"),
        _exp("characters", (4, 0), "literature"),
        _exp("condition1", True, "literature"),
        _exp("condition2", True, "literature"),
        _exp("s0", 8, "literature"),
    ))


def entry_sl2_cartan() -> CatalogEntry:
    g = _lie.sl2()
    cd = _lie.make_cartan_decomposition(
        g, Subspace.from_vectors(3, [(0, 1, -1)]),
        Subspace.from_vectors(3, [(1, 0, 0), (0, 1, 1)]))
    a = Subspace.from_vectors(3, [(1, 0, 0)])
    LT = _lie.cartan_tableau(g, cd, a, (1, 0, 0))
    return CatalogEntry("sl2_cartan", LT, (
        _exp("dim", 1, "oracle"),
        _exp("characters", (1,), "oracle"),
        _exp("condition1", True, "oracle"),
        _exp("condition2", True, "definition"),
    ))


def _sl3_matrices() -> list[Matrix]:
    def E(i, j):
        return Matrix.from_rows(
            [[1 if (r, c) == (i, j) else 0 for c in range(3)] for r in range(3)])

    return [E(0, 0).sub(E(1, 1)), E(1, 1).sub(E(2, 2)),
            E(0, 1).add(E(1, 0)), E(0, 2).add(E(2, 0)), E(1, 2).add(E(2, 1)),
            E(0, 1).sub(E(1, 0)), E(0, 2).sub(E(2, 0)), E(1, 2).sub(E(2, 1))]


def entry_sl3_so3_cartan() -> CatalogEntry:
    g = _lie.from_matrices(_sl3_matrices(),
                           labels=("a1", "a2", "S12", "S13", "S23", "R12", "R13", "R23"))
    cd = _lie.make_cartan_decomposition(
        g, Subspace.from_vectors(8, [unit_vec(8, i) for i in (5, 6, 7)]),
        Subspace.from_vectors(8, [unit_vec(8, i) for i in range(5)]))
    a = Subspace.from_vectors(8, [unit_vec(8, 0), unit_vec(8, 1)])
    LT = _lie.cartan_tableau(g, cd, a, (1, 3, 0, 0, 0, 0, 0, 0))  # diag(1,2,-3)
    return CatalogEntry("sl3_so3_cartan", LT, (
        _exp("dim", 3, "oracle"),
        _exp("characters", (3, 0), "oracle"),
        _exp("condition1", True, "oracle"),
        _exp("condition2", True, "oracle"),
    ))


def entry_so3_broken() -> CatalogEntry:
    g = _lie.so3()
    LT = _lt.make_lie_tableau(g, [(1, 0, 0), (0, 1, 0)], [(0, 0, 1)], [])
    return CatalogEntry("so3_broken", LT, (
        _exp("dim", 0, "definition"),
        _exp("condition1", True, "definition"),
        _exp("condition2", False, "oracle"),
    ))


# sample parameter triples for the family; t = 0 is the axis-aligned case
# and b1 = b2 = 0 gives the homogeneous slice
FAMILY_SAMPLE_TRIPLES: tuple = (
    (Fraction(0), Fraction(0), Fraction(0)),
    (Fraction(1), Fraction(0), Fraction(0)),
    (Fraction(1, 2), Fraction(0), Fraction(0)),
    (Fraction(-1, 3), Fraction(0), Fraction(0)),
    (Fraction(2), Fraction(0), Fraction(0)),
    (Fraction(0), Fraction(1), Fraction(-2)),
    (Fraction(1), Fraction(2, 3), Fraction(1, 5)),
    (Fraction(3), Fraction(-1), Fraction(1)),
    (Fraction(-2), Fraction(1, 2), Fraction(1, 2)),
    (Fraction(1, 7), Fraction(-3), Fraction(2)),
    (Fraction(5), Fraction(1), Fraction(0)),
    (Fraction(0), Fraction(0), Fraction(4)),
)


# ---------------------------------------------------------------------------
# lookup

_FIXED: dict[str, Callable[[], CatalogEntry]] = {
    "zero": entry_zero,
    "abelian_cr": entry_abelian_cr,
    "so41_mobius": entry_so41_mobius,
    "so41_willmore": entry_so41_willmore,
    "sl2_cartan": entry_sl2_cartan,
    "sl3_so3_cartan": entry_sl3_so3_cartan,
    "so3_broken": entry_so3_broken,
}

_FULL_RE = re.compile(r"full\((\d+),(\d+)\)\Z")
_FAMILY_RE = re.compile(r"so41_family\(([^,()]+),([^,()]+),([^,()]+)\)\Z")


def list_names() -> list[str]:
    return sorted(_FIXED) + ["full(n,s)", "so41_family(t,b1,b2)"]


def get(name: str) -> CatalogEntry:
    name = name.strip()
    fixed = _FIXED.get(name)
    if fixed is not None:
        return fixed()
    m = _FULL_RE.match(name)
    if m:
        return entry_full(int(m.group(1)), int(m.group(2)))
    m = _FAMILY_RE.match(name)
    if m:
        return entry_so41_family(*(parse_rational(x) for x in m.groups()))
    raise InputError(f"unknown catalog entry {name!r}; available: {', '.join(list_names())}")


@dataclass(frozen=True)
class EntryReport:
    name: str
    ok: bool
    mismatches: tuple[str, ...]
    certification: _lt.CertificationReport


def verify_entry(entry: CatalogEntry, trials: int = DEFAULT_TRIALS,
                 seed: int = DEFAULT_SEED) -> EntryReport:
    """Recompute everything the expectations block promises and compare."""
    rep = _lt.certify(entry.lie_tableau, trials=trials, seed=seed)
    computed = {
        "dim": entry.lie_tableau.tableau.dim,
        "characters": tuple(rep.characters.s_list),
        "condition1": rep.condition1_ok,
        "condition2": rep.condition2.holds,
    }
    if entry.expectation("s0") is not None:
        ab = _lt.adapted_basis(entry.lie_tableau, trials=trials, seed=seed)
        computed["s0"] = ab.h + ab.s_prime
    mismatches = []
    for e in entry.expected:
        got = computed.get(e.key)
        if got != e.value:
            mismatches.append(f"{e.key}: expected {e.value!r} ({e.source}), got {got!r}")
    return EntryReport(entry.name, not mismatches, tuple(mismatches), rep)
