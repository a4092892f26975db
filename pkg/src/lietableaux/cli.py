"""lietab: command line front end.

Pure-function tool over single-file JSON inputs: parse, compute, report,
exit.  Exit codes separate "the math says no" from "the input is broken":

    0   success / verified
    2   verification failure (a result: a failed Cartan test, a torsion
        witness, a mismatched expectation)
    1   input or usage errors (malformed JSON, bad shapes, unknown names)

Reports echo the full run configuration (seed, trials, bounds, version) so
identical invocations are reproducible; JSON output is key-sorted and
byte-stable.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from . import __version__
from . import catalog as _catalog
from . import lie as _lie
from . import lie_tableau as _lt
from . import pds as _pds
from . import spencer as _spencer
from .errors import (
    InputError,
    JacobiViolation,
    NotCartan,
    NotInvolutive,
    NotRegular,
)
from .linalg import Subspace, parse_rational
from .tableau import Tableau, cartan_test

DEFAULTS = {"seed": 1, "trials": 5, "q_max": 4, "h_max": 4}

# exceptions that mean "fix your input", mapped to exit 1
_INPUT_ERRORS = (InputError, OSError, json.JSONDecodeError, ValueError, KeyError, TypeError)
# exceptions that are computed verdicts, mapped to exit 2
_VERDICT_ERRORS = (JacobiViolation, NotInvolutive, NotRegular, NotCartan)


@dataclass(frozen=True)
class RunConfig:
    command: str
    seed: int
    trials: int
    q_max: int
    h_max: int
    fmt: str
    force: bool

    def meta(self) -> dict:
        return {"command": self.command, "version": __version__, "seed": self.seed,
                "trials": self.trials, "q_max": self.q_max, "h_max": self.h_max}


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on usage errors; the contract reserves 2 for verdicts
    def error(self, message):
        raise InputError(message)


def _emit(cfg: RunConfig, payload: dict, lines: Sequence[str]) -> None:
    if cfg.fmt == "json":
        print(json.dumps({"meta": cfg.meta(), "result": payload}, sort_keys=True))
    else:
        for line in lines:
            print(line)
        print(f"[seed {cfg.seed}, trials {cfg.trials}, v{__version__}]")


def _load_json(path: str):
    with open(path) as fh:
        return json.load(fh)


def _rational_vec(obj, what: str):
    try:
        return tuple(parse_rational(x) if isinstance(x, str) else Fraction(x) for x in obj)
    except (TypeError, ValueError) as exc:
        raise InputError(f"bad rational vector in {what}: {exc}")


def _tableau_input(ns) -> Tableau:
    if ns.catalog and ns.file:
        raise InputError("pass either an input file or --catalog, not both")
    if ns.catalog:
        return _catalog.get(ns.catalog).lie_tableau.tableau
    if not ns.file:
        raise InputError("an input file or --catalog NAME is required")
    return Tableau.from_json(_load_json(ns.file))


def _lie_tableau_input(ns) -> _lt.LieTableau:
    if ns.catalog and ns.file:
        raise InputError("pass either an input file or --catalog, not both")
    if ns.catalog:
        return _catalog.get(ns.catalog).lie_tableau
    if not ns.file:
        raise InputError("an input file or --catalog NAME is required")
    return _lt.LieTableau.from_json(_load_json(ns.file))


def _chars_str(s_list) -> str:
    return "(" + ", ".join(str(x) for x in s_list) + ")"


# ---------------------------------------------------------------------------
# tableau commands

def cmd_tableau_characters(cfg: RunConfig, ns) -> int:
    A = _tableau_input(ns)
    ch = A.characters(cfg.trials, cfg.seed)
    payload = {"characters": list(ch.s_list), "cartan_integer": ch.cartan_integer,
               "principal": ch.principal, "dim": A.dim, "n": A.n, "s": A.s}
    _emit(cfg, payload, [
        f"tableau dim {A.dim} in Hom(R^{A.n}, R^{A.s})",
        f"characters: {_chars_str(ch.s_list)}",
        f"cartan integer: {ch.cartan_integer}, principal character: {ch.principal}",
    ])
    return 0


def cmd_tableau_prolong(cfg: RunConfig, ns) -> int:
    A = _tableau_input(ns)
    dims = [A.prolongation_dim(h) for h in range(cfg.h_max + 1)]
    payload = {"dims": dims, "h_max": cfg.h_max}
    _emit(cfg, payload, [f"dim A^({h}) = {d}" for h, d in enumerate(dims)])
    return 0


def cmd_tableau_cartan_test(cfg: RunConfig, ns) -> int:
    A = _tableau_input(ns)
    res = cartan_test(A, cfg.trials, cfg.seed)
    payload = {"involutive": res.involutive, "dim_prolongation": res.dim_prolongation,
               "bound": res.bound, "characters": list(res.characters.s_list)}
    _emit(cfg, payload, [
        f"characters: {_chars_str(res.characters.s_list)}",
        f"dim A^(1) = {res.dim_prolongation}, bound = {res.bound}",
        "involutive" if res.involutive else "NOT involutive",
    ])
    return 0 if res.involutive else 2


def cmd_tableau_cohomology(cfg: RunConfig, ns) -> int:
    A = _tableau_input(ns)
    dims = [[q, p, _spencer.cohomology_dim(A, q, p)]
            for q in range(cfg.q_max + 1) for p in range(A.n + 1)]
    payload = {"dims": dims, "q_max": cfg.q_max}
    lines = [f"dim H^({q},{p}) = {d}" for q, p, d in dims if d] or ["all groups vanish"]
    _emit(cfg, payload, lines)
    return 0


# ---------------------------------------------------------------------------
# lie commands

def cmd_lie_validate(cfg: RunConfig, ns) -> int:
    if not ns.file:
        raise InputError("an input file is required")
    try:
        g = _lie.LieAlgebra.from_json(_load_json(ns.file))
    except JacobiViolation as exc:
        _emit(cfg, {"valid": False, "jacobi_witness": [exc.i, exc.j, exc.k],
                    "residual": [str(x) for x in exc.residual]},
              [f"Jacobi identity fails on basis triple ({exc.i}, {exc.j}, {exc.k})",
               f"residual: {tuple(str(x) for x in exc.residual)}"])
        return 2
    K = g.killing_form()
    abelian = all(not any(cell) for rows in g.c for cell in rows)
    payload = {"valid": True, "dim": g.dim, "abelian": abelian,
               "killing_rank": K.rank(),
               "labels": list(g.labels) if g.labels else None}
    _emit(cfg, payload, [
        f"valid Lie algebra, dim {g.dim}",
        f"killing rank: {K.rank()}",
    ])
    return 0


# ---------------------------------------------------------------------------
# lie-tableau commands

def cmd_lt_certify(cfg: RunConfig, ns) -> int:
    lt = _lie_tableau_input(ns)
    if ns.mode:
        mode = {"involutive": "involutive", "2acyclic": "two_acyclic"}[ns.mode]
        if mode != lt.mode:
            lt = _lt.LieTableau(lt.split, lt.tableau, offset=lt.offset,
                                mode=mode, cartan=lt.cartan)
    rep = _lt.certify(lt, trials=cfg.trials, seed=cfg.seed, q_max=cfg.q_max)
    witnesses = [[list(expo), [str(x) for x in tc.class_coords]]
                 for expo, tc in rep.condition2.witnesses]
    payload = {
        "ok": rep.ok, "mode": rep.mode,
        "condition1": rep.condition1_ok, "condition2": rep.condition2.holds,
        "characters": list(rep.characters.s_list),
        "dim": rep.dim, "dim_prolongation": rep.dim_prolongation,
        "witnesses": witnesses,
    }
    lines = [
        f"mode: {rep.mode}",
        f"condition 1: {'pass' if rep.condition1_ok else 'FAIL'}",
        f"condition 2: {'pass' if rep.condition2.holds else 'FAIL'}",
        f"characters: {_chars_str(rep.characters.s_list)}",
        f"dim {rep.dim}, dim prolongation {rep.dim_prolongation}",
    ]
    for expo, tc in rep.condition2.witnesses:
        lines.append(f"witness monomial {tuple(expo)}: class coords "
                     f"{tuple(str(x) for x in tc.class_coords)}")
    lines.append("certified" if rep.ok else "NOT certified")
    _emit(cfg, payload, lines)
    return 0 if rep.ok else 2


# ---------------------------------------------------------------------------
# pds commands

def cmd_pds_build(cfg: RunConfig, ns) -> int:
    lt = _lie_tableau_input(ns)
    ps = _pds.build_pds(lt, trials=cfg.trials, seed=cfg.seed, force=ns.force)
    tp = _pds.structure_torsion(ps)
    payload = ps.to_json()
    payload["torsion"] = tp.to_json()
    payload["torsion_vanishes"] = tp.vanishes_identically
    _emit(cfg, payload, [
        f"eta generators: {ps.h}, gamma generators: {ps.gamma_count} (s0 = {ps.s0})",
        f"independence rank: {ps.independence_rank}",
        f"fiber dim: {ps.m}",
        f"raw torsion coefficients: {len(tp.coefficients)}",
    ])
    return 0


def cmd_pds_verify(cfg: RunConfig, ns) -> int:
    lt = _lie_tableau_input(ns)
    ps = _pds.build_pds(lt, trials=cfg.trials, seed=cfg.seed, force=ns.force)
    rep = _pds.verify_involution(ps, sample_points=ns.points, trials=cfg.trials,
                                 seed=cfg.seed)
    payload = {
        "ok": rep.ok, "linear": rep.linear,
        "torsion_class_zero": rep.torsion_class_zero,
        "integral_points_ok": rep.integral_points_ok,
        "points_checked": rep.points_checked,
        "tableau_matches": rep.tableau_matches,
        "characters_match": rep.characters_match,
        "pds_characters": list(rep.pds_characters),
        "source_characters": list(rep.source_characters),
        "s0": rep.s0,
        "failing_monomials": [list(expo) for expo, _tc in rep.failing_monomials],
    }
    _emit(cfg, payload, [
        f"linear: {'pass' if rep.linear else 'FAIL'}",
        f"torsion class vanishes: {'pass' if rep.torsion_class_zero else 'FAIL'}",
        f"integral elements at {rep.points_checked} points: "
        f"{'pass' if rep.integral_points_ok else 'FAIL'}",
        f"tableau read-back: {'pass' if rep.tableau_matches else 'FAIL'}",
        f"characters match: {'pass' if rep.characters_match else 'FAIL'} "
        f"(pds {_chars_str(rep.pds_characters)}, source {_chars_str(rep.source_characters)})",
        f"s0 = {rep.s0}",
        "in involution" if rep.ok else "verification FAILED",
    ])
    return 0 if rep.ok else 2


def cmd_pds_tower(cfg: RunConfig, ns) -> int:
    lt = _lie_tableau_input(ns)
    tw = _pds.prolongation_tower(lt, h_max=cfg.h_max, trials=cfg.trials,
                                 seed=cfg.seed, force=ns.force)
    payload = tw.to_json()
    lines = []
    for L in tw.levels:
        mark = " involutive" if L.involutive else ""
        ch = f" characters {_chars_str(L.characters)}" if L.characters else ""
        lines.append(f"h={L.h}: dim A^({L.h}) = {L.space_dim}, "
                     f"config dim = {L.configuration_dim}{mark}{ch}")
    lines.append(f"least involutive level: {tw.least_involutive}")
    _emit(cfg, payload, lines)
    return 0


# ---------------------------------------------------------------------------
# gg0 export

def _cartan_lie_tableau(ns) -> _lt.LieTableau:
    if ns.catalog and ns.file:
        raise InputError("pass either an input file or --catalog, not both")
    if ns.catalog:
        lt = _catalog.get(ns.catalog).lie_tableau
        if lt.cartan is None:
            raise NotCartan(f"catalog entry {ns.catalog!r} is not a Cartan-pair family")
        return lt
    if not ns.file:
        raise InputError("an input file or --catalog NAME is required")
    obj = _load_json(ns.file)
    for key in ("lie", "g0_basis", "g1_basis", "a_basis", "regular"):
        if key not in obj:
            raise InputError(f"gg0 input JSON is missing the field {key!r}")
    g = _lie.LieAlgebra.from_json(obj["lie"])
    cd = _lie.make_cartan_decomposition(
        g,
        Subspace.from_vectors(g.dim, [_rational_vec(v, "g0_basis") for v in obj["g0_basis"]]),
        Subspace.from_vectors(g.dim, [_rational_vec(v, "g1_basis") for v in obj["g1_basis"]]))
    a = Subspace.from_vectors(g.dim, [_rational_vec(v, "a_basis") for v in obj["a_basis"]])
    return _lie.cartan_tableau(g, cd, a, _rational_vec(obj["regular"], "regular"))


def cmd_gg0_export(cfg: RunConfig, ns) -> int:
    lt = _cartan_lie_tableau(ns)
    sys_ = _pds.gg0_coefficients(lt)
    payload = sys_.to_json()
    _emit(cfg, payload, [
        f"unknowns: {sys_.unknowns}, domain dim: {sys_.domain_dim}, "
        f"target dim: {sys_.target_dim}",
        f"antisymmetrized pairs: {len(sys_.pairs)}",
        f"first-order coefficients: {len(sys_.first_order)}",
        f"quadratic right-hand-side terms: {len(sys_.quadratic_rhs)}",
    ])
    return 0


# ---------------------------------------------------------------------------
# catalog commands

def cmd_catalog_list(cfg: RunConfig, ns) -> int:
    names = _catalog.list_names()
    _emit(cfg, {"names": names}, names)
    return 0


def cmd_catalog_show(cfg: RunConfig, ns) -> int:
    if not ns.name:
        raise InputError("catalog show needs an entry name")
    entry = _catalog.get(ns.name)
    payload = {
        "name": entry.name,
        "lie_tableau": entry.lie_tableau.to_json(),
        "expected": [{"key": e.key, "value": str(e.value), "source": e.source}
                     for e in entry.expected],
    }
    lines = [f"entry: {entry.name}",
             f"n = {entry.lie_tableau.split.n}, s = {entry.lie_tableau.split.s}, "
             f"dim = {entry.lie_tableau.tableau.dim}"]
    lines += [f"expected {e.key} = {e.value!r}  [{e.source}]" for e in entry.expected]
    _emit(cfg, payload, lines)
    return 0


# verify --all covers the fixed entries plus representative parameterized ones
VERIFY_ALL_NAMES = tuple(sorted(_catalog._FIXED)) + (
    "full(2,3)",
    "so41_family(0,0,0)",
    "so41_family(1,2/3,1/5)",
    "so41_family(-2,1/2,1/2)",
)


def cmd_catalog_verify(cfg: RunConfig, ns) -> int:
    if ns.all and ns.name:
        raise InputError("pass a name or --all, not both")
    if not ns.all and not ns.name:
        raise InputError("catalog verify needs an entry name or --all")
    names = VERIFY_ALL_NAMES if ns.all else (ns.name,)
    results, lines, all_ok = [], [], True
    for name in names:
        entry = _catalog.get(name)
        rep = _catalog.verify_entry(entry, trials=cfg.trials, seed=cfg.seed)
        all_ok = all_ok and rep.ok
        results.append({
            "name": name, "ok": rep.ok, "mismatches": list(rep.mismatches),
            "expected": [{"key": e.key, "value": str(e.value), "source": e.source}
                         for e in entry.expected],
        })
        lines.append(f"{name}: {'ok' if rep.ok else 'MISMATCH'}")
        lines.extend(f"  {m}" for m in rep.mismatches)
    payload = {"ok": all_ok, "entries": results}
    lines.append("all expectations matched" if all_ok else "expectation mismatches found")
    _emit(cfg, payload, lines)
    return 0 if all_ok else 2


# ---------------------------------------------------------------------------
# parser

def build_parser() -> _Parser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=DEFAULTS["seed"])
    common.add_argument("--trials", type=int, default=DEFAULTS["trials"])
    common.add_argument("--q-max", type=int, default=DEFAULTS["q_max"], dest="q_max")
    common.add_argument("--h-max", type=int, default=DEFAULTS["h_max"], dest="h_max")
    common.add_argument("--format", choices=("text", "json"), default="text")
    common.add_argument("--force", action="store_true")
    common.add_argument("--catalog", metavar="NAME",
                        help="use a catalog entry instead of an input file")

    p = _Parser(prog="lietab", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="group", required=True)

    def add(group_parser, name, func, file_arg=True):
        sp = group_parser.add_parser(name, parents=[common])
        if file_arg:
            sp.add_argument("file", nargs="?", default=None)
        sp.set_defaults(func=func)
        return sp

    tab = sub.add_parser("tableau").add_subparsers(dest="op", required=True)
    add(tab, "characters", cmd_tableau_characters)
    add(tab, "prolong", cmd_tableau_prolong)
    add(tab, "cartan-test", cmd_tableau_cartan_test)
    add(tab, "cohomology", cmd_tableau_cohomology)

    lie = sub.add_parser("lie").add_subparsers(dest="op", required=True)
    add(lie, "validate", cmd_lie_validate)

    lt = sub.add_parser("lie-tableau").add_subparsers(dest="op", required=True)
    sp = add(lt, "certify", cmd_lt_certify)
    sp.add_argument("--mode", choices=("involutive", "2acyclic"), default=None)

    pds = sub.add_parser("pds").add_subparsers(dest="op", required=True)
    add(pds, "build", cmd_pds_build)
    sp = add(pds, "verify", cmd_pds_verify)
    sp.add_argument("--points", type=int, default=20)
    add(pds, "tower", cmd_pds_tower)

    gg0 = sub.add_parser("gg0").add_subparsers(dest="op", required=True)
    add(gg0, "export", cmd_gg0_export)

    cat = sub.add_parser("catalog").add_subparsers(dest="op", required=True)
    add(cat, "list", cmd_catalog_list, file_arg=False)
    sp = add(cat, "show", cmd_catalog_show, file_arg=False)
    sp.add_argument("name", nargs="?", default=None)
    sp = add(cat, "verify", cmd_catalog_verify, file_arg=False)
    sp.add_argument("name", nargs="?", default=None)
    sp.add_argument("--all", action="store_true")

    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except InputError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except SystemExit as exc:  # --help and friends
        return 0 if exc.code in (0, None) else 1
    cfg = RunConfig(command=f"{ns.group} {ns.op}", seed=ns.seed, trials=ns.trials,
                    q_max=ns.q_max, h_max=ns.h_max, fmt=ns.format,
                    force=getattr(ns, "force", False))
    try:
        return ns.func(cfg, ns)
    except _VERDICT_ERRORS as exc:
        print(f"verification failed: {exc}", file=sys.stderr)
        return 2
    except _INPUT_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
