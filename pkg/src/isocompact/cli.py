"""Command line entry point.

Every subcommand writes one JSON report (stdout or ``--out``).  Exit codes:
0 success, 1 crash, 2 negative verdict, 3 malformed input.
"""

from __future__ import annotations

import argparse
import datetime as _dt
import sys
import traceback

import numpy as np

from . import __version__
from .anosov import divergence_profile, domination_constant, limit_set
from .cartan import cartan_mu, lyapunov_lambda
from .compactify import (
    diagonal,
    embed_graph,
    stratum_dimension,
    stratum_index,
    unembed,
    verify_stratum_dimension,
)
from .domains import orbit_recurrence_probe, stratum_membership_U_i_xi
from .forms import GLSpec
from .io import (
    InputError,
    dumps,
    load_form,
    load_json,
    load_matrix,
    load_rep,
    load_subspace,
    read_limit_set_csv,
    write_limit_set_csv,
)
from .model_spaces import embed_hpq, is_boundary, orbit_rep_case_iv, orbit_rep_case_vi, unembed_hpq
from .scalars import ScalarTag
from .subspaces import encode_matrix, subspace_to_json
from .tolerances import DEFAULT, Tolerances

EXIT_OK, EXIT_CRASH, EXIT_NEGATIVE, EXIT_INPUT = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise InputError(message)


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--tol-rank", type=float, default=None)
    p.add_argument("--tol-contain", type=float, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--no-timestamp", action="store_true")
    p.add_argument("--out", default=None, help="report path (default: stdout)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="isocompact", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    def add(name, help_):
        p = sub.add_parser(name, help=help_)
        _common(p)
        return p

    p = add("stratify", "stratum index of a subspace of V (+) V")
    p.add_argument("--form", required=True)
    p.add_argument("--subspace-file", required=True)

    p = add("embed", "graph of a group element")
    p.add_argument("--form", required=True)
    p.add_argument("--matrix-file", required=True)

    p = add("unembed", "group element whose graph is the subspace")
    p.add_argument("--form", required=True)
    p.add_argument("--subspace-file", required=True)

    p = add("orbit-dim", "closed-form and numerical stratum dimension")
    p.add_argument("--form", required=True)
    p.add_argument("--stratum", required=True, help="i, or i,j for GL")

    p = add("cartan", "Cartan and Lyapunov projections")
    p.add_argument("--form", required=True)
    p.add_argument("--matrix-file", required=True)
    p.add_argument("--cross-check", action="store_true")

    p = add("anosov-check", "divergence certificate for a free-group representation")
    p.add_argument("--rep-file", required=True)
    p.add_argument("--radius", type=int, default=8)
    p.add_argument("--root-index", type=int, default=1)
    p.add_argument("--s-min", type=float, default=0.1)

    p = add("dominate", "domination constant of repR by repL")
    p.add_argument("--rep-file", required=True, help="dominating representation (left)")
    p.add_argument("--right-rep-file", required=True)
    p.add_argument("--radius", type=int, default=6)
    p.add_argument("--weight-index", type=int, default=1)

    p = add("limit-set", "sampled limit set as a CSV point cloud")
    p.add_argument("--rep-file", required=True)
    p.add_argument("--radius", type=int, default=6)
    p.add_argument("--dim", type=int, default=1)
    p.add_argument("--csv", required=True, help="output CSV path")

    p = add("dod-member", "membership of a subspace in the domain")
    p.add_argument("--form", required=True)
    p.add_argument("--subspace-file", required=True)
    p.add_argument("--limit-set-csv", required=True)

    p = add("probe-recurrence", "count words moving a base point less than delta")
    p.add_argument("--rep-file", required=True)
    p.add_argument("--right-rep-file", required=True)
    p.add_argument("--subspace-file", default=None, help="base point (default: diagonal)")
    p.add_argument("--radius", type=int, default=6)
    p.add_argument("--delta", type=float, default=0.1)

    p = add("hpq", "pseudo-hyperbolic model space")
    p.add_argument("action", choices=["embed", "unembed", "boundary"])
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--scalar", default="R")
    p.add_argument("--point", default=None, help="JSON point (embed)")
    p.add_argument("--subspace-file", default=None, help="line JSON (unembed, boundary)")

    p = add("orbit-rep", "explicit orbit representatives")
    p.add_argument("--case", choices=["iv", "vi"], required=True)
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--q", type=int, default=None)
    p.add_argument("--m", type=int, default=None)
    return parser


# ---------------------------------------------------------------- handlers
# Each returns (result dict, verdict bool or None).

def _stratum_arg(text: str, b):
    try:
        parts = [int(x) for x in text.split(",")]
    except ValueError as exc:
        raise InputError(f"bad stratum {text!r}") from exc
    if isinstance(b, GLSpec):
        if len(parts) != 2:
            raise InputError("GL strata are given as i,j")
        return tuple(parts)
    if len(parts) != 1:
        raise InputError("Aut strata are given as a single integer")
    return parts[0]


def _stratify(a, tol):
    b = load_form(a.form)
    W = load_subspace(a.subspace_file)
    if W.numeric_dim != 2 * b.numeric_dim:
        raise InputError("subspace must live in V (+) V")
    idx = stratum_index(W, b, tol.rank)
    return {"stratum": list(idx) if isinstance(idx, tuple) else idx, "dim": W.k}, None


def _embed(a, tol):
    b = load_form(a.form)
    g = load_matrix(a.matrix_file, b.tag)
    W = embed_graph(g, b, tol.grp)
    return {"subspace": subspace_to_json(W), "stratum": stratum_index(W, b, tol.rank) if not isinstance(b, GLSpec) else [0, 0]}, None


def _unembed(a, tol):
    b = load_form(a.form)
    W = load_subspace(a.subspace_file)
    g = unembed(W, b, tol.grp)
    return {"matrix": encode_matrix(b.tag, g)}, None


def _orbit_dim(a, tol):
    b = load_form(a.form)
    idx = _stratum_arg(a.stratum, b)
    expected = stratum_dimension(b, idx)
    rep = verify_stratum_dimension(b, idx, seed=a.seed, tol=tol.rank, h=tol.fd_step)
    return {"closed_form": expected, "numeric": rep.as_dict()}, rep.agrees


def _cartan(a, tol):
    b = load_form(a.form)
    g = load_matrix(a.matrix_file, b.tag)
    mu = cartan_mu(g, b)
    lam = lyapunov_lambda(g, b, cross_check=a.cross_check)
    return {"mu": mu.tolist(), "lambda": lam.tolist(), "root_type": b.root_type}, None


def _anosov(a, tol):
    rep = load_rep(a.rep_file)
    prof = divergence_profile(rep, a.root_index, a.radius, a.s_min, a.workers)
    return prof.as_dict(), prof.verdict


def _dominate(a, tol):
    L, R = load_rep(a.rep_file), load_rep(a.right_rep_file)
    res = domination_constant(L, R, a.weight_index, a.radius, a.workers, tol)
    return res.as_dict(), res.verdict


def _limit_set(a, tol):
    rep = load_rep(a.rep_file)
    import warnings

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        S = limit_set(rep, a.radius, a.dim, a.workers, tol)
    write_limit_set_csv(S, a.csv, rep.tag)
    return {"count": len(S), "d": S.d, "csv": a.csv, "warnings": S.warnings,
            "min_gap": min(S.gaps) if S.gaps else None}, len(S) > 0


def _dod_member(a, tol):
    b = load_form(a.form)
    W = load_subspace(a.subspace_file)
    S = read_limit_set_csv(a.limit_set_csv, b if not isinstance(b, GLSpec) else None)
    if S.points and S.points[0].numeric_dim * 2 != W.numeric_dim:
        raise InputError("limit-set points must live in V when the subspace lives in V (+) V")
    m = stratum_membership_U_i_xi(W, S, tol.contain, tol.rank)
    return {**m.as_dict(), "sample_size": len(S)}, m.in_omega


def _probe(a, tol):
    L, R = load_rep(a.rep_file), load_rep(a.right_rep_file)
    W0 = load_subspace(a.subspace_file) if a.subspace_file else diagonal(L.form)
    rep = orbit_recurrence_probe(L, R, W0, a.radius, a.delta, a.workers)
    return rep.as_dict(), None


def _hpq(a, tol):
    tag = ScalarTag.parse(a.scalar)
    if a.action == "embed":
        if a.point is None:
            raise InputError("hpq embed needs --point")
        x = np.asarray(load_json(a.point), dtype=float)
        if tag is ScalarTag.C:
            if x.ndim != 2 or x.shape[-1] != 2:
                raise InputError("complex coordinates must be [re, im] pairs")
            x = x[:, 0] + 1j * x[:, 1]
        W = embed_hpq(x, a.p, a.q, tag, tol.model)
        return {"line": subspace_to_json(W)}, None
    if a.subspace_file is None:
        raise InputError(f"hpq {a.action} needs --subspace-file")
    W = load_subspace(a.subspace_file)
    if a.action == "boundary":
        return {"boundary": is_boundary(W, tol.rank)}, None
    x = unembed_hpq(W, tol.rank)
    if tag is ScalarTag.C:
        x = np.stack([x.real, x.imag], axis=-1)
    return {"point": np.asarray(x, dtype=float).tolist()}, None


def _orbit_rep(a, tol):
    if a.case == "iv":
        if a.q is None:
            raise InputError("case iv needs --p and --q")
        rep = orbit_rep_case_iv(a.p, a.q, tol.rank)
    else:
        if a.m is None:
            raise InputError("case vi needs --m and --p")
        rep = orbit_rep_case_vi(a.m, a.p, tol.rank)
    out = rep.as_dict()
    out["subspace"] = subspace_to_json(rep.subspace)
    return out, rep.ok


HANDLERS = {
    "stratify": _stratify, "embed": _embed, "unembed": _unembed, "orbit-dim": _orbit_dim,
    "cartan": _cartan, "anosov-check": _anosov, "dominate": _dominate, "limit-set": _limit_set,
    "dod-member": _dod_member, "probe-recurrence": _probe, "hpq": _hpq, "orbit-rep": _orbit_rep,
}


def _inputs(a) -> dict:
    skip = {"out", "no_timestamp", "tol_rank", "tol_contain", "workers"}
    echo = {}
    for k, v in sorted(vars(a).items()):
        if k in skip:
            continue
        echo[k] = v
        if k.endswith("_file") or k in ("form", "point"):
            try:
                echo[k + "_content"] = load_json(v) if v is not None else None
            except InputError:
                pass
    return echo


def build_report(a, tol: Tolerances, result: dict, verdict) -> dict:
    report = {
        "command": a.command,
        "inputs": _inputs(a),
        "tolerances": tol.as_dict(),
        "result": result,
        "verdict": None if verdict is None else bool(verdict),
        "reproducibility": {"seed": a.seed, "version": __version__,
                            "radius": getattr(a, "radius", None)},
    }
    if not a.no_timestamp:
        report["timestamp"] = _dt.datetime.now(_dt.timezone.utc).isoformat()
    return report


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        a = build_parser().parse_args(argv)
        tol = DEFAULT.with_overrides(rank=a.tol_rank, contain=a.tol_contain)
        if a.workers < 1:
            raise InputError("--workers must be positive")
        np.random.seed(a.seed)
        result, verdict = HANDLERS[a.command](a, tol)
        text = dumps(build_report(a, tol, result, verdict))
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)
    except (InputError, ValueError, KeyError, TypeError, IndexError) as exc:
        print(f"error: {exc}", file=stderr)
        return EXIT_INPUT
    except Exception:
        traceback.print_exc(file=stderr)
        return EXIT_CRASH
    if a.out:
        with open(a.out, "w") as fh:
            fh.write(text)
    else:
        stdout.write(text)
    return EXIT_NEGATIVE if verdict is False else EXIT_OK


def main() -> None:
    sys.exit(run())
