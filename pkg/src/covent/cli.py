"""Command-line front end.

Every command produces a JSON document (or CSV table) on stdout or at
``--out``. Exit codes: 0 success, 2 invalid input, 3 numerical failure,
4 file I/O.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass

import numpy as np

from . import correlation, entangle, invariants, majorana, states
from .exceptions import NumericalError

EXIT_OK, EXIT_INVALID, EXIT_NUMERICAL, EXIT_IO = 0, 2, 3, 4


class UsageError(ValueError):
    pass


@dataclass
class Output:
    data: object
    header: list | None = None
    rows: list | None = None
    status: int = EXIT_OK


# -- serialization ---------------------------------------------------------------


def _num(x) -> str:
    x = float(x)
    if not math.isfinite(x):
        raise NumericalError(f"non-finite value {x!r} in output")
    if x == 0:
        return "0.0"
    s = format(x, ".17g")
    # keep floats recognizable as floats: "1" -> "1.0"
    return s if any(c in s for c in ".e") else s + ".0"


def dumps_json(obj, indent=0) -> str:
    """JSON with every float written to 17 significant digits."""
    pad, inner = "  " * indent, "  " * (indent + 1)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{inner}{json.dumps(str(k))}: {dumps_json(v, indent + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        seq = list(obj)
        if not seq:
            return "[]"
        if all(not isinstance(v, (dict, list, tuple, np.ndarray)) for v in seq):
            return "[" + ", ".join(dumps_json(v, indent + 1) for v in seq) + "]"
        return "[\n" + ",\n".join(inner + dumps_json(v, indent + 1) for v in seq) + "\n" + pad + "]"
    if obj is None or isinstance(obj, (bool, np.bool_)):
        return json.dumps(None if obj is None else bool(obj))
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _num(obj)
    if isinstance(obj, str):
        return json.dumps(obj)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps_csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_num(v) if isinstance(v, (float, np.floating)) else v for v in row])
    return buf.getvalue()


def _columns(cols: dict):
    header = list(cols)
    n = len(next(iter(cols.values())))
    return header, [[cols[h][i] for h in header] for i in range(n)]


def _cplx(z):
    return [float(np.real(z)), float(np.imag(z))]


# -- input helpers ---------------------------------------------------------------


def _load_state(args):
    if getattr(args, "rho", None):
        rho = states.load(args.rho)
    elif getattr(args, "state", None):
        rho = states.named_state(args.state)
    else:
        raise UsageError("give a state with --rho FILE or --state NAME")
    if getattr(args, "dims", None):
        rho = states.DensityMatrix(rho.mat, tuple(args.dims))
    return rho


def _parse_vector(text, flag):
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"{flag}: column {exc.colno}: {exc.msg}") from None
    if not isinstance(raw, list) or not raw:
        raise UsageError(f"{flag}: expected a non-empty JSON list")
    out = []
    for k, x in enumerate(raw):
        if isinstance(x, (int, float)) and not isinstance(x, bool):
            out.append(complex(x))
        elif isinstance(x, list) and len(x) == 2 and all(isinstance(t, (int, float)) for t in x):
            out.append(complex(x[0], x[1]))
        else:
            raise UsageError(f"{flag}[{k}]: expected a number or [re, im] pair, got {x!r}")
    return np.asarray(out)


def _settings(args):
    return entangle.OptimizerSettings(restarts=args.restarts, seed=args.seed, tol=args.tol)


def _operators(args, dims):
    return entangle.named_operator(args.operators, dims[0]), entangle.named_operator(args.operators, dims[1])


# -- commands --------------------------------------------------------------------


TABLE_STATES = ("rho1", "rho2", "rho3", "rho4")


def cmd_table41(args):
    """Identity-orientation covariances of the four comparison states with sigma3 (x) sigma3."""
    catalog = states.named_mixtures()
    a = np.kron(entangle.qmat.SIGMA_Z, np.eye(2))
    b = np.kron(np.eye(2), entangle.qmat.SIGMA_Z)
    cols = {k: [] for k in ("state", "abs_cov", "abs_cov_sq", "abs_alt_cov", "abs_alt_cov_sq")}
    for name in TABLE_STATES:
        rep = correlation.report(catalog[name], a, b).as_dict()
        cols["state"].append(name)
        for k in ("abs_cov", "abs_cov_sq", "abs_alt_cov", "abs_alt_cov_sq"):
            cols[k].append(rep[k])
    header, rows = _columns(cols)
    data = {
        "operators": "sigma3 (x) 1, 1 (x) sigma3",
        "note": "abs_* are magnitudes; *_sq are their squares; both are reported",
        "rows": [dict(zip(header, r)) for r in rows],
    }
    return Output(data, header, rows)


def cmd_counterexample(args):
    rho = states.named_mixtures()["counterexample"]
    a = np.kron(entangle.qmat.SIGMA_Z, np.eye(2))
    b = np.kron(np.eye(2), entangle.qmat.SIGMA_Z)
    c, ca = correlation.cov(rho, a, b), correlation.alt_cov(rho, a, b)
    data = {"cov": float(c.real), "alt_cov": float(ca.real), "cov_imag": float(c.imag), "alt_cov_imag": float(ca.imag)}
    header = list(data)
    return Output(data, header, [[data[h] for h in header]])


def cmd_scan(args):
    if args.kind == "pure-family":
        cols = entangle.pure_family_scan(args.points)
    elif args.kind == "bell-mixture":
        cols = entangle.bell_mixture_scan(args.points, args.b1, args.b2, args.operators)
    else:
        cols = entangle.bell_rotation_scan(args.points, args.b1, args.operators)
    cols = {k: [float(v) for v in vals] for k, vals in cols.items()}
    header, rows = _columns(cols)
    return Output({"scan": args.kind, "columns": cols}, header, rows)


def cmd_optimize(args):
    settings = _settings(args)
    if args.pure_search:
        d1, d2 = args.dims or (2, 3)
        res = entangle.max_cov_unequal_dims(d1, d2, settings)
    else:
        rho = _load_state(args)
        if rho.dims is None:
            raise UsageError("state has no bipartition; pass --dims d1 d2")
        a, b = _operators(args, rho.dims)
        res = entangle.covariance_entanglement(rho, a, b, args.measure, settings)
    data = res.as_dict()
    header = ["measure", "max_value", "max_value_sq", "restarts", "converged"]
    out = Output(data, header, [[data[h] for h in header]])
    if not res.converged:
        print("warning: best local search did not report convergence", file=sys.stderr)
        out.status = EXIT_NUMERICAL
    return out


def cmd_channel(args):
    rho = _load_state(args) if (args.rho or args.state) else states.named_mixtures()["lgm_input"]
    out = entangle.apply_channel(rho, entangle.lgm_channel(), renormalize=args.renormalize)
    return Output(states.to_json_dict(out))


def _spin_state(args):
    if args.amplitudes:
        return majorana.SpinState.normalized(_parse_vector(args.amplitudes, "--amplitudes"))
    if args.coeffs:
        return majorana.polynomial_to_state(majorana.MajoranaPolynomial(_parse_vector(args.coeffs, "--coeffs")))
    raise UsageError("give --amplitudes or --coeffs")


def cmd_majorana(args):
    if args.action == "catalog":
        if args.j is None:
            raise UsageError("catalog needs --j")
        entries = majorana.max_dispersion_catalog(args.j)
        header = ["label", "j", "dispersion"]
        rows = [[e.label, e.polynomial.j, e.dispersion] for e in entries]
        return Output({"entries": [e.as_dict() for e in entries]}, header, rows)
    if args.action == "roots":
        if args.coeffs:
            p = majorana.MajoranaPolynomial(_parse_vector(args.coeffs, "--coeffs"))
        else:
            p = majorana.state_to_polynomial(_spin_state(args))
        con = majorana.roots(p)
        header = ["x", "y", "z"]
        return Output(con.as_dict(), header, [list(map(float, pt)) for pt in con.points])
    s = _spin_state(args)
    if args.action == "state2poly":
        p = majorana.state_to_polynomial(s)
        data = {"j": p.j, "coeffs": [_cplx(c) for c in p.coeffs]}
        header = ["k", "re", "im"]
        return Output(data, header, [[k, float(c.real), float(c.imag)] for k, c in enumerate(p.coeffs)])
    value = majorana.dispersion(s)
    return Output({"j": s.j, "dispersion": value}, ["j", "dispersion"], [[s.j, value]])


def cmd_invariants(args):
    inv = invariants.chi_invariants(_load_state(args))
    data = inv.as_dict()
    header = list(data)
    return Output(data, header, [[data[h] for h in header]])


def cmd_singlets(args):
    d1, d2 = args.dims or (2, 2)
    counts = [invariants.singlet_count(n, d1, d2) for n in range(args.terms)]
    cols = {"n": list(range(args.terms)), "singlets": counts}
    data = {"dims": [d1, d2], "singlets": counts}
    if (d1, d2) == (2, 2):
        cols["series"] = invariants.generating_series(args.terms)
        data["series"] = cols["series"]
    header, rows = _columns(cols)
    return Output(data, header, rows)


# -- parser ----------------------------------------------------------------------


def _positive_int(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return v


def _common(p, state=False, optimizer=False):
    p.add_argument("--out", help="write here instead of stdout")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--seed", type=int, default=0)
    if state:
        p.add_argument("--rho", help="density matrix JSON file")
        p.add_argument("--state", help="named state, e.g. phi+, rho2, maxcorr3")
        p.add_argument("--dims", type=_positive_int, nargs=2, metavar=("D1", "D2"))
    if optimizer:
        p.add_argument("--operators", choices=("sigma3", "equal-weight", "pair"), default="sigma3")
        p.add_argument("--measure", choices=entangle.MEASURES, default="cov")
        p.add_argument("--restarts", type=_positive_int, default=32)
        p.add_argument("--tol", type=float, default=1e-9)


def build_parser():
    parser = argparse.ArgumentParser(prog="covent", description="Local covariance entanglement toolkit.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("table41", help="four-state comparison table")
    _common(p)
    p.set_defaults(func=cmd_table41)

    p = sub.add_parser("counterexample", help="zero cov, nonzero alternative covariance")
    _common(p)
    p.set_defaults(func=cmd_counterexample)

    p = sub.add_parser("scan", help="identity-orientation curves")
    p.add_argument("kind", choices=("bell-rotation", "pure-family", "bell-mixture"))
    p.add_argument("--points", type=_positive_int, default=101)
    p.add_argument("--operators", choices=("sigma3", "equal-weight", "pair"), default="equal-weight")
    p.add_argument("--b1", default="phi+", help="Bell state (rotation scan, first mixture term)")
    p.add_argument("--b2", default="psi+", help="second mixture term")
    _common(p)
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("optimize", help="maximize covariance over local unitaries")
    p.add_argument("--pure-search", action="store_true",
                   help="search pure states of --dims instead of a given state")
    _common(p, state=True, optimizer=True)
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("channel", help="apply the local measurement channel")
    p.add_argument("action", choices=("apply",))
    p.add_argument("--renormalize", action="store_true")
    _common(p, state=True)
    p.set_defaults(func=cmd_channel)

    p = sub.add_parser("majorana", help="spin states as polynomials and constellations")
    p.add_argument("action", choices=("state2poly", "roots", "dispersion", "catalog"))
    p.add_argument("--amplitudes", help="JSON list, m = -j..j; entries number or [re, im]")
    p.add_argument("--coeffs", help="JSON list of polynomial coefficients, ascending powers")
    p.add_argument("--j", type=float)
    _common(p)
    p.set_defaults(func=cmd_majorana)

    p = sub.add_parser("invariants", help="chi1, chi2, purity, eps")
    _common(p, state=True)
    p.set_defaults(func=cmd_invariants)

    p = sub.add_parser("singlets", help="local-unitary singlet counts")
    p.add_argument("--terms", type=_positive_int, default=21)
    p.add_argument("--dims", type=_positive_int, nargs=2, metavar=("D1", "D2"))
    _common(p)
    p.set_defaults(func=cmd_singlets)

    p = sub.add_parser("run", help="run a scenario file")
    p.add_argument("scenario")
    p.set_defaults(func=None)
    return parser


# -- scenarios -------------------------------------------------------------------

SCENARIO_KINDS = {
    "table41": (["table41"], set()),
    "counterexample": (["counterexample"], set()),
    "bell-rotation-scan": (["scan", "bell-rotation"], {"points", "operators", "b1"}),
    "pure-family-scan": (["scan", "pure-family"], {"points"}),
    "bell-mixture-scan": (["scan", "bell-mixture"], {"points", "operators", "b1", "b2"}),
    "optimize": (["optimize"], {"rho", "state", "dims", "operators", "measure", "restarts", "tol", "pure_search"}),
    "channel": (["channel", "apply"], {"rho", "state", "dims", "renormalize"}),
    "majorana": (["majorana"], {"action", "amplitudes", "coeffs", "j"}),
    "invariants": (["invariants"], {"rho", "state", "dims"}),
    "singlets": (["singlets"], {"terms", "dims"}),
}


def _line_of(text, key):
    needle = json.dumps(key)
    for n, line in enumerate(text.splitlines(), 1):
        if needle in line:
            return n
    return 1


def scenario_argv(text, source="scenario"):
    """Translate a scenario document into command-line arguments.

    ``{"kind": ..., "params": {...}, "seed": N, "output": {"path": ..., "format": ...}}``
    """
    try:
        sc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"{source}:{exc.lineno}:{exc.colno}: {exc.msg}") from None
    if not isinstance(sc, dict):
        raise UsageError(f"{source}:1: top level must be an object")
    unknown = set(sc) - {"kind", "params", "seed", "output"}
    if unknown:
        key = sorted(unknown)[0]
        raise UsageError(f"{source}:{_line_of(text, key)}: unknown field {key!r}")
    kind = sc.get("kind")
    if kind not in SCENARIO_KINDS:
        raise UsageError(f"{source}:{_line_of(text, 'kind')}: kind must be one of {sorted(SCENARIO_KINDS)}, got {kind!r}")
    prefix, allowed = SCENARIO_KINDS[kind]
    argv = list(prefix)
    params = sc.get("params", {})
    if not isinstance(params, dict):
        raise UsageError(f"{source}:{_line_of(text, 'params')}: params must be an object")
    if kind == "majorana":
        if "action" not in params:
            raise UsageError(f"{source}:{_line_of(text, 'params')}: params.action is required")
        argv.append(str(params["action"]))
    for key, value in params.items():
        if key not in allowed:
            raise UsageError(f"{source}:{_line_of(text, key)}: params.{key} not accepted by {kind}")
        if key == "action":
            continue
        flag = "--" + key.replace("_", "-")
        if isinstance(value, bool):
            if value:
                argv.append(flag)
        elif key == "dims":
            if not (isinstance(value, list) and len(value) == 2 and all(isinstance(d, int) for d in value)):
                raise UsageError(f"{source}:{_line_of(text, key)}: params.dims must be [d1, d2]")
            argv += [flag, str(value[0]), str(value[1])]
        elif key in ("amplitudes", "coeffs"):
            argv += [flag, json.dumps(value)]
        elif isinstance(value, (int, float, str)):
            argv += [flag, str(value)]
        else:
            raise UsageError(f"{source}:{_line_of(text, key)}: params.{key} has unsupported type")
    if "seed" in sc:
        if not isinstance(sc["seed"], int) or isinstance(sc["seed"], bool):
            raise UsageError(f"{source}:{_line_of(text, 'seed')}: seed must be an integer")
        argv += ["--seed", str(sc["seed"])]
    output = sc.get("output", {})
    if not isinstance(output, dict):
        raise UsageError(f"{source}:{_line_of(text, 'output')}: output must be an object")
    if "path" in output:
        argv += ["--out", str(output["path"])]
    if "format" in output:
        argv += ["--format", str(output["format"])]
    return argv


# -- entry point -----------------------------------------------------------------


def _execute(argv):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "run":
        try:
            with open(args.scenario, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_IO
        args = parser.parse_args(scenario_argv(text, args.scenario))
    result = args.func(args)
    if args.format == "csv":
        if result.header is None:
            raise UsageError(f"{args.command} has no tabular form; use --format json")
        text = dumps_csv(result.header, result.rows)
    else:
        text = dumps_json(result.data) + "\n"
    if args.out:
        try:
            with open(args.out, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        except OSError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_IO
    else:
        sys.stdout.write(text)
    return result.status


def main(argv=None) -> int:
    try:
        return _execute(argv)
    except SystemExit as exc:
        # argparse reports usage errors with status 2
        return int(exc.code or 0)
    except NumericalError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ValueError, ArithmeticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID if isinstance(exc, ValueError) else EXIT_NUMERICAL
