"""Command-line interface.

Exit codes: 0 success, 1 a verification failed, 2 usage error, 3 numerical
breakdown in the LP layer.
"""
from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import analytic, search
from .bipartite import (
    BadMixture,
    BipartiteState,
    NotNormalized,
    NotPositive,
    enumerate_max_entangled,
    separable_state,
    state_from_map,
)
from .chsh import ChshSetting, InvalidProbability, chsh_value, prob_table, winning_probability
from .lp import NumericBreakdown
from .theory import binary_observable, build_theory, pure_state

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _fmt6(x: float) -> str:
    s = f"{x:.6f}"
    return "0.000000" if s == "-0.000000" else s


def _round12(obj):
    if isinstance(obj, float):
        v = round(obj, 12)
        return 0.0 if v == 0 else v
    if isinstance(obj, (np.floating,)):
        return _round12(float(obj))
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.ndarray):
        return _round12(obj.tolist())
    if isinstance(obj, dict):
        return {k: _round12(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round12(v) for v in obj]
    return obj


def _emit_json(obj, out):
    out.write(json.dumps(_round12(obj), indent=2) + "\n")


def _parse_quad(text: str):
    try:
        parts = tuple(int(p) for p in text.split(","))
    except ValueError:
        raise UsageError(f"--obs expects four integers i,j,k,l, got {text!r}") from None
    if len(parts) != 4:
        raise UsageError(f"--obs expects four integers i,j,k,l, got {text!r}")
    return parts


def _parse_range(text: str):
    try:
        a, b = text.split("..")
        lo, hi = int(a), int(b)
    except ValueError:
        raise UsageError(f"--n-range expects A..B, got {text!r}") from None
    if lo < 3 or hi < lo:
        raise UsageError(f"--n-range needs 3 <= A <= B, got {text!r}")
    return lo, hi


def load_state(path: str, tol: float, n_hint: int | None = None) -> BipartiteState:
    """Read a state file: ``{"n", "map"}`` or ``{"n", "mixture": [[w, iA, iB], ...]}``."""
    try:
        with open(path) as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read state file {path}: {exc}") from None
    n = data.get("n", n_hint)
    if n is None:
        raise UsageError("state file lacks 'n'")
    th = build_theory(int(n))
    if "map" in data:
        return state_from_map(th, data["map"], tol=tol)
    if "mixture" in data:
        mix = [(float(w), pure_state(th, ia), pure_state(th, ib)) for w, ia, ib in data["mixture"]]
        return separable_state(th, mix, tol=tol)
    raise UsageError("state file needs 'map' or 'mixture'")


# ---------------------------------------------------------------------------
# subcommands


def cmd_theory_info(args, out):
    th = build_theory(args.n)
    if args.output == "json":
        _emit_json({"n": th.n, "r": th.r, "theta": th.theta, "vertices": th.pure_states,
                    "effects": th.pure_effects, "T": th.T}, out)
        return EXIT_OK
    out.write(f"n={th.n}\nr={th.r:.12f}\ntheta={th.theta:.12f}\n")
    out.write("vertices\n")
    for i, v in enumerate(th.pure_states):
        out.write(f"  {i}: {_fmt6(v[0])},{_fmt6(v[1])},{_fmt6(v[2])}\n")
    out.write("effects\n")
    for i, v in enumerate(th.pure_effects):
        out.write(f"  {i}: {_fmt6(v[0])},{_fmt6(v[1])},{_fmt6(v[2])}\n")
    out.write("T\n")
    for row in th.T:
        out.write("  " + ",".join(_fmt6(x) for x in row) + "\n")
    return EXIT_OK


def cmd_chsh_eval(args, out):
    state = load_state(args.state, args.tol, args.n)
    th = state.theory
    i, j, k, l = _parse_quad(args.obs)
    setting = ChshSetting(state, *(binary_observable(th, q) for q in (i, j, k, l)))
    p = prob_table(setting, tol=args.tol)
    C, P = chsh_value(p), winning_probability(p)
    if args.output == "json":
        _emit_json({"n": th.n, "obs": [i, j, k, l], "C": C, "P_win": P,
                    "table": [[p[a, b, s, t] for a in (0, 1) for b in (0, 1)]
                              for s in (0, 1) for t in (0, 1)]}, out)
        return EXIT_OK
    out.write(f"C={_fmt6(C)}\nP_win={_fmt6(P)}\n")
    out.write("s,t,p00,p01,p10,p11\n")
    for s in (0, 1):
        for t in (0, 1):
            out.write(f"{s},{t}," + ",".join(_fmt6(p[a, b, s, t]) for a in (0, 1) for b in (0, 1)) + "\n")
    return EXIT_OK


def cmd_optimize(args, out):
    th = build_theory(args.n)
    senses = ("max", "min") if args.sense == "abs" else (args.sense,)
    if args.obs:
        quad = _parse_quad(args.obs)
        if args.me_only:
            vals = [(float(search.chsh_grid(th, s.map)[tuple(q % th.n for q in quad)]), g)
                    for g, s in enumerate(enumerate_max_entangled(th))]
            pick = _pick(vals, args.sense)
            rec = {"n": th.n, "mode": "me", "quadruple": list(quad), "value": pick[0],
                   "group_element": pick[1]}
        else:
            vals = []
            for s in senses:
                v, st = search.max_chsh_fixed_obs(th, *quad, sense=s, tol=args.tol)
                vals.append((v, s, st))
            pick = _pick(vals, args.sense)
            rec = {"n": th.n, "mode": "lp", "quadruple": list(quad), "value": pick[0],
                   "sense": pick[1], "matrix": pick[2].map}
    elif args.me_only:
        rep = search.me_optimum(th)
        rec = {"n": th.n, "mode": "me", "quadruple": list(rep.quadruple), "value": rep.signed_value,
               "abs_value": rep.best_value, "group_element": rep.group_element}
    else:
        rep = search.global_optimum(th, reduce=not args.no_reduce, threads=args.threads,
                                    cap=args.lp_cap, tol=args.tol, senses=senses)
        rec = {"n": th.n, "mode": "lp", "quadruple": list(rep.quadruple), "value": rep.signed_value,
               "abs_value": rep.best_value, "sense": rep.sense,
               "max_entangled_attains": rep.is_max_entangled, "matrix": rep.state.map}
    if args.output == "json":
        _emit_json(rec, out)
    elif args.output == "csv":
        out.write("n,i,j,k,l,C\n")
        out.write(f"{th.n}," + ",".join(str(q) for q in rec["quadruple"]) + f",{_fmt6(rec['value'])}\n")
    else:
        out.write(f"n={th.n}\nquadruple={','.join(str(q) for q in rec['quadruple'])}\n")
        out.write(f"C={_fmt6(rec['value'])}\n|C|={_fmt6(abs(rec['value']))}\n")
        if "max_entangled_attains" in rec:
            out.write(f"max_entangled_attains={str(rec['max_entangled_attains']).lower()}\n")
        if "group_element" in rec:
            out.write(f"group_element={rec['group_element']}\n")
    return EXIT_OK


def _pick(vals, sense):
    if sense == "max":
        return max(vals, key=lambda v: v[0])
    if sense == "min":
        return min(vals, key=lambda v: v[0])
    return max(vals, key=lambda v: abs(v[0]))


def cmd_verify(args, out):
    lo, hi = _parse_range(args.n_range)
    if hi > args.lp_cap:
        raise UsageError(f"n = {hi} exceeds the LP cap {args.lp_cap}")
    records, ok_all = [], True
    for n in range(lo, hi + 1):
        rep = search.verify_theorem(build_theory(n), threads=args.threads, cap=args.lp_cap,
                                   lp_tol=args.tol)
        rec = rep.to_json()
        if n % 2 and n >= 5:
            cert = search.certify(n, tol=max(args.tol, 1e-8))
            rec["certificate"] = {"pass": cert.passed, "residuals": cert.to_json()["residuals"]}
        ok = rep.passed and rec.get("certificate", {}).get("pass", True)
        ok_all &= ok
        records.append(rec)
        if args.output == "text":
            out.write(f"n={n} {'PASS' if ok else 'FAIL'} global={_fmt6(rep.global_value)} "
                      f"me={_fmt6(rep.me_value)}\n")
    if args.output == "json":
        _emit_json(records, out)
    elif args.output == "csv":
        out.write("n,global,me,pass\n")
        for r in records:
            out.write(f"{r['n']},{_fmt6(r['global']['value'])},{_fmt6(r['me']['value'])},"
                      f"{int(r['theorem_pass'])}\n")
    else:
        passed = sum(1 for r in records if r["theorem_pass"] and r.get("certificate", {}).get("pass", True))
        out.write(f"summary: {passed}/{len(records)} passed\n")
    return EXIT_OK if ok_all else EXIT_FAIL


def cmd_certify(args, out):
    try:
        rep = search.certify(args.n, tol=max(args.tol, 1e-8))
    except analytic.WrongResidue as exc:
        raise UsageError(str(exc)) from None
    if args.output == "json":
        _emit_json(rep.to_json(), out)
    else:
        out.write(f"n={rep.n} certificate={'PASS' if rep.passed else 'FAIL'}\n")
        for part in (rep.theorem, rep.delta):
            out.write(f"{part.kind}: {'PASS' if part.passed else 'FAIL'} "
                      f"value={_fmt6(part.expected_value)} chsh={_fmt6(part.chsh_value)} "
                      f"dual={','.join(_fmt6(v) for v in part.dual)}\n")
            for key in sorted(part.residuals):
                out.write(f"  {key}={part.residuals[key]:.3e}\n")
            for msg in part.failures:
                out.write(f"  failure: {msg}\n")
        out.write(f"H={_fmt6(rep.h_value)} margin={_fmt6(rep.dominance_margin)}\n")
        if rep.closed_form is not None:
            cf = rep.closed_form
            out.write(f"closed_form_dual positive={str(cf['positive']).lower()} "
                      f"tight_columns={str(cf['tight_columns']).lower()} "
                      f"fully_dual_feasible={str(cf['fully_dual_feasible']).lower()}\n")
    return EXIT_OK if rep.passed else EXIT_FAIL


def cmd_table(args, out):
    n = args.n
    if args.alt_form:
        if n % 8 not in (2, 6):
            raise UsageError("--alt-form needs n = 2, 6 (mod 8)")
        c = analytic.compare_even_forms(n)
        if args.header:
            out.write("n,direct_l,direct,alternative_l,alternative,ratio\n")
        out.write(f"{n},{c['direct_l']},{_fmt6(c['direct'])},{c['alternative_l']},"
                  f"{_fmt6(c['alternative'])},{_fmt6(c['ratio'])}\n")
        return EXIT_OK
    if n % 2 == 0 or n < 5:
        raise UsageError(f"table needs odd n >= 5, got {n}")
    if args.what == "hopt":
        ns, _, H = analytic.h_opt(n)
        if args.header:
            out.write("n,n_star,H_opt\n")
        out.write(f"{n},{ns},{_fmt6(H)}\n")
        return EXIT_OK
    vals = analytic.g_table(n) if args.what == "g" else analytic.h_table(n)
    if args.header:
        out.write(f"n,k,{args.what.upper()}\n")
    for k, v in enumerate(vals):
        out.write(f"{n},{k},{_fmt6(v)}\n")
    return EXIT_OK


def cmd_sweep(args, out):
    rows = search.sweep(args.parity, args.max_n, lp=not args.no_lp, lp_cap=args.lp_cap,
                        threads=args.threads)
    text = "n,optimum,method\n" + "".join(f"{n},{_fmt6(v)},{m}\n" for n, v, m in rows)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        out.write(text)
    return EXIT_OK


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    def shared(suppress):
        q = _Parser(add_help=False)
        dflt = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
        q.add_argument("--tol", type=float, default=dflt(1e-9), help="membership and LP tolerance")
        q.add_argument("--threads", type=int, default=dflt(None), help="LP sweep workers")
        q.add_argument("--lp-cap", type=int, default=dflt(search.LP_CAP), help="largest n for LP sweeps")
        q.add_argument("--output", choices=("text", "json", "csv"), default=dflt("text"))
        return q

    # options may appear before or after the subcommand; only the top level sets defaults
    common = shared(True)
    p = _Parser(prog="polygon-chsh", description="CHSH optimisation in regular polygon theories",
                parents=[shared(False)])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    th = sub.add_parser("theory", parents=[common])
    th_sub = th.add_subparsers(dest="action", required=True, parser_class=_Parser)
    info = th_sub.add_parser("info", parents=[common])
    info.add_argument("--n", type=int, required=True)
    info.set_defaults(func=cmd_theory_info)

    ch = sub.add_parser("chsh", parents=[common])
    ch_sub = ch.add_subparsers(dest="action", required=True, parser_class=_Parser)
    ev = ch_sub.add_parser("eval", parents=[common])
    ev.add_argument("--state", required=True)
    ev.add_argument("--obs", required=True)
    ev.add_argument("--n", type=int, default=None)
    ev.set_defaults(func=cmd_chsh_eval)

    op = sub.add_parser("optimize", parents=[common])
    op.add_argument("--n", type=int, required=True)
    op.add_argument("--obs", default=None)
    op.add_argument("--me-only", action="store_true")
    op.add_argument("--no-reduce", action="store_true")
    op.add_argument("--sense", choices=("max", "min", "abs"), default="abs")
    op.set_defaults(func=cmd_optimize)

    ve = sub.add_parser("verify", parents=[common])
    ve.add_argument("--n-range", required=True)
    ve.set_defaults(func=cmd_verify)

    ce = sub.add_parser("certify", parents=[common])
    ce.add_argument("--n", type=int, required=True)
    ce.set_defaults(func=cmd_certify)

    ta = sub.add_parser("table", parents=[common])
    ta.add_argument("--what", choices=("g", "h", "hopt"), default="hopt")
    ta.add_argument("--n", type=int, required=True)
    ta.add_argument("--header", action="store_true")
    ta.add_argument("--alt-form", action="store_true",
                    help="compare the alternative even-n closed form with direct maximisation")
    ta.set_defaults(func=cmd_table)

    sw = sub.add_parser("sweep", parents=[common])
    sw.add_argument("--parity", choices=("even", "odd", "both"), default="both")
    sw.add_argument("--max-n", type=int, required=True)
    sw.add_argument("--out", default=None)
    sw.add_argument("--no-lp", action="store_true", help="skip n = 0, 4 (mod 8), which need the LP")
    sw.set_defaults(func=cmd_sweep)
    return p


def run(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        args = build_parser().parse_args(argv)
        if args.tol <= 0:
            raise UsageError("--tol must be positive")
        if args.lp_cap < 3:
            raise UsageError("--lp-cap must be at least 3")
        if getattr(args, "n", None) is not None and args.n < 3:
            raise UsageError(f"--n must be at least 3, got {args.n}")
        return args.func(args, out)
    except UsageError as exc:
        err.write(f"error: {exc}\n")
        return EXIT_USAGE
    except search.CapExceeded as exc:
        err.write(f"error: {exc}\n")
        return EXIT_USAGE
    except (NotNormalized, NotPositive, BadMixture, InvalidProbability) as exc:
        err.write(f"error: invalid state: {exc}\n")
        return EXIT_USAGE
    except NumericBreakdown as exc:
        err.write(f"error: numerical breakdown: {exc}\n")
        return EXIT_NUMERIC


def main() -> None:
    sys.exit(run())
