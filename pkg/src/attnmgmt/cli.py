"""Command-line front end.

Commands::

    attnmgmt solve    --prior 1/3,1/3,1/3 --kappa 0.6
    attnmgmt check-ic policy.json --kappa 1 [--with-oracle --grid 60]
    attnmgmt oracle   policy.json --kappa 1 [--grid 60 --tol 1e-6]
    attnmgmt sweep    --prior 1/3,1/3,1/3 --kappa-min 0.1 --kappa-max 2.5 --steps 100 [--out sweep.csv]
    attnmgmt verify   --prior 1/3,1/3,1/3 --kappa 1.0 [--grid 200 --tol 1e-6]

Exit codes: 0 success or IC, 1 substantive negative (not IC, closed form
beaten), 2 input error, 3 inconclusive oracle verdict.
"""
from __future__ import annotations

import argparse
import csv
import io
import sys
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from . import fileio
from .errors import AttentionError
from .ic import order_ic
from .optimal3 import OptimalOutcome, solve
from .oracle import DEFAULT_GRID, Verdict, check_with_oracle
from .policy import InformationPolicy
from .quadratic import QuadraticModel
from .search import verify_prop2
from .simplex import THREE_STATES, az_from_belief, is_three_state

EXIT_OK = 0
EXIT_NEGATIVE = 1
EXIT_INPUT = 2
EXIT_INCONCLUSIVE = 3

SWEEP_COLUMNS = ["kappa", "regime", "payoff", "s_star", "slope_used", "pi_minus1", "pi_plus1", "pi", "degenerate"]

_VERDICT_EXIT = {Verdict.IC: EXIT_OK, Verdict.NOT_IC: EXIT_NEGATIVE, Verdict.INCONCLUSIVE: EXIT_INCONCLUSIVE}


class InputError(AttentionError):
    """Bad command-line values."""


def parse_probabilities(text: str) -> list[float]:
    """``"1/3,1/3,1/3"`` or ``"0.2,0.5,0.3"`` -> floats (fractions in double precision)."""
    try:
        return [float(Fraction(tok.strip())) for tok in text.split(",")]
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError(f"cannot parse probabilities {text!r}: {exc}") from exc


def fmt(x, digits: int = 12) -> str:
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x)).lower()
    if isinstance(x, str):
        return x
    return f"{float(x):.{digits}g}"


# -- rendering ----------------------------------------------------------------

def _policy_lines(p: InformationPolicy, three_state: bool) -> list[str]:
    lines = []
    for n, (b, w) in enumerate(zip(p.support, p.weights)):
        probs = ", ".join(fmt(x, 8) for x in b)
        line = f"  [{n}] weight {fmt(w, 8):>11}  belief ({probs})"
        if three_state:
            a, z = az_from_belief(b)
            line += f"  (a, z) = ({fmt(a, 8)}, {fmt(z, 8)})"
        lines.append(line)
    return lines


def render_outcome(out: OptimalOutcome) -> str:
    lines = [
        f"regime      {out.regime.value}",
        f"payoff      {fmt(out.payoff)}",
        f"kappa       {fmt(out.kappa)}",
        f"prior       ({', '.join(fmt(x, 8) for x in out.prior)})",
        f"s_star      {fmt(out.s_star) or 'none (kappa > 2)'}",
    ]
    if out.slope_used is not None:
        lines.append(f"slope_used  {fmt(out.slope_used)}")
    if out.thresholds is not None:
        lines.append("thresholds  " + ", ".join(fmt(k) for k in out.thresholds.as_tuple()))
    lines.append("signal      " + ", ".join(f"{k}={fmt(v)}" for k, v in sorted(out.signal.items())))
    if out.degenerate:
        lines.append("degenerate  true (kappa sits on the downplaying/exaggeration boundary)")
    if out.reflected:
        lines.append("reflected   true (solved on the mirrored prior)")
    lines.append("policy")
    lines.extend(_policy_lines(out.policy, True))
    return "\n".join(lines) + "\n"


def render_ic(report, model: QuadraticModel) -> str:
    lines = [f"order-IC    {'yes' if report.ic else 'no'}"]
    slope = report.slope_form or [None] * len(report.margins)
    for pm, sf in zip(report.margins, slope):
        line = f"  pair ({pm.i},{pm.j})  choice {fmt(pm.choice, 8)}  psych {fmt(pm.psych, 8)}  margin {fmt(pm.margin, 8)}"
        if sf is not None:
            line += f"  |dz/da| {fmt(sf[0], 8)} vs s* {fmt(sf[1], 8) or 'none'}"
        lines.append(line)
    for v in report.violations:
        lines.append(f"  violation ({v.i},{v.j}): {v.reason}")
    return "\n".join(lines) + "\n"


def render_oracle(r, model: QuadraticModel) -> str:
    lines = [
        f"oracle      {r.verdict.value}",
        f"  best {fmt(r.best_value)}  full attention {fmt(r.full_attention_value)}  gap {fmt(r.gap)}  tol {fmt(r.tol)}",
        f"  grid {r.grid_resolution}" + ("" if r.refined_gap is None else f"  refined gap {fmt(r.refined_gap)}"),
        "  best garbling",
    ]
    three = model.general is None and is_three_state(model.states)
    lines.extend("  " + s for s in _policy_lines(r.best_garbling, three))
    return "\n".join(lines) + "\n"


def render_search(r) -> str:
    lines = [
        f"search      {'agrees' if r.ok else 'DISAGREES'}",
        f"  closed form {r.closed_form.regime.value} payoff {fmt(r.closed_form.payoff)}",
        f"  grid max {fmt(r.grid_max)} at {r.argmax}  gap {fmt(r.gap)}",
        f"  candidates {r.n_candidates} (feasible {r.n_feasible}, IC failures {r.ic_failures})",
    ]
    if r.affine_residual is not None:
        lines.append(f"  affine residual along a2 {fmt(r.affine_residual, 3)}")
    lines.extend(f"  ! {m}" for m in r.messages)
    return "\n".join(lines) + "\n"


# -- commands -----------------------------------------------------------------

def cmd_solve(args) -> tuple[int, str]:
    out = solve(parse_probabilities(args.prior), args.kappa)
    if args.format == "json":
        return EXIT_OK, fileio.dumps(fileio.outcome_to_dict(out)) + "\n"
    return EXIT_OK, render_outcome(out)


def cmd_check_ic(args) -> tuple[int, str]:
    p, model = fileio.load_policy(fileio.read_text(args.policy), args.kappa)
    report = order_ic(p, model)
    code = EXIT_OK if report.ic else EXIT_NEGATIVE
    oracle = None
    if args.with_oracle:
        oracle = check_with_oracle(p, model, args.grid, args.tol)
        if oracle.verdict is Verdict.INCONCLUSIVE:
            code = EXIT_INCONCLUSIVE
        elif (oracle.verdict is Verdict.IC) != report.ic:
            # the two checks disagree and neither is marked inconclusive
            code = EXIT_INCONCLUSIVE
    if args.format == "json":
        doc = {"ic": fileio.ic_report_to_dict(report)}
        if oracle is not None:
            doc["oracle"] = fileio.oracle_report_to_dict(oracle, model)
        return code, fileio.dumps(doc) + "\n"
    text = render_ic(report, model)
    if oracle is not None:
        text += render_oracle(oracle, model)
    return code, text


def cmd_oracle(args) -> tuple[int, str]:
    p, model = fileio.load_policy(fileio.read_text(args.policy), args.kappa)
    r = check_with_oracle(p, model, args.grid, args.tol)
    code = _VERDICT_EXIT[r.verdict]
    if args.format == "json":
        return code, fileio.dumps(fileio.oracle_report_to_dict(r, model)) + "\n"
    return code, render_oracle(r, model)


def sweep_rows(prior, kappa_min: float, kappa_max: float, steps: int) -> list[dict]:
    if not (kappa_min > 0.0 and kappa_min < kappa_max):
        raise InputError(f"need 0 < kappa-min < kappa-max, got [{kappa_min}, {kappa_max}]")
    if steps < 2:
        raise InputError(f"need at least 2 steps, got {steps}")
    rows = []
    for kappa in np.linspace(kappa_min, kappa_max, steps):
        out = solve(prior, float(kappa))
        rows.append(
            {
                "kappa": float(kappa),
                "regime": out.regime.value,
                "payoff": out.payoff,
                "s_star": out.s_star,
                "slope_used": out.slope_used,
                "pi_minus1": out.signal.get("pi_minus1"),
                "pi_plus1": out.signal.get("pi_plus1"),
                "pi": out.signal.get("pi"),
                "degenerate": out.degenerate,
            }
        )
    return rows


def rows_to_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(SWEEP_COLUMNS)
    for row in rows:
        writer.writerow([fmt(row[c]) for c in SWEEP_COLUMNS])
    return buf.getvalue()


def cmd_sweep(args) -> tuple[int, str]:
    rows = sweep_rows(parse_probabilities(args.prior), args.kappa_min, args.kappa_max, args.steps)
    if args.format == "json":
        return EXIT_OK, fileio.dumps(rows) + "\n"
    return EXIT_OK, rows_to_csv(rows)


def cmd_verify(args) -> tuple[int, str]:
    prior = parse_probabilities(args.prior)
    search = verify_prop2(prior, args.kappa, args.grid, args.tol)
    out = search.closed_form
    model = QuadraticModel(THREE_STATES, out.prior, out.kappa)
    oracle = check_with_oracle(out.policy, model, args.oracle_grid, max(args.tol, 1e-12))
    if not search.ok or oracle.verdict is Verdict.NOT_IC:
        code = EXIT_NEGATIVE
    elif oracle.verdict is Verdict.INCONCLUSIVE:
        code = EXIT_INCONCLUSIVE
    else:
        code = EXIT_OK
    if args.format == "json":
        doc = {
            "ok": code == EXIT_OK,
            "search": fileio.search_report_to_dict(search),
            "oracle": fileio.oracle_report_to_dict(oracle, model),
            "outcome": fileio.outcome_to_dict(out),
        }
        return code, fileio.dumps(doc) + "\n"
    return code, render_outcome(out) + render_search(search) + render_oracle(oracle, model)


# -- argument parsing ---------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="attnmgmt", description="Optimal attention management toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--format", choices=["text", "json"], default="text")
        p.add_argument("--out", help="write output here instead of stdout")

    p = sub.add_parser("solve", help="closed-form optimal policy for states (-1, 0, 1)")
    p.add_argument("--prior", required=True, help="comma-separated probabilities, fractions allowed")
    p.add_argument("--kappa", type=float, required=True)
    common(p)
    p.set_defaults(func=cmd_solve)

    for name, func, helptext in (
        ("check-ic", cmd_check_ic, "order-IC check of a policy file"),
        ("oracle", cmd_oracle, "LP garbling oracle on a policy file"),
    ):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("policy", help="policy JSON file")
        p.add_argument("--kappa", type=float, required=True)
        p.add_argument("--grid", type=int, default=DEFAULT_GRID, help="barycentric lattice resolution")
        p.add_argument("--tol", type=float, default=None, help="oracle gap tolerance")
        if name == "check-ic":
            p.add_argument("--with-oracle", action="store_true", help="also run the LP oracle")
        common(p)
        p.set_defaults(func=func)

    p = sub.add_parser("sweep", help="regime and payoff over a kappa range (CSV)")
    p.add_argument("--prior", required=True)
    p.add_argument("--kappa-min", type=float, required=True)
    p.add_argument("--kappa-max", type=float, required=True)
    p.add_argument("--steps", type=int, default=100)
    common(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("verify", help="grid search and LP oracle against the closed form")
    p.add_argument("--prior", required=True)
    p.add_argument("--kappa", type=float, required=True)
    p.add_argument("--grid", type=int, default=200, help="search grid density per axis")
    p.add_argument("--oracle-grid", type=int, default=DEFAULT_GRID)
    p.add_argument("--tol", type=float, default=1e-6)
    common(p)
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse reports usage errors with code 2
        return int(exc.code or 0)
    for name in ("grid", "steps", "oracle_grid"):
        if getattr(args, name, 1) < 1:
            print(f"error: --{name.replace('_', '-')} must be positive", file=sys.stderr)
            return EXIT_INPUT
    try:
        code, text = args.func(args)
    except AttentionError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
