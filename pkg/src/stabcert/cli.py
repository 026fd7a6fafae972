"""``stabcert`` command line: params, certify, eta and amplify.

Exit codes: 0 on success (a decision or table was produced), 2 when the
requested parameters are infeasible, 3 on bad input.
"""
from __future__ import annotations

import argparse
import csv
import io
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import BudgetTooTight, InfeasibleGap, StabCertError
from .gf2 import BitMatrix
from .intrinsic import (
    CSV_COLUMNS,
    EXACT_MAX_N,
    SHAPE_LABEL,
    amplification_demo,
    eta_bound_curves,
    eta_exact,
    eta_monte_carlo,
    shape_crossing,
    worst_case_search,
)
from .params import solve_bmom, solve_dfe, validate
from .protocols import StationarySource, format_transcript, run_bmom, run_dfe_c
from .states import (
    StabilizerMixture,
    coset_deficit_family,
    generator_flip_family,
    orthogonal_state,
)
from .svg import Series, log_plot
from .tableau import StabilizerTableau, load_circuit, tableau_from_circuit

EXIT_OK, EXIT_INFEASIBLE, EXIT_INPUT = 0, 2, 3
FAMILIES = ("ideal", "orthogonal", "generator_flip", "coset_deficit")
ETA_FAMILIES = ("generator_flip", "coset_deficit", "search")


class InputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


@dataclass
class CampaignConfig:
    subcommand: str
    circuit: str | None = None
    state: dict = field(default_factory=dict)
    delta: float | None = None
    eps: float | None = None
    p: float | None = None
    alpha: float | None = None
    trials: int | None = None
    seed: int | None = None
    out: str | None = None


# -------------------------------------------------------------- state specs


def parse_state_spec(text: str) -> dict:
    """``key=value`` lines (``#`` comments).  Keys: family, c, subgroup.

    ``subgroup`` lists coefficient bitstrings separated by commas.
    """
    spec = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise InputError(f"state spec line {lineno}: expected key=value")
        spec[key.strip()] = value.strip()
    return spec


def build_state(spec: dict, target: StabilizerTableau) -> StabilizerMixture:
    family = spec.get("family", "ideal")
    if family not in FAMILIES:
        raise InputError(f"unknown state family {family!r}; choose from {', '.join(FAMILIES)}")
    if family == "ideal":
        return StabilizerMixture.pure(target)
    if family == "orthogonal":
        return orthogonal_state(target)
    try:
        c = float(spec["c"])
    except KeyError:
        raise InputError(f"family {family} needs c") from None
    except ValueError:
        raise InputError(f"bad c value {spec['c']!r}") from None
    if family == "generator_flip":
        return generator_flip_family(target, c)
    rows = [r for r in spec.get("subgroup", "").split(",") if r.strip()]
    try:
        sub = BitMatrix.from_rows([r.strip() for r in rows], target.n)
    except ValueError as exc:
        raise InputError(f"bad subgroup rows: {exc}") from None
    return coset_deficit_family(target, sub, c)


# ----------------------------------------------------------------- commands


def _solve(protocol, n, delta, eps, p, alpha):
    if protocol == "dfe":
        return solve_dfe(delta, eps, p, n)
    if alpha is None:
        raise InputError("bmom needs --alpha")
    return solve_bmom(n, delta, eps, p, alpha)


def format_chain(params) -> str:
    """The chain with ``=`` on both sides of ``beta`` and ``<`` elsewhere."""
    chain = params.chain()
    ib = [k for k, _ in chain].index("beta")
    text = f"{chain[0][0]}={chain[0][1]:.6g}"
    for i in range(1, len(chain)):
        rel = " = " if i in (ib, ib + 1) else " < "
        text += f"{rel}{chain[i][0]}={chain[i][1]:.6g}"
    return text


def cmd_params(args, out) -> int:
    params = _solve(args.protocol, args.n, args.delta, args.eps, args.p, args.alpha)
    out.write(params.to_lines() + "\n")
    out.write("chain: " + format_chain(params) + "\n")
    v = validate(params)
    out.write(f"exact_false_negative={v.false_negative!r}\n")
    out.write(f"exact_false_positive={v.false_positive!r}\n")
    out.write(params.csv_header() + "\n" + params.to_csv_row() + "\n")
    if args.csv:
        Path(args.csv).write_text(params.csv_header() + "\n" + params.to_csv_row() + "\n")
    return EXIT_OK


def _state_spec(args) -> dict:
    spec = parse_state_spec(Path(args.state).read_text()) if args.state else {}
    for key in ("family", "c", "subgroup"):
        val = getattr(args, key)
        if val is not None:
            spec[key] = str(val)
    return spec


def cmd_certify(args, out) -> int:
    cfg = CampaignConfig("certify", args.circuit, _state_spec(args), args.delta, args.eps,
                         args.p, args.alpha, None, args.seed, args.transcript)
    target = tableau_from_circuit(load_circuit(cfg.circuit))
    rho = build_state(cfg.state, target)
    params = _solve(args.protocol, target.n, cfg.delta, cfg.eps, cfg.p, cfg.alpha)
    rng = np.random.default_rng(cfg.seed)
    src = StationarySource(rho)
    run = run_bmom if args.protocol == "bmom" else run_dfe_c
    summary = run(target, params, src, rng, seed=cfg.seed)
    if cfg.out:
        Path(cfg.out).write_text(format_transcript(summary))
    out.write(f"decision={summary.decision}\nmu={summary.mu!r}\nnu={summary.nu!r}\n")
    return EXIT_OK


def _eta_rows(n, alpha, eps, family, methods, trials, seed, budget, log):
    psi0 = StabilizerTableau.zero_state(n)
    rows = []
    if family == "search":
        rng = np.random.default_rng([seed, n, int(alpha * 1e6)])
        rho, est = worst_case_search(psi0, alpha, eps, budget, rng, trials)
        label = f"search:{est.family}"
        candidates = [(label, rho)]
    elif family == "generator_flip":
        candidates = [(f"generator_flip(c={eps:g})", generator_flip_family(psi0, eps))]
    else:
        if n < 2:
            return rows
        k = n // 2
        sub = BitMatrix(tuple(1 << i for i in range(k)), n)
        candidates = [(f"coset_deficit(k={k},c={eps:g})", coset_deficit_family(psi0, sub, eps))]
    for label, rho in candidates:
        for method in methods:
            if method == "exact":
                if n > EXACT_MAX_N:
                    log.write(f"note: skipping exact method at n={n} (limit {EXACT_MAX_N})\n")
                    continue
                rows.append(eta_exact(rho, psi0, alpha, eps, label))
            else:
                rng = np.random.default_rng([seed, n, int(alpha * 1e6), 1])
                rows.append(eta_monte_carlo(rho, psi0, alpha, eps, trials, rng, label, seed))
    return rows


def cmd_eta(args, out) -> int:
    ns, alphas = args.n or [], args.alpha or []
    if not ns or not alphas:
        raise InputError("empty (n, alpha) grid")
    if ("montecarlo" in args.method or args.family == "search") and args.seed is None:
        raise InputError("--seed is required for randomized estimates")
    records = []
    for alpha in alphas:
        for n in ns:
            records += _eta_rows(n, alpha, args.eps, args.family, args.method, args.trials,
                                 args.seed, args.budget, sys.stderr)
    n_max = args.bounds_n_max or max(ns)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in records:
        w.writerow(r.csv_row())
    curves = {}
    for alpha in alphas:
        curves[alpha] = eta_bound_curves(range(0, n_max + 1), alpha)
        for n, up, low in curves[alpha]:
            w.writerow([n, alpha, args.eps, "bound", "upper_shape", up, up, up, 0, ""])
            w.writerow([n, alpha, args.eps, "bound", "lower_shape", low, low, low, 0, ""])
    Path(args.out).write_text(buf.getvalue())
    for alpha in alphas:
        cross = shape_crossing(alpha, args.level)
        out.write(f"crossing alpha={alpha:g} level={args.level:g} n={cross} ({SHAPE_LABEL})\n")
    out.write(f"wrote {len(records)} estimates and {2 * sum(map(len, curves.values()))} bound rows to {args.out}\n")
    if args.svg:
        series = []
        for alpha in alphas:
            series.append(Series(f"upper a={alpha:g}", [(n, u) for n, u, _ in curves[alpha]]))
            series.append(Series(f"lower a={alpha:g}", [(n, lo) for n, _, lo in curves[alpha]], dashed=True))
            for method in args.method:
                pts = [(r.n, r.estimate) for r in records if r.alpha == alpha and r.method == method]
                if pts:
                    series.append(Series(f"{method} a={alpha:g}", sorted(pts)))
        Path(args.svg).write_text(log_plot(series, title=f"eta vs n ({SHAPE_LABEL})", hline=args.level))
    return EXIT_OK


def cmd_amplify(args, out) -> int:
    if args.n < 2:
        raise InputError("amplify needs n >= 2")
    res = amplification_demo(args.n, args.eps, args.trials, np.random.default_rng(args.seed))
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["n", "epsilon", "basis", "trial", "min_expectation"])
    w.writerow([args.n, args.eps, "fixed", 0, repr(res.fixed_min)])
    for i, v in enumerate(res.random_mins, start=1):
        w.writerow([args.n, args.eps, "random", i, repr(float(v))])
    Path(args.out).write_text(buf.getvalue())
    out.write(f"fixed_min={res.fixed_min!r}\n")
    out.write(f"random_min_median={float(np.median(res.random_mins))!r}\n")
    out.write(f"random_min_fraction_le_1-eps/2={res.fraction_at_most(1 - args.eps / 2)!r}\n")
    return EXIT_OK


# ------------------------------------------------------------------ parsing


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="stabcert", description="Stabilizer-state certification tools.")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("params", help="solve protocol parameters")
    p.add_argument("--protocol", choices=("dfe", "bmom"), required=True)
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--p", type=float, default=1e-6)
    p.add_argument("--alpha", type=float)
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--csv", help="also write the CSV record here")
    p.set_defaults(func=cmd_params)

    c = sub.add_parser("certify", help="run one protocol instance")
    c.add_argument("--circuit", required=True)
    c.add_argument("--protocol", choices=("dfe", "bmom"), default="bmom")
    c.add_argument("--state", help="state spec file (key=value lines)")
    c.add_argument("--family", choices=FAMILIES)
    c.add_argument("--c", type=float)
    c.add_argument("--subgroup", help="comma-separated coefficient bitstrings")
    c.add_argument("--delta", type=float, default=0.01)
    c.add_argument("--eps", type=float, default=0.1)
    c.add_argument("--p", type=float, default=1e-3)
    c.add_argument("--alpha", type=float, default=0.5)
    c.add_argument("--seed", type=int, required=True)
    c.add_argument("--transcript", "--out", dest="transcript")
    c.set_defaults(func=cmd_certify)

    e = sub.add_parser("eta", help="intrinsic false-positive estimates and bound shapes")
    e.add_argument("--n", type=int, nargs="*")
    e.add_argument("--alpha", type=float, nargs="*")
    e.add_argument("--eps", type=float, default=0.1)
    e.add_argument("--family", choices=ETA_FAMILIES, default="generator_flip")
    e.add_argument("--method", choices=("exact", "montecarlo"), nargs="+", default=["montecarlo"])
    e.add_argument("--trials", type=int, default=100_000)
    e.add_argument("--budget", type=int, default=8, help="evaluations for --family search")
    e.add_argument("--seed", type=int)
    e.add_argument("--bounds-n-max", type=int)
    e.add_argument("--level", type=float, default=1e-12)
    e.add_argument("--out", required=True)
    e.add_argument("--svg")
    e.set_defaults(func=cmd_eta)

    a = sub.add_parser("amplify", help="fixed versus random basis minimum")
    a.add_argument("--n", type=int, required=True)
    a.add_argument("--eps", type=float, required=True)
    a.add_argument("--trials", type=int, default=10_000)
    a.add_argument("--seed", type=int, required=True)
    a.add_argument("--out", required=True)
    a.set_defaults(func=cmd_amplify)
    return ap


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    try:
        return args.func(args, out)
    except (InfeasibleGap, BudgetTooTight) as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (InputError, StabCertError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
