"""Command-line interface: ``ifc-dmt <subcommand> [flags]``.

Exit codes: 0 success, 1 verification failure, 2 usage error,
3 insufficient Monte Carlo statistics.
"""
from __future__ import annotations

import argparse
import contextlib
import json
import math
import sys
import time
import warnings
from typing import IO, Iterator, Sequence

import numpy as np

from . import __version__
from .closed_form import (
    BoundsSummary,
    SplitDiscrepancy,
    d_etw,
    d_hk_fixed,
    d_hk_general,
    d_hk_wors,
    detect_grid_step,
    prior_symmetric_exponent,
    summarize,
)
from .core import LABELS, TOL, ChannelGains, PowerSplit, RatePair, classify_regime
from .montecarlo import InsufficientOutageEvents, McConfig, fit_slope, outage_probability, write_csv
from .oracle import min_exponent_sum, per_constraint_minima, sweep_power_split
from .regions import RegionKind

EXIT_OK, EXIT_VERIFY, EXIT_USAGE, EXIT_STATS = 0, 1, 2, 3


def fmt(v: float) -> str:
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    if abs(v) < 5e-12:
        v = 0.0
    return f"{v:.9g}"


# ---------------------------------------------------------------------------
# argument types


def _floats(text: str, count: int | None, nonneg: bool) -> list[float]:
    try:
        vals = [float(t) for t in text.split(",") if t.strip() != ""]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None
    if count is not None and len(vals) != count:
        raise argparse.ArgumentTypeError(f"expected {count} comma-separated numbers, got {len(vals)}")
    if any(not math.isfinite(v) for v in vals):
        raise argparse.ArgumentTypeError("values must be finite")
    if nonneg and any(v < 0 for v in vals):
        raise argparse.ArgumentTypeError("values must be non-negative")
    return vals


def beta_type(text: str) -> ChannelGains:
    return ChannelGains(*_floats(text, 4, True))


def rates_type(text: str) -> RatePair:
    return RatePair(*_floats(text, 2, True))


def split_type(text: str) -> tuple[float, float]:
    b1, b2 = _floats(text, 2, False)
    return (b1, b2)


def float_list_type(text: str) -> list[float]:
    vals = _floats(text, None, False)
    if not vals:
        raise argparse.ArgumentTypeError("expected at least one number")
    return vals


def positive_float(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {text!r}") from None
    if not (v > 0 and math.isfinite(v)):
        raise argparse.ArgumentTypeError("must be a positive number")
    return v


def nonneg_float(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {text!r}") from None
    if not (v >= 0 and math.isfinite(v)):
        raise argparse.ArgumentTypeError("must be a non-negative number")
    return v


def nonneg_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if v < 0:
        raise argparse.ArgumentTypeError("must be non-negative")
    return v


def positive_int(text: str) -> int:
    v = nonneg_int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return v


# ---------------------------------------------------------------------------
# helpers


@contextlib.contextmanager
def _output(path: str | None) -> Iterator[IO[str]]:
    if path is None or path == "-":
        yield sys.stdout
    else:
        with open(path, "w", newline="") as fh:
            yield fh


def _grid(lo: float, hi: float, step: float) -> list[float]:
    n = int(math.floor((hi - lo) / step + 1e-9))
    return [round(lo + k * step, 12) for k in range(n + 1)]


def _write_rows(out: IO[str], header: Sequence[str], rows: Sequence[Sequence]) -> None:
    out.write(",".join(header) + "\n")
    for row in rows:
        out.write(",".join(fmt(v) if isinstance(v, float) else str(v) for v in row) + "\n")


def _gnuplot_script(csv_path: str, title: str, columns: Sequence[str]) -> str:
    lines = [
        "set datafile separator ','",
        "set key autotitle columnhead",
        f"set title '{title}'",
        "set xlabel 'r'",
        "set ylabel 'diversity'",
        "set grid",
    ]
    plots = [f"'{csv_path}' using 1:{i + 2} with lines lw 2" for i in range(len(columns))]
    lines.append("plot " + ", \\\n     ".join(plots))
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# subcommands


def regime_label(ch: ChannelGains) -> str:
    return classify_regime(ch).name.title().replace("_", "")


def _summary_dict(ch: ChannelGains, rates: RatePair, s: BoundsSummary,
                  discrepancies: Sequence[SplitDiscrepancy]) -> dict:
    def bd(b):
        return {"per_constraint": dict(b.per_constraint), "overall": b.overall, "binding": sorted(b.binding)}

    w = s.d_hk_wors
    out = {
        "beta": list(ch.as_tuple()),
        "rates": list(rates.as_tuple()),
        "regime": regime_label(ch),
        "d_etw": bd(s.d_etw),
        "d_hk_wors": {k: getattr(w, k) for k in ("ni1", "ni2", "mac1", "mac2", "d00", "d01", "d10", "d11", "overall")},
        "d_hk_fixed": bd(s.d_hk_fixed),
        "d_lower_best": s.d_lower_best,
    }
    if s.d_hk_general is not None:
        out["d_hk_general"] = bd(s.d_hk_general)
        out["split_fast_path_discrepancies"] = [d.__dict__ for d in discrepancies]
    return out


def cmd_diversity(args: argparse.Namespace) -> int:
    ch, rates = args.beta, args.rates
    discrepancies: list[SplitDiscrepancy] = []
    general = None
    if args.split is not None:
        step = args.step or detect_grid_step(list(ch.as_tuple()) + list(rates.as_tuple()) + list(args.split))
        if step is None:
            print("warning: inputs are not aligned to a supported lattice step; skipping the general split "
                  "(pass --step to force a lower-bound certificate)", file=sys.stderr)
        else:
            try:
                general = d_hk_general(ch, rates, args.split, step=step, discrepancies=discrepancies)
            except ValueError as exc:
                print(f"warning: general split skipped: {exc}", file=sys.stderr)
    s = summarize(ch, rates)
    if general is not None:
        s = BoundsSummary(s.d_etw, s.d_hk_wors, s.d_hk_fixed, general)
    data = _summary_dict(ch, rates, s, discrepancies)
    if args.json:
        print(json.dumps(data, indent=2, default=lambda v: str(v)))
        return EXIT_OK
    print(f"beta  = {', '.join(fmt(v) for v in ch.as_tuple())}")
    print(f"rates = {', '.join(fmt(v) for v in rates.as_tuple())}")
    print(f"regime: {regime_label(ch)}")
    header = "family      " + " ".join(f"{k:>8}" for k in LABELS) + "   overall  binding"
    print(header)
    fams = [("etw", s.d_etw), ("hk-fixed", s.d_hk_fixed)]
    if s.d_hk_general is not None:
        fams.append(("hk-general", s.d_hk_general))
    for name, b in fams:
        cells = " ".join(f"{fmt(b[k]):>8}" for k in LABELS)
        print(f"{name:<12}{cells}  {fmt(b.overall):>8}  {','.join(sorted(b.binding))}")
    w = s.d_hk_wors
    print(f"hk-wors     ni1={fmt(w.ni1)} ni2={fmt(w.ni2)} mac1={fmt(w.mac1)} mac2={fmt(w.mac2)} "
          f"d00={fmt(w.d00)} d01={fmt(w.d01)} d10={fmt(w.d10)} d11={fmt(w.d11)} overall={fmt(w.overall)}")
    print(f"overall: d_etw={fmt(s.d_etw.overall)} d_hk_wors={fmt(w.overall)} "
          f"d_hk_fixed={fmt(s.d_hk_fixed.overall)} d_lower_best={fmt(s.d_lower_best)}")
    for d in discrepancies:
        print(f"note: split case formula for {d.label} gives {fmt(d.fast_path)}, lattice search {fmt(d.oracle)}")
    return EXIT_OK


CURVE_COLUMNS = ("r", "d_etw", "d_hk_wors", "d_hk_fixed")


def curve_rows(ch: ChannelGains, rs: Sequence[float], verbose: bool) -> tuple[list[str], list[list[float]]]:
    header = list(CURVE_COLUMNS)
    if verbose:
        header += [f"etw_{k}" for k in LABELS] + [f"hk_fixed_{k}" for k in LABELS]
    rows = []
    for r in rs:
        rates = RatePair(r, r)
        e, f, w = d_etw(ch, rates), d_hk_fixed(ch, rates), d_hk_wors(ch, rates)
        row = [r, e.overall, w.overall, f.overall]
        if verbose:
            row += [e[k] for k in LABELS] + [f[k] for k in LABELS]
        rows.append(row)
    return header, rows


def cmd_curve(args: argparse.Namespace) -> int:
    if args.r_min > args.r_max:
        raise _Usage("--r-min must not exceed --r-max")
    rs = _grid(args.r_min, args.r_max, args.step)
    header, rows = curve_rows(args.beta, rs, args.verbose)
    for row in rows:
        if row[2] > row[1] + TOL or row[3] > row[1] + TOL:
            raise RuntimeError(f"sandwich violated at r={row[0]}")
    with _output(args.out) as out:
        _write_rows(out, header, rows)
    if args.gnuplot:
        title = "beta = " + ",".join(fmt(v) for v in args.beta.as_tuple())
        with open(args.gnuplot, "w", newline="") as fh:
            fh.write(_gnuplot_script(args.out or "curve.csv", title, header[1:4]))
    return EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    rng = np.random.default_rng(args.seed)
    step = args.grid
    nb = int(round(args.beta_max / step))
    nr = int(round(args.r_max / step))
    worst = 0.0
    worst_case = None
    start = time.perf_counter()
    for _ in range(args.trials):
        ch = ChannelGains(*(rng.integers(0, nb + 1, 4) * step))
        rates = RatePair(*(rng.integers(0, nr + 1, 2) * step))
        checks = []
        for kind, closed in ((RegionKind.etw(), d_etw(ch, rates)), (RegionKind.hk_fixed(), d_hk_fixed(ch, rates))):
            found = per_constraint_minima(kind, ch, rates, step)
            oracle_overall = min(found[k].value for k in LABELS)
            for k in LABELS:
                cf = closed[k] + (args.inject_fault if (kind.family.value == "etw" and k == "C") else 0.0)
                checks.append((f"{kind.family.value}:{k}", cf, found[k].value))
            checks.append((f"{kind.family.value}:overall", min(
                closed[k] + (args.inject_fault if (kind.family.value == "etw" and k == "C") else 0.0)
                for k in LABELS), oracle_overall))
        w = d_hk_wors(ch, rates)
        ni = [min_exponent_sum(RegionKind.treat_as_noise(u), ch, rates, step).value for u in (1, 2)]
        mac = [min_exponent_sum(RegionKind.mac_at(c), ch, rates, step).value for c in (1, 2)]
        checks += [("wors:ni1", w.ni1, ni[0]), ("wors:ni2", w.ni2, ni[1]),
                   ("wors:mac1", w.mac1, mac[0]), ("wors:mac2", w.mac2, mac[1]),
                   ("wors:overall", w.overall, min(max(ni[0], mac[0]), max(ni[1], mac[1])))]
        for name, cf, orc in checks:
            dev = 0.0 if (math.isinf(cf) and math.isinf(orc)) else abs(cf - orc)
            if dev > worst:
                worst, worst_case = dev, (name, ch.as_tuple(), rates.as_tuple(), cf, orc)
    elapsed = time.perf_counter() - start
    limit = 4 * step
    print(f"trials={args.trials} grid={fmt(step)} seed={args.seed} elapsed={elapsed:.1f}s")
    print(f"max deviation = {fmt(worst)} (limit {fmt(limit)})")
    if worst_case is not None:
        name, b, r, cf, orc = worst_case
        print(f"worst: {name} beta={b} rates={r} closed-form={fmt(cf)} oracle={fmt(orc)}")
    if worst > limit + TOL:
        print("FAIL")
        return EXIT_VERIFY
    print("PASS")
    return EXIT_OK


def cmd_counterexample(args: argparse.Namespace) -> int:
    alpha, r = 0.5, 0.4
    ch = ChannelGains(1.0, alpha, alpha, 1.0)
    rates = RatePair(r, r)
    prior = prior_symmetric_exponent(alpha, r)
    res = min_exponent_sum(RegionKind.prior_symmetric(), ch, rates, 0.05)
    f_value = d_etw(ch, rates)["F"]
    w = res.witness.as_tuple() if res.witness is not None else None
    print(f"parameters: beta=(1, {fmt(alpha)}, {fmt(alpha)}, 1), r1=r2={fmt(r)}, rf={fmt(rates.rf)}")
    print(f"earlier published formula: {fmt(prior)}")
    print("feasible outage point: (0.4, 0, 0, 0) with exponent sum 0.4")
    print(f"lattice minimum over the same constraint: {fmt(res.value)} at {tuple(fmt(v) for v in w) if w else None}")
    print(f"outer-bound exponent of the 2r1+r2 constraint here: {fmt(f_value)}")
    return EXIT_OK


def gap_scan(betas: Sequence[float], r_step: float, r_max: float) -> list[tuple[float, float, float]]:
    """For each symmetric cross gain, the largest gap between outer and best inner exponent."""
    rs = _grid(0.0, r_max, r_step)
    out = []
    for b in betas:
        ch = ChannelGains(1.0, b, b, 1.0)
        best_gap, best_r = -math.inf, 0.0
        for r in rs:
            rates = RatePair(r, r)
            gap = d_etw(ch, rates).overall - max(d_hk_fixed(ch, rates).overall, d_hk_wors(ch, rates).overall)
            if gap > best_gap + TOL:
                best_gap, best_r = gap, r
        out.append((b, best_gap, best_r))
    return out


def gap_intervals(scan: Sequence[tuple[float, float, float]]) -> list[tuple[float, float]]:
    runs, cur = [], None
    for b, gap, _ in scan:
        if gap > TOL:
            cur = (b, b) if cur is None else (cur[0], b)
        elif cur is not None:
            runs.append(cur)
            cur = None
    if cur is not None:
        runs.append(cur)
    return runs


def cmd_gap_scan(args: argparse.Namespace) -> int:
    if args.beta_min > args.beta_max:
        raise _Usage("--beta-min must not exceed --beta-max")
    betas = _grid(args.beta_min, args.beta_max, args.beta_step)
    scan = gap_scan(betas, args.r_step, args.r_max)
    with _output(args.out) as out:
        _write_rows(out, ("beta", "max_gap", "r_at_max", "gap"),
                    [(b, g, r, int(g > TOL)) for b, g, r in scan])
    runs = gap_intervals(scan)
    dest = sys.stderr if (args.out in (None, "-")) else sys.stdout
    if runs:
        for lo, hi in runs:
            print(f"gap interval: [{fmt(lo)}, {fmt(hi)}]", file=dest)
    else:
        print("gap interval: none", file=dest)
    return EXIT_OK


def cmd_mc(args: argparse.Namespace) -> int:
    ch, rates = args.beta, args.rates
    region = RegionKind.etw_finite() if args.region == "etw" else RegionKind.hk_finite()
    try:
        cfg = McConfig(tuple(args.x), args.samples, args.seed, region, min_events=args.min_events)
    except ValueError as exc:
        raise _Usage(str(exc)) from None
    est = outage_probability(ch, rates, cfg)
    with _output(args.out) as out:
        write_csv(est, cfg.region_name, out)
    dest = sys.stderr if (args.out in (None, "-")) else sys.stdout
    s = summarize(ch, rates)
    meta = cfg.metadata()
    print(f"generator={meta['generator']} seed={meta['seed']} shard_size={meta['shard_size']}", file=dest)
    print(f"closed form: d_etw={fmt(s.d_etw.overall)} d_hk_fixed={fmt(s.d_hk_fixed.overall)} "
          f"d_hk_wors={fmt(s.d_hk_wors.overall)}", file=dest)
    try:
        fit = fit_slope(est, args.min_events)
    except InsufficientOutageEvents as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_STATS
    print(f"d_hat={fit.d_hat:.4f} residual={fit.residual:.4f} points={len(fit.points)}", file=dest)
    return EXIT_OK


def cmd_split_sweep(args: argparse.Namespace) -> int:
    try:
        sweep = sweep_power_split(args.beta, args.rates, args.grid, step=args.step)
    except ValueError as exc:
        raise _Usage(str(exc)) from None
    rows = []
    for i, b1 in enumerate(sweep.grid):
        for j, b2 in enumerate(sweep.grid):
            rows.append((b1, b2, float(sweep.surface[i, j])))
    with _output(args.out) as out:
        _write_rows(out, ("b1", "b2", "d_hk_general"), rows)
    dest = sys.stderr if (args.out in (None, "-")) else sys.stdout
    print(f"best split: ({fmt(sweep.best_split[0])}, {fmt(sweep.best_split[1])}) value {fmt(sweep.best_value)}",
          file=dest)
    print(f"fixed split: ({fmt(sweep.fixed_split[0])}, {fmt(sweep.fixed_split[1])}) value {fmt(sweep.fixed_value)}",
          file=dest)
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser


class _Usage(Exception):
    pass


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ifc-dmt", description="Diversity bounds for two-user fading interference channels.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, config=True):
        if config:
            sp.add_argument("--config", help="key=value file mirroring the flags; flags win")

    sp = sub.add_parser("diversity", help="bounds at one rate pair")
    common(sp)
    sp.add_argument("--beta", type=beta_type, required=True, help="b11,b12,b21,b22")
    sp.add_argument("--rates", type=rates_type, required=True, help="r1,r2")
    sp.add_argument("--split", type=split_type, help="general power split b1,b2")
    sp.add_argument("--step", type=positive_float, help="lattice step for the general split")
    sp.add_argument("--json", action="store_true")
    sp.set_defaults(func=cmd_diversity)

    sp = sub.add_parser("curve", help="bounds along r1 = r2 = r")
    common(sp)
    sp.add_argument("--beta", type=beta_type, required=True)
    sp.add_argument("--r-min", type=nonneg_float, default=0.0)
    sp.add_argument("--r-max", type=nonneg_float, default=1.0)
    sp.add_argument("--step", type=positive_float, default=0.01)
    sp.add_argument("--verbose", action="store_true", help="add per-constraint columns")
    sp.add_argument("--out", help="CSV path (default stdout)")
    sp.add_argument("--gnuplot", help="also write a gnuplot script to this path")
    sp.set_defaults(func=cmd_curve)

    sp = sub.add_parser("verify", help="closed forms against the lattice search")
    common(sp)
    sp.add_argument("--trials", type=nonneg_int, default=200)
    sp.add_argument("--seed", type=int, default=7)
    sp.add_argument("--grid", type=positive_float, default=0.05)
    sp.add_argument("--beta-max", type=nonneg_float, default=3.0)
    sp.add_argument("--r-max", type=nonneg_float, default=1.5)
    sp.add_argument("--inject-fault", type=float, default=0.0, help=argparse.SUPPRESS)
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("counterexample", help="the earlier published symmetric exponent versus the search")
    sp.set_defaults(func=cmd_counterexample)

    sp = sub.add_parser("gap-scan", help="symmetric cross gains where the bounds differ")
    common(sp)
    sp.add_argument("--beta-min", type=nonneg_float, default=0.5)
    sp.add_argument("--beta-max", type=nonneg_float, default=1.7)
    sp.add_argument("--beta-step", type=positive_float, default=0.005)
    sp.add_argument("--r-step", type=positive_float, default=0.005)
    sp.add_argument("--r-max", type=nonneg_float, default=1.0)
    sp.add_argument("--out", help="CSV path (default stdout)")
    sp.set_defaults(func=cmd_gap_scan)

    sp = sub.add_parser("mc", help="finite-SNR outage simulation")
    common(sp)
    sp.add_argument("--beta", type=beta_type, required=True)
    sp.add_argument("--rates", type=rates_type, required=True)
    sp.add_argument("--x", type=float_list_type, default=[10.0, 100.0, 1000.0])
    sp.add_argument("--samples", type=positive_int, default=1_000_000)
    sp.add_argument("--seed", type=int, default=1)
    sp.add_argument("--region", choices=("etw", "hk"), default="etw")
    sp.add_argument("--min-events", type=nonneg_int, default=100)
    sp.add_argument("--out", help="CSV path (default stdout)")
    sp.set_defaults(func=cmd_mc)

    sp = sub.add_parser("split-sweep", help="inner bound over a grid of power splits")
    common(sp)
    sp.add_argument("--beta", type=beta_type, required=True)
    sp.add_argument("--rates", type=rates_type, required=True)
    sp.add_argument("--grid", type=float_list_type, default=[-1.0, -0.5, 0.0, 0.25, 0.5, 0.75, 1.0])
    sp.add_argument("--step", type=positive_float)
    sp.add_argument("--out", help="CSV path (default stdout)")
    sp.set_defaults(func=cmd_split_sweep)
    return p


def _config_argv(argv: list[str]) -> list[str]:
    """Expand ``--config FILE`` into flags placed before the explicit ones, so explicit flags win."""
    if "--config" not in argv and not any(a.startswith("--config=") for a in argv):
        return argv
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, rest = pre.parse_known_args(argv)
    if not known.config:
        return rest
    try:
        with open(known.config) as fh:
            text = fh.read()
    except OSError as exc:
        raise _Usage(f"--config: cannot read {known.config}: {exc.strerror}") from None
    extra: list[str] = []
    for n, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise _Usage(f"--config: line {n} is not key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        flag = "--" + key.replace("_", "-")
        if value.lower() in ("true", "yes", "on"):
            extra.append(flag)
        elif value.lower() in ("false", "no", "off"):
            continue
        else:
            extra.append(f"{flag}={value}")
    if not rest:
        return rest
    return [rest[0]] + extra + rest[1:]


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        argv = _config_argv(argv)
        args = parser.parse_args(argv)
    except _Usage as exc:
        parser.print_usage(sys.stderr)
        print(f"ifc-dmt: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:
        return int(exc.code) if isinstance(exc.code, int) else EXIT_USAGE
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("default")
            return int(args.func(args))
    except _Usage as exc:
        print(f"ifc-dmt: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InsufficientOutageEvents as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_STATS


if __name__ == "__main__":
    sys.exit(main())
