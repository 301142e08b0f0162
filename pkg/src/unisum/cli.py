"""Command line front end: evaluate, tabulate, emit CSV, cross-validate.

Subcommands: density, cdf, quantile, pmf, table, coeffs, verify, sample.
Continuous models are given as repeated `--comp c:a` pairs, discrete ones as
repeated `--m k`; `--config FILE` reads the same data from a plain text file
with one component per line (`c a`, or a single `m`).  Exact values print as
`num/den` next to a decimal rendering; CDF tables use five decimals with
round-half-even, and CSV output is byte-deterministic for a fixed job.
"""

from __future__ import annotations

import argparse
import math
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Sequence

import numpy as np

from . import discsum, oracles
from .contsum import EXACT, FLOAT, ContinuousSum, EvalMode
from .discsum import DiscreteSum
from .errors import CapacityError, ModeError

__all__ = ["JobSpec", "UsageError", "parse_args", "run_table", "run_verify",
           "run_emit_csv", "main"]


class UsageError(Exception):
    """Bad invocation: unknown flag, malformed value, incompatible model."""


# ---------------------------------------------------------------------------
# Rendering helpers
# ---------------------------------------------------------------------------

def format_fixed(value, places: int) -> str:
    """Render an exact rational with `places` decimals, rounding half to even."""
    v = Fraction(value)
    negative = v < 0
    scaled = abs(v) * 10 ** places
    q, r = divmod(scaled.numerator, scaled.denominator)
    twice = 2 * r
    if twice > scaled.denominator or (twice == scaled.denominator and q % 2 == 1):
        q += 1
    digits = str(q).rjust(places + 1, "0")
    text = f"{digits[:-places]}.{digits[-places:]}" if places else digits
    if negative and q != 0:
        text = "-" + text
    return text


def format_decimal(value) -> str:
    """Six-decimal rendering with trailing zeros trimmed ('1/4' -> '0.25')."""
    text = format_fixed(value, 6)
    if "." in text:
        text = text.rstrip("0").rstrip(".")
    return text or "0"


def _render_exact(v: Fraction) -> str:
    return f"{v} = {format_fixed(v, 6)}"


# ---------------------------------------------------------------------------
# Job specification and parsing
# ---------------------------------------------------------------------------

@dataclass
class JobSpec:
    command: str
    continuous: Optional[ContinuousSum] = None
    discrete: Optional[DiscreteSum] = None
    mode: EvalMode = EXACT
    at: Optional[Fraction] = None
    q: Optional[Fraction] = None
    lo: Optional[Fraction] = None
    hi: Optional[Fraction] = None
    step: Optional[Fraction] = None
    seed: int = 0
    count: int = 10
    csv: bool = False
    out: Optional[str] = None
    dump_config: Optional[str] = None
    suite: str = "all"
    n_max: int = 10
    k_max: int = 6
    grid_step: Fraction = Fraction(1, 256)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _rational(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")


def _positive_rational(text: str) -> Fraction:
    v = _rational(text)
    if v <= 0:
        raise argparse.ArgumentTypeError(f"must be > 0: {text!r}")
    return v


def _comp_pair(text: str):
    parts = text.split(":")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"expected c:a, got {text!r}")
    c = _rational(parts[0])
    a = _rational(parts[1])
    if a <= 0:
        raise argparse.ArgumentTypeError(f"half-width must be > 0 in {text!r}")
    return (c, a)


def _half_range(text: str) -> int:
    try:
        m = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    if m < 0:
        raise argparse.ArgumentTypeError(f"m must be >= 0: {text!r}")
    return m


def _integer(text: str) -> int:
    try:
        return int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")


_CONTINUOUS_COMMANDS = {"density", "cdf", "quantile", "table", "sample"}


def _build_parser() -> _Parser:
    parser = _Parser(prog="unisum", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")

    def add_model_args(p, continuous: bool):
        if continuous:
            p.add_argument("--comp", action="append", type=_comp_pair, default=[],
                           metavar="C:A", help="uniform component on [c-a, c+a]")
        else:
            p.add_argument("--m", action="append", type=_half_range, default=[],
                           metavar="K", help="integer uniform on [-k, k]")
        p.add_argument("--config", metavar="FILE",
                       help="read components from a file, one per line")
        p.add_argument("--dump-config", metavar="FILE",
                       help="write the parsed components back out")

    def add_mode_args(p):
        g = p.add_mutually_exclusive_group()
        g.add_argument("--exact", action="store_true", help="exact rationals (default)")
        g.add_argument("--float", dest="float_", action="store_true",
                       help="compensated float arithmetic")
        p.add_argument("--no-condition", action="store_true",
                       help="skip the condition estimate in float mode")

    def add_points_args(p):
        p.add_argument("--at", type=_rational, metavar="X", help="evaluation point")
        p.add_argument("--from", dest="lo", type=_rational, metavar="LO")
        p.add_argument("--to", dest="hi", type=_rational, metavar="HI")
        p.add_argument("--step", type=_positive_rational, metavar="S")

    def add_output_args(p):
        p.add_argument("--csv", action="store_true", help="CSV output")
        p.add_argument("--out", metavar="FILE", help="write output to a file")

    for name, doc in (("density", "evaluate the density"),
                      ("cdf", "evaluate the CDF")):
        p = sub.add_parser(name, help=doc)
        add_model_args(p, True)
        add_mode_args(p)
        add_points_args(p)
        add_output_args(p)

    p = sub.add_parser("quantile", help="invert the CDF")
    add_model_args(p, True)
    p.add_argument("--q", type=_rational, metavar="Q", help="probability level")
    add_output_args(p)

    p = sub.add_parser("pmf", help="discrete mass function (always exact)")
    add_model_args(p, False)
    p.add_argument("--at", type=_integer, metavar="P", help="integer point")
    add_output_args(p)

    p = sub.add_parser("table", help="five-decimal CDF table")
    add_model_args(p, True)
    add_mode_args(p)
    add_points_args(p)
    add_output_args(p)

    p = sub.add_parser("coeffs", help="reciprocal-sine Laurent coefficients")
    p.add_argument("--n-max", type=_integer, default=10)
    p.add_argument("--k-max", type=_integer, default=6)
    add_output_args(p)

    p = sub.add_parser("verify", help="run the oracle cross-validation suites")
    p.add_argument("--suite", choices=("all", "coeffs", "disc", "cont"),
                   default="all")
    p.add_argument("--n-max", type=_integer, default=10)
    p.add_argument("--k-max", type=_integer, default=6)
    p.add_argument("--count", type=_integer, default=20000,
                   help="Monte Carlo sample size")
    p.add_argument("--seed", type=_integer, default=0)
    p.add_argument("--step", type=_positive_rational, default=Fraction(1, 256),
                   help="grid step for the convolution oracle")
    add_output_args(p)

    p = sub.add_parser("sample", help="draw reproducible samples of the sum")
    add_model_args(p, True)
    p.add_argument("--count", type=_integer, default=10)
    p.add_argument("--seed", type=_integer, default=0)
    add_output_args(p)

    return parser


def _load_config(path: str, continuous: bool):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise UsageError(f"cannot read config {path!r}: {exc}")
    items = []
    for lineno, raw in enumerate(lines, start=1):
        text = raw.split("#", 1)[0].strip()
        if not text:
            continue
        tokens = text.split()
        if continuous:
            if len(tokens) != 2:
                raise UsageError(
                    f"{path}:{lineno}: expected 'c a', got {text!r}")
            try:
                c, a = Fraction(tokens[0]), Fraction(tokens[1])
            except (ValueError, ZeroDivisionError):
                raise UsageError(f"{path}:{lineno}: not numbers: {text!r}")
            if a <= 0:
                raise UsageError(f"{path}:{lineno}: half-width must be > 0")
            items.append((c, a))
        else:
            if len(tokens) != 1:
                raise UsageError(f"{path}:{lineno}: expected one integer, got {text!r}")
            try:
                m = int(tokens[0])
            except ValueError:
                raise UsageError(f"{path}:{lineno}: not an integer: {text!r}")
            if m < 0:
                raise UsageError(f"{path}:{lineno}: m must be >= 0")
            items.append(m)
    if not items:
        raise UsageError(f"config {path!r} defines no components")
    return items


def _dump_config(path: str, spec: JobSpec):
    lines = []
    if spec.continuous is not None:
        for comp in spec.continuous.components:
            lines.append(f"{comp.center} {comp.half_width}")
    elif spec.discrete is not None:
        for comp in spec.discrete.components:
            lines.append(str(comp.m))
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("\n".join(lines) + "\n")


def parse_args(argv: Sequence[str]) -> JobSpec:
    """Parse an argv list into a validated JobSpec; raises UsageError."""
    ns = _build_parser().parse_args(list(argv))
    spec = JobSpec(command=ns.command)

    if ns.command in _CONTINUOUS_COMMANDS:
        pairs = list(ns.comp)
        if ns.config:
            if pairs:
                raise UsageError("give components via --comp or --config, not both")
            pairs = _load_config(ns.config, continuous=True)
        if not pairs:
            raise UsageError(f"{ns.command} needs at least one --comp c:a")
        try:
            spec.continuous = ContinuousSum.from_pairs(pairs)
        except ValueError as exc:
            raise UsageError(str(exc))
    elif ns.command == "pmf":
        ms = list(ns.m)
        if ns.config:
            if ms:
                raise UsageError("give components via --m or --config, not both")
            ms = _load_config(ns.config, continuous=False)
        if not ms:
            raise UsageError("pmf needs at least one --m k")
        try:
            spec.discrete = DiscreteSum.from_half_ranges(ms)
        except ValueError as exc:
            raise UsageError(str(exc))

    if getattr(ns, "float_", False):
        spec.mode = EvalMode("float", report_condition=not ns.no_condition)
    elif getattr(ns, "no_condition", False):
        raise UsageError("--no-condition only applies to --float")

    for name in ("at", "q", "lo", "hi", "step", "seed", "count", "csv", "out",
                 "n_max", "k_max", "suite"):
        if hasattr(ns, name):
            setattr(spec, name, getattr(ns, name))
    if ns.command == "verify":
        spec.grid_step = ns.step
        spec.step = None

    if getattr(ns, "dump_config", None):
        spec.dump_config = ns.dump_config

    if ns.command in ("density", "cdf"):
        has_range = ns.lo is not None and ns.hi is not None and ns.step is not None
        if ns.at is None and not has_range:
            raise UsageError(
                f"{ns.command} needs --at X or a full --from/--to/--step range")
    if ns.command == "quantile":
        if ns.q is None:
            raise UsageError("quantile needs --q")
        if not 0 <= ns.q <= 1:
            raise UsageError(f"--q must lie in [0, 1], got {ns.q}")
    if ns.command == "sample" and ns.count < 1:
        raise UsageError("--count must be >= 1")
    return spec


# ---------------------------------------------------------------------------
# Evaluation point grids
# ---------------------------------------------------------------------------

def _grid(spec: JobSpec) -> List[Fraction]:
    if spec.at is not None:
        return [Fraction(spec.at)]
    lo, hi, step = spec.lo, spec.hi, spec.step
    if lo is None or hi is None or step is None:
        raise UsageError("need --at or a full --from/--to/--step range")
    points = []
    x = lo
    while x <= hi:
        points.append(x)
        x += step
    return points


# ---------------------------------------------------------------------------
# Runners
# ---------------------------------------------------------------------------

def _eval_rows(spec: JobSpec):
    """(x, EvalResult) pairs for a density or cdf job."""
    fn = spec.continuous.density_tau if spec.command == "density" \
        else spec.continuous.cdf
    return [(x, fn(x, spec.mode)) for x in _grid(spec)]


def run_emit_csv(spec: JobSpec) -> str:
    """CSV for density/cdf (x,value[,condition] or x,value,exact) and pmf."""
    lines = []
    if spec.command == "pmf":
        lines.append("p,probability,exact")
        dsum = spec.discrete
        points = [spec.at] if spec.at is not None else range(-dsum.span, dsum.span + 1)
        for p in points:
            v = dsum.pmf_tau(p)
            lines.append(f"{p},{format_decimal(v)},{v}")
    else:
        rows = _eval_rows(spec)
        if spec.mode.is_exact:
            lines.append("x,value,exact")
            for x, r in rows:
                lines.append(f"{format_decimal(x)},{format_decimal(r.value)},{r.value}")
        elif spec.mode.report_condition:
            lines.append("x,value,condition")
            for x, r in rows:
                lines.append(f"{format_decimal(x)},{r.value!r},{r.condition_estimate!r}")
        else:
            lines.append("x,value")
            for x, r in rows:
                lines.append(f"{format_decimal(x)},{r.value!r}")
    return "\n".join(lines) + "\n"


def _run_point_eval(spec: JobSpec) -> str:
    if spec.csv:
        return run_emit_csv(spec)
    lines = []
    for x, r in _eval_rows(spec):
        if spec.mode.is_exact:
            lines.append(f"{format_decimal(x)}\t{_render_exact(r.value)}")
        elif r.condition_estimate is not None:
            lines.append(f"{format_decimal(x)}\t{r.value!r}\tcond={r.condition_estimate:.3g}")
        else:
            lines.append(f"{format_decimal(x)}\t{r.value!r}")
    return "\n".join(lines) + "\n"


def _run_pmf(spec: JobSpec) -> str:
    if spec.csv:
        return run_emit_csv(spec)
    dsum = spec.discrete
    points = [spec.at] if spec.at is not None else range(-dsum.span, dsum.span + 1)
    lines = [f"{p}\t{_render_exact(dsum.pmf_tau(p))}" for p in points]
    return "\n".join(lines) + "\n"


def _run_quantile(spec: JobSpec) -> str:
    return repr(spec.continuous.quantile(spec.q)) + "\n"


def run_table(spec: JobSpec) -> str:
    """Five-decimal CDF table over the requested grid (default: the support)."""
    csum = spec.continuous
    lo, hi = csum.support()
    if spec.lo is None:
        spec.lo = lo
    if spec.hi is None:
        spec.hi = hi
    if spec.step is None:
        spec.step = Fraction(spec.hi - spec.lo, 10)
    comps = ", ".join(f"(c={format_decimal(c.center)}, a={format_decimal(c.half_width)})"
                      for c in csum.components)
    head = [
        f"# cumulative distribution of a sum of {csum.n} uniform component(s)",
        f"# components: {comps}",
        f"# mode: {spec.mode.kind}",
    ]
    rows = []
    for x in _grid(spec):
        r = csum.cdf(x, spec.mode)
        rows.append((format_decimal(x), format_fixed(r.value, 5)))
    if spec.csv:
        body = ["x,F"] + [f"{x},{F}" for x, F in rows]
    else:
        width = max((len(x) for x, _ in rows), default=1)
        body = [f"{'x':>{width}}  F"] + [f"{x:>{width}}  {F}" for x, F in rows]
    return "\n".join(head + body) + "\n"


def _run_coeffs(spec: JobSpec) -> str:
    lines = []
    if spec.csv:
        lines.append("n,k,value,exact")
        for n in range(1, spec.n_max + 1):
            for k in range(spec.k_max + 1):
                b = discsum.csc_coefficient(n, k)
                lines.append(f"{n},{k},{format_decimal(b)},{b}")
    else:
        for n in range(1, spec.n_max + 1):
            for k in range(spec.k_max + 1):
                b = discsum.csc_coefficient(n, k)
                lines.append(f"b(n={n}, k={k}) = {b}")
    return "\n".join(lines) + "\n"


def _run_sample(spec: JobSpec) -> str:
    draws = oracles.sample_sum(spec.continuous, spec.count, spec.seed)
    lines = ["value"] if spec.csv else []
    lines += [repr(float(v)) for v in draws]
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Verification suites
# ---------------------------------------------------------------------------

def _verify_coeffs(spec: JobSpec, lines: List[str]) -> bool:
    ok = True
    count = 0
    for n in range(1, spec.n_max + 1):
        oracle = oracles.csc_series_oracle(n, spec.k_max)
        for k in range(spec.k_max + 1):
            formula = discsum.csc_coefficient(n, k)
            count += 1
            if spec.suite == "coeffs":
                lines.append(f"b(n={n}, k={k}) = {formula}")
            if formula != oracle[k]:
                ok = False
                lines.append(
                    f"MISMATCH b(n={n}, k={k}): formula {formula}, series {oracle[k]}")
    lines.append(f"suite coeffs: {'PASS' if ok else 'FAIL'} "
                 f"(n<=:{spec.n_max}, k<=:{spec.k_max}, {count} entries)")
    return ok


def _verify_disc(spec: JobSpec, lines: List[str]) -> bool:
    import random
    rng = random.Random(spec.seed)
    ok = True
    models = 0
    for _ in range(25):
        n = rng.randint(1, 5)
        dsum = DiscreteSum.from_half_ranges([rng.randint(0, 4) for _ in range(n)])
        models += 1
        oracle = oracles.discrete_conv_oracle(dsum)
        full = dsum.pmf_full()
        if sum(full.values()) != 1:
            ok = False
            lines.append(f"MISMATCH pmf normalization for {dsum}")
        for p in range(-dsum.span - 1, dsum.span + 2):
            if dsum.pmf_tau(p) != oracle.get(p, Fraction(0)):
                ok = False
                lines.append(f"MISMATCH pmf({p}) for {dsum}")
                break
    lines.append(f"suite disc: {'PASS' if ok else 'FAIL'} "
                 f"({models} models, exhaustive over support)")
    return ok


def _verify_cont(spec: JobSpec, lines: List[str]) -> bool:
    panel = [
        ContinuousSum.from_pairs([(0, 1), (0, 2)]),
        ContinuousSum.from_pairs([(Fraction(1, 2), Fraction(1, 2))] * 3),
        ContinuousSum.from_pairs([(0, 1), (-1, Fraction(1, 2)), (2, Fraction(3, 2))]),
    ]
    ok = True
    h = float(spec.grid_step)
    for csum in panel:
        grid, vals = oracles.continuous_conv_oracle(csum, h)
        closed = csum.density_batch(grid)
        keep = np.ones(len(grid), dtype=bool)
        for b in csum.breakpoints():
            keep &= np.abs(grid - float(b)) > 1.01 * h
        err = float(np.max(np.abs(closed[keep] - vals[keep])))
        if err > 1e-3:
            ok = False
            lines.append(f"MISMATCH grid oracle: max err {err:.2e} for {csum}")
        draws = oracles.sample_sum(csum, spec.count, spec.seed)
        d = oracles.ks_statistic(draws, csum.cdf_batch)
        crit = oracles.ks_critical_1pct(spec.count)
        if d >= crit:
            ok = False
            lines.append(f"MISMATCH KS: D={d:.4g} >= {crit:.4g} for {csum}")
    lines.append(f"suite cont: {'PASS' if ok else 'FAIL'} "
                 f"({len(panel)} models, grid step {h:g}, {spec.count} samples)")
    return ok


def run_verify(spec: JobSpec):
    """Run the requested suites; returns (report_text, all_passed)."""
    lines: List[str] = []
    ok = True
    if spec.suite in ("all", "coeffs"):
        ok = _verify_coeffs(spec, lines) and ok
    if spec.suite in ("all", "disc"):
        ok = _verify_disc(spec, lines) and ok
    if spec.suite in ("all", "cont"):
        ok = _verify_cont(spec, lines) and ok
    lines.append("verification " + ("passed" if ok else "FAILED"))
    return "\n".join(lines) + "\n", ok


# ---------------------------------------------------------------------------
# Entry point
# ---------------------------------------------------------------------------

_RUNNERS = {
    "density": _run_point_eval,
    "cdf": _run_point_eval,
    "quantile": _run_quantile,
    "pmf": _run_pmf,
    "table": run_table,
    "coeffs": _run_coeffs,
    "sample": _run_sample,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    if argv is None:
        argv = sys.argv[1:]
    try:
        spec = parse_args(argv)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2

    try:
        if spec.dump_config:
            _dump_config(spec.dump_config, spec)
        if spec.command == "verify":
            text, ok = run_verify(spec)
            status = 0 if ok else 1
        else:
            text = _RUNNERS[spec.command](spec)
            status = 0
    except (CapacityError, ModeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1

    if spec.out:
        try:
            with open(spec.out, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        except OSError as exc:
            print(f"error: cannot write {spec.out!r}: {exc}", file=sys.stderr)
            return 1
    else:
        sys.stdout.write(text)
    return status


if __name__ == "__main__":
    sys.exit(main())
