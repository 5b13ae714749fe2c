"""Command-line entry point: ``zenochain <command> [options]``.

Exit codes: 0 success, 1 argument/config/file error, 2 internal numeric
validation failure, 3 regression mismatch.

Every option can also come from a flat ``key = value`` file given with
``--config`` (``#`` starts a comment).  A flag on the command line wins over
the file, which wins over the built-in default.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

from . import experiments as ex
from .chain_module import uniform_for_target
from .montecarlo import GRANULARITIES
from .protocols import (
    BobBit,
    ImprovedParams,
    Protocol,
    SlazParams,
    equivalent_distance,
    improved_c0,
    improved_c1,
    improved_run,
    mask_from_cycles,
    slaz_p1,
    slaz_p2,
    slaz_run,
)

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC, EXIT_REGRESSION = 0, 1, 2, 3
CONSERVATION_TOL = 1e-9


class UsageError(Exception):
    pass


def _float_list(raw: str) -> list[float]:
    return [float(x) for x in raw.split(",") if x.strip()]


CONVERTERS = {
    "M": int, "N": int, "trials": int, "seed": int, "workers": int, "module_N": int,
    "M_min": int, "M_max": int,
    "t": float, "B": float, "c": float, "L": float, "B_step": float,
    "t_values": _float_list,
    "out": str, "format": str, "protocol": str, "bob": str, "mask": str, "granularity": str,
}  # fmt: skip

DEFAULTS = {
    "trials": 2000,
    "c": 0.0,
    "format": "csv",
    "protocol": "improved",
    "bob": "pass",
    "mask": "none",
    "workers": 1,
    "granularity": "segment",
    "L": 1.0,
    "module_N": 4,
    "M_min": 25,
    "M_max": 150,
    "t_values": [0.001, 0.0005, 0.0001, 0.00005],
    "B_step": 0.05,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def load_config(path: str | Path) -> dict[str, object]:
    """Parse a flat ``key = value`` file into typed values."""
    out: dict[str, object] = {}
    text = Path(path).read_text(encoding="utf-8")
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in CONVERTERS:
            raise UsageError(f"{path}:{lineno}: unknown key {key!r}")
        try:
            out[key] = CONVERTERS[key](value)
        except ValueError as err:
            raise UsageError(f"{path}:{lineno}: bad value for {key}: {err}") from None
    return out


def resolve(args: argparse.Namespace) -> argparse.Namespace:
    cfg = load_config(args.config) if args.config else {}
    merged = {}
    for key in CONVERTERS:
        flag = getattr(args, key, None)
        if flag is not None:
            merged[key] = flag
        elif key in cfg:
            merged[key] = cfg[key]
        else:
            merged[key] = DEFAULTS.get(key)
    merged["command"] = args.command
    return argparse.Namespace(**merged)


def _need(ns: argparse.Namespace, *keys: str) -> None:
    for k in keys:
        if getattr(ns, k) is None:
            raise UsageError(f"--{k} is required for '{ns.command}'")


def _write_record(fields: dict[str, object], fmt: str) -> None:
    if fmt == "json":
        print(json.dumps({k: v for k, v in fields.items() if v is not None}))
        return
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(fields.keys())
    w.writerow(["" if v is None else (format(v, ".12g") if isinstance(v, float) else v) for v in fields.values()])
    sys.stdout.write(buf.getvalue())


def _parse_mask(spec: str, M: int) -> tuple[bool, ...]:
    spec = spec.strip().lower()
    if spec == "none":
        return (False,) * M
    if spec == "all":
        return (True,) * M
    try:
        cycles = [int(x) for x in spec.split(",") if x.strip()]
    except ValueError:
        raise UsageError(f"malformed mask {spec!r}; use none, all or a list like 3,7,12") from None
    if not cycles:
        raise UsageError("empty mask list")
    return mask_from_cycles(M, cycles)


# ---------------------------------------------------------------------------
# commands


def cmd_analytic(ns: argparse.Namespace) -> int:
    _need(ns, "M")
    M, N, t = ns.M, ns.N, ns.t
    record = {
        "M": M,
        "N": N,
        "t": t,
        "C0": improved_c0(M, t) if t is not None else None,
        "C1": improved_c1(M),
        "slaz_p1": slaz_p1(M),
        "slaz_p2": slaz_p2(M, N) if N is not None else None,
        "D_eq_improved": equivalent_distance(Protocol.IMPROVED, M, None, ns.L),
        "D_eq_slaz": equivalent_distance(Protocol.SLAZ, M, N, ns.L) if N is not None else None,
    }
    _write_record(record, ns.format)
    return EXIT_OK


def cmd_run(ns: argparse.Namespace) -> int:
    _need(ns, "M")
    protocol = Protocol(ns.protocol)
    bob = BobBit(ns.bob)
    mask = _parse_mask(ns.mask, ns.M)
    if protocol is Protocol.IMPROVED:
        module = uniform_for_target(ns.module_N, ns.t if ns.t is not None else 1.0)
        dist = improved_run(ImprovedParams(ns.M, module), bob, mask, ns.c)
    else:
        _need(ns, "N")
        dist = slaz_run(SlazParams(ns.M, ns.N), bob, mask)
    total = dist.total()
    record = {"protocol": protocol.value, "M": ns.M, "N": ns.N, "bob": bob.value, **dist.as_dict(), "total": total}
    _write_record(record, ns.format)
    if abs(total - 1.0) > CONSERVATION_TOL:
        print(f"conservation check failed: total mass {total!r}", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


def _report(checks: list[tuple[str, bool]], kind: str = "check") -> bool:
    for name, ok in checks:
        print(f"{kind} {'PASS' if ok else 'FAIL'}: {name}")
    return all(ok for _, ok in checks)


def cmd_table1(ns: argparse.Namespace) -> int:
    _need(ns, "out")
    rows, report = ex.gen_table1()
    ex.emit(rows, ns.format, ns.out)
    print(report.summary())
    return EXIT_OK if report.ok else EXIT_REGRESSION


def cmd_fig3(ns: argparse.Namespace) -> int:
    _need(ns, "out")
    if ns.M_min < 1 or ns.M_max < ns.M_min or not ns.t_values:
        raise UsageError("need 1 <= M_min <= M_max and at least one t value")
    rows = ex.sweep_c0(ns.t_values, range(ns.M_min, ns.M_max + 1))
    ex.emit(rows, ns.format, ns.out)
    return EXIT_OK if _report(ex.fig3_checks(rows)) else EXIT_REGRESSION


def cmd_fig4(ns: argparse.Namespace) -> int:
    _need(ns, "out", "seed")
    if ns.trials < 1:
        raise UsageError("--trials must be >= 1")
    if not 0 <= ns.seed < 2**64:
        raise UsageError("--seed must be an unsigned 64-bit integer")
    if ns.workers < 1:
        raise UsageError("--workers must be >= 1")
    if ns.granularity not in GRANULARITIES:
        raise UsageError(f"--granularity must be one of {GRANULARITIES}")
    if not 0 < ns.B_step <= 1:
        raise UsageError("--B-step must lie in (0, 1]")
    steps = round(1.0 / ns.B_step)
    grid = tuple(round(min(k * ns.B_step, 1.0), 10) for k in range(steps + 1))
    cfg = ex.NoiseSweepConfig(
        seed=ns.seed, trials=ns.trials, B_grid=grid, c=ns.c, granularity=ns.granularity, workers=ns.workers
    )
    rows = ex.sweep_noise(cfg)
    ex.emit(rows, ns.format, ns.out)
    meta = {
        "success": "probability mass on the correct detector per trial (not sampled clicks)",
        "rows": "trials/seed set: Monte Carlo mean and stderr; trials/seed empty: exact expectation",
        "noise": f"Bernoulli(B) obstruction per outer cycle; slaz obstruction granularity = {ns.granularity}",
        "seed": ns.seed,
        "trials": ns.trials,
        "c": ns.c,
        "B_grid": list(grid),
    }
    Path(str(ns.out) + ".meta.json").write_text(json.dumps(meta, indent=1) + "\n", encoding="utf-8")
    ok = _report(ex.fig4_regression(rows))
    _report(ex.fig4_claims(rows), kind="claim")
    return EXIT_OK if ok else EXIT_REGRESSION


COMMANDS = {
    "analytic": cmd_analytic,
    "run": cmd_run,
    "table1": cmd_table1,
    "fig3": cmd_fig3,
    "fig4": cmd_fig4,
}


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="zenochain", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name: str, help_text: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help_text, description=help_text)
        p.add_argument("--config", help="flat key = value file; flags override it")
        p.add_argument("--format", choices=("csv", "json"))
        return p

    p = add(
        "analytic",
        "Closed-form counterfactuality rates C0 = prod(1 - sin^2(m theta) t), C1 = cos^2M(theta), "
        "the nested baseline's P1/P2 and the equivalent optical distances M*L vs M*N*L.",
    )
    p.add_argument("--M", type=int, help="outer cycles")
    p.add_argument("--N", type=int, help="inner cycles of the nested baseline")
    p.add_argument("--t", type=float, help="total transmission of the chain module")
    p.add_argument("--L", type=float, help="physical channel length (default 1)")

    p = add(
        "run",
        "Single state-vector run: detector distribution (D1, D2, module and Bob detectors, "
        "noise absorption) for Bob blocking or passing, with an optional noise mask.",
    )
    p.add_argument("--protocol", choices=[x.value for x in Protocol])
    p.add_argument("--M", type=int)
    p.add_argument("--N", type=int)
    p.add_argument("--bob", choices=[x.value for x in BobBit])
    p.add_argument("--mask", help="none, all, or blocked cycles like 3,7,12 (1-based)")
    p.add_argument("--c", type=float, help="return rate of an obstructed channel (default 0)")
    p.add_argument("--t", type=float, help="module transmission, improved protocol (default 1)")
    p.add_argument("--module-N", dest="module_N", type=int, help="splitters in the module (default 4)")

    p = add(
        "table1",
        "Regenerate the 40-cell table: C0 of the improved protocol over t and M, and p2 of the "
        "nested baseline over N and M, with per-cell deviation from the published values.",
    )
    p.add_argument("--out")

    p = add("fig3", "C0 as a function of M for several module transmissions t.")
    p.add_argument("--out")
    p.add_argument("--t-values", dest="t_values", type=_float_list, help="comma-separated t values")
    p.add_argument("--M-min", dest="M_min", type=int)
    p.add_argument("--M-max", dest="M_max", type=int)

    p = add(
        "fig4",
        "Successful clicking rate versus noise rate B, Monte Carlo averaged over --trials "
        "repetitions (default 2000) with the exact expectation alongside.",
    )
    p.add_argument("--out")
    p.add_argument("--seed", type=int, help="master seed (required)")
    p.add_argument("--trials", type=int)
    p.add_argument("--c", type=float, help="return rate for the improved protocol (default 0, worst case)")
    p.add_argument("--workers", type=int)
    p.add_argument("--granularity", choices=GRANULARITIES, help="nested-baseline obstruction unit")
    p.add_argument("--B-step", dest="B_step", type=float, help="grid spacing of B (default 0.05)")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        ns = resolve(args)
        return COMMANDS[ns.command](ns)
    except (UsageError, ValueError) as err:
        parser.print_usage(sys.stderr)
        print(f"zenochain {args.command}: error: {err}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as err:
        print(f"zenochain {args.command}: file error: {err}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
