"""Command-line front end.

Exit status of ``run``: 0 every property holds, 1 a property is
violated, 2 resources exhausted, 3 usage or parse error, 4 internal
consistency failure (the oracle disagrees with the symbolic engine).
"""
from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Tuple

from . import oracle
from .bench import BenchSpec
from .model import DEFAULT_BIT_CAP, Encoder, Model, ModelError, format_model, parse_model
from .reach import (DEFAULT_NODE_CAP, Limits, ReachResult, check_invariant,
                    reach_componentwise, reach_monolithic)
from .report import result_fields, reversals, rows_to_csv, to_json, to_text
from .symmetry import SymContext, SymmetryError

EXIT_OK, EXIT_VIOLATED, EXIT_EXHAUSTED, EXIT_USAGE, EXIT_INTERNAL = range(5)


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    model_path: Optional[str] = None
    bench: Optional[str] = None
    algorithm: str = "comp"
    state_symmetries: bool = False
    oracle_check: bool = False
    time_limit: Optional[float] = None
    node_cap: Optional[int] = DEFAULT_NODE_CAP
    bit_cap: int = DEFAULT_BIT_CAP
    output: str = "text"
    emit_model: Optional[str] = None
    oracle_limit: int = oracle.DEFAULT_STATE_LIMIT


def load_model(config: RunConfig) -> Model:
    if (config.model_path is None) == (config.bench is None):
        raise UsageError("give exactly one of a model file or --bench")
    if config.bench is not None:
        try:
            return BenchSpec.parse(config.bench).model()
        except ValueError as e:
            raise UsageError(str(e)) from None
    try:
        with open(config.model_path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as e:
        raise UsageError(f"cannot read {config.model_path}: {e.strerror}") from None
    return parse_model(text)


def _reach(model: Model, algorithm: str, sym: bool, config: RunConfig,
           ) -> Tuple[ReachResult, SymContext]:
    from .bdd import BDD
    from .model import encode_layout
    layout = encode_layout(model, config.bit_cap)
    ctx = SymContext(Encoder(model, layout, BDD(layout.nvars)))
    limits = Limits(config.time_limit, config.node_cap)
    if algorithm == "mono":
        return reach_monolithic(ctx, limits), ctx
    return reach_componentwise(ctx, sym, limits), ctx


def _oracle_section(model: Model, config: RunConfig,
                    quotient_verdicts: Dict[str, bool]) -> Dict[str, Any]:
    """Four-way equivalence and full-space verdicts."""
    try:
        oracle.check_capacity(model)
        full = oracle.enumerate_reachable(model, config.oracle_limit)
    except oracle.OracleError as e:
        raise UsageError(f"--oracle-check refused: {e}") from None
    canon = oracle.canonical_set(model, full)
    sets = {}
    for algo, sym in (("mono", False), ("comp", False), ("comp", True)):
        res, ctx = _reach(model, algo, sym, config)
        if not res.complete:
            sets[f"{algo}{'+ss' if sym else ''}"] = None
            continue
        sets[f"{algo}{'+ss' if sym else ''}"] = ctx.enc.states(res.reached)
    agree = {k: v == canon for k, v in sets.items()}
    full_verdicts = {p.name: oracle.check_safety(model, full, p.bad) is None
                     for p in model.properties}
    return {
        "equivalence": "PASS" if all(agree.values()) else "FAIL",
        "agreement": agree,
        "full_states": len(full),
        "canonical_states": len(canon),
        "full_verdicts": {k: ("holds" if v else "violated") for k, v in full_verdicts.items()},
        "verdicts_agree": full_verdicts == quotient_verdicts,
    }


def run(config: RunConfig) -> Tuple[int, Dict[str, Any]]:
    """Execute one verification run; returns (exit status, report)."""
    model = load_model(config)
    if config.emit_model:
        with open(config.emit_model, "w", encoding="utf-8") as fh:
            fh.write(format_model(model))
    if config.oracle_check:
        # refuse before spending time on the symbolic run
        try:
            oracle.check_capacity(model)
        except oracle.OracleError as e:
            raise UsageError(f"--oracle-check refused: {e}") from None
    res, ctx = _reach(model, config.algorithm, config.state_symmetries, config)
    report: Dict[str, Any] = {
        "model": model.name,
        "sizes": {t.name: t.count for t in model.types},
        "state_bits": ctx.layout.nbits,
    }
    report.update(result_fields(res))
    props = []
    quotient: Dict[str, bool] = {}
    for p in model.properties:
        bad = ctx.enc.condition(p.bad)
        v = check_invariant(ctx.enc, res.reached, bad)
        if v.holds and not res.complete:
            verdict = "unknown"
        else:
            verdict = "holds" if v.holds else "violated"
        quotient[p.name] = v.holds
        props.append({"name": p.name, "verdict": verdict, "witness": v.witness_text})
    report["properties"] = props

    status = EXIT_OK
    if any(p["verdict"] == "violated" for p in props):
        status = EXIT_VIOLATED
    elif not res.complete:
        status = EXIT_EXHAUSTED
    if config.oracle_check:
        if not res.complete:
            report["oracle"] = None
        else:
            o = _oracle_section(model, config, quotient)
            report["oracle"] = o
            if o["equivalence"] != "PASS" or not o["verdicts_agree"]:
                status = EXIT_INTERNAL
    report["exit_status"] = status
    return status, report


def compare(specs: List[str], config: RunConfig) -> List[Dict[str, Any]]:
    """Run the three algorithm variants on every benchmark."""
    rows = []
    for text in specs:
        try:
            spec = BenchSpec.parse(text)
        except ValueError as e:
            raise UsageError(str(e)) from None
        model = spec.model()
        for algo, sym in (("mono", False), ("comp", False), ("comp", True)):
            res, _ = _reach(model, algo, sym, config)
            row = {"model": spec.family, "size": ",".join(map(str, spec.sizes)),
                   "size_key": spec.sizes[0]}
            row.update(result_fields(res))
            rows.append(row)
            print(f"# {spec.label():<22} {algo}{'+ss' if sym else '':<4} "
                  f"{res.status:<18} peak {res.peak_live:>9}  "
                  f"{res.wall_ms / 1000.0:8.2f} s", file=sys.stderr)
    return rows


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="symred",
        description="Symbolic reachability for symmetric systems.",
        epilog="run exits 0 (holds), 1 (violated), 2 (resources exhausted), "
               "3 (usage or parse error), 4 (internal consistency failure)")
    sub = ap.add_subparsers(dest="command", required=True)

    def limits(p: argparse.ArgumentParser) -> None:
        p.add_argument("--time-limit", type=float, default=None, metavar="SECONDS")
        p.add_argument("--node-cap", type=int, default=DEFAULT_NODE_CAP)
        p.add_argument("--bit-cap", type=int, default=DEFAULT_BIT_CAP)

    r = sub.add_parser("run", help="verify a model file or a built-in benchmark")
    r.add_argument("model", nargs="?", help="model file")
    r.add_argument("--bench", help="mutex:N, readers_writers:K or readers_writers:R,W")
    r.add_argument("--algo", choices=("mono", "comp"), default="comp")
    r.add_argument("--state-sym", action="store_true", help="enable state symmetries")
    r.add_argument("--oracle-check", action="store_true",
                   help="cross-check against explicit enumeration")
    r.add_argument("--oracle-limit", type=int, default=oracle.DEFAULT_STATE_LIMIT)
    r.add_argument("--emit-model", metavar="PATH", help="also write the model file")
    r.add_argument("--format", choices=("text", "json", "structured"), default="text")
    limits(r)

    e = sub.add_parser("emit", help="print a built-in benchmark as a model file")
    e.add_argument("--bench", required=True)
    e.add_argument("-o", "--output", help="write to this file instead of stdout")

    c = sub.add_parser("compare", help="run all algorithms on benchmarks; "
                                       "write CSV and a figure")
    c.add_argument("--bench", action="append", required=True,
                   help="repeatable, e.g. --bench mutex:10 --bench mutex:20")
    c.add_argument("--csv", metavar="PATH", help="write the table here (default stdout)")
    c.add_argument("--plot", metavar="PATH", help="write a figure (png, pdf, svg)")
    limits(c)
    return ap


def main(argv: Optional[List[str]] = None) -> int:
    ap = _parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code == 0 else EXIT_USAGE
    try:
        if args.command == "emit":
            try:
                text = format_model(BenchSpec.parse(args.bench).model())
            except ValueError as e:
                raise UsageError(str(e)) from None
            if args.output:
                with open(args.output, "w", encoding="utf-8") as fh:
                    fh.write(text)
            else:
                sys.stdout.write(text)
            return EXIT_OK
        config = RunConfig(time_limit=args.time_limit, node_cap=args.node_cap,
                           bit_cap=args.bit_cap)
        if args.command == "compare":
            rows = compare(args.bench, config)
            table = rows_to_csv(rows)
            if args.csv:
                with open(args.csv, "w", encoding="utf-8") as fh:
                    fh.write(table)
            else:
                sys.stdout.write(table)
            for label in reversals(rows):
                print(f"REVERSAL {label}: component-wise peak nodes exceed monolithic",
                      file=sys.stderr)
            if args.plot:
                from .plot import plot_comparison
                plot_comparison(rows, args.plot)
            return EXIT_OK
        config.model_path = args.model
        config.bench = args.bench
        config.algorithm = args.algo
        config.state_symmetries = args.state_sym
        config.oracle_check = args.oracle_check
        config.oracle_limit = args.oracle_limit
        config.output = "text" if args.format == "text" else "json"
        config.emit_model = args.emit_model
        if config.state_symmetries and config.algorithm == "mono":
            raise UsageError("--state-sym needs --algo comp")
        status, report = run(config)
        sys.stdout.write(to_json(report) if config.output == "json" else to_text(report))
        return status
    except (UsageError, ModelError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (oracle.ConsistencyError, SymmetryError) as e:
        print(f"internal error: {e}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
