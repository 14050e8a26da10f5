"""Command-line front end: analyze, generate, compare, corr, memfn."""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import __version__
from .core import Alphabet, SymbolSequence, default_alphabet, symbol_probabilities
from .correlation import (
    WEAK_WARN_THRESHOLD,
    NormalizedSeries,
    correlation_from_binary_target,
    correlation_series_fast,
    normalize,
    weak_correlation_diagnostic,
)
from .entropy import (
    RC_TOL,
    RC_WINDOW,
    LengthReport,
    block_entropy_curve,
    correlation_entropy_curve,
    correlation_length,
    h0,
    stationarity_length,
    validity_limit,
)
from .errors import (
    EmptyInput,
    InvalidLag,
    InvalidLength,
    InvalidPartition,
    MalformedFasta,
    SeqentError,
    UnknownSymbol,
    WeakCorrelationExceeded,
)
from .ingest import binary_map, coarse_grain_text, parse_fasta, read_raw_symbols
from .markov import (
    AdditiveCpf,
    MemoryFunction,
    binary_memory_from_target,
    generate,
    memory_function_exact,
    memory_function_series,
    memory_residual,
)
from . import report as rpt

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_PARSE = 3
EXIT_EMPTY = 4
EXIT_DIAGNOSTIC = 5

DEFAULT_R_MAX_CAP = 100_000
DEFAULT_L_MAX = 100
DIAGNOSTIC_LIMIT = 1.0


def _threads(args) -> int:
    if args.threads is not None:
        return args.threads
    env = os.environ.get("THREADS")
    return int(env) if env else 1


def _load_input(path: str, fmt: str, keep_blank_runs: bool):
    with open(path, "rb") as fh:
        raw = fh.read()
    if fmt == "text":
        return coarse_grain_text(raw.decode("utf-8", errors="replace"),
                                 collapse_blanks=not keep_blank_runs)
    if fmt == "fasta":
        return parse_fasta(raw)
    if fmt == "bytes":
        return read_raw_symbols(raw, "bytes")
    if fmt == "tokens":
        return read_raw_symbols(raw, "tokens")
    raise ValueError(f"unknown format {fmt!r}")


def _input_block(path: str, fmt: str, stats) -> dict:
    return {
        "path": path,
        "format": fmt,
        "bytes": stats.input_bytes,
        "emitted": stats.emitted,
        "dropped": stats.dropped,
    }


def _resolve_lags(M: int, r_max_flag, l_max_flag):
    if M < 3:
        raise EmptyInput("sequence too short to correlate (M < 3)")
    r_max = r_max_flag if r_max_flag is not None else min(M // 10, DEFAULT_R_MAX_CAP)
    l_max = l_max_flag if l_max_flag is not None else DEFAULT_L_MAX
    r_max = max(r_max, l_max, 1)
    r_max = min(r_max, M - 2)
    l_max = min(l_max, r_max)
    return r_max, max(l_max, 1)


def _analysis(seq: SymbolSequence, args, method: str) -> dict:
    """Shared analyze/compare computation; returns report pieces and curves."""
    p = symbol_probabilities(seq)
    out: dict = {
        "alphabet": list(seq.alphabet.symbols),
        "M": seq.M,
        "p": rpt.json_list(p),
        "h0": rpt.json_num(h0(p)),
    }
    corr_curve = None
    block_curve = None
    lengths = LengthReport(None, None)
    if method in ("corr", "both"):
        r_max, l_max = _resolve_lags(seq.M, args.r_max, args.L_max)
        corr = correlation_series_fast(seq, r_max)
        norm = normalize(corr)
        # measured-K noise grows the diagnostic linearly in lag count, so
        # bound it to the lags that actually enter the entropy curve
        diag = weak_correlation_diagnostic(
            NormalizedSeries(norm.values[:l_max], norm.defined, norm.p)
        )
        corr_curve = correlation_entropy_curve(corr, l_max, correction=not args.no_correction)
        lengths = LengthReport(
            r_c=correlation_length(corr_curve, args.rc_tol, args.rc_window),
            r_s=stationarity_length(corr),
        )
        out["diagnostic_D"] = rpt.json_num(diag)
        out["diagnostic_r_max"] = l_max
        out["weak_warning"] = bool(diag > WEAK_WARN_THRESHOLD)
        out["params_corr"] = {"r_max": r_max, "L_max": l_max,
                              "correction": not args.no_correction,
                              "rc_tol": args.rc_tol, "rc_window": args.rc_window,
                              "weak_warn_threshold": WEAK_WARN_THRESHOLD}
    if method in ("block", "both"):
        l_max = args.L_max if args.L_max is not None else DEFAULT_L_MAX
        if seq.m >= 2 and seq.M >= seq.m:
            cap = validity_limit(seq.m, seq.M) + 6
        else:
            cap = l_max
        block_l = args.block_L_max if args.block_L_max is not None else min(l_max, cap)
        block_l = min(block_l, seq.M - 1)
        if block_l < 1:
            raise EmptyInput("sequence too short for block entropies")
        block_curve = block_entropy_curve(seq, block_l)
        out["params_block"] = {"block_L_max": block_l}
    out["lengths"] = {"R_c": lengths.r_c, "R_s": lengths.r_s}
    return out, corr_curve, block_curve


def _write_json(report: dict, out_path):
    if out_path:
        with open(out_path, "w") as fh:
            rpt.dump_report(report, fh)
    else:
        rpt.dump_report(report, sys.stdout)


def _maybe_plot(path, corr_curve, block_curve):
    if not path:
        return
    try:
        import matplotlib
    except ImportError as exc:  # pragma: no cover
        raise SeqentError("matplotlib is required for --plot") from exc
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(7, 4.5))
    if corr_curve is not None:
        ax.plot(corr_curve.L, corr_curve.h_corr, label="h (correlation)")
        ax.plot(corr_curve.L, corr_curve.h_corr_corrected, label="h (corrected)")
    if block_curve is not None:
        ax.plot(block_curve.L, block_curve.h, label="h (block)")
    ax.set_xlabel("L")
    ax.set_ylabel("bits/symbol")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def cmd_analyze(args) -> int:
    seq, stats = _load_input(args.input, args.format, args.keep_blank_runs)
    if args.binary_map:
        seq = binary_map(seq, args.binary_map.split(","))
    body, corr_curve, block_curve = _analysis(seq, args, args.method)
    report = {
        "schema_version": rpt.SCHEMA_VERSION,
        "tool": {"name": "seqent", "version": __version__},
        "command": "analyze",
        "input": _input_block(args.input, args.format, stats),
        "threads": _threads(args),
        "curves": {
            "correlation": rpt.entropy_curve_dict(corr_curve) if corr_curve else None,
            "block": rpt.block_curve_dict(block_curve) if block_curve else None,
        },
    }
    report.update(body)
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            rpt.write_curve_csv(fh, corr_curve, block_curve)
    _maybe_plot(args.plot, corr_curve, block_curve)
    _write_json(report, args.out)
    return EXIT_OK


def cmd_compare(args) -> int:
    seq, stats = _load_input(args.input, args.format, args.keep_blank_runs)
    if args.binary_map:
        seq = binary_map(seq, args.binary_map.split(","))
    body, corr_curve, block_curve = _analysis(seq, args, "both")
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            rpt.write_compare_csv(fh, corr_curve, block_curve)
    else:
        rpt.write_compare_csv(sys.stdout, corr_curve, block_curve)
    return EXIT_OK


class MalformedSpec(SeqentError):
    """Generation spec file could not be parsed."""


def _target_from_spec(spec: dict):
    """Memory kernel, probabilities and diagnostic from a generation spec.

    The weak-correlation gate fires before any solve: K targets use the
    spec diagnostic, F targets the kernel deviation bound.
    """
    try:
        m = int(spec["m"])
        p = np.asarray(spec["p"], dtype=float)
        length = int(spec["M"])
    except KeyError as exc:
        raise SeqentError(f"generation spec is missing {exc}") from exc
    if p.shape != (m,) or abs(p.sum() - 1.0) > 1e-9 or np.any(p < 0):
        raise SeqentError("generation spec: p must be a length-m probability vector")
    if length < 1:
        raise SeqentError("generation spec: M must be >= 1")
    method = spec.get("method", "exact")
    if "K" in spec:
        if m != 2:
            raise SeqentError("scalar K targets are supported for m = 2 only; give F")
        k = np.asarray(spec["K"], dtype=float)
        order = int(spec.get("N", k.size))
        target = correlation_from_binary_target(k, p)
        diag = weak_correlation_diagnostic(normalize(target))
        if diag > DIAGNOSTIC_LIMIT + 1e-9:
            raise WeakCorrelationExceeded(diag, DIAGNOSTIC_LIMIT)
        mem = binary_memory_from_target(k, p, order=order, method=method) if np.any(k) else None
    elif "F" in spec:
        kern = np.asarray(spec["F"], dtype=float)
        mem = MemoryFunction(kern).canonical(p)
        w = np.maximum(p, 1.0 - p)
        diag = float(np.abs(mem.kernel @ np.diag(w)).sum(axis=2).max(axis=1).sum()) if mem.order else 0.0
        if diag > DIAGNOSTIC_LIMIT + 1e-9:
            raise WeakCorrelationExceeded(diag, DIAGNOSTIC_LIMIT)
        if not np.any(kern):
            mem = None
    else:
        raise SeqentError("generation spec needs a 'K' or 'F' target")
    return m, p, length, mem, method, diag


def cmd_generate(args) -> int:
    with open(args.spec) as fh:
        try:
            spec = json.load(fh)
        except json.JSONDecodeError as exc:
            raise MalformedSpec(str(exc)) from exc
    m, p, length, mem, method, diag = _target_from_spec(spec)
    seed = args.seed if args.seed is not None else int(spec.get("seed", 0))
    burn_in = args.burn_in if args.burn_in is not None else spec.get("burn_in")
    alphabet = Alphabet(tuple(spec["alphabet"])) if "alphabet" in spec else default_alphabet(m)
    cpf = AdditiveCpf(p, mem)
    seq, info = generate(cpf, length, seed, alphabet=alphabet, burn_in=burn_in)
    symbols = seq.decode()
    joiner = "" if all(len(s) == 1 for s in alphabet.symbols) else " "
    with open(args.out, "w") as fh:
        fh.write(joiner.join(symbols))
    meta = {
        "seed": info.seed,
        "N": info.order,
        "burn_in": info.burn_in,
        "M": info.length,
        "clamp_events": info.clamp_events,
        "rng": info.rng_id,
        "method": method,
        "diagnostic_D": repr(diag),
        "tool_version": __version__,
    }
    meta_path = args.meta or args.out + ".meta"
    with open(meta_path, "w") as fh:
        rpt.write_metadata(fh, meta)
    report = {
        "schema_version": rpt.SCHEMA_VERSION,
        "tool": {"name": "seqent", "version": __version__},
        "command": "generate",
        "out": args.out,
        "meta": meta_path,
        "m": m,
        "p": rpt.json_list(p),
        "M": info.length,
        "seed": info.seed,
        "rng": info.rng_id,
        "order": info.order,
        "burn_in": info.burn_in,
        "clamp_events": info.clamp_events,
        "method": method,
        "diagnostic_D": rpt.json_num(diag),
        "threads": _threads(args),
    }
    _write_json(report, args.out_report)
    return EXIT_OK


def cmd_corr(args) -> int:
    seq, _stats = _load_input(args.input, args.format, args.keep_blank_runs)
    if args.binary_map:
        seq = binary_map(seq, args.binary_map.split(","))
    r_max, _ = _resolve_lags(seq.M, args.r_max, args.r_max or 1)
    corr = correlation_series_fast(seq, r_max)
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            rpt.write_correlation_csv(fh, corr, seq.alphabet)
    else:
        rpt.write_correlation_csv(sys.stdout, corr, seq.alphabet)
    return EXIT_OK


def cmd_memfn(args) -> int:
    seq, _stats = _load_input(args.input, args.format, args.keep_blank_runs)
    if args.binary_map:
        seq = binary_map(seq, args.binary_map.split(","))
    r_max = max(args.r_max or 0, args.order)
    r_max = min(max(r_max, 1), seq.M - 2)
    if r_max < args.order:
        raise InvalidLag("sequence too short for the requested order")
    corr = correlation_series_fast(seq, r_max)
    if args.method == "exact":
        mem = memory_function_exact(corr, args.order)
    else:
        mem = memory_function_series(normalize(corr), args.order, args.series_order)
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            rpt.write_memory_csv(fh, mem, seq.alphabet)
    else:
        rpt.write_memory_csv(sys.stdout, mem, seq.alphabet)
    print(f"# residual = {memory_residual(corr, mem)!r}", file=sys.stderr)
    return EXIT_OK


def _add_input_flags(sub):
    sub.add_argument("input", help="input file")
    sub.add_argument("--format", choices=["text", "fasta", "bytes", "tokens"],
                     default="text", help="input layout (default: text)")
    sub.add_argument("--keep-blank-runs", action="store_true",
                     help="text mode: keep one blank per separator character")
    sub.add_argument("--binary-map", metavar="SYMS",
                     help="comma-separated symbols mapped to 1, rest to 0")


def _add_common(sub):
    sub.add_argument("--threads", type=int, default=None,
                     help="worker cap (recorded in the report; THREADS env overrides default)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="seqent",
                                     description="entropy of correlated symbolic sequences")
    parser.add_argument("--version", action="version", version=f"seqent {__version__}")
    subs = parser.add_subparsers(dest="command", required=True)

    pa = subs.add_parser("analyze", help="entropy curves and report for one input")
    _add_input_flags(pa)
    pa.add_argument("--r-max", type=int, default=None, help="correlation lag bound")
    pa.add_argument("--L-max", type=int, default=None, help="entropy curve length")
    pa.add_argument("--block-L-max", type=int, default=None, help="block-entropy length cap")
    pa.add_argument("--no-correction", action="store_true",
                    help="report the uncorrected curve as the headline estimate")
    pa.add_argument("--method", choices=["corr", "block", "both"], default="both")
    pa.add_argument("--rc-tol", type=float, default=RC_TOL, help="plateau step tolerance, bits")
    pa.add_argument("--rc-window", type=int, default=RC_WINDOW, help="plateau window length")
    pa.add_argument("--csv", help="write the combined curve CSV here")
    pa.add_argument("--out", help="write the JSON report here instead of stdout")
    pa.add_argument("--plot", help="write a static plot (svg/png by extension)")
    _add_common(pa)
    pa.set_defaults(func=cmd_analyze)

    pg = subs.add_parser("generate", help="sample a chain with prescribed correlations")
    pg.add_argument("spec", help="JSON spec: m, p, M, and K (binary) or F tensor")
    pg.add_argument("--out", required=True, help="raw symbol output file")
    pg.add_argument("--meta", help="metadata sidecar path (default: OUT.meta)")
    pg.add_argument("--seed", type=int, default=None, help="overrides the spec seed")
    pg.add_argument("--burn-in", type=int, default=None, help="discarded prefix length")
    pg.add_argument("--out-report", help="write the JSON report here instead of stdout")
    _add_common(pg)
    pg.set_defaults(func=cmd_generate)

    pc = subs.add_parser("compare", help="correlation vs block entropies, CSV")
    _add_input_flags(pc)
    pc.add_argument("--r-max", type=int, default=None)
    pc.add_argument("--L-max", type=int, default=None)
    pc.add_argument("--block-L-max", type=int, default=None)
    pc.add_argument("--no-correction", action="store_true")
    pc.add_argument("--rc-tol", type=float, default=RC_TOL)
    pc.add_argument("--rc-window", type=int, default=RC_WINDOW)
    pc.add_argument("--csv", help="output CSV path (default: stdout)")
    _add_common(pc)
    pc.set_defaults(func=cmd_compare)

    pr = subs.add_parser("corr", help="dump the correlation series as CSV")
    _add_input_flags(pr)
    pr.add_argument("--r-max", type=int, default=None)
    pr.add_argument("--csv", help="output CSV path (default: stdout)")
    _add_common(pr)
    pr.set_defaults(func=cmd_corr)

    pm = subs.add_parser("memfn", help="solve the memory kernel from data")
    _add_input_flags(pm)
    pm.add_argument("--order", type=int, required=True, help="kernel depth N")
    pm.add_argument("--r-max", type=int, default=None)
    pm.add_argument("--method", choices=["exact", "series"], default="exact")
    pm.add_argument("--series-order", type=int, choices=[1, 2], default=1)
    pm.add_argument("--csv", help="output CSV path (default: stdout)")
    _add_common(pm)
    pm.set_defaults(func=cmd_memfn)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except WeakCorrelationExceeded as exc:
        print(f"seqent: {exc}", file=sys.stderr)
        return EXIT_DIAGNOSTIC
    except EmptyInput as exc:
        print(f"seqent: {exc}", file=sys.stderr)
        return EXIT_EMPTY
    except (MalformedFasta, UnknownSymbol, MalformedSpec) as exc:
        print(f"seqent: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (InvalidLag, InvalidLength, InvalidPartition, SeqentError, ValueError) as exc:
        print(f"seqent: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"seqent: {exc}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
