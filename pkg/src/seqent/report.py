"""Run reports and flat-file exports.

All writers are deterministic: repeated runs with the same inputs and
seeds produce byte-identical output (no timestamps, sorted JSON keys,
shortest round-trip float formatting).
"""

from __future__ import annotations

import csv
import json

import numpy as np

from .core import Alphabet
from .correlation import CorrelationSeries
from .entropy import BlockEntropyCurve, EntropyCurve
from .markov import MemoryFunction

SCHEMA_VERSION = 1


def json_num(x):
    """JSON-safe scalar: NaN/inf become None, numpy scalars become python."""
    if x is None:
        return None
    x = float(x)
    return x if np.isfinite(x) else None


def json_list(xs):
    return [json_num(x) for x in xs]


def entropy_curve_dict(curve: EntropyCurve) -> dict:
    return {
        "L": [int(v) for v in curve.L],
        "h_corr": json_list(curve.h_corr),
        "h_corr_corrected": json_list(curve.h_corr_corrected),
        "S": json_list(curve.correlation_sum),
        "fluct_term": json_list(curve.fluctuation_term),
        "h0": json_num(curve.h0),
        "m_eff": curve.m_eff,
        "correction": curve.correction,
    }


def block_curve_dict(curve: BlockEntropyCurve) -> dict:
    return {
        "L": [int(v) for v in curve.L],
        "H": json_list(curve.H),
        "h": json_list(curve.h),
        "word_count": [int(v) for v in curve.word_count],
        "valid": [bool(v) for v in curve.valid],
    }


def dump_report(report: dict, fh) -> None:
    json.dump(report, fh, sort_keys=True, indent=2, allow_nan=False)
    fh.write("\n")


CURVE_COLUMNS = [
    "L", "h_corr", "h_corr_corrected", "S", "fluct_term",
    "H_block", "h_block", "valid_block",
]


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return repr(float(value))


def write_curve_csv(fh, corr_curve: EntropyCurve | None, block_curve: BlockEntropyCurve | None) -> None:
    """Combined per-L export; cells are empty where a column is undefined."""
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(CURVE_COLUMNS)
    n_corr = corr_curve.L.size if corr_curve is not None else 0
    n_block = block_curve.L.size if block_curve is not None else 0
    for i in range(max(n_corr, n_block)):
        row = [str(i + 1)]
        if i < n_corr:
            row += [_cell(corr_curve.h_corr[i]), _cell(corr_curve.h_corr_corrected[i]),
                    _cell(corr_curve.correlation_sum[i]), _cell(corr_curve.fluctuation_term[i])]
        else:
            row += ["", "", "", ""]
        if i < n_block:
            row += [_cell(block_curve.H[i]), _cell(block_curve.h[i]), _cell(bool(block_curve.valid[i]))]
        else:
            row += ["", "", ""]
        writer.writerow(row)


def write_compare_csv(fh, corr_curve: EntropyCurve, block_curve: BlockEntropyCurve) -> None:
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(["L", "h_corr_corrected", "h_block", "valid_block"])
    n = max(corr_curve.L.size, block_curve.L.size)
    for i in range(n):
        row = [str(i + 1)]
        row.append(_cell(corr_curve.h_corr_corrected[i]) if i < corr_curve.L.size else "")
        if i < block_curve.L.size:
            row += [_cell(block_curve.h[i]), _cell(bool(block_curve.valid[i]))]
        else:
            row += ["", ""]
        writer.writerow(row)


def write_correlation_csv(fh, corr: CorrelationSeries, alphabet: Alphabet) -> None:
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(["r", "alpha", "beta", "C"])
    for r in range(corr.r_max + 1):
        mat = corr.matrices[r]
        for a in range(corr.m):
            for b in range(corr.m):
                writer.writerow([str(r), alphabet.symbol(a), alphabet.symbol(b), _cell(mat[a, b])])


def write_memory_csv(fh, mem: MemoryFunction, alphabet: Alphabet) -> None:
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(["r", "alpha", "beta", "F"])
    for r in range(1, mem.order + 1):
        mat = mem.kernel[r - 1]
        for a in range(mem.m):
            for b in range(mem.m):
                writer.writerow([str(r), alphabet.symbol(a), alphabet.symbol(b), _cell(mat[a, b])])


def write_metadata(fh, entries: dict) -> None:
    """Sidecar in `key = value` lines, insertion order preserved."""
    for key, value in entries.items():
        fh.write(f"{key} = {value}\n")
