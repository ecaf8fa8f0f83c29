"""Sparse-matrix stream encodings and simulated SpMV pipelines."""

import json

from ._sparsespace import (
    EncodedMatrix,
    Error,
    SpmvResult,
    decode,
    design_names,
    encode,
    parse_matrix_market,
    read_matrix_market,
    spmv,
    spmv_oracle,
    verify_integrity,
)


def stats(result):
    """Utilization statistics of a simulated run as a dict."""
    return json.loads(result.stats_json)


__all__ = [
    "EncodedMatrix",
    "Error",
    "SpmvResult",
    "decode",
    "design_names",
    "encode",
    "parse_matrix_market",
    "read_matrix_market",
    "spmv",
    "spmv_oracle",
    "stats",
    "verify_integrity",
]
