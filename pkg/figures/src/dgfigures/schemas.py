"""Readers for the solver's documented CSV/JSON output schemas.

The figure suite talks to the solver only through these files; the
column layout is duplicated here on purpose so the language boundary
stays at the file format.
"""

import csv
import json

import numpy as np

SCHEMAS = {
    "snapshot": ("x", "rho", "rho_v", "E"),
    "entropy": ("t", "E_total", "violation_pos", "residual_min"),
    "convergence": ("N", "L1", "L2", "order_L1", "order_L2"),
    "corrections": ("t", "cell", "lambda_ED", "lambda_ER_sum", "residual"),
    "comparison": ("t", "E_dg", "E_ref"),
}


class SchemaError(ValueError):
    """Input file does not match the documented schema."""


def load_table(path, kind):
    """Read one table; raises SchemaError naming the offending column."""
    fields = SCHEMAS[kind]
    path = str(path)
    if path.endswith(".json"):
        with open(path, encoding="utf-8") as fh:
            payload = json.load(fh)
        rows = []
        for entry in payload:
            for f in fields:
                if f not in entry:
                    raise SchemaError(f"{path}: missing column {f!r} "
                                      f"for schema {kind!r}")
            rows.append([float(entry[f]) for f in fields])
    else:
        with open(path, newline="", encoding="utf-8") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if header is None:
                raise SchemaError(f"{path}: empty file")
            for want, got in zip(fields, list(header) + [None] * len(fields)):
                if want != got:
                    raise SchemaError(f"{path}: expected column {want!r}, "
                                      f"found {got!r} (schema {kind!r})")
            rows = [[float(v) for v in row] for row in reader]
    data = np.array(rows, dtype=float).reshape(-1, len(fields))
    if not np.all(np.isfinite(data)):
        raise SchemaError(f"{path}: non-finite values")
    return data


def load_maxdt(path):
    with open(path, encoding="utf-8") as fh:
        payload = json.load(fh)
    for key in ("multiplier", "unstable", "bracket"):
        if key not in payload:
            raise SchemaError(f"{path}: missing field {key!r} in maxdt result")
    return payload
