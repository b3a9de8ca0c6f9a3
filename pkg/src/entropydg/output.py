"""Machine-readable run outputs: CSV tables with JSON mirrors.

Schemas (field names are identical in both formats):

* snapshot:     x, rho, rho_v, E           one row per node, ascending x
* entropy:      t, E_total, violation_pos, residual_min
* convergence:  N, L1, L2, order_L1, order_L2
* corrections:  t, cell, lambda_ED, lambda_ER_sum, residual
* comparison:   t, E_dg, E_ref
"""

import csv
import json
import os

import numpy as np

__all__ = ["SCHEMAS", "write_table", "read_table", "validate_table",
           "table_path"]

SCHEMAS = {
    "snapshot": ("x", "rho", "rho_v", "E"),
    "entropy": ("t", "E_total", "violation_pos", "residual_min"),
    "convergence": ("N", "L1", "L2", "order_L1", "order_L2"),
    "corrections": ("t", "cell", "lambda_ED", "lambda_ER_sum", "residual"),
    "comparison": ("t", "E_dg", "E_ref"),
}


def table_path(directory, name, fmt):
    return os.path.join(directory, f"{name}.{fmt}")


def write_table(path, kind, rows, fmt=None):
    """Write rows (sequence of per-field sequences) under the named schema."""
    fields = SCHEMAS[kind]
    rows = [[float(v) for v in row] for row in rows]
    for row in rows:
        if len(row) != len(fields):
            raise ValueError(f"{kind} row has {len(row)} fields, "
                             f"expected {len(fields)}")
    fmt = fmt or os.path.splitext(path)[1].lstrip(".")
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    if fmt == "csv":
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(fields)
            writer.writerows(rows)
    elif fmt == "json":
        payload = [dict(zip(fields, row)) for row in rows]
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, indent=1)
    else:
        raise ValueError(f"unknown format {fmt!r}")
    return path


def read_table(path, kind):
    """Load a table back as a float array of shape (n_rows, n_fields)."""
    fields = SCHEMAS[kind]
    if path.endswith(".json"):
        with open(path, encoding="utf-8") as fh:
            payload = json.load(fh)
        rows = [[float(entry[f]) for f in fields] for entry in payload]
    else:
        with open(path, newline="", encoding="utf-8") as fh:
            reader = csv.reader(fh)
            header = next(reader)
            if tuple(header) != fields:
                raise ValueError(f"{path}: header {header} does not match "
                                 f"{kind} schema {fields}")
            rows = [[float(v) for v in row] for row in reader]
    return np.array(rows, dtype=float).reshape(-1, len(fields))


def validate_table(path, kind, expect_rows=None):
    """Round-trip schema check; raises on mismatch, returns the array."""
    data = read_table(path, kind)
    if not np.all(np.isfinite(data)):
        raise ValueError(f"{path}: non-finite entries")
    if expect_rows is not None and data.shape[0] != expect_rows:
        raise ValueError(f"{path}: {data.shape[0]} rows, expected {expect_rows}")
    return data
