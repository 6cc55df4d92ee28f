"""
Report Service Module
Writes tabular results (pandas) and JSON reports, stamping the config hash.
"""

import json
import os

import numpy as np
import pandas as pd


def _ensure_parent(path):
    parent = os.path.dirname(os.path.abspath(path))
    os.makedirs(parent, exist_ok=True)


def write_csv(frame, path, config_hash=None, header=True):
    """
    CSV with an optional leading `# config_hash=<hex>` line.
    Read back with pandas.read_csv(path, comment="#").
    """
    _ensure_parent(path)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        if config_hash:
            fh.write(f"# config_hash={config_hash}\n")
        frame.to_csv(fh, index=False, header=header, lineterminator="\n")
    return path


def read_csv(path, header="infer"):
    return pd.read_csv(path, comment="#", header=header)


def _jsonable(value):
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return _jsonable(value.tolist())
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, (np.floating, float)):
        value = float(value)
        return value if np.isfinite(value) else str(value)
    if isinstance(value, (np.bool_, bool)):
        return bool(value)
    if isinstance(value, complex):
        return {"re": value.real, "im": value.imag}
    return value


def write_json(payload, path, config_hash=None):
    _ensure_parent(path)
    body = dict(payload)
    if config_hash:
        body["config_hash"] = config_hash
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(_jsonable(body), fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path
