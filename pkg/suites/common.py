"""
Check runner shared by the verify suites.
A check is a zero-argument callable returning its measured values; any
SpectraError it raises is recorded as a failed check instead of aborting.
"""

import numpy as np

from utils.errors import InvariantViolation, SpectraError
from utils.logger import get_logger

logger = get_logger(__name__)

CAUGHT = (SpectraError, np.linalg.LinAlgError)


def _measured(value):
    if value is None or isinstance(value, dict):
        return value or {}
    if isinstance(value, (bool, np.bool_)):
        return {"ok": bool(value)}
    return {"value": value}


def _record(suite, name):
    return {"suite": suite, "check": name, "passed": True, "measured": {}, "error": None, "index": None}


def _fail(record, exc):
    if isinstance(exc, InvariantViolation):
        record.update(passed=False, measured=exc.values, error=str(exc), index=exc.index)
    else:
        record.update(passed=False, error=f"{type(exc).__name__}: {exc}", index=getattr(exc, "index", None))
    logger.warning("%s/%s failed: %s", record["suite"], record["check"], record["error"])
    return record


def run_check(suite, name, check):
    record = _record(suite, name)
    try:
        record["measured"] = _measured(check())
    except CAUGHT as exc:
        _fail(record, exc)
    return record


def fixture(suite, name, build):
    """Build shared input for several checks: (value, None) or (None, failed record)."""
    try:
        return build(), None
    except CAUGHT as exc:
        return None, _fail(_record(suite, name), exc)


def within(name, measured, tol, index=None):
    """Raise InvariantViolation when `measured` exceeds `tol`; otherwise return both."""
    measured = float(measured)
    if not measured <= tol:
        raise InvariantViolation(name, f"{measured!r} above tolerance {tol!r}", index=index,
                                 values={"measured": measured, "tol": tol})
    return {"measured": measured, "tol": tol}
