"""Check reports and their serialisations."""
import csv
import hashlib
import io
import json
import math
from dataclasses import asdict, dataclass, is_dataclass, replace
from typing import Iterable, List, Optional

__all__ = [
    "CheckReport",
    "NEGATIVE",
    "NEGATIVE_THRESHOLD",
    "make_report",
    "skipped",
    "digest",
    "emit_report",
    "parse_json_lines",
    "all_ok",
    "summary_by_suite",
]

NEGATIVE = "negative-control"
NEGATIVE_THRESHOLD = 1e-3
FIELD_ORDER = ("check_id", "params_digest", "residual", "tolerance", "passed",
               "elapsed_ms", "notes")


@dataclass(frozen=True)
class CheckReport:
    check_id: str
    params_digest: str
    residual: float
    tolerance: float
    passed: bool
    elapsed_ms: float = 0.0
    notes: str = ""

    @property
    def is_negative(self) -> bool:
        return self.notes == NEGATIVE

    @property
    def suite(self) -> str:
        return self.check_id.split(".", 1)[0]


def digest(params) -> str:
    """Short stable hash of a parameter record (dataclass, dict or None)."""
    if params is None:
        return ""
    if is_dataclass(params):
        params = asdict(params)
    text = json.dumps({k: repr(v) for k, v in sorted(params.items())}, sort_keys=True)
    return hashlib.sha256(text.encode()).hexdigest()[:16]


def make_report(check_id: str, residual: float, tol: float, params=None,
                negative: bool = False, diagnostic: bool = False,
                notes: str = "") -> CheckReport:
    """Build a report.

    Negative controls pass when the residual exceeds ``NEGATIVE_THRESHOLD``;
    diagnostics always pass and carry their finding in ``notes``.
    """
    residual = float(residual)
    if negative:
        passed = residual > NEGATIVE_THRESHOLD
        notes = NEGATIVE
    elif diagnostic:
        passed = True
        if not notes.startswith("diagnostic"):
            notes = "diagnostic" + (f": {notes}" if notes else "")
    else:
        passed = bool(math.isfinite(residual) and residual <= tol)
    return CheckReport(check_id, digest(params), residual, float(tol), passed, 0.0, notes)


def skipped(check_id: str, reason: str, tol: float, params=None) -> CheckReport:
    return CheckReport(check_id, digest(params), 0.0, float(tol), True, 0.0, f"skipped: {reason}")


def all_ok(reports: Iterable[CheckReport]) -> bool:
    """Exit criterion: every report passed (negative controls pass by detecting)."""
    return all(r.passed for r in reports)


def _num(x: float) -> str:
    if math.isnan(x):
        return '"NaN"'
    if math.isinf(x):
        return '"Infinity"' if x > 0 else '"-Infinity"'
    return format(x, ".17g")


def _json_line(r: CheckReport) -> str:
    parts = [
        f'"check_id": {json.dumps(r.check_id)}',
        f'"params_digest": {json.dumps(r.params_digest)}',
        f'"residual": {_num(r.residual)}',
        f'"tolerance": {_num(r.tolerance)}',
        f'"passed": {"true" if r.passed else "false"}',
        f'"elapsed_ms": {_num(r.elapsed_ms)}',
        f'"notes": {json.dumps(r.notes)}',
    ]
    return "{" + ", ".join(parts) + "}"


def summary_by_suite(reports: Iterable[CheckReport]):
    out = {}
    for r in reports:
        s = out.setdefault(r.suite, {"total": 0, "passed": 0, "failed": 0, "worst": 0.0})
        s["total"] += 1
        s["passed" if r.passed else "failed"] += 1
        if not r.is_negative and not r.notes.startswith(("skipped", "diagnostic")):
            s["worst"] = max(s["worst"], r.residual)
    return out


def emit_report(reports: Iterable[CheckReport], fmt: str = "json-lines",
                spectrum_rows: Optional[List[tuple]] = None) -> bytes:
    reports = list(reports)
    if fmt == "json-lines":
        return "".join(_json_line(r) + "\n" for r in reports).encode()
    if fmt == "summary-text":
        lines = []
        for suite, s in sorted(summary_by_suite(reports).items()):
            lines.append(f"{suite:<14} total={s['total']:<4d} passed={s['passed']:<4d} "
                         f"failed={s['failed']:<4d} worst_residual={s['worst']:.3e}")
        n_fail = sum(not r.passed for r in reports)
        lines.append(f"overall: {len(reports)} checks, {n_fail} failed -> "
                     f"{'OK' if n_fail == 0 else 'FAIL'}")
        return ("\n".join(lines) + "\n").encode()
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["label", "index", "re", "im", "multiplicity"])
        for row in spectrum_rows or []:
            w.writerow([row[0], row[1], _num(row[2]), _num(row[3]), row[4]])
        return buf.getvalue().encode()
    raise ValueError(f"unknown report format {fmt!r}")


def parse_json_lines(data) -> List[CheckReport]:
    if isinstance(data, bytes):
        data = data.decode()
    out = []
    for line in data.splitlines():
        if not line.strip():
            continue
        obj = json.loads(line)
        if tuple(obj) != FIELD_ORDER:
            raise ValueError(f"unexpected keys {tuple(obj)}")
        vals = {k: obj[k] for k in FIELD_ORDER}
        for k in ("residual", "tolerance", "elapsed_ms"):
            vals[k] = float(vals[k])
        out.append(CheckReport(**vals))
    return out


def with_timing(r: CheckReport, elapsed_ms: float) -> CheckReport:
    return replace(r, elapsed_ms=float(elapsed_ms))
