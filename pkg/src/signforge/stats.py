"""Exact one-tailed binomial analysis of sign-recognition counts.

The module is an auditor: it recomputes the exact upper-tail p-value for each
recognition count against the chance level and flags rows whose previously
reported p-value disagrees with the exact tail, rather than adopting either
column silently.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

from .errors import CsvParseError, DomainError

CSV_HEADER = ["sign", "correct", "total", "paper_p", "notes"]

# |computed - reported| above this flags a row.
MISMATCH_TOLERANCE = 0.005


@dataclass(frozen=True)
class RecognitionRecord:
    sign: str
    correct: int
    total: int
    reported_p: float | None = None  # reported p-value, when printed as a number
    reported_p_bound: float | None = None  # upper bound, when printed as "< x"
    notes: str = ""

    def __post_init__(self):
        if self.total <= 0:
            raise DomainError(f"{self.sign}: total must be positive")
        if not 0 <= self.correct <= self.total:
            raise DomainError(f"{self.sign}: correct must lie in [0, total]")


@dataclass(frozen=True)
class AnalysisRow:
    sign: str
    correct: int
    total: int
    rate_percent: float
    computed_p: float
    reported_p: float | None
    reported_p_bound: float | None
    significant_at_05: bool
    mismatch: bool


def binomial_tail(k: int, n: int, p0: float) -> float:
    """Exact upper tail P(X >= k) for X ~ Binomial(n, p0).

    Summed in log space (lgamma-based terms, log-sum-exp) so large n stays
    stable; absolute error is far below 1e-12 at questionnaire sizes.
    """
    if not 0.0 < p0 < 1.0:
        raise DomainError("p0 must lie strictly between 0 and 1")
    if n < 0 or not 0 <= k <= n:
        raise DomainError(f"k={k} outside [0, n={n}]")
    if k == 0:
        return 1.0
    log_p = math.log(p0)
    log_q = math.log1p(-p0)
    log_n_fact = math.lgamma(n + 1)
    terms = []
    for i in range(k, n + 1):
        terms.append(
            log_n_fact
            - math.lgamma(i + 1)
            - math.lgamma(n - i + 1)
            + i * log_p
            + (n - i) * log_q
        )
    peak = max(terms)
    total = sum(math.exp(t - peak) for t in terms)
    return min(1.0, math.exp(peak) * total)


def analyze(records, p0: float = 0.25) -> list[AnalysisRow]:
    """Recompute exact tails for every record; rows sorted by sign label."""
    rows = []
    for record in records:
        computed = binomial_tail(record.correct, record.total, p0)
        rate = round(100.0 * record.correct / record.total, 1)
        if record.reported_p is not None:
            mismatch = abs(computed - record.reported_p) > MISMATCH_TOLERANCE
        elif record.reported_p_bound is not None:
            mismatch = computed >= record.reported_p_bound
        else:
            mismatch = False
        rows.append(
            AnalysisRow(
                sign=record.sign,
                correct=record.correct,
                total=record.total,
                rate_percent=rate,
                computed_p=computed,
                reported_p=record.reported_p,
                reported_p_bound=record.reported_p_bound,
                significant_at_05=computed < 0.05,
                mismatch=mismatch,
            )
        )
    rows.sort(key=lambda r: r.sign)
    return rows


def _parse_reported(text: str, line: int) -> tuple[float | None, float | None]:
    text = text.strip()
    if not text:
        return None, None
    if text.startswith("<"):
        try:
            return None, float(text[1:].strip())
        except ValueError as exc:
            raise CsvParseError(line, f"bad p-value bound {text!r}") from exc
    try:
        return float(text), None
    except ValueError as exc:
        raise CsvParseError(line, f"bad p-value {text!r}") from exc


def load_records(text: str) -> list[RecognitionRecord]:
    """Parse recognition-count CSV (header: sign,correct,total,paper_p,notes)."""
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise CsvParseError(1, "empty file") from None
    if [h.strip() for h in header] != CSV_HEADER:
        raise CsvParseError(1, f"expected header {','.join(CSV_HEADER)!r}")
    records = []
    for line_no, row in enumerate(reader, start=2):
        if not row or all(not cell.strip() for cell in row):
            continue
        if len(row) != len(CSV_HEADER):
            raise CsvParseError(line_no, f"expected {len(CSV_HEADER)} fields, got {len(row)}")
        sign, correct_s, total_s, reported_s, notes = row
        try:
            correct = int(correct_s)
            total = int(total_s)
        except ValueError as exc:
            raise CsvParseError(line_no, f"bad count: {exc}") from exc
        reported_p, bound = _parse_reported(reported_s, line_no)
        try:
            records.append(
                RecognitionRecord(
                    sign=sign.strip(),
                    correct=correct,
                    total=total,
                    reported_p=reported_p,
                    reported_p_bound=bound,
                    notes=notes.strip(),
                )
            )
        except DomainError as exc:
            raise CsvParseError(line_no, str(exc)) from exc
    return records


def _format_p(row: AnalysisRow) -> str:
    if row.reported_p is not None:
        return f"{row.reported_p:.4f}"
    if row.reported_p_bound is not None:
        return f"<{row.reported_p_bound:g}"
    return "-"


def format_report(rows, fmt: str = "table") -> str:
    """Render analysis rows as an aligned text table or CSV."""
    if fmt == "csv":
        out = io.StringIO()
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(
            ["sign", "correct", "total", "rate_percent", "computed_p",
             "reported_p", "significant_at_05", "mismatch"]
        )
        for row in rows:
            writer.writerow(
                [
                    row.sign,
                    row.correct,
                    row.total,
                    f"{row.rate_percent:.1f}",
                    f"{row.computed_p:.6g}",
                    _format_p(row),
                    "yes" if row.significant_at_05 else "no",
                    "yes" if row.mismatch else "no",
                ]
            )
        return out.getvalue()
    if fmt != "table":
        raise ValueError(f"unknown format {fmt!r}")

    header = ["sign", "rate%", "k/n", "computed p", "reported p", "sig@.05", "mismatch"]
    body = [
        [
            row.sign,
            f"{row.rate_percent:.1f}",
            f"{row.correct}/{row.total}",
            f"{row.computed_p:.6g}",
            _format_p(row),
            "*" if row.significant_at_05 else "",
            "MISMATCH" if row.mismatch else "",
        ]
        for row in rows
    ]
    widths = [max(len(header[i]), *(len(r[i]) for r in body)) if body else len(header[i])
              for i in range(len(header))]
    lines = ["  ".join(h.ljust(w) for h, w in zip(header, widths)).rstrip()]
    lines.append("  ".join("-" * w for w in widths))
    for r in body:
        lines.append("  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip())
    return "\n".join(lines) + "\n"
