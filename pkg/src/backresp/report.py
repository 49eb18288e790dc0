"""Rendering responsibility reports as JSON, CSV or a text table."""

from __future__ import annotations

import csv
import io
import json
from fractions import Fraction

from .responsibility import ResponsibilityReport

DEFAULT_DIGITS = 4


def format_decimal(x, digits: int = DEFAULT_DIGITS) -> str:
    """Fixed-point rendering with round-half-even on the exact value."""
    q = round(Fraction(x) * 10**digits)
    sign = "-" if q < 0 else ""
    q = abs(q)
    if digits == 0:
        return f"{sign}{q}"
    whole, frac = divmod(q, 10**digits)
    return f"{sign}{whole}.{frac:0{digits}d}"


def format_fraction(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _ratio(x: Fraction) -> dict:
    return {"num": x.numerator, "den": x.denominator}


def _jsonable(v):
    if isinstance(v, Fraction):
        return _ratio(v)
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    return v


def to_dict(report: ResponsibilityReport) -> dict:
    total = report.sum
    doc = {
        "variant": report.variant.value,
        "index": report.index,
        "grouping": report.grouping,
        "players": [
            {
                "name": p.name,
                "exact": _ratio(p.exact) if p.exact is not None else None,
                "estimate": p.estimate,
                "samples_per_size": p.samples_per_size,
            }
            for p in report.players
        ],
        "sum": _ratio(total) if isinstance(total, Fraction) else total,
        "safe_path": report.safe_path,
        "warnings": list(report.warnings),
        "diagnostics": _jsonable(report.diagnostics),
    }
    if report.plan is not None:
        doc["plan"] = {"seed": report.plan.seed, "allocation": list(report.plan.allocation)}
    return doc


def to_json(report: ResponsibilityReport) -> str:
    return json.dumps(to_dict(report), sort_keys=True, indent=2) + "\n"


def to_csv(report: ResponsibilityReport, digits: int = DEFAULT_DIGITS) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["name", "value", "exact_fraction"])
    for p in report.players:
        if p.exact is not None:
            w.writerow([p.name, format_decimal(p.exact, digits), format_fraction(p.exact)])
        else:
            w.writerow([p.name, format_decimal(p.estimate, digits), ""])
    return buf.getvalue()


def _sort_key(p):
    return (-(p.exact if p.exact is not None else Fraction(p.estimate)), p.name)


def to_table(report: ResponsibilityReport, digits: int = DEFAULT_DIGITS) -> str:
    rows = []
    for p in sorted(report.players, key=_sort_key):
        if p.exact is not None:
            rows.append((p.name, format_decimal(p.exact, digits), format_fraction(p.exact)))
        else:
            rows.append((p.name, format_decimal(p.estimate, digits), "~"))
    header = ("player", "value", "fraction")
    widths = [max(len(r[i]) for r in rows + [header]) for i in range(3)]

    def line(r):
        return f"{r[0]:<{widths[0]}}  {r[1]:>{widths[1]}}  {r[2]:>{widths[2]}}".rstrip()

    out = [
        f"# {report.variant.value} responsibility, index={report.index}, players={report.grouping}",
        line(header),
        line(tuple("-" * w for w in widths)),
    ]
    out += [line(r) for r in rows]
    total = report.sum
    shown = format_fraction(total) if isinstance(total, Fraction) else format_decimal(total, digits)
    out.append(f"# sum = {shown}, safe path = {'yes' if report.safe_path else 'no'}")
    for k, v in report.diagnostics.items():
        if isinstance(v, Fraction):
            v = format_fraction(v)
        elif isinstance(v, list):
            v = " ".join(map(str, v))
        out.append(f"# {k} = {v}")
    out += [f"# warning: {w}" for w in report.warnings]
    return "\n".join(out) + "\n"


RENDERERS = {"json": lambda r, d: to_json(r), "csv": to_csv, "table": to_table}


def render(report: ResponsibilityReport, fmt: str = "table", digits: int = DEFAULT_DIGITS) -> str:
    return RENDERERS[fmt](report, digits)
