"""
Output rendering

JSON output is stable: keys sorted, two-space indent, rationals as "p/q"
strings and +infinity as "inf". Tables are plain aligned text.
"""

import json
from enum import Enum
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence, Tuple

from symplectic.exceptional import CP2BlowupClass
from symplectic.model_core import H2Class, format_rational

INFINITY = "inf"


def format_class(labels: Sequence[str], B: H2Class) -> str:
    """Render coordinates as a combination of basis labels, e.g. "2L - E1 - E2" """
    terms: List[str] = []
    for label, c in zip(labels, B.coords):
        if c == 0:
            continue
        magnitude = "" if abs(c) == 1 else str(abs(c))
        if not terms:
            terms.append(f"{'-' if c < 0 else ''}{magnitude}{label}")
        else:
            terms.append(f"{'-' if c < 0 else '+'} {magnitude}{label}")
    return " ".join(terms) if terms else "0"


def to_jsonable(value: Any) -> Any:
    if isinstance(value, bool) or value is None:
        return value
    if isinstance(value, Fraction):
        return format_rational(value)
    if isinstance(value, CP2BlowupClass):
        return str(value)
    if isinstance(value, H2Class):
        return list(value.coords)
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    return value


def rational_or_inf(value) -> str:
    return INFINITY if value is None else format_rational(value)


def render_json(payload: Dict[str, Any]) -> str:
    return json.dumps(to_jsonable(payload), sort_keys=True, indent=2) + "\n"


def _cell(value: Any) -> str:
    value = to_jsonable(value)
    if value is None:
        return "-"
    if isinstance(value, bool):
        return "yes" if value else "no"
    if isinstance(value, list):
        return " ".join(_cell(v) for v in value)
    if isinstance(value, dict):
        return ", ".join(f"{k}={_cell(v)}" for k, v in sorted(value.items()))
    return str(value)


def render_table(headers: Sequence[str], rows: Sequence[Sequence[Any]]) -> str:
    cells = [[_cell(v) for v in row] for row in rows]
    widths = [len(h) for h in headers]
    for row in cells:
        for i, c in enumerate(row):
            widths[i] = max(widths[i], len(c))

    def line(values):
        return "  ".join(v.ljust(widths[i]) for i, v in enumerate(values)).rstrip()

    out = [line(headers), line(["-" * w for w in widths])]
    out.extend(line(row) for row in cells)
    return "\n".join(out) + "\n"


def render(
    payload: Dict[str, Any],
    output_format: str,
    table: Optional[Tuple[Sequence[str], Sequence[Sequence[Any]]]] = None,
) -> str:
    """
    Render a command payload

    In table format an explicit (headers, rows) table wins; otherwise the
    payload is shown as key/value pairs.
    """
    if output_format == "json":
        return render_json(payload)
    if table is not None:
        return render_table(*table)
    return render_table(("key", "value"), sorted(payload.items()))
