from __future__ import annotations
import json
import logging
from fractions import Fraction
from typing import Any, Dict, List

from tvbkit.config import settings


def _plain(value: Any) -> Any:
    """Numbers become decimal strings; containers are walked; bools and None stay."""
    if value is None or isinstance(value, (bool, str)):
        return value
    if isinstance(value, int):
        return str(value)
    if isinstance(value, Fraction):
        return str(value) if value.denominator != 1 else str(value.numerator)
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple, set, frozenset)):
        items = sorted(value) if isinstance(value, (set, frozenset)) else value
        return [_plain(v) for v in items]
    return str(value)


def build_report(command: str, certificate: str | None, result: Dict[str, Any]) -> Dict[str, Any]:
    return {
        "schema": settings.SCHEMA,
        "command": command,
        "certificate": certificate if certificate is not None else "n/a",
        "result": _plain(result),
    }


def _human_value(value: Any) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if value is None:
        return "-"
    if isinstance(value, list):
        if all(not isinstance(v, (list, dict)) for v in value):
            return "(" + ",".join(_human_value(v) for v in value) + ")"
        return "[" + ", ".join(_human_value(v) for v in value) + "]"
    if isinstance(value, dict):
        return "{" + ", ".join(f"{k}: {_human_value(v)}" for k, v in value.items()) + "}"
    return str(value)


def render_human(report: Dict[str, Any]) -> str:
    lines: List[str] = [f"{report['command']} (certificate: {report['certificate']})"]
    for key, value in report["result"].items():
        if isinstance(value, list) and value and all(isinstance(v, (list, dict)) for v in value):
            lines.append(f"{key}: {len(value)}")
            lines.extend(f"  {_human_value(v)}" for v in value)
        else:
            lines.append(f"{key}: {_human_value(value)}")
    return "\n".join(lines) + "\n"


def render(report: Dict[str, Any], as_json: bool = False) -> str:
    """Returns the report text; JSON output is key-sorted so repeated runs match byte for byte."""
    if as_json:
        return json.dumps(report, sort_keys=True, indent=2, ensure_ascii=False) + "\n"
    logging.debug("Rendering %s report with %d fields", report["command"], len(report["result"]))
    return render_human(report)
