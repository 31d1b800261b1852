"""Bundle documents: a line-oriented, section-based text format.

    # comment
    [fan]
    dim = 2
    rays = [[1,0],[0,1],[-1,-1]]
    max_cones = [[0,1],[1,2],[0,2]]
    [ideal]
    generators = [[1,1,1]]
    [diagram]
    rows = [[1,0,0],[0,1,0],[0,0,1]]
    [fixtures]
    extra_columns = [[2,2,2]]
    extra_degrees = [[6,2]]
    extra_M_rows = [[...]]

Values are integers, rationals written p/q, or bracketed lists of values;
a list may continue over several lines until its brackets balance.
"""
from __future__ import annotations
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, List, Tuple

from tvbkit.core import exact
from tvbkit.core.matroid import LinearIdealMatrix
from tvbkit.core.toric import Fan
from tvbkit.errors import ParseError, ValidationError
from tvbkit.services.bundle_service import ExtraGenerator, PEClass, ToricVectorBundle

SECTIONS = {
    "fan": {"dim", "rays", "max_cones"},
    "ideal": {"generators"},
    "diagram": {"rows"},
    "fixtures": {"extra_columns", "extra_degrees", "extra_M_rows"},
}

_TOKEN = re.compile(r"\s*(?:(?P<num>-?\d+(?:/\d+)?(?P<bad>[.eE]\d*)?)|(?P<sym>[\[\],]))")
_SECTION = re.compile(r"^\[(?P<name>[A-Za-z_]+)\]$")
_ASSIGN = re.compile(r"^(?P<key>[A-Za-z_][A-Za-z_0-9]*)\s*=\s*(?P<value>.*)$")


@dataclass
class BundleDocument:
    dim: int | None = None
    rays: List[List[int]] = field(default_factory=list)
    max_cones: List[List[int]] = field(default_factory=list)
    generators: List[List[Fraction]] | None = None
    rows: List[List[int]] | None = None
    extra_columns: List[List[int]] = field(default_factory=list)
    extra_degrees: List[List[int]] = field(default_factory=list)
    extra_M_rows: List[List[int]] = field(default_factory=list)

    @property
    def has_bundle(self) -> bool:
        return self.rows is not None

    def to_fan(self) -> Fan:
        if self.dim is None:
            raise ValidationError("document has no [fan] dim")
        return Fan.from_lists(self.dim, self.rays, self.max_cones)

    def to_ideal(self) -> LinearIdealMatrix:
        if self.rows is None:
            raise ValidationError("document has no [diagram] section")
        m = len(self.rows[0]) if self.rows else None
        return LinearIdealMatrix.from_rows(self.generators or [], m)

    def to_bundle(self, validate: bool = True) -> ToricVectorBundle:
        if len(self.extra_columns) != len(self.extra_degrees):
            raise ValidationError("extra_columns and extra_degrees must have the same length")
        extra = [
            ExtraGenerator(column=tuple(col), degree=PEClass.from_vector(deg))
            for col, deg in zip(self.extra_columns, self.extra_degrees)
        ]
        return ToricVectorBundle(
            self.to_fan(),
            self.to_ideal(),
            self.rows,
            extra=extra,
            extra_M_rows=self.extra_M_rows,
            validate=validate,
        )


def _parse_value(text: str, line: int, column: int) -> Any:
    pos = 0
    tokens: List[Tuple[str, Any, int]] = []
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        mt = _TOKEN.match(text, pos)
        if not mt:
            raise ParseError(f"unexpected character {text[pos:].strip()[0]!r}", line, column + pos + 1)
        start = mt.start("num") if mt.group("num") else mt.start("sym")
        if mt.group("bad") is not None:
            raise ParseError(f"floating-point literal {mt.group('num')!r}; use p/q", line, column + start + 1)
        if mt.group("num"):
            num = mt.group("num")
            if "/" in num and int(num.split("/")[1]) == 0:
                raise ParseError("zero denominator", line, column + start + 1)
            tokens.append(("num", Fraction(num), start))
        else:
            tokens.append((mt.group("sym"), None, start))
        pos = mt.end()

    def parse(k: int) -> Tuple[Any, int]:
        if k >= len(tokens):
            raise ParseError("unexpected end of value", line, column + len(text) + 1)
        kind, val, start = tokens[k]
        if kind == "num":
            return val, k + 1
        if kind != "[":
            raise ParseError(f"unexpected {kind!r}", line, column + start + 1)
        items: List[Any] = []
        k += 1
        if k < len(tokens) and tokens[k][0] == "]":
            return items, k + 1
        while True:
            item, k = parse(k)
            items.append(item)
            if k >= len(tokens):
                raise ParseError("unterminated list", line, column + len(text) + 1)
            kind, _, start = tokens[k]
            if kind == "]":
                return items, k + 1
            if kind != ",":
                raise ParseError(f"expected ',' or ']' but found {kind!r}", line, column + start + 1)
            k += 1

    value, k = parse(0)
    if k != len(tokens):
        raise ParseError("trailing characters after value", line, column + tokens[k][2] + 1)
    return value


def _ints(value: Any, key: str, line: int, column: int, depth: int) -> Any:
    if depth == 0:
        if isinstance(value, list) or Fraction(value).denominator != 1:
            raise ParseError(f"{key}: expected an integer", line, column + 1)
        return int(value)
    if not isinstance(value, list):
        raise ParseError(f"{key}: expected a list", line, column + 1)
    return [_ints(v, key, line, column, depth - 1) for v in value]


def _rationals(value: Any, key: str, line: int, column: int) -> List[List[Fraction]]:
    if not isinstance(value, list) or any(not isinstance(r, list) for r in value):
        raise ParseError(f"{key}: expected a list of rows", line, column + 1)
    for r in value:
        if any(isinstance(x, list) for x in r):
            raise ParseError(f"{key}: rows must hold numbers", line, column + 1)
    return [[exact.qq(x) for x in r] for r in value]


def parse(text: str) -> BundleDocument:
    doc = BundleDocument()
    section: str | None = None
    seen: Dict[Tuple[str, str], int] = {}
    pending: Tuple[str, str, int, int] | None = None  # key, value so far, line, column

    def commit(key: str, raw: str, line: int, column: int) -> None:
        value = _parse_value(raw, line, column)
        if key == "dim":
            doc.dim = _ints(value, key, line, column, 0)
        elif key in ("rays", "max_cones", "rows", "extra_columns", "extra_degrees", "extra_M_rows"):
            setattr(doc, key, _ints(value, key, line, column, 2))
        elif key == "generators":
            doc.generators = _rationals(value, key, line, column)

    for lineno, raw_line in enumerate(text.splitlines(), start=1):
        content = raw_line.split("#", 1)[0].rstrip()
        if pending is not None:
            key, acc, line, column = pending
            acc = acc + " " + content.strip()
            if acc.count("[") > acc.count("]"):
                pending = (key, acc, line, column)
                continue
            pending = None
            commit(key, acc, line, column)
            continue
        stripped = content.strip()
        if not stripped:
            continue
        ms = _SECTION.match(stripped)
        if ms:
            section = ms.group("name")
            if section not in SECTIONS:
                raise ParseError(f"unknown section [{section}]", lineno, raw_line.index("[") + 1)
            continue
        ma = _ASSIGN.match(stripped)
        if not ma:
            raise ParseError("expected 'key = value' or a [section] header", lineno, len(raw_line) - len(raw_line.lstrip()) + 1)
        key = ma.group("key")
        if section is None:
            raise ParseError(f"key {key!r} outside of any section", lineno, 1)
        if key not in SECTIONS[section]:
            raise ParseError(f"unknown key {key!r} in [{section}]", lineno, raw_line.index(key) + 1)
        if (section, key) in seen:
            raise ParseError(f"duplicate key {key!r} (first set on line {seen[(section, key)]})", lineno, raw_line.index(key) + 1)
        seen[(section, key)] = lineno
        value = ma.group("value")
        column = raw_line.index(value) if value else len(raw_line)
        if value.count("[") > value.count("]"):
            pending = (key, value, lineno, column)
            continue
        commit(key, value, lineno, column)
    if pending is not None:
        raise ParseError(f"unterminated list for {pending[0]!r}", pending[2], pending[3] + 1)
    if doc.dim is None:
        raise ParseError("missing [fan] dim", 0, 0)
    if doc.rows is not None and doc.generators is None:
        doc.generators = []
    return doc


def load(path: str) -> BundleDocument:
    with open(path, "r", encoding="utf-8") as fh:
        return parse(fh.read())


def _fmt(v: Any) -> str:
    if isinstance(v, (list, tuple)):
        return "[" + ",".join(_fmt(x) for x in v) + "]"
    return str(v)


def render(E: ToricVectorBundle, title: str | None = None) -> str:
    """Document text for a bundle (fixtures are not rendered)."""
    lines = []
    if title:
        lines.append(f"# {title}")
    lines += [
        "[fan]",
        f"dim = {E.fan.dim}",
        f"rays = {_fmt(E.fan.rays)}",
        f"max_cones = {_fmt(E.fan.max_cones)}",
        "",
        "[ideal]",
        f"generators = {_fmt(E.ideal.coeffs)}",
        "",
        "[diagram]",
        f"rows = {_fmt(E.diagram)}",
    ]
    return "\n".join(lines) + "\n"
