"""The TV layout DSL: document model, canonical emitter and parser.

Concrete syntax, one statement per line::

    Col(Chan("Home", "Movies", "Settings"))
    Row(Tab("RECOMMEND"), Tab("VARIETY", selected), Tab("MOVIE"))
    Row(PicInfo(large, "img_01", "Call Me By Fire"))

Each category has a fixed positional property schema (see ``SCHEMAS``).
Whitespace, including newlines, is insignificant between tokens.
"""

from __future__ import annotations

import enum
import itertools
import re
from dataclasses import dataclass, field
from typing import Optional

from .errors import DslSyntaxError, UnmappedCategory
from .layout import LayoutSolution
from .transform import SizeClass, TvGroupCategory, TvPage


class Layout(str, enum.Enum):
    ROW = "Row"
    COL = "Col"


class PropertyName(str, enum.Enum):
    TITLE = "Title"
    SIZE = "Size"
    TEXT = "Text"
    SELECTED = "Selected"
    SOURCE = "Source"


CATEGORY_TOKENS: dict[TvGroupCategory, str] = {
    TvGroupCategory.TOOL_BAR: "ToolBar",
    TvGroupCategory.LIST_VIEW: "List",
    TvGroupCategory.TAB_LAYOUT: "Tab",
    TvGroupCategory.SEARCH: "Srch",
    TvGroupCategory.GRID_LAYOUT: "Grid",
    TvGroupCategory.VIDEO_MUSIC_PLAYER: "Player",
    TvGroupCategory.PIC_INFO: "PicInfo",
    TvGroupCategory.ICON_INFO: "IcoInfo",
    TvGroupCategory.CHANNEL: "Chan",
}
TOKEN_CATEGORIES = {token: cat for cat, token in CATEGORY_TOKENS.items()}

SIZE_LITERALS = tuple(s.value for s in SizeClass)
FLAG_LITERAL = "selected"

# slot kinds: "size", "string", "flag" (optional, last), "strings" (one or more, last)
_N = PropertyName
SCHEMAS: dict[str, tuple[tuple[str, PropertyName], ...]] = {
    "ToolBar": (("string", _N.TEXT),),
    "Srch": (("string", _N.TEXT),),
    "Tab": (("string", _N.TEXT), ("flag", _N.SELECTED)),
    "Chan": (("strings", _N.TEXT),),
    "PicInfo": (("size", _N.SIZE), ("string", _N.SOURCE), ("string", _N.TITLE)),
    "Grid": (("size", _N.SIZE), ("string", _N.SOURCE), ("string", _N.TEXT)),
    "Player": (("size", _N.SIZE), ("string", _N.SOURCE), ("string", _N.TITLE)),
    "List": (("string", _N.SOURCE), ("string", _N.TEXT)),
    "IcoInfo": (("string", _N.SOURCE), ("string", _N.TEXT)),
}
del _N


@dataclass(frozen=True)
class DslSourceSpan:
    """Where a node came from: its indices and UTF-8 byte offsets ``[start, end)``."""

    statement: int
    group: Optional[int]
    property: Optional[int]
    start: int
    end: int

    def contains(self, other: "DslSourceSpan") -> bool:
        return self.start <= other.start and other.end <= self.end


@dataclass
class DslProperty:
    name: PropertyName
    value: Optional[str] = None  # None for the Selected flag
    span: Optional[DslSourceSpan] = field(default=None, compare=False, repr=False)


@dataclass
class DslGroup:
    category: str
    properties: list[DslProperty] = field(default_factory=list)
    span: Optional[DslSourceSpan] = field(default=None, compare=False, repr=False)

    def get(self, name: PropertyName) -> list[Optional[str]]:
        return [p.value for p in self.properties if p.name is name]


@dataclass
class DslStatement:
    layout: Layout
    groups: list[DslGroup] = field(default_factory=list)
    span: Optional[DslSourceSpan] = field(default=None, compare=False, repr=False)


@dataclass
class DslDocument:
    statements: list[DslStatement] = field(default_factory=list)


# -- emitting ---------------------------------------------------------------

_ESCAPES = {'"': '\\"', "\\": "\\\\", "\n": "\\n", "\t": "\\t", "\r": "\\r"}


def quote(text: str) -> str:
    out = ['"']
    for ch in text:
        code = ord(ch)
        if ch in _ESCAPES:
            out.append(_ESCAPES[ch])
        elif code < 0x20 or code == 0x7F or 0xD800 <= code <= 0xDFFF:
            out.append(f"\\u{code:04x}")
        else:
            out.append(ch)
    out.append('"')
    return "".join(out)


def _format_group(group: DslGroup) -> str:
    schema = SCHEMAS.get(group.category)
    if schema is None:
        raise UnmappedCategory(f"unknown DSL category {group.category!r}")
    args = []
    for prop in group.properties:
        if prop.name is PropertyName.SIZE:
            if prop.value not in SIZE_LITERALS:
                raise ValueError(f"bad size literal {prop.value!r}")
            args.append(prop.value)
        elif prop.name is PropertyName.SELECTED:
            args.append(FLAG_LITERAL)
        else:
            args.append(quote(prop.value or ""))
    return f"{group.category}({', '.join(args)})"


def format_dsl(doc: DslDocument) -> str:
    """Canonical text for ``doc``; the empty document formats to ``""``."""
    lines = []
    for stmt in doc.statements:
        inner = ", ".join(_format_group(g) for g in stmt.groups)
        lines.append(f"{stmt.layout.value}({inner})\n")
    return "".join(lines)


def _item_group(token: str, size: SizeClass, item) -> DslGroup:
    props = []
    for slot, name in SCHEMAS[token]:
        if slot == "size":
            props.append(DslProperty(name, size.value))
        elif slot == "flag":
            if item.selected:
                props.append(DslProperty(name))
        elif name is PropertyName.SOURCE:
            props.append(DslProperty(name, item.source))
        else:
            props.append(DslProperty(name, item.text))
    return DslGroup(token, props)


def build_document(page: TvPage, solution: LayoutSolution) -> DslDocument:
    """One statement per realized row; the channel rail becomes a single column."""
    placed = solution.by_id()
    pruned = set(solution.pruned)
    statements = []
    for group in page.groups:
        token = CATEGORY_TOKENS.get(group.category)
        if token is None:
            raise UnmappedCategory(f"{group.category!r} has no DSL token")
        realized = []
        for item in group.items:
            if item.id in placed:
                realized.append((placed[item.id].row, item))
            elif item.id not in pruned:
                raise ValueError(f"item {item.id} is neither placed nor pruned")
        if not realized:
            continue
        if group.category is TvGroupCategory.CHANNEL:
            texts = [DslProperty(PropertyName.TEXT, item.text) for _, item in realized]
            statements.append(DslStatement(Layout.COL, [DslGroup(token, texts)]))
            continue
        for _, row in itertools.groupby(realized, key=lambda pair: pair[0]):
            groups = [_item_group(token, group.size_class, item) for _, item in row]
            statements.append(DslStatement(Layout.ROW, groups))
    return DslDocument(statements)


def emit_dsl(page: TvPage, solution: LayoutSolution) -> str:
    return format_dsl(build_document(page, solution))


# -- parsing ----------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<string>")
  | (?P<punct>[(),])
    """,
    re.VERBOSE,
)
_SIMPLE_ESCAPES = {'"': '"', "\\": "\\", "n": "\n", "t": "\t", "r": "\r"}


@dataclass(frozen=True)
class _Token:
    kind: str  # ident, string, punct, eof
    value: str
    start: int
    end: int


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self._byte_prefix: Optional[list[int]] = None
        self.tokens = self._lex()
        self.pos = 0

    # positions

    def _where(self, offset: int) -> tuple[int, int]:
        line = self.text.count("\n", 0, offset) + 1
        column = offset - (self.text.rfind("\n", 0, offset) + 1) + 1
        return line, column

    def _byte(self, offset: int) -> int:
        if self.text.isascii():
            return offset
        if self._byte_prefix is None:
            sizes = (len(ch.encode("utf-8", "surrogatepass")) for ch in self.text)
            self._byte_prefix = [0, *itertools.accumulate(sizes)]
        return self._byte_prefix[offset]

    def error(self, message: str, offset: int, expected=()) -> DslSyntaxError:
        line, column = self._where(offset)
        return DslSyntaxError(message, line, column, expected, offset=self._byte(offset))

    # lexing

    def _lex(self) -> list[_Token]:
        text, i, out = self.text, 0, []
        while i < len(text):
            m = _TOKEN_RE.match(text, i)
            if m is None:
                raise self.error(f"unexpected character {text[i]!r}", i)
            kind = m.lastgroup
            if kind == "ws":
                i = m.end()
            elif kind == "string":
                value, end = self._string(i)
                out.append(_Token("string", value, i, end))
                i = end
            else:
                out.append(_Token(kind, m.group(), i, m.end()))
                i = m.end()
        out.append(_Token("eof", "", len(text), len(text)))
        return out

    def _string(self, start: int) -> tuple[str, int]:
        text, i, chars = self.text, start + 1, []
        while True:
            if i >= len(text):
                raise self.error("unterminated string", start, ['"'])
            ch = text[i]
            if ch == '"':
                return "".join(chars), i + 1
            if ch == "\n":
                raise self.error("newline inside string", i, ['"'])
            if ch != "\\":
                chars.append(ch)
                i += 1
                continue
            esc = text[i + 1 : i + 2]
            if esc in _SIMPLE_ESCAPES:
                chars.append(_SIMPLE_ESCAPES[esc])
                i += 2
            elif esc == "u" and re.fullmatch(r"[0-9a-fA-F]{4}", text[i + 2 : i + 6]):
                chars.append(chr(int(text[i + 2 : i + 6], 16)))
                i += 6
            else:
                raise self.error("invalid escape sequence", i, ['\\"', "\\\\", "\\n", "\\t", "\\r", "\\uXXXX"])

    # grammar

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def take(self) -> _Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect_punct(self, value: str) -> _Token:
        tok = self.peek()
        if tok.kind != "punct" or tok.value != value:
            raise self.error(f"unexpected {self._describe(tok)}", tok.start, [repr(value)])
        return self.take()

    @staticmethod
    def _describe(tok: _Token) -> str:
        if tok.kind == "eof":
            return "end of input"
        if tok.kind == "string":
            return "string"
        return repr(tok.value)

    def document(self) -> DslDocument:
        statements = []
        while self.peek().kind != "eof":
            statements.append(self.statement(len(statements)))
        return DslDocument(statements)

    def statement(self, si: int) -> DslStatement:
        tok = self.peek()
        if tok.kind != "ident" or tok.value not in ("Row", "Col"):
            raise self.error(f"unexpected {self._describe(tok)}", tok.start, ["Row", "Col"])
        self.take()
        self.expect_punct("(")
        groups = [self.group(si, 0)]
        while self.peek().kind == "punct" and self.peek().value == ",":
            self.take()
            groups.append(self.group(si, len(groups)))
        close = self.peek()
        if close.kind != "punct" or close.value != ")":
            raise self.error(f"unexpected {self._describe(close)}", close.start, ["','", "')'"])
        self.take()
        span = DslSourceSpan(si, None, None, self._byte(tok.start), self._byte(close.end))
        return DslStatement(Layout(tok.value), groups, span)

    def group(self, si: int, gi: int) -> DslGroup:
        tok = self.peek()
        if tok.kind != "ident" or tok.value not in SCHEMAS:
            raise self.error(f"unknown category {self._describe(tok)}", tok.start, sorted(SCHEMAS))
        self.take()
        self.expect_punct("(")
        props: list[DslProperty] = []

        def add(name: PropertyName, value: Optional[str], t: _Token):
            span = DslSourceSpan(si, gi, len(props), self._byte(t.start), self._byte(t.end))
            props.append(DslProperty(name, value, span))

        for n, (slot, name) in enumerate(SCHEMAS[tok.value]):
            if slot == "flag":
                if self.peek().kind == "punct" and self.peek().value == ",":
                    self.take()
                    flag = self.peek()
                    if flag.kind != "ident" or flag.value != FLAG_LITERAL:
                        raise self.error(f"unexpected {self._describe(flag)}", flag.start, [FLAG_LITERAL])
                    add(name, None, self.take())
                continue
            if n > 0:
                self.expect_punct(",")
            arg = self.peek()
            if slot == "size":
                if arg.kind != "ident" or arg.value not in SIZE_LITERALS:
                    raise self.error(f"bad size literal {self._describe(arg)}", arg.start, SIZE_LITERALS)
                add(name, self.take().value, arg)
                continue
            if arg.kind != "string":
                raise self.error(f"unexpected {self._describe(arg)}", arg.start, ["string"])
            add(name, self.take().value, arg)
            if slot == "strings":
                while self.peek().kind == "punct" and self.peek().value == ",":
                    self.take()
                    more = self.peek()
                    if more.kind != "string":
                        raise self.error(f"unexpected {self._describe(more)}", more.start, ["string"])
                    add(name, self.take().value, more)
        close = self.expect_punct(")")
        span = DslSourceSpan(si, gi, None, self._byte(tok.start), self._byte(close.end))
        return DslGroup(tok.value, props, span)


def parse_dsl(text: str) -> DslDocument:
    """Parse DSL text; any malformed input raises DslSyntaxError."""
    if not isinstance(text, str):
        raise TypeError("parse_dsl expects a str")
    return _Parser(text).document()


def canonicalize(text: str) -> str:
    return format_dsl(parse_dsl(text))
