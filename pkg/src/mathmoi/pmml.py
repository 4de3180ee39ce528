"""Presentation MathML trees: parsing, cleaning and corpus hygiene filters."""

from __future__ import annotations

import enum
import html.entities
import logging
import re
import unicodedata
import xml.etree.ElementTree as ET
from collections import Counter
from dataclasses import dataclass, field, replace
from xml.sax.saxutils import escape, quoteattr

from .errors import EmptyExpressionError, MathMLParseError

log = logging.getLogger(__name__)

TOKEN_TAGS = frozenset({"mi", "mo", "mn", "mtext", "ms"})
EMPTY_TAGS = frozenset({"mspace", "mprescripts", "none"})
INNER_TAGS = frozenset({
    "mrow", "msub", "msup", "msubsup", "mfrac", "msqrt", "mroot", "mover",
    "munder", "munderover", "mtable", "mtr", "mtd", "mstyle", "mpadded",
    "menclose", "mphantom", "merror", "mmultiscripts",
})
PRESENTATION_TAGS = TOKEN_TAGS | EMPTY_TAGS | INNER_TAGS

INVISIBLE_TIMES = "⁢"
FUNCTION_APPLICATION = "⁡"
INVISIBLE_OPERATORS = {INVISIBLE_TIMES: "ivt", FUNCTION_APPLICATION: "fa"}

TEX_ENCODINGS = ("application/x-tex", "application/x-latex", "TeX", "LaTeX")
_XML_WS = " \t\r\n"
_ENTITY = re.compile(r"&([A-Za-z][A-Za-z0-9]*);")
_XML_ENTITIES = {"amp", "lt", "gt", "quot", "apos"}
_FOOTNOTE_TEX = re.compile(r"\{\}\^(\{.*\}|\\[A-Za-z]+|\\?.)", re.S)


@dataclass(frozen=True, slots=True)
class MathNode:
    """One presentation element.

    Token and empty elements carry ``content`` (``""`` for empty elements) and
    no children; layout elements carry ``children`` and ``content is None``.
    ``op`` is ``"ivt"``/``"fa"`` for classified invisible operators.
    """

    tag: str
    content: str | None = None
    children: tuple[MathNode, ...] = ()
    op: str | None = None

    @property
    def is_leaf(self) -> bool:
        return self.content is not None

    def iter(self):
        """Pre-order traversal over the subtree."""
        stack = [self]
        while stack:
            node = stack.pop()
            yield node
            stack.extend(reversed(node.children))

    def __len__(self):
        return sum(1 for _ in self.iter())


def leaf(tag, content=""):
    return MathNode(tag, content)


def node(tag, *children):
    return MathNode(tag, None, tuple(children))


@dataclass(frozen=True, slots=True)
class MathTree:
    """A cleaned expression; ``root`` is the single child of ``<math>``."""

    root: MathNode
    source_tex: str | None = None
    # hygiene observations made while cleaning, consumed by filter_formula
    rejected_tags: tuple[str, ...] = field(default=(), compare=False)
    had_svg: bool = field(default=False, compare=False)


class RejectReason(str, enum.Enum):
    FOOTNOTE = "footnote-pattern"
    SVG = "svg-content"
    UNKNOWN_TAG = "unknown-tag"
    EMPTY = "empty-after-clean"


@dataclass(frozen=True)
class FilterVerdict:
    keep: bool
    reason: RejectReason | None = None

    def __post_init__(self):
        if self.keep == (self.reason is not None):
            raise ValueError("reason must be set exactly when keep is false")


KEEP = FilterVerdict(True)


def _local(tag):
    if not isinstance(tag, str):
        return None  # comments, processing instructions
    return tag.rsplit("}", 1)[-1]


def _resolve_entities(text):
    def sub(m):
        name = m.group(1)
        if name in _XML_ENTITIES:
            return m.group(0)
        value = html.entities.html5.get(name + ";")
        return escape(value, {'"': "&quot;"}) if value is not None else m.group(0)

    return _ENTITY.sub(sub, text)


def _byte_offset(data: bytes, line: int, column: int) -> int:
    lines = data.split(b"\n")
    return sum(len(x) + 1 for x in lines[: max(line - 1, 0)]) + column


def _text_content(el):
    parts = [el.text or ""]
    for child in el:
        parts.append(child.tail or "")
    return unicodedata.normalize("NFC", "".join(parts).strip(_XML_WS))


class _Cleaner:
    def __init__(self):
        self.rejected = Counter()
        self.svg = False
        self.tex = None

    def reject(self, el, name):
        self.rejected[name] += 1
        if name == "svg":
            self.svg = True
        for sub in el.iter():
            if _local(sub.tag) == "svg":
                self.svg = True

    def presentation_branch(self, semantics):
        """Children of a ``semantics`` wrapper that carry presentation markup."""
        primary = None
        alternate = None
        for c in semantics:
            name = _local(c.tag)
            if name == "annotation":
                if c.get("encoding", "") in TEX_ENCODINGS and self.tex is None:
                    self.tex = (c.text or "").strip()
            elif name == "annotation-xml":
                if "presentation" in c.get("encoding", "").lower() and alternate is None:
                    alternate = [x for x in c if _local(x.tag) is not None]
            elif name is not None and primary is None:
                primary = c
        # parallel markup may lead with content MathML and keep pMML in an annotation
        if alternate is not None and (primary is None or _local(primary.tag) not in PRESENTATION_TAGS):
            return alternate
        return [primary] if primary is not None else []

    def convert(self, el):
        name = _local(el.tag)
        if name == "semantics":
            nodes = [n for c in self.presentation_branch(el) if (n := self.convert(c)) is not None]
            if len(nodes) == 1:
                return nodes[0]
            return MathNode("mrow", None, tuple(nodes)) if nodes else None
        if name in ("annotation", "annotation-xml"):
            return None
        if name not in PRESENTATION_TAGS:
            self.reject(el, name)
            return None
        if name in EMPTY_TAGS:
            for c in el:
                if _local(c.tag) is not None:
                    self.reject(c, _local(c.tag))
            return MathNode(name, "")
        if name in TOKEN_TAGS:
            for c in el:
                if _local(c.tag) is not None:
                    self.reject(c, _local(c.tag))
            return MathNode(name, _text_content(el))
        kids = [n for c in el if _local(c.tag) is not None and (n := self.convert(c)) is not None]
        return MathNode(name, None, tuple(kids))


def parse_mathml(xml_text: str | bytes) -> MathTree:
    """Parse MathML markup into a cleaned, classified presentation tree.

    Attributes, ``semantics`` wrappers and annotations are removed, unknown
    elements are stripped (and recorded for :func:`filter_formula`), leaf text
    is NFC-normalized and invisible operators are classified.
    """
    if isinstance(xml_text, bytes):
        xml_text = xml_text.decode("utf-8")
    data = _resolve_entities(xml_text).encode("utf-8")
    try:
        root = ET.fromstring(data)
    except ET.ParseError as exc:
        line, col = exc.position
        raise MathMLParseError(f"malformed XML: {exc}", _byte_offset(data, line, col)) from None
    if _local(root.tag) != "math":
        raise MathMLParseError(f"expected <math> root, found <{_local(root.tag)}>", 0)

    elements = [c for c in root if _local(c.tag) is not None]
    if not elements:
        raise EmptyExpressionError("empty <math> element")

    cleaner = _Cleaner()
    nodes = [n for c in elements if (n := cleaner.convert(c)) is not None]
    if len(nodes) == 1:
        top = nodes[0]
    else:
        top = MathNode("mrow", None, tuple(nodes))
    tex = cleaner.tex if cleaner.tex is not None else root.get("alttext")
    if cleaner.rejected:
        log.debug("stripped tags %s", dict(cleaner.rejected))
    tree = MathTree(
        top,
        source_tex=tex,
        rejected_tags=tuple(sorted(cleaner.rejected.elements())),
        had_svg=cleaner.svg,
    )
    return normalize_invisible_operators(tree)


def _classify(n: MathNode) -> MathNode:
    if n.is_leaf:
        if n.tag == "mo" and n.content in INVISIBLE_OPERATORS:
            op = INVISIBLE_OPERATORS[n.content]
            return n if n.op == op else replace(n, op=op)
        return n
    kids = tuple(_classify(c) for c in n.children)
    if all(a is b for a, b in zip(kids, n.children)):
        return n
    return replace(n, children=kids)


def normalize_invisible_operators(tree: MathTree) -> MathTree:
    """Mark ``mo`` leaves holding U+2062/U+2061 as ``ivt``/``fa`` operators."""
    root = _classify(tree.root)
    return tree if root is tree.root else replace(tree, root=root)


def _unwrap(n: MathNode) -> MathNode:
    while n.tag == "mrow" and len(n.children) == 1:
        n = n.children[0]
    return n


def is_footnote_tex(tex: str) -> bool:
    compact = "".join(tex.split())
    return _FOOTNOTE_TEX.fullmatch(compact) is not None


def filter_formula(tree: MathTree) -> FilterVerdict:
    if tree.source_tex is not None and is_footnote_tex(tree.source_tex):
        return FilterVerdict(False, RejectReason.FOOTNOTE)
    top = _unwrap(tree.root)
    if (top.tag == "msup" and top.children and top.children[0].tag == "mrow"
            and not top.children[0].children):
        return FilterVerdict(False, RejectReason.FOOTNOTE)
    if tree.had_svg:
        return FilterVerdict(False, RejectReason.SVG)
    if tree.rejected_tags:
        return FilterVerdict(False, RejectReason.UNKNOWN_TAG)
    if not tree.root.is_leaf and not tree.root.children:
        return FilterVerdict(False, RejectReason.EMPTY)
    return KEEP


def to_xml(tree: MathTree | MathNode) -> str:
    """Render a cleaned tree back to MathML markup."""
    if isinstance(tree, MathTree):
        attr = f" alttext={quoteattr(tree.source_tex)}" if tree.source_tex is not None else ""
        return f"<math{attr}>{_node_xml(tree.root)}</math>"
    return _node_xml(tree)


def _node_xml(n: MathNode) -> str:
    if n.is_leaf:
        return f"<{n.tag}>{escape(n.content)}</{n.tag}>"
    return f"<{n.tag}>{''.join(_node_xml(c) for c in n.children)}</{n.tag}>"
