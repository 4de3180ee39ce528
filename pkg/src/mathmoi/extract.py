"""Canonical string keys, complexity, and enumeration of identifier-bearing subtrees.

Key grammar::

    key     := leaf | inner
    leaf    := TAG ":" content          e.g. mi:x
    inner   := TAG "(" [key ("," key)*] ")"
    content := text with "\\" "(" ")" "," ":" escaped by a backslash

Classified invisible operators serialize as ``mo:ivt`` / ``mo:fa``; an ``mo``
whose literal text is ``ivt`` or ``fa`` is written ``mo:\\ivt`` / ``mo:\\fa``.
Display mode reproduces the unescaped surface form and is not invertible.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import KeyDecodeError
from .pmml import (
    EMPTY_TAGS,
    INNER_TAGS,
    INVISIBLE_OPERATORS,
    TOKEN_TAGS,
    MathNode,
    MathTree,
)

_ESCAPES = str.maketrans({"\\": "\\\\", "(": "\\(", ")": "\\)", ",": "\\,", ":": "\\:"})
_DISPLAY = str.maketrans({ch: name for ch, name in INVISIBLE_OPERATORS.items()})
_OP_CHAR = {name: ch for ch, name in INVISIBLE_OPERATORS.items()}
_SPECIAL = frozenset("\\(),:")


@dataclass(frozen=True, slots=True)
class MoiOccurrence:
    key: str
    complexity: int


def _root(tree):
    return tree.root if isinstance(tree, MathTree) else tree


def _leaf_key(n: MathNode) -> str:
    if n.op is not None:
        return f"{n.tag}:{n.op}"
    text = n.content.translate(_ESCAPES)
    if n.tag == "mo" and n.content in _OP_CHAR:
        text = "\\" + text
    return f"{n.tag}:{text}"


def _display_leaf(n: MathNode) -> str:
    return f"{n.tag}:{n.op or n.content.translate(_DISPLAY)}"


def serialize(tree: MathTree | MathNode, display: bool = False) -> str:
    """Canonical key of a tree; ``display=True`` gives the unescaped form."""
    leaf_key = _display_leaf if display else _leaf_key

    def ser(n):
        if n.content is not None:
            return leaf_key(n)
        return f"{n.tag}({','.join(ser(c) for c in n.children)})"

    return ser(_root(tree))


def display_key(key: str) -> str:
    """Convert a canonical key into its display form."""
    return serialize(deserialize(key), display=True)


class _Decoder:
    def __init__(self, key):
        self.key = key
        self.pos = 0

    def fail(self, msg):
        raise KeyDecodeError(msg, self.pos)

    def tag(self):
        start = self.pos
        key = self.key
        while self.pos < len(key) and key[self.pos].isascii() and key[self.pos].isalpha():
            self.pos += 1
        if self.pos == start:
            self.fail("expected tag name")
        return key[start:self.pos]

    def content(self, tag):
        key = self.key
        chars = []
        literal_op = False
        while self.pos < len(key):
            ch = key[self.pos]
            if ch == "\\":
                if self.pos + 1 >= len(key):
                    self.fail("dangling escape")
                nxt = key[self.pos + 1]
                if nxt in _SPECIAL:
                    chars.append(nxt)
                elif not chars and tag == "mo" and nxt in "if":
                    literal_op = True
                    chars.append(nxt)
                else:
                    self.fail(f"invalid escape \\{nxt}")
                self.pos += 2
            elif ch in ",)":
                break
            elif ch in "(:":
                self.fail(f"unescaped {ch!r} in leaf content")
            else:
                chars.append(ch)
                self.pos += 1
        text = "".join(chars)
        if literal_op:
            if text not in _OP_CHAR:
                self.fail("escaped letter outside a literal ivt/fa")
            return MathNode(tag, text)
        if tag == "mo" and text in _OP_CHAR:
            return MathNode(tag, _OP_CHAR[text], (), text)
        return MathNode(tag, text)

    def node(self):
        start = self.pos
        tag = self.tag()
        if self.pos >= len(self.key):
            self.fail("unexpected end of key")
        ch = self.key[self.pos]
        self.pos += 1
        if ch == ":":
            if tag not in TOKEN_TAGS and tag not in EMPTY_TAGS:
                self.pos = start
                self.fail(f"<{tag}> cannot be a leaf")
            n = self.content(tag)
            if tag in EMPTY_TAGS and n.content:
                self.pos = start
                self.fail(f"<{tag}> must be empty")
            return n
        if ch != "(":
            self.pos -= 1
            self.fail("expected ':' or '('")
        if tag not in INNER_TAGS:
            self.pos = start
            self.fail(f"<{tag}> cannot have children")
        children = []
        if self.pos < len(self.key) and self.key[self.pos] == ")":
            self.pos += 1
            return MathNode(tag, None, ())
        while True:
            children.append(self.node())
            if self.pos >= len(self.key):
                self.fail("unbalanced parenthesis")
            ch = self.key[self.pos]
            self.pos += 1
            if ch == ")":
                return MathNode(tag, None, tuple(children))
            if ch != ",":
                self.pos -= 1
                self.fail("expected ',' or ')'")


def deserialize(key: str) -> MathTree:
    """Inverse of :func:`serialize` for canonical keys."""
    dec = _Decoder(key)
    root = dec.node()
    if dec.pos != len(key):
        dec.fail("trailing characters")
    return MathTree(root)


def complexity(tree: MathTree | MathNode) -> int:
    """Maximum number of nodes on a root-to-leaf path."""

    def depth(n):
        if not n.children:
            return 1
        return 1 + max(depth(c) for c in n.children)

    return depth(_root(tree))


def enumerate_mois(tree: MathTree | MathNode) -> list[MoiOccurrence]:
    """All subtrees containing an ``mi``, with multiplicity, parents first.

    Keys, depths and identifier presence are computed in one bottom-up pass.
    """
    out: list[MoiOccurrence | None] = []
    append = out.append

    def visit(n):
        if n.content is not None:
            key = _leaf_key(n)
            if n.tag == "mi":
                append(MoiOccurrence(key, 1))
                return key, 1, True
            return key, 1, False
        slot = len(out)
        append(None)
        parts = []
        deepest = 0
        has_mi = False
        for c in n.children:
            k, d, h = visit(c)
            parts.append(k)
            if d > deepest:
                deepest = d
            has_mi = has_mi or h
        key = f"{n.tag}({','.join(parts)})"
        if has_mi:
            out[slot] = MoiOccurrence(key, deepest + 1)
        return key, deepest + 1, has_mi

    visit(_root(tree))
    return [o for o in out if o is not None]


_SPACED = frozenset("=<>≤≥≠≈≡→←⇒⇔∈∉⊂⊆∼≃≅")
_PASS_THROUGH = frozenset({"mrow", "mstyle", "mpadded", "mphantom", "menclose", "merror", "mtd",
                           "mmultiscripts"})


def _group(text: str) -> str:
    return text if len(text) <= 1 else "{" + text + "}"


def _paren(text: str) -> str:
    return text if len(text) <= 1 else "(" + text + ")"


_ATOMIC = frozenset({"msqrt", "mroot", "msup", "msub", "msubsup"})


def render_text(tree: MathTree | MathNode | str) -> str:
    """Compact linear rendering, e.g. ``E = mc^2``; for display only."""
    if isinstance(tree, str):
        tree = deserialize(tree)

    def operand(n, text):
        text = text.strip()
        return text if n.content is not None or n.tag in _ATOMIC else _paren(text)

    def r(n):
        if n.content is not None:
            if n.op is not None or n.tag in EMPTY_TAGS:
                return ""
            if n.tag == "mo" and n.content in _SPACED:
                return f" {n.content} "
            if n.tag == "mi" and len(n.content) > 1:
                return f" {n.content} "
            return n.content
        parts = [r(c) for c in n.children]
        tag = n.tag
        if tag == "msqrt":
            return "√" + _paren("".join(parts).strip())
        if tag in _PASS_THROUGH or len(parts) < 2:
            return "".join(parts)
        if tag == "mover" and n.children[1].tag == "mo" and len(parts[1]) == 1:
            return parts[0] + parts[1]
        if tag in ("msup", "mover"):
            return parts[0] + "^" + _group(parts[1].strip())
        if tag in ("msub", "munder"):
            return parts[0] + "_" + _group(parts[1].strip())
        if tag in ("msubsup", "munderover") and len(parts) >= 3:
            return parts[0] + "_" + _group(parts[1].strip()) + "^" + _group(parts[2].strip())
        if tag == "mfrac":
            return operand(n.children[0], parts[0]) + "/" + operand(n.children[1], parts[1])
        if tag == "mroot":
            return f"√[{parts[1].strip()}]" + _paren(parts[0].strip())
        if tag == "mtable":
            return "[" + "; ".join(parts) + "]"
        if tag == "mtr":
            return ", ".join(parts)
        return "".join(parts)

    return " ".join(r(_root(tree)).split())
