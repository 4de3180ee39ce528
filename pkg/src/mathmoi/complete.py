"""Formula autocompletion over the indexed keys.

Patterns are written in a small linear syntax and compared against the
*frontier* of each indexed expression: the tokens of its linear rendering,
left to right.  A key matches a pattern when its frontier starts with the
pattern's tokens, so ``E = m`` matches ``E = mc^2`` and ``E = m/√(1-β^2)``
but not ``E = √(m^2c^4+p^2c^2)``.

Pattern syntax:

* letters: a run of ASCII letters is one identifier per letter unless the
  whole run is a known function name (``sin``, ``cosh``, ``log``, ...);
  any other letter (``α``, ``Γ``) is one identifier
* ``\\alpha``-style commands name Greek letters, functions and a few operators
* digits (optionally with a decimal point) form a number
* ``^``, ``_``, ``{`` and ``}`` group scripts and are otherwise ignored
* ``√`` or ``\\sqrt`` opens a root; a fraction is written ``a/b``
* whitespace is ignored; any other character is an operator
"""

from __future__ import annotations

import bisect
import threading
import unicodedata
from dataclasses import dataclass

from .errors import PatternError
from .extract import deserialize, render_text
from .index import CorpusIndex
from .pmml import EMPTY_TAGS, MathNode

FUNCTION_NAMES = frozenset({
    "sin", "cos", "tan", "cot", "sec", "csc", "sinh", "cosh", "tanh", "coth",
    "arcsin", "arccos", "arctan", "log", "ln", "lg", "exp", "det", "dim", "ker",
    "deg", "gcd", "lcm", "lim", "liminf", "limsup", "max", "min", "sup", "inf",
    "arg", "Re", "Im", "tr", "div", "grad", "rot", "mod", "Pr", "sgn", "erf",
})

GREEK = {
    "alpha": "α", "beta": "β", "gamma": "γ", "delta": "δ", "epsilon": "ϵ", "varepsilon": "ε",
    "zeta": "ζ", "eta": "η", "theta": "θ", "vartheta": "ϑ", "iota": "ι", "kappa": "κ",
    "lambda": "λ", "mu": "μ", "nu": "ν", "xi": "ξ", "pi": "π", "varpi": "ϖ", "rho": "ρ",
    "varrho": "ϱ", "sigma": "σ", "varsigma": "ς", "tau": "τ", "upsilon": "υ", "phi": "ϕ",
    "varphi": "φ", "chi": "χ", "psi": "ψ", "omega": "ω", "Gamma": "Γ", "Delta": "Δ",
    "Theta": "Θ", "Lambda": "Λ", "Xi": "Ξ", "Pi": "Π", "Sigma": "Σ", "Upsilon": "Υ",
    "Phi": "Φ", "Psi": "Ψ", "Omega": "Ω", "ell": "ℓ", "hbar": "ℏ", "infty": "∞",
    "partial": "∂", "nabla": "∇",
}

OPERATORS = {
    "cdot": "⋅", "times": "×", "pm": "±", "mp": "∓", "leq": "≤", "le": "≤", "geq": "≥",
    "ge": "≥", "neq": "≠", "ne": "≠", "approx": "≈", "equiv": "≡", "sim": "∼", "to": "→",
    "in": "∈", "subset": "⊂", "subseteq": "⊆", "cup": "∪", "cap": "∩", "sum": "∑",
    "prod": "∏", "int": "∫", "oint": "∮", "circ": "∘", "ldots": "…", "cdots": "⋯",
    "{": "{", "}": "}", "|": "∥", ",": "", ";": "", "!": "", "quad": "", "qquad": "",
}
STRUCTURAL = frozenset({"left", "right", "mathrm", "mathbf", "mathcal",
                        "mathbb", "operatorname"})

# characters that LaTeX-to-MathML converters emit in place of ASCII operators
_CONTENT_ALIASES = str.maketrans({"−": "-", "∗": "*", "′": "'", "∣": "|", "‖": "∥"})

Token = tuple[str, str]

SQRT: Token = ("mo", "√")
SLASH: Token = ("mo", "/")


def _norm(text: str) -> str:
    return unicodedata.normalize("NFC", text).translate(_CONTENT_ALIASES)


def frontier(node: MathNode) -> tuple[Token, ...]:
    """Visible tokens of a tree, left to right, as in its linear rendering.

    Invisible operators and empty elements are skipped; a square root or
    radical contributes a leading ``√`` and a fraction an infix ``/``.
    """
    out: list[Token] = []

    def walk(n):
        if n.content is not None:
            if n.op is None and n.tag not in EMPTY_TAGS:
                out.append((n.tag, _norm(n.content)))
            return
        if n.tag in ("msqrt", "mroot"):
            out.append(SQRT)
        for i, c in enumerate(n.children):
            if i == 1 and n.tag == "mfrac":
                out.append(SLASH)
            walk(c)

    walk(node)
    return tuple(out)


def parse_pattern(text: str) -> tuple[Token, ...]:
    """Token sequence of a linear-syntax pattern."""
    toks: list[Token] = []
    depth = 0
    i = 0
    n = len(text)
    pending_script = False
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if ch in "^_":
            pending_script = True
            i += 1
            continue
        if ch == "{":
            depth += 1
            i += 1
            continue
        if ch == "}":
            depth -= 1
            if depth < 0:
                raise PatternError(f"unbalanced '}}' at position {i}")
            i += 1
            continue
        pending_script = False
        if ch == "\\":
            j = i + 1
            while j < n and text[j].isascii() and text[j].isalpha():
                j += 1
            name = text[i + 1:j] if j > i + 1 else text[i + 1:i + 2]
            if not name:
                raise PatternError(f"dangling backslash at position {i}")
            i = j if j > i + 1 else i + 2
            if name == "sqrt":
                toks.append(SQRT)
            elif name in GREEK:
                toks.append(("mi", GREEK[name]))
            elif name in FUNCTION_NAMES:
                toks.append(("mi", name))
            elif name in OPERATORS:
                if OPERATORS[name]:
                    toks.append(("mo", OPERATORS[name]))
            elif name not in STRUCTURAL:
                raise PatternError(f"unknown command \\{name}")
            continue
        if ch.isascii() and ch.isalpha():
            j = i
            while j < n and text[j].isascii() and text[j].isalpha():
                j += 1
            run = text[i:j]
            if run in FUNCTION_NAMES:
                toks.append(("mi", run))
            else:
                toks.extend(("mi", c) for c in run)
            i = j
            continue
        if ch.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            if j + 1 < n and text[j] == "." and text[j + 1].isdigit():
                j += 1
                while j < n and text[j].isdigit():
                    j += 1
            toks.append(("mn", text[i:j]))
            i = j
            continue
        if ch.isalpha():
            toks.append(("mi", _norm(ch)))
        else:
            toks.append(("mo", _norm(ch)))
        i += 1
    if depth != 0:
        raise PatternError("unbalanced '{'")
    if pending_script:
        raise PatternError("pattern ends with a dangling script marker")
    if not toks:
        raise PatternError(f"pattern {text!r} contains no tokens")
    return tuple(toks)


def parse_symbols(symbols) -> tuple[str, ...]:
    """Required identifiers from ``"m,c"`` or an iterable of names."""
    if isinstance(symbols, str):
        symbols = [s for s in symbols.split(",") if s.strip()]
    out = []
    for s in symbols:
        toks = parse_pattern(s)
        if len(toks) != 1 or toks[0][0] != "mi":
            raise PatternError(f"{s!r} is not a single identifier")
        out.append(toks[0][1])
    if not out:
        raise PatternError("at least one required symbol is needed")
    return tuple(dict.fromkeys(out))


@dataclass(frozen=True, slots=True)
class Suggestion:
    key: str
    display: str
    tf: int
    df: int

    def as_dict(self) -> dict:
        return {"key": self.key, "display": self.display, "tf": self.tf, "df": self.df}


def suggestion_order(s: Suggestion):
    return (-s.df, -s.tf, s.key)


class CompletionIndex:
    """Keys sorted by frontier, for prefix scans with :mod:`bisect`."""

    def __init__(self, index: CorpusIndex):
        self.index = index
        rows = sorted((frontier(deserialize(k).root), k) for k in index.records)
        self._frontiers = [f for f, _ in rows]
        self._keys = [k for _, k in rows]

    def _prefixed(self, prefix: tuple[Token, ...]):
        i = bisect.bisect_left(self._frontiers, prefix)
        m = len(prefix)
        while i < len(self._frontiers) and self._frontiers[i][:m] == prefix:
            yield self._frontiers[i], self._keys[i]
            i += 1

    def _suggest(self, key) -> Suggestion:
        r = self.index.records[key]
        return Suggestion(key, render_text(key), r.total_tf, r.df)

    def complete(self, pattern: str, limit: int | None = 10) -> list[Suggestion]:
        prefix = parse_pattern(pattern)
        out = sorted((self._suggest(k) for _, k in self._prefixed(prefix)), key=suggestion_order)
        return out[:limit] if limit is not None else out

    def containing(self, lhs_pattern: str, symbols, limit: int | None = 10,
                   strict: bool = False) -> list[Suggestion]:
        """Keys starting with ``lhs_pattern`` whose remainder holds every symbol.

        A symbol is found when it is an identifier of the remainder or, unless
        ``strict``, occurs inside a multi-letter identifier such as ``cosh``.
        """
        prefix = parse_pattern(lhs_pattern)
        required = parse_symbols(symbols)
        out = []
        for fr, key in self._prefixed(prefix):
            names = [c for tag, c in fr[len(prefix):] if tag == "mi"]
            if strict:
                ok = all(s in names for s in required)
            else:
                ok = all(any(s in name for name in names) for s in required)
            if ok:
                out.append(self._suggest(key))
        out.sort(key=suggestion_order)
        return out[:limit] if limit is not None else out


_cache: dict[int, CompletionIndex] = {}
_cache_lock = threading.Lock()


def completion_index(index: CorpusIndex) -> CompletionIndex:
    with _cache_lock:
        ci = _cache.get(id(index))
        if ci is None or ci.index is not index:
            ci = _cache[id(index)] = CompletionIndex(index)
        return ci


def autocomplete(prefix_pattern: str, index: CorpusIndex, limit: int | None = 10) -> list[Suggestion]:
    return completion_index(index).complete(prefix_pattern, limit)


def suggest_containing(lhs_pattern: str, required_symbols, index: CorpusIndex,
                       limit: int | None = 10, strict: bool = False) -> list[Suggestion]:
    return completion_index(index).containing(lhs_pattern, required_symbols, limit, strict)
