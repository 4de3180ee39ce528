"""Random presentation trees for property tests (hypothesis) and bulk checks (seeded RNG)."""

from __future__ import annotations

import random

from hypothesis import strategies as st

from mathmoi.pmml import EMPTY_TAGS, INNER_TAGS, TOKEN_TAGS, MathNode

TOKENS = sorted(TOKEN_TAGS)
EMPTIES = sorted(EMPTY_TAGS)
INNERS = sorted(INNER_TAGS)

# characters that stress the key grammar and the operator classification
NASTY = ["(", ")", ",", ":", "\\", "⁢", "⁡", "ivt", "fa", "\\ivt", "", " ", "α", "∑", "x,y", "a:b"]
PLAIN = ["x", "y", "n", "α", "β", "P", "1", "2", "+", "-", "=", "(", ")", "sin"]

leaf_text = st.one_of(
    st.sampled_from(NASTY),
    st.text(alphabet=st.sampled_from(list("ab()\\,:x1 ⁢⁡")), max_size=6),
    st.text(max_size=4).filter(lambda s: "\x00" not in s),
)


def make_leaf(tag: str, text: str) -> MathNode:
    if tag in EMPTY_TAGS:
        return MathNode(tag, "")
    if tag == "mo" and text == "⁢":
        return MathNode(tag, text, (), "ivt")
    if tag == "mo" and text == "⁡":
        return MathNode(tag, text, (), "fa")
    return MathNode(tag, text)


leaves = st.one_of(
    st.builds(make_leaf, st.sampled_from(TOKENS), leaf_text),
    st.builds(make_leaf, st.sampled_from(EMPTIES), st.just("")),
)


def trees(max_leaves: int = 30) -> st.SearchStrategy[MathNode]:
    return st.recursive(
        leaves,
        lambda kids: st.builds(lambda tag, cs: MathNode(tag, None, tuple(cs)),
                               st.sampled_from(INNERS), st.lists(kids, max_size=4)),
        max_leaves=max_leaves,
    )


def random_tree(rng: random.Random, max_depth: int = 10, adversarial: bool = True,
                max_children: int = 4, leaf_bias: float = 0.35) -> MathNode:
    """A random tree of depth at most ``max_depth`` (a single leaf has depth 1)."""
    pool = NASTY + PLAIN if adversarial else PLAIN
    if max_depth <= 1 or rng.random() < leaf_bias:
        if rng.random() < 0.08:
            return make_leaf(rng.choice(EMPTIES), "")
        tag = rng.choice(TOKENS) if adversarial else rng.choice(["mi", "mi", "mo", "mn"])
        return make_leaf(tag, rng.choice(pool))
    n = rng.randint(0 if adversarial else 1, max_children)
    kids = tuple(random_tree(rng, max_depth - 1, adversarial, max_children, leaf_bias) for _ in range(n))
    return MathNode(rng.choice(INNERS) if adversarial else rng.choice(["mrow", "msup", "msub", "mfrac", "mrow"]),
                    None, kids)


def depth(n: MathNode) -> int:
    return 1 + max((depth(c) for c in n.children), default=0)
