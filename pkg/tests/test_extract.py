import random
from collections import Counter

import pytest
from hypothesis import given, settings

from mathmoi.errors import KeyDecodeError
from mathmoi.extract import (
    complexity,
    deserialize,
    display_key,
    enumerate_mois,
    render_text,
    serialize,
)
from mathmoi.pmml import MathNode, MathTree, leaf, node, parse_mathml

from oracles.extract_oracle import oracle_mois
from strategies import depth, random_tree, trees

GAMMA_XML = ("<math><mrow><mi>Γ</mi><mo>&#x2062;</mo><mrow><mo>(</mo>"
             "<mrow><mi>x</mi><mo>+</mo><mn>1</mn></mrow><mo>)</mo></mrow></mrow></math>")


def test_leaf_key():
    assert serialize(leaf("mi", "x")) == "mi:x"


def test_paren_key_display_form():
    tree = parse_mathml("<math><mrow><mo>(</mo><mi>x</mi><mo>)</mo></mrow></math>")
    assert serialize(tree, display=True) == "mrow(mo:(,mi:x,mo:))"
    assert serialize(tree) == r"mrow(mo:\(,mi:x,mo:\))"


def test_gamma_key():
    tree = parse_mathml(GAMMA_XML)
    assert serialize(tree, display=True) == "mrow(mi:Γ,mo:ivt,mrow(mo:(,mrow(mi:x,mo:+,mn:1),mo:)))"
    assert display_key(serialize(tree)) == serialize(tree, display=True)


def test_deserialize_examples():
    assert deserialize("mi:x").root == leaf("mi", "x")
    root = deserialize(r"mrow(mo:\(,mi:x,mo:\))").root
    assert [c.content for c in root.children] == ["(", "x", ")"]


@pytest.mark.parametrize("bad", ["mrow(mi:x", "mi", "mi:x)", "foo:x", "mrow:x", "mi(mi:x)",
                                 r"mi:a\q", "mi:a(b", "mspace:x", "", "mrow(mi:x,)"])
def test_deserialize_rejects(bad):
    with pytest.raises(KeyDecodeError):
        deserialize(bad)


def test_decode_error_has_position():
    with pytest.raises(KeyDecodeError) as err:
        deserialize("mrow(mi:x")
    assert err.value.position == len("mrow(mi:x")


def test_literal_ivt_text_is_distinct_from_operator():
    literal = leaf("mo", "ivt")
    op = MathNode("mo", "⁢", (), "ivt")
    assert serialize(literal) == r"mo:\ivt"
    assert serialize(op) == "mo:ivt"
    assert deserialize(serialize(literal)).root == literal
    assert deserialize(serialize(op)).root == op


def test_empty_leaf_key():
    assert serialize(leaf("mspace")) == "mspace:"
    assert deserialize("mspace:").root == leaf("mspace")


@settings(max_examples=300, deadline=None)
@given(trees())
def test_round_trip(root):
    key = serialize(root)
    assert deserialize(key).root == root
    assert serialize(deserialize(key)) == key


def test_complexity_examples(jacobi_xml):
    assert complexity(leaf("mi", "P")) == 1
    assert complexity(node("mrow", leaf("mi", "x"))) == 2
    assert complexity(parse_mathml(jacobi_xml)) == 4


def test_jacobi_mois(jacobi_xml):
    occ = enumerate_mois(parse_mathml(jacobi_xml))
    displays = Counter(render_text(o.key) for o in occ)
    assert displays == Counter(["P_n^{(α,β)}(x)", "P_n^{(α,β)}", "(α,β)", "(x)",
                                "P", "n", "α", "β", "x"])
    assert len(occ) == 9
    assert occ[0].complexity == 4


def test_no_identifier_no_mois():
    xml = "<math><msup><mrow><mo>(</mo><mn>1</mn><mo>+</mo><mn>2</mn><mo>)</mo></mrow><mn>2</mn></msup></math>"
    assert enumerate_mois(parse_mathml(xml)) == []


def test_mrow_x():
    occ = enumerate_mois(node("mrow", leaf("mi", "x")))
    assert [(o.key, o.complexity) for o in occ] == [("mrow(mi:x)", 2), ("mi:x", 1)]


def test_multiplicity():
    occ = enumerate_mois(node("mrow", leaf("mi", "x"), leaf("mo", "+"), leaf("mi", "x")))
    assert Counter(o.key for o in occ) == {"mrow(mi:x,mo:+,mi:x)": 1, "mi:x": 2}


@settings(max_examples=200, deadline=None)
@given(trees())
def test_matches_oracle(root):
    got = Counter((o.key, o.complexity) for o in enumerate_mois(root))
    assert got == oracle_mois(root)


@settings(max_examples=200, deadline=None)
@given(trees())
def test_occurrence_properties(root):
    occ = enumerate_mois(root)
    assert len(occ) <= len(root)
    total = complexity(root)
    for o in occ:
        assert o.complexity == complexity(deserialize(o.key))
        assert 1 <= o.complexity <= total


def test_random_trees_respect_depth():
    rng = random.Random(3)
    assert all(depth(random_tree(rng, 8)) <= 8 for _ in range(200))


def test_render_text():
    assert render_text(parse_mathml("<math><mi>E</mi><mo>=</mo><mi>m</mi><mo>⁢</mo>"
                                    "<msup><mi>c</mi><mn>2</mn></msup></math>")) == "E = mc^2"
    assert render_text("mfrac(mi:a,mrow(mi:b,mo:+,mn:1))") == "a/(b+1)"
    assert render_text("msqrt(mi:x)") == "√x"
    assert render_text(MathTree(leaf("mi", "x"))) == "x"
