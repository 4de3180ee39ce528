import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mathmoi.errors import EmptyExpressionError, MathMLParseError
from mathmoi.extract import serialize
from mathmoi.pmml import (
    KEEP,
    PRESENTATION_TAGS,
    FilterVerdict,
    MathTree,
    RejectReason,
    filter_formula,
    is_footnote_tex,
    leaf,
    node,
    normalize_invisible_operators,
    parse_mathml,
    to_xml,
)

from strategies import random_tree


def key(xml):
    return serialize(parse_mathml(xml))


def test_single_child_is_root():
    assert parse_mathml("<math><mi>x</mi></math>").root == leaf("mi", "x")


def test_multiple_children_wrapped_in_mrow():
    assert key("<math><mi>x</mi><mo>+</mo><mn>1</mn></math>") == "mrow(mi:x,mo:+,mn:1)"


def test_attributes_and_namespace_dropped():
    xml = ('<math xmlns="http://www.w3.org/1998/Math/MathML" display="block">'
           '<mi mathvariant="bold" id="a1">x</mi></math>')
    assert parse_mathml(xml).root == leaf("mi", "x")


def test_semantics_keeps_presentation_branch():
    xml = ("<math><semantics><mrow><mi>x</mi></mrow>"
           '<annotation-xml encoding="MathML-Content"><ci>x</ci></annotation-xml>'
           '<annotation encoding="application/x-tex">x</annotation></semantics></math>')
    tree = parse_mathml(xml)
    assert tree.root == node("mrow", leaf("mi", "x"))
    assert tree.source_tex == "x"
    assert filter_formula(tree) == KEEP


def test_alttext_is_source_tex():
    assert parse_mathml('<math alttext="x^2"><mi>x</mi></math>').source_tex == "x^2"


def test_entities_resolved():
    assert key("<math><mi>&alpha;</mi><mo>&#x2062;</mo><mi>&#946;</mi></math>") == "mrow(mi:α,mo:ivt,mi:β)"


def test_content_is_nfc():
    assert parse_mathml("<math><mi>é</mi></math>").root.content == "é"


def test_empty_math_is_error():
    with pytest.raises(EmptyExpressionError):
        parse_mathml("<math></math>")
    with pytest.raises(EmptyExpressionError):
        parse_mathml("<math> \n </math>")


def test_malformed_xml_reports_offset():
    with pytest.raises(MathMLParseError) as err:
        parse_mathml("<math><mi>x</mo></math>")
    assert err.value.offset is not None
    assert "byte offset" in str(err.value)


def test_non_math_root_rejected():
    with pytest.raises(MathMLParseError):
        parse_mathml("<mrow><mi>x</mi></mrow>")


def test_jacobi_fixture(jacobi_xml):
    tree = parse_mathml(jacobi_xml)
    assert filter_formula(tree) == KEEP
    assert tree.source_tex == r"P_{n}^{(\alpha,\beta)}(x)"
    assert not any(n.tag == "math" for n in tree.root.iter())


@pytest.mark.parametrize("tex", ["{}^{1}", "{}^{*}", "{ } ^ { a b }", "{}^\\dagger", "{}^1"])
def test_footnote_tex(tex):
    assert is_footnote_tex(tex)
    tree = MathTree(leaf("mi", "x"), source_tex=tex)
    assert filter_formula(tree) == FilterVerdict(False, RejectReason.FOOTNOTE)


@pytest.mark.parametrize("tex", ["x^{1}", "{a}^{1}", "{}_{1}", ""])
def test_not_footnote_tex(tex):
    assert not is_footnote_tex(tex)


def test_structural_footnote_without_tex():
    tree = parse_mathml("<math><msup><mrow></mrow><mn>1</mn></msup></math>")
    assert filter_formula(tree).reason is RejectReason.FOOTNOTE


def test_svg_rejected():
    tree = parse_mathml('<math><mi>x</mi><svg xmlns="http://www.w3.org/2000/svg"><path d="M0"/></svg></math>')
    assert filter_formula(tree) == FilterVerdict(False, RejectReason.SVG)


def test_unknown_tag_rejected():
    tree = parse_mathml("<math><mi>x</mi><blink>1</blink></math>")
    assert filter_formula(tree).reason is RejectReason.UNKNOWN_TAG
    assert tree.rejected_tags == ("blink",)


def test_empty_after_clean():
    assert filter_formula(parse_mathml("<math><mrow></mrow></math>")).reason is RejectReason.EMPTY


def test_verdict_invariant():
    with pytest.raises(ValueError):
        FilterVerdict(False)
    with pytest.raises(ValueError):
        FilterVerdict(True, RejectReason.SVG)


def test_invisible_operators_classified():
    tree = parse_mathml("<math><mi>f</mi><mo>⁡</mo><mi>x</mi><mo>⁢</mo><mo>+</mo></math>")
    ops = [n.op for n in tree.root.children]
    assert ops == [None, "fa", None, "ivt", None]
    assert tree.root.children[1].content == "⁡"


def test_normalize_is_identity_on_plain_tree():
    tree = MathTree(node("mrow", leaf("mo", "+"), leaf("mi", "x")))
    assert normalize_invisible_operators(tree) is tree


def test_every_tag_allowlisted_in_parsed_tree(jacobi_xml):
    assert all(n.tag in PRESENTATION_TAGS for n in parse_mathml(jacobi_xml).root.iter())


@settings(max_examples=200, deadline=None)
@given(st.randoms(use_true_random=False))
def test_cleaning_is_idempotent(rnd):
    root = random_tree(rnd, max_depth=6, adversarial=False)
    once = parse_mathml(to_xml(MathTree(root)))
    twice = parse_mathml(to_xml(once))
    assert once == twice
