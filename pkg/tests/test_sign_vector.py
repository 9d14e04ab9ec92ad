import itertools

import pytest
from hypothesis import given, settings, strategies as st

from app.domin.om.models.exceptions import ElementNotFound, GroundMismatch, ParseError
from app.domin.om.models.sign_vector import GroundSet, Sign, SignSystem, SignVector, canonical

G3 = GroundSet.default(3)
G4 = GroundSet.default(4)


def v(token: str, ground: GroundSet = None) -> SignVector:
    return SignVector.from_token(token, ground or GroundSet.default(len(token)))


def all_vectors(n: int):
    ground = GroundSet.default(n)
    return [SignVector.from_signs(s, ground) for s in itertools.product((1, -1, 0), repeat=n)]


signs4 = st.lists(st.sampled_from((1, -1, 0)), min_size=4, max_size=4).map(lambda s: SignVector.from_signs(s, G4))


def test_sign_negation():
    assert -Sign.PLUS == Sign.MINUS
    assert -Sign.ZERO == Sign.ZERO
    assert Sign.from_char("-") == Sign.MINUS
    with pytest.raises(ValueError):
        Sign.from_char("x")


def test_compose_cases():
    assert v("+0-").compose(v("-+-")).token == "++-"
    x = v("+-0+")
    assert x.compose(x) == x
    assert v("000").compose(v("-+0")).token == "-+0"


def test_separator_cases():
    assert v("++-").separator(v("-+-")) == frozenset({0})
    assert v("+-0").separator(v("+-0")) == frozenset()
    assert v("+0-").separator(v("0+-")) == frozenset()


def test_conforms_below_cases():
    assert v("0-0+") <= v("---+")
    assert v("+0-+") <= v("+0-+")
    assert not v("+00") <= v("-++")


def test_ground_mismatch():
    with pytest.raises(GroundMismatch):
        v("+-").compose(v("+-0"))
    with pytest.raises(GroundMismatch):
        v("+-", GroundSet(("a", "b"))).separator(v("+-"))


def test_support_and_topes():
    x = v("+0-")
    assert x.support == frozenset({0, 2})
    assert x.zeros == frozenset({1})
    assert not x.is_tope
    assert v("+-+").is_tope
    assert SignVector.zero(G3).is_zero


def test_masks_round_trip():
    x = v("+-0+")
    assert x.masks == (0b1001, 0b0010)
    assert SignVector.from_masks(*x.masks, x.ground) == x


def test_delete_extend_reorient():
    x = v("+-0")
    assert x.delete([1]).token == "+0"
    assert x.delete([1]).ground.names == ("1", "3")
    bigger = G3.with_element("f")
    assert x.extend(1, bigger).token == "+-0+"
    assert x.extend(0, bigger).token == "+-00"
    assert x.reorient(0).token == "--0"
    assert x.reorient(2) == x


def test_from_token_errors():
    with pytest.raises(ParseError) as info:
        SignVector.from_token("+x-", G3, line=4)
    assert info.value.column == 2
    assert info.value.line == 4
    with pytest.raises(ParseError):
        SignVector.from_token("+-", G3)


def test_ground_set_lookup():
    ground = GroundSet(("a", "b", "c"))
    assert ground.resolve("b") == 1
    assert ground.resolve(2) == 2
    with pytest.raises(ElementNotFound):
        ground.resolve("z")
    with pytest.raises(ElementNotFound):
        ground.resolve(3)
    assert ground.fresh_name("f") == "f"
    assert GroundSet(("f",)).fresh_name("f") == "f'"
    assert ground.without([1]).names == ("a", "c")
    assert ground.translate({0, 2}, GroundSet(("c", "a"))) == frozenset({0, 1})
    with pytest.raises(ValueError):
        GroundSet(("a", "a"))


def test_canonical_order_uses_token():
    vectors = [v("0+"), v("-+"), v("++"), v("+0")]
    assert [x.token for x in canonical(vectors)] == ["++", "+0", "-+", "0+"]


def test_system_rejects_foreign_vectors():
    with pytest.raises(GroundMismatch):
        SignSystem(G3, frozenset({v("+-")}))
    system = SignSystem.from_tokens(["+-", "-+", "00"])
    assert len(system) == 3
    assert system.renders() == ["+-", "-+", "00"]
    assert system.topes == frozenset({v("+-"), v("-+")})


def test_compose_laws_exhaustive():
    vectors = all_vectors(3)
    for x in vectors:
        assert x.compose(x) == x
        for y in vectors:
            xy = x.compose(y)
            assert x.support <= xy.support
            assert xy.support == x.support | y.support
            assert (not x.separator(y)) == (xy == y.compose(x))
            assert x.separator(y) == y.separator(x)
            for z in vectors:
                assert xy.compose(z) == x.compose(y.compose(z))


def test_conformal_order_is_partial_order_exhaustive():
    vectors = all_vectors(3)
    for x in vectors:
        assert x <= x
        for y in vectors:
            if x <= y and y <= x:
                assert x == y
            for z in vectors:
                if x <= y and y <= z:
                    assert x <= z


@settings(max_examples=200, deadline=None)
@given(signs4, signs4, signs4)
def test_compose_associative_on_four_elements(x, y, z):
    assert x.compose(y).compose(z) == x.compose(y.compose(z))


@settings(max_examples=200, deadline=None)
@given(signs4, signs4)
def test_separator_empty_iff_commuting(x, y):
    assert (not x.separator(y)) == (x.compose(y) == y.compose(x))
    assert x <= x.compose(y)
