from fractions import Fraction

import numpy as np
import pytest

from bandbraid import knots
from bandbraid.braidtrace import BraidWord, free_reduce
from bandbraid.errors import DivisionFailure, Unclassified, WordTooLong
from bandbraid.knots import (ALEXANDER_TABLE, JONES_TABLE, BurauMatrix, LaurentPoly,
                             alexander, braid_permutation_cycles, burau,
                             burau_generator, classify_link, jones, kauffman_bracket,
                             writhe)
from bandbraid.twister import KnotClass

S = LaurentPoly.from_s_coeffs

WORDS = {
    KnotClass.SOLOMON_KNOT: BraidWord.parse("s1 s3 s2 s1 s3 s2", 4),
    KnotClass.HOPF_CHAIN: BraidWord.parse("s1 s3 s1 s3 s2", 4),
    KnotClass.HOPF_LINK: BraidWord.parse("s2 s1 s3 s2", 4),
    KnotClass.UNKNOT: BraidWord.parse("s2 s1 s3", 4),
    KnotClass.UNLINK: BraidWord.parse("s1 s3", 4),
    KnotClass.HOPF_LINK_PLUS_UNLINK: BraidWord.parse("s2 s2", 4),
    KnotClass.UNKNOT_PLUS_UNLINK: BraidWord.parse("s2", 4),
    KnotClass.DOUBLE_UNLINKS: BraidWord.parse("", 4),
}
WORDS_2B = {
    KnotClass.HOPF_LINK: BraidWord.parse("s1 s1", 2),
    KnotClass.UNKNOT: BraidWord.parse("s1", 2),
    KnotClass.UNLINK: BraidWord.parse("", 2),
}


# -- Laurent arithmetic ------------------------------------------------------------

def test_laurent_product():
    one_minus_s = S({0: 1, 1: -1})
    one_plus_s = S({0: 1, 1: 1})
    assert one_minus_s * one_plus_s == S({0: 1, 2: -1})


def test_laurent_a_to_s_substitution():
    # A^-6 = s^(3/2)
    assert LaurentPoly.a_power(-6) == LaurentPoly.s_power(Fraction(3, 2))


def test_laurent_canonical_compare():
    assert S({1: 1, 2: -1}).equivalent(S({0: 1, 1: -1}))       # s(1-s) = 1-s up to units
    assert (-S({0: 1, 1: -1})).equivalent(S({0: 1, 1: -1}))
    assert not S({0: 1, 1: 1}).equivalent(S({0: 1, 1: -1}))


def test_laurent_exact_division():
    num = S({0: 1, 4: -1})            # 1 - s^4
    den = S({0: 1, 1: 1, 2: 1, 3: 1})  # 1 + s + s^2 + s^3
    assert num.divide_exact(den) == S({0: 1, 1: -1})
    with pytest.raises(DivisionFailure):
        S({0: 1, 1: 1}).divide_exact(S({0: 1, 1: -1}))


def test_laurent_a_notation_str():
    chain_bracket = (LaurentPoly.a_power(11, -1) + LaurentPoly.a_power(3, -2)
                     + LaurentPoly.a_power(-5, -1))
    assert chain_bracket.str_a() == "-A^11-2A^3-A^-5"


def test_laurent_mirror_and_str():
    p = JONES_TABLE[KnotClass.SOLOMON_KNOT]
    assert str(p) == "-s^(3/2)-s^(7/2)+s^(9/2)-s^(11/2)"
    assert p.mirror().mirror() == p
    assert str(S({0: 1, 1: -2, 2: 1})) == "1-2s+s^2"


# -- Burau ------------------------------------------------------------------------

def test_burau_generators_displayed_convention():
    minus_s = S({1: -1})
    one = LaurentPoly.one()
    zero = LaurentPoly.zero()
    s = S({1: 1})
    assert burau_generator(4, 1).entries == ((minus_s, one, zero),
                                             (zero, one, zero),
                                             (zero, zero, one))
    assert burau_generator(4, 2).entries == ((one, zero, zero),
                                             (s, minus_s, one),
                                             (zero, zero, one))
    assert burau_generator(4, 3).entries == ((one, zero, zero),
                                             (zero, one, zero),
                                             (zero, s, minus_s))


def test_burau_generator_exact_inverse():
    for n in (2, 3, 4, 5):
        for i in range(1, n):
            prod = burau_generator(n, i) @ burau_generator(n, i, inverse=True)
            assert prod.entries == BurauMatrix.identity(n - 1).entries


@pytest.mark.parametrize("n", [4, 5])
def test_burau_artin_relations(n):
    for i in range(1, n - 1):
        a = burau_generator(n, i)
        b = burau_generator(n, i + 1)
        assert (a @ b @ a).entries == (b @ a @ b).entries
    for i in range(1, n):
        for j in range(i + 2, n):
            a = burau_generator(n, i)
            b = burau_generator(n, j)
            assert (a @ b).entries == (b @ a).entries


def test_burau_solomon_word_matrix():
    b = burau(WORDS[KnotClass.SOLOMON_KNOT])
    zero = LaurentPoly.zero()
    want = ((zero, zero, S({1: -1})),
            (zero, S({2: -1}), zero),
            (S({3: -1}), zero, zero))
    assert b.entries == want


def test_burau_word_identities():
    assert burau(BraidWord((), 4)).entries == BurauMatrix.identity(3).entries
    w = BraidWord.parse("s1 s2^-1 s3 s2", 4)
    prod = burau(w) @ burau(w.inverse())
    assert prod.entries == BurauMatrix.identity(3).entries


# -- Alexander ----------------------------------------------------------------------

def test_alexander_all_table_rows():
    for cls, word in WORDS.items():
        assert alexander(word) == ALEXANDER_TABLE[cls], cls
    for cls, word in WORDS_2B.items():
        assert alexander(word) == ALEXANDER_TABLE[cls], cls


def test_alexander_solomon_value():
    assert alexander(WORDS[KnotClass.SOLOMON_KNOT]) == S({0: 1, 1: -1, 2: 1, 3: -1})


def test_alexander_alternative_normalization():
    # dividing by (1 - s) only gives (1+s)(1+s^2)^2 for Solomon's knot
    got = alexander(WORDS[KnotClass.SOLOMON_KNOT], reduced_only=True)
    want = (S({0: 1, 1: 1}) * S({0: 1, 2: 1}) * S({0: 1, 2: 1})).canonical()
    assert got == want


# -- writhe / bracket / Jones -----------------------------------------------------------

def test_writhe_table():
    order = [KnotClass.SOLOMON_KNOT, KnotClass.HOPF_CHAIN, KnotClass.HOPF_LINK,
             KnotClass.UNKNOT, KnotClass.UNLINK, KnotClass.HOPF_LINK_PLUS_UNLINK,
             KnotClass.UNKNOT_PLUS_UNLINK, KnotClass.DOUBLE_UNLINKS]
    assert [writhe(WORDS[c]) for c in order] == [6, 5, 4, 3, 2, 2, 1, 0]
    assert writhe(BraidWord.parse("s1 s1^-1", 2)) == 0


def A(e, c=1):
    return LaurentPoly.a_power(e, c)


def test_kauffman_brackets_all_closures():
    cases = {
        KnotClass.SOLOMON_KNOT: A(12, -1) + A(4, -1) + A(0, 1) + A(-4, -1),
        KnotClass.HOPF_CHAIN: A(11, -1) + A(3, -2) + A(-5, -1),
        KnotClass.HOPF_LINK: A(10, -1) + A(2, -1),
        KnotClass.UNKNOT: A(9, -1),
        KnotClass.UNLINK: A(8, -1) + A(4, -1),
        KnotClass.HOPF_LINK_PLUS_UNLINK: (A(8, -1) + A(4, -2) + A(0, -2)
                                          + A(-4, -2) + A(-8, -1)),
        KnotClass.UNKNOT_PLUS_UNLINK: A(7, -1) + A(3, -2) + A(-1, -1),
        KnotClass.DOUBLE_UNLINKS: A(6, -1) + A(2, -3) + A(-2, -3) + A(-6, -1),
    }
    for cls, want in cases.items():
        assert kauffman_bracket(WORDS[cls]) == want, cls


def test_kauffman_bracket_single_kink():
    assert kauffman_bracket(BraidWord.parse("s1", 2)) == A(3, -1)


def test_kauffman_bracket_reidemeister_two():
    w = WORDS[KnotClass.SOLOMON_KNOT]
    padded = BraidWord(w.generators + ((2, 1), (2, -1)), 4)
    assert kauffman_bracket(padded) == kauffman_bracket(w)


def test_kauffman_bracket_cap():
    long_word = BraidWord(((1, 1),) * 25, 2)
    with pytest.raises(WordTooLong):
        kauffman_bracket(long_word)


def test_jones_all_table_rows():
    for cls, word in WORDS.items():
        assert jones(word) == JONES_TABLE[cls], cls
    for cls, word in WORDS_2B.items():
        assert jones(word) == JONES_TABLE[cls], cls


def test_jones_hopf_chain_factored_form():
    assert jones(WORDS[KnotClass.HOPF_CHAIN]) == S({1: 1, 3: 2, 5: 1})  # s(1+s^2)^2


def test_jones_conjugation_invariance():
    rng = np.random.default_rng(51)
    for cls, word in list(WORDS.items()) + list(WORDS_2B.items()):
        base = jones(word)
        n = word.strand_count
        for _ in range(50):
            i = int(rng.integers(1, n)) if n > 1 else 1
            sign = int(rng.choice([-1, 1]))
            conj = BraidWord(((i, sign),) + word.generators + ((i, -sign),), n)
            assert jones(conj) == base, cls


def test_jones_mirror_relation():
    for cls, word in WORDS.items():
        mirror = BraidWord(tuple((i, -s) for i, s in word.generators), 4)
        assert jones(mirror) == jones(word).mirror(), cls


def test_jones_split_component_factor():
    # each split trivial component multiplies by -(s^1/2 + s^-1/2)
    factor = LaurentPoly.s_power(Fraction(1, 2), -1) + LaurentPoly.s_power(Fraction(-1, 2), -1)
    assert jones(WORDS[KnotClass.UNLINK]) == factor
    assert jones(WORDS[KnotClass.UNKNOT_PLUS_UNLINK]) == factor * factor
    assert jones(WORDS[KnotClass.DOUBLE_UNLINKS]) == factor * factor * factor
    assert jones(WORDS[KnotClass.HOPF_LINK_PLUS_UNLINK]) == (
        JONES_TABLE[KnotClass.HOPF_LINK] * factor * factor)


def test_component_counts():
    assert braid_permutation_cycles(WORDS[KnotClass.SOLOMON_KNOT]) == 2
    assert braid_permutation_cycles(WORDS[KnotClass.HOPF_CHAIN]) == 3
    assert braid_permutation_cycles(WORDS[KnotClass.UNKNOT]) == 1
    assert braid_permutation_cycles(WORDS[KnotClass.HOPF_LINK_PLUS_UNLINK]) == 4
    assert braid_permutation_cycles(WORDS_2B[KnotClass.UNLINK]) == 2


def test_classify_link_examples():
    assert classify_link(WORDS[KnotClass.SOLOMON_KNOT]) is KnotClass.SOLOMON_KNOT
    assert classify_link(WORDS[KnotClass.UNKNOT]) is KnotClass.UNKNOT
    assert classify_link(WORDS[KnotClass.HOPF_LINK_PLUS_UNLINK]) is KnotClass.HOPF_LINK_PLUS_UNLINK
    for cls, word in WORDS_2B.items():
        assert classify_link(word) is cls


def test_classify_link_with_winding_consistency():
    from bandbraid.braidtrace import WINDING_MATRICES
    word = WORDS[KnotClass.SOLOMON_KNOT]
    assert classify_link(word, WINDING_MATRICES[KnotClass.SOLOMON_KNOT]) is KnotClass.SOLOMON_KNOT
    with pytest.raises(Unclassified):
        classify_link(word, WINDING_MATRICES[KnotClass.HOPF_CHAIN])


def test_classify_link_unknown():
    trefoil = BraidWord.parse("s1 s1 s1", 2)
    with pytest.raises(Unclassified):
        classify_link(trefoil)


def test_invariance_under_free_reduction():
    w = BraidWord.parse("s1 s3 s2 s2^-1 s2 s1 s3 s2", 4)
    assert str(free_reduce(w)) == "s1 s3 s2 s1 s3 s2"
    assert jones(free_reduce(w)) == jones(w)
    assert alexander(free_reduce(w)) == alexander(w)
