import pytest
from hypothesis import given, strategies as st

from scpau.terms import (
    App,
    ConflictReport,
    InvalidPositionError,
    Substitution,
    Symbol,
    SymbolKind,
    Var,
    apply_substitution,
    canonical_renaming,
    conflict_positions,
    positions,
    renaming_equivalent,
    size,
    special_constants,
    subterm_at,
)
from scpau.interactions import EMPTY, action, seq, alt, par, vp

from .helpers import f, g, ga, gb, gc, u, v, x


def test_symbol_equality_is_by_name():
    assert Symbol("f", 2) == Symbol("f", 2)
    assert Symbol("f", 2) != Symbol("g", 2)
    assert hash(Symbol("a", 0)) == hash(Symbol("a", 0, SymbolKind.CONSTANT))


def test_special_constants_have_arity_zero():
    with pytest.raises(ValueError):
        Symbol("#bad", 1, SymbolKind.SPECIAL)


def test_arity_checked_on_construction():
    with pytest.raises(ValueError):
        App(Symbol("f", 2), (u,))


def test_subterm_at_fig1_target():
    t = seq(seq(vp("dc", "dia", "ss"), action("ss", "!", "not")),
            alt(seq(gb, gc), EMPTY))
    assert subterm_at(t, (1, 2)) == action("ss", "!", "not")
    assert subterm_at(t, ()) == t


def test_subterm_at_gated_term_position():
    # seq(seq(v, #a), alt(seq(#b, #c), 0)) has the gate #a at position 1.2
    t = seq(seq(v, ga), alt(seq(gb, gc), EMPTY))
    assert subterm_at(t, (1, 2)) == ga


def test_subterm_at_constant_rejects_nonroot():
    with pytest.raises(InvalidPositionError):
        subterm_at(ga, (1,))


def test_apply_substitution_composes_stepwise():
    s1 = Substitution({0: f(x(1), x(2))})
    s2 = Substitution({1: ga})
    assert apply_substitution(apply_substitution(x(0), s1), s2) == f(ga, x(2))
    assert apply_substitution(x(0), s1.compose(s2)) == f(ga, x(2))


def test_apply_empty_substitution_is_identity():
    t = f(ga, g(u, v))
    assert apply_substitution(t, Substitution()) == t


def test_apply_substitution_fig1_generalization():
    r = seq(seq(x(0), ga), alt(seq(gb, gc), x(1)))
    sigma = Substitution({0: EMPTY, 1: u})
    assert apply_substitution(r, sigma) == seq(
        seq(EMPTY, ga), alt(seq(gb, gc), u)
    )


def test_substitution_drops_identity_bindings():
    s = Substitution({0: Var(0), 1: u})
    assert s.domain == frozenset({1})


def test_special_constants_examples():
    assert special_constants(f(ga, g(gb, u))) == {ga.symbol, gb.symbol}
    assert special_constants(g(u, v)) == frozenset()
    r = seq(seq(x(0), ga), alt(seq(gb, gc), x(1)))
    assert special_constants(r) == {ga.symbol, gb.symbol, gc.symbol}


def test_conflict_positions_failure_case():
    s = f(ga, g(gb, u))
    t = f(ga, g(v, gb))
    rep = conflict_positions(s, t)
    assert rep == ConflictReport(frozenset(), frozenset({(2, 1), (2, 2)}))


def test_conflict_positions_solvable_case():
    s = f(ga, g(u, u))
    t = f(ga, g(v, v))
    rep = conflict_positions(s, t)
    assert rep == ConflictReport(frozenset({(2, 1), (2, 2)}), frozenset())


def test_conflict_positions_equal_terms():
    t = f(ga, g(u, u))
    rep = conflict_positions(t, t)
    assert rep.solvable == frozenset() and rep.failure == frozenset()


def test_renaming_equivalent():
    assert renaming_equivalent(f(x(0), g(x(1), x(1))), f(x(2), g(x(3), x(3))))
    assert not renaming_equivalent(f(x(0), x(0)), f(x(0), x(1)))
    assert renaming_equivalent(f(ga, g(x(3), x(3))), f(ga, g(x(0), x(0))))


def test_size_and_positions():
    t = f(ga, g(u, u))
    assert size(t) == 5
    assert set(positions(t)) == {(), (1,), (2,), (2, 1), (2, 2)}


# -- property tests ----------------------------------------------------------

terms_st = st.deferred(
    lambda: st.one_of(
        st.integers(min_value=0, max_value=3).map(Var),
        st.sampled_from([u, v, ga, gb]),
        st.tuples(terms_st, terms_st).map(lambda p: f(*p)),
        st.tuples(terms_st, terms_st).map(lambda p: g(*p)),
    )
)


@given(terms_st)
def test_subterm_size_bounded(t):
    for p in positions(t):
        sub = subterm_at(t, p)
        assert size(sub) <= size(t)
        assert (size(sub) == size(t)) == (p == ())


@given(terms_st, st.dictionaries(st.integers(0, 3), terms_st, max_size=3),
       st.dictionaries(st.integers(0, 3), terms_st, max_size=3),
       st.dictionaries(st.integers(0, 3), terms_st, max_size=3))
def test_substitution_composition_associative(t, d1, d2, d3):
    s1, s2, s3 = Substitution(d1), Substitution(d2), Substitution(d3)
    left = s1.compose(s2).compose(s3)
    right = s1.compose(s2.compose(s3))
    assert left.apply(t) == right.apply(t)


@given(terms_st)
def test_canonical_renaming_is_renaming_equivalent(t):
    canon = canonical_renaming(t).apply(t)
    assert renaming_equivalent(t, canon)
