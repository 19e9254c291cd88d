import pytest
from hypothesis import given, settings, strategies as st

from scpau.interactions import (
    EMPTY,
    EMPTY_SYMBOL,
    INTERACTION_THEORY,
    alt,
    par,
    seq,
)
from scpau.terms import App, Symbol, SymbolKind, const, special_constants
from scpau.theory import (
    Attributes,
    Theory,
    attribute_equations,
    eq_modulo,
    mutate_commutative,
    normalize,
    validate_sc_preserving,
)

from .helpers import F, f, g, ga, u, v, w, x

a, b, c = u, v, w  # ordinary constants used as interaction leaves


def test_normalize_unit_absorption():
    assert normalize(seq(EMPTY, a), INTERACTION_THEORY) == a
    assert normalize(par(EMPTY, EMPTY), INTERACTION_THEORY) == EMPTY


def test_normalize_flattens_to_right_spine():
    assert normalize(seq(seq(a, b), c), INTERACTION_THEORY) == seq(a, seq(b, c))


def test_normalize_sorts_commutative_arguments():
    assert normalize(alt(b, a), INTERACTION_THEORY) == normalize(
        alt(a, b), INTERACTION_THEORY
    )


def test_eq_modulo_examples():
    assert eq_modulo(alt(a, b), alt(b, a), INTERACTION_THEORY)
    assert not eq_modulo(seq(a, b), seq(b, a), INTERACTION_THEORY)
    t = seq(a, alt(b, c))
    assert eq_modulo(t, t, INTERACTION_THEORY)


def test_theory_validates_attribute_arities():
    with pytest.raises(ValueError):
        Theory({Symbol("one", 1): Attributes(associative=True)})
    with pytest.raises(ValueError):
        Theory({F: Attributes(unit=Symbol("#a", 0, SymbolKind.SPECIAL))})


def test_validate_sc_preserving():
    assert validate_sc_preserving(INTERACTION_THEORY)
    assert validate_sc_preserving(Theory())
    a_f = const(Symbol("a_f", 0, SymbolKind.CONSTANT))
    absorbing = Theory(raw_equations=[(f(a_f, x(0)), a_f)])
    assert not validate_sc_preserving(absorbing)


def test_validate_rejects_gate_erasing_equation():
    eq = (f(ga, x(0)), f(x(0), x(0)))
    assert not validate_sc_preserving(Theory(raw_equations=[eq]))


def test_mutate_commutative():
    theory = INTERACTION_THEORY
    assert mutate_commutative(seq(a, b), theory, 5, seed=1) == seq(a, b)
    assert mutate_commutative(alt(a, b), theory, 1, seed=7) == alt(b, a)
    t = seq(alt(a, b), par(c, alt(a, c)))
    for seed in range(5):
        out = mutate_commutative(t, theory, 7, seed)
        assert eq_modulo(out, t, theory)
        assert out == mutate_commutative(t, theory, 7, seed)


# -- closure oracle ----------------------------------------------------------
#
# Independently of the normal-form code, enumerate the congruence closure of
# the attribute equations on a small term by rewriting at every position in
# both directions, and check it against eq_modulo.


def closure(t, theory, max_size=9, max_steps=4):
    from scpau.terms import Var, positions, replace_at, size, subterm_at

    eqs = attribute_equations(theory)
    rules = [(l, r) for l, r in eqs] + [(r, l) for l, r in eqs]

    def match_syn(pat, target, binding):
        if isinstance(pat, Var):
            seen = binding.get(pat.id)
            if seen is None:
                binding[pat.id] = target
                return True
            return seen == target
        if isinstance(target, Var) or pat.symbol != target.symbol:
            return False
        return all(
            match_syn(cp, ct, binding)
            for cp, ct in zip(pat.children, target.children)
        )

    def subst(pat, binding):
        if isinstance(pat, Var):
            return binding[pat.id]
        return App(pat.symbol, tuple(subst(c, binding) for c in pat.children))

    frontier = {t}
    seen = {t}
    for _ in range(max_steps):
        new = set()
        for cur in frontier:
            for p in positions(cur):
                sub = subterm_at(cur, p)
                for l, r in rules:
                    binding = {}
                    if match_syn(l, sub, binding):
                        try:
                            image = subst(r, binding)
                        except KeyError:
                            continue  # unit intro needs an unbound variable
                        out = replace_at(cur, p, image)
                        if size(out) <= max_size and out not in seen:
                            new.add(out)
        seen |= new
        frontier = new
        if not frontier:
            break
    return seen


def test_closure_never_equates_seq_orders():
    reach = closure(seq(a, b), INTERACTION_THEORY)
    assert seq(b, a) not in reach
    assert not eq_modulo(seq(a, b), seq(b, a), INTERACTION_THEORY)


def test_closure_members_are_eq_modulo():
    for start in (seq(a, alt(b, c)), par(a, seq(b, c)), alt(alt(a, b), c)):
        for member in closure(start, INTERACTION_THEORY, max_size=8, max_steps=3):
            assert eq_modulo(start, member, INTERACTION_THEORY)


def test_closure_members_preserve_special_constants():
    assert validate_sc_preserving(INTERACTION_THEORY)
    start = seq(ga, alt(b, c))
    for member in closure(start, INTERACTION_THEORY, max_size=8, max_steps=3):
        assert special_constants(member) == special_constants(start)


# -- property tests ----------------------------------------------------------

leaves = st.sampled_from([a, b, c, EMPTY, ga])
interactions_st = st.deferred(
    lambda: st.one_of(
        leaves,
        st.tuples(interactions_st, interactions_st).map(lambda p: seq(*p)),
        st.tuples(interactions_st, interactions_st).map(lambda p: alt(*p)),
        st.tuples(interactions_st, interactions_st).map(lambda p: par(*p)),
    )
)


@settings(max_examples=200, deadline=None)
@given(interactions_st)
def test_normalize_idempotent(t):
    once = normalize(t, INTERACTION_THEORY)
    assert normalize(once, INTERACTION_THEORY) == once


@settings(max_examples=100, deadline=None)
@given(interactions_st, interactions_st, interactions_st)
def test_eq_modulo_is_equivalence(t1, t2, t3):
    assert eq_modulo(t1, t1, INTERACTION_THEORY)
    assert eq_modulo(t1, t2, INTERACTION_THEORY) == eq_modulo(
        t2, t1, INTERACTION_THEORY
    )
    if eq_modulo(t1, t2, INTERACTION_THEORY) and eq_modulo(
        t2, t3, INTERACTION_THEORY
    ):
        assert eq_modulo(t1, t3, INTERACTION_THEORY)


@settings(max_examples=100, deadline=None)
@given(interactions_st, st.integers(0, 6), st.integers(0, 2**16))
def test_mutation_stays_in_class(t, count, seed):
    out = mutate_commutative(t, INTERACTION_THEORY, count, seed)
    assert eq_modulo(out, t, INTERACTION_THEORY)
