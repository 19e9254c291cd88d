"""Equational theories as per-symbol attributes, with canonical normal forms.

Equality modulo a theory in the associative / commutative / unit fragment is
decided by rewriting to a canonical form: associative spines are flattened and
re-nested to the right, unit elements are removed from unit-carrying
operators, and arguments of commutative operators are sorted by a fixed total
term order.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from functools import reduce

from .terms import (
    App,
    Position,
    Symbol,
    SymbolKind,
    Term,
    Var,
    const,
    positions,
    replace_at,
    special_constants,
    subterm_at,
    term_key,
    variables,
)


@dataclass(frozen=True)
class Attributes:
    associative: bool = False
    commutative: bool = False
    unit: Symbol | None = None


NO_ATTRIBUTES = Attributes()


class Theory:
    """Per-symbol equational attributes plus optional raw equations.

    Raw equations are not used for normalization; they only participate in
    the sc-preservation validation.
    """

    def __init__(
        self,
        attributes: dict[Symbol, Attributes] | None = None,
        raw_equations: list[tuple[Term, Term]] | None = None,
    ):
        attributes = attributes or {}
        for sym, attrs in attributes.items():
            if (attrs.associative or attrs.commutative) and sym.arity != 2:
                raise ValueError(
                    f"associative/commutative attribute on non-binary {sym.name!r}"
                )
            if attrs.unit is not None:
                u = attrs.unit
                if u.arity != 0 or u.kind is not SymbolKind.CONSTANT:
                    raise ValueError(
                        f"unit of {sym.name!r} must be an ordinary constant"
                    )
        self._attributes = dict(attributes)
        self.raw_equations = list(raw_equations or [])
        self._norm_cache: dict[Term, Term] = {}

    def attributes(self, sym: Symbol) -> Attributes:
        return self._attributes.get(sym, NO_ATTRIBUTES)

    def attribute_map(self) -> dict[Symbol, Attributes]:
        return dict(self._attributes)

    def is_commutative(self, sym: Symbol) -> bool:
        return self.attributes(sym).commutative

    def unit_of(self, sym: Symbol) -> Symbol | None:
        return self.attributes(sym).unit

    def __repr__(self) -> str:
        parts = []
        for sym, a in sorted(self._attributes.items(), key=lambda kv: kv[0].name):
            tags = [t for t, on in (("assoc", a.associative), ("comm", a.commutative)) if on]
            if a.unit is not None:
                tags.append(f"unit={a.unit.name}")
            parts.append(f"{sym.name}: {' '.join(tags)}")
        return f"Theory({'; '.join(parts)})"


EMPTY_THEORY = Theory()


def flatten_assoc(t: Term, f: Symbol) -> list[Term]:
    """Argument list of the maximal f-spine rooted at t (t itself if not f-headed)."""
    out: list[Term] = []

    def walk(x: Term) -> None:
        if isinstance(x, App) and x.symbol == f:
            walk(x.children[0])
            walk(x.children[1])
        else:
            out.append(x)

    walk(t)
    return out


def fold_assoc(f: Symbol, elems: list[Term], unit: Symbol | None) -> Term:
    """Right-nested f-spine over elems; the empty list denotes the unit."""
    if not elems:
        if unit is None:
            raise ValueError(f"empty argument list for non-unital {f.name!r}")
        return const(unit)
    return reduce(lambda acc, x: App(f, (x, acc)), reversed(elems[:-1]), elems[-1])


def normalize(t: Term, theory: Theory) -> Term:
    cached = theory._norm_cache.get(t)
    if cached is not None:
        return cached
    out = _normalize(t, theory)
    theory._norm_cache[t] = out
    return out


def _normalize(t: Term, theory: Theory) -> Term:
    if isinstance(t, Var):
        return t
    kids = tuple(normalize(c, theory) for c in t.children)
    f = t.symbol
    attrs = theory.attributes(f)
    if attrs.associative:
        flat: list[Term] = []
        for k in kids:
            flat.extend(flatten_assoc(k, f))
        if attrs.unit is not None:
            u = const(attrs.unit)
            flat = [x for x in flat if x != u]
            if not flat:
                return u
        if attrs.commutative:
            flat.sort(key=term_key)
        if len(flat) == 1:
            return flat[0]
        return fold_assoc(f, flat, attrs.unit)
    if attrs.unit is not None and f.arity == 2:
        u = const(attrs.unit)
        left, right = kids
        if left == u:
            return right
        if right == u:
            return left
    if attrs.commutative:
        kids = tuple(sorted(kids, key=term_key))
    if kids == t.children:
        return t
    return App(f, kids)


def eq_modulo(a: Term, b: Term, theory: Theory) -> bool:
    return normalize(a, theory) == normalize(b, theory)


def attribute_equations(theory: Theory) -> list[tuple[Term, Term]]:
    """The equations induced by the theory's attribute declarations."""
    x, y, z = Var(-1), Var(-2), Var(-3)
    out: list[tuple[Term, Term]] = []
    for sym, attrs in theory.attribute_map().items():
        if attrs.associative:
            out.append((App(sym, (x, App(sym, (y, z)))), App(sym, (App(sym, (x, y)), z))))
        if attrs.commutative:
            out.append((App(sym, (x, y)), App(sym, (y, x))))
        if attrs.unit is not None:
            u = const(attrs.unit)
            out.append((App(sym, (u, x)), x))
            out.append((App(sym, (x, u)), x))
    return out


def validate_sc_preserving(theory: Theory) -> bool:
    """Syntactic criterion: every equation l ~ r must satisfy SC(l) = SC(r)
    and Var(l) = Var(r). Sufficient for the semantic condition that equal
    terms carry equal special-constant sets; attribute-only theories always
    pass."""
    for l, r in attribute_equations(theory) + theory.raw_equations:
        if special_constants(l) != special_constants(r):
            return False
        if variables(l) != variables(r):
            return False
    return True


class TheoryNotScPreservingError(ValueError):
    """Raised when an operation requires an sc-preserving theory."""


def require_sc_preserving(theory: Theory) -> None:
    if not validate_sc_preserving(theory):
        raise TheoryNotScPreservingError(
            "theory is not special-constant-preserving"
        )


def commutative_positions(t: Term, theory: Theory) -> list[Position]:
    return [
        p
        for p in positions(t)
        if isinstance(subterm_at(t, p), App)
        and theory.is_commutative(subterm_at(t, p).symbol)  # type: ignore[union-attr]
    ]


def mutate_commutative(t: Term, theory: Theory, count: int, seed: int) -> Term:
    """Apply `count` random argument swaps at commutative positions; fewer if
    no eligible position remains. Deterministic for a fixed seed and equal to
    the input modulo the theory."""
    if count < 0:
        raise ValueError("count must be non-negative")
    rng = random.Random(seed)
    for _ in range(count):
        candidates = commutative_positions(t, theory)
        if not candidates:
            break
        p = rng.choice(candidates)
        node = subterm_at(t, p)
        assert isinstance(node, App)
        swapped = App(node.symbol, (node.children[1], node.children[0]))
        t = replace_at(t, p, swapped)
    return t
