"""Matching and subsumption modulo associativity, commutativity and units.

Matching explores pairings of flattened argument lists: contiguous splits for
associative symbols, multiset assignments for associative-commutative ones,
and unit-absorption cases for unit-carrying symbols. Search is memoized on
(pattern, target) pairs and bounded by a node budget, since AC matching is
NP-hard; budget exhaustion means "unknown" and is reported as an exception
rather than an empty result.
"""

from __future__ import annotations

from itertools import combinations

from .terms import (
    App,
    Substitution,
    Symbol,
    SymbolKind,
    Term,
    Var,
    const,
    term_key,
)
from .theory import Theory, flatten_assoc, fold_assoc, normalize

DEFAULT_BUDGET = 10**6

# A solution set is a frozenset of binding maps (var id -> normalized term).
_Bindings = frozenset


class BudgetExhausted(RuntimeError):
    """The matching node budget ran out; the answer is unknown."""


class _Matcher:
    def __init__(self, theory: Theory, budget: int):
        self.theory = theory
        self.budget = budget
        self.memo: dict[tuple[Term, Term], frozenset[_Bindings]] = {}

    def tick(self) -> None:
        self.budget -= 1
        if self.budget <= 0:
            raise BudgetExhausted("match_modulo node budget exhausted")

    def match(self, p: Term, t: Term) -> frozenset[_Bindings]:
        key = (p, t)
        cached = self.memo.get(key)
        if cached is not None:
            return cached
        self.tick()
        out = self._match(p, t)
        self.memo[key] = out
        return out

    def _match(self, p: Term, t: Term) -> frozenset[_Bindings]:
        if isinstance(p, Var):
            return frozenset({frozenset({(p.id, t)})})
        f = p.symbol
        attrs = self.theory.attributes(f)
        if attrs.associative:
            return self._match_assoc(p, t, f)
        if attrs.commutative:
            return self._match_comm(p, t, f)
        if attrs.unit is not None and f.arity == 2:
            return self._match_unital(p, t, f)
        if isinstance(t, App) and t.symbol == f:
            return self._match_children(p.children, t.children)
        return frozenset()

    def _match_children(
        self, ps: tuple[Term, ...], ts: tuple[Term, ...]
    ) -> frozenset[_Bindings]:
        acc: frozenset[_Bindings] = frozenset({frozenset()})
        for cp, ct in zip(ps, ts):
            acc = _merge(acc, self.match(cp, ct))
            if not acc:
                return acc
        return acc

    def _match_comm(self, p: App, t: Term, f: Symbol) -> frozenset[_Bindings]:
        p1, p2 = p.children
        out: set[_Bindings] = set()
        if isinstance(t, App) and t.symbol == f:
            t1, t2 = t.children
            out |= _merge(self.match(p1, t1), self.match(p2, t2))
            out |= _merge(self.match(p1, t2), self.match(p2, t1))
        unit = self.theory.unit_of(f)
        if unit is not None:
            u = const(unit)
            out |= _merge(self.match(p1, u), self.match(p2, t))
            out |= _merge(self.match(p2, u), self.match(p1, t))
        return frozenset(out)

    def _match_unital(self, p: App, t: Term, f: Symbol) -> frozenset[_Bindings]:
        p1, p2 = p.children
        u = const(self.theory.unit_of(f))  # type: ignore[arg-type]
        out: set[_Bindings] = set()
        if isinstance(t, App) and t.symbol == f:
            out |= _merge(self.match(p1, t.children[0]), self.match(p2, t.children[1]))
        out |= _merge(self.match(p1, u), self.match(p2, t))
        out |= _merge(self.match(p2, u), self.match(p1, t))
        return frozenset(out)

    def _match_assoc(self, p: App, t: Term, f: Symbol) -> frozenset[_Bindings]:
        attrs = self.theory.attributes(f)
        pf = flatten_assoc(p, f)
        tf = flatten_assoc(t, f) if isinstance(t, App) and t.symbol == f else [t]
        if attrs.commutative:
            return self._match_ac(pf, tuple(tf), f)
        return self._match_a(tuple(pf), tuple(tf), 0, 0, f)

    def _fold(self, f: Symbol, elems: list[Term]) -> Term:
        unit = self.theory.unit_of(f)
        if not elems and unit is None:
            raise ValueError("empty block without unit")
        if self.theory.is_commutative(f):
            elems = sorted(elems, key=term_key)
        return normalize(fold_assoc(f, elems, unit), self.theory)

    def _match_a(
        self,
        pf: tuple[Term, ...],
        tf: tuple[Term, ...],
        i: int,
        j: int,
        f: Symbol,
    ) -> frozenset[_Bindings]:
        self.tick()
        has_unit = self.theory.unit_of(f) is not None
        if i == len(pf):
            return frozenset({frozenset()}) if j == len(tf) else frozenset()
        pi = pf[i]
        out: set[_Bindings] = set()
        for j2 in range(j, len(tf) + 1):
            # The last pattern element must consume the remaining target.
            if i == len(pf) - 1 and j2 != len(tf):
                continue
            block = list(tf[j:j2])
            if not block and not has_unit:
                continue
            if isinstance(pi, Var):
                head = frozenset({frozenset({(pi.id, self._fold(f, block))})})
            else:
                if len(block) == 1:
                    head = self.match(pi, block[0])
                else:
                    head = self.match(pi, self._fold(f, block))
            if not head:
                continue
            rest = self._match_a(pf, tf, i + 1, j2, f)
            out |= _merge(head, rest)
        return frozenset(out)

    def _match_ac(
        self, pf: list[Term], tf: tuple[Term, ...], f: Symbol
    ) -> frozenset[_Bindings]:
        has_unit = self.theory.unit_of(f) is not None
        # Ground non-variable pattern elements first, then distribute the
        # remaining target elements over the variable elements.
        fixed = [p for p in pf if not isinstance(p, Var)]
        vars_ = [p for p in pf if isinstance(p, Var)]

        def assign_fixed(
            k: int, remaining: tuple[Term, ...]
        ) -> frozenset[_Bindings]:
            self.tick()
            if k == len(fixed):
                return self._assign_vars(vars_, remaining, f)
            out: set[_Bindings] = set()
            seen: set[Term] = set()
            pk = fixed[k]
            for idx, cand in enumerate(remaining):
                if cand in seen:
                    continue
                seen.add(cand)
                head = self.match(pk, cand)
                if not head:
                    continue
                rest = assign_fixed(k + 1, remaining[:idx] + remaining[idx + 1 :])
                out |= _merge(head, rest)
            if has_unit:
                u = const(self.theory.unit_of(f))  # type: ignore[arg-type]
                head = self.match(pk, u)
                if head:
                    out |= _merge(head, assign_fixed(k + 1, remaining))
            return frozenset(out)

        return assign_fixed(0, tf)

    def _assign_vars(
        self, vars_: list[Term], remaining: tuple[Term, ...], f: Symbol
    ) -> frozenset[_Bindings]:
        self.tick()
        has_unit = self.theory.unit_of(f) is not None
        if not vars_:
            return frozenset({frozenset()}) if not remaining else frozenset()
        v = vars_[0]
        assert isinstance(v, Var)
        if len(vars_) == 1:
            if not remaining and not has_unit:
                return frozenset()
            return frozenset(
                {frozenset({(v.id, self._fold(f, list(remaining)))})}
            )
        out: set[_Bindings] = set()
        n = len(remaining)
        sizes = range(0, n + 1) if has_unit else range(1, n + 1)
        for k in sizes:
            for picked in combinations(range(n), k):
                self.tick()
                block = [remaining[i] for i in picked]
                rest = tuple(
                    remaining[i] for i in range(n) if i not in set(picked)
                )
                head = frozenset({frozenset({(v.id, self._fold(f, block))})})
                tail = self._assign_vars(vars_[1:], rest, f)
                out |= _merge(head, tail)
        return frozenset(out)


def _merge(
    a: frozenset[_Bindings], b: frozenset[_Bindings]
) -> frozenset[_Bindings]:
    if not a or not b:
        return frozenset()
    out: set[_Bindings] = set()
    for ba in a:
        da = dict(ba)
        for bb in b:
            ok = True
            for x, t in bb:
                prev = da.get(x)
                if prev is not None and prev != t:
                    ok = False
                    break
            if ok:
                out.add(ba | bb)
    return frozenset(out)


def match_modulo(
    pattern: Term,
    target: Term,
    theory: Theory,
    budget: int = DEFAULT_BUDGET,
) -> frozenset[Substitution]:
    """All substitutions (domain within Var(pattern), bound terms normalized)
    that send the pattern to the target modulo the theory. Raises
    BudgetExhausted when the search could not be completed."""
    m = _Matcher(theory, budget)
    p = normalize(pattern, theory)
    t = normalize(target, theory)
    sols = m.match(p, t)
    return frozenset(Substitution(dict(b)) for b in sols)


def matches(pattern: Term, target: Term, theory: Theory, budget: int = DEFAULT_BUDGET) -> bool:
    return bool(match_modulo(pattern, target, theory, budget))


_FROZEN_PREFIX = "$frozen:"


def freeze_variables(t: Term) -> Term:
    """Replace each variable by a marker constant so that matching treats it
    as a fixed, distinct entity."""
    if isinstance(t, Var):
        return const(Symbol(f"{_FROZEN_PREFIX}{t.id}", 0, SymbolKind.VAR_MARKER))
    return App(t.symbol, tuple(freeze_variables(c) for c in t.children))


def subsumes(r1: Term, r2: Term, theory: Theory, budget: int = DEFAULT_BUDGET) -> bool:
    """True iff r1 is at most as specific as r2 modulo the theory, i.e. some
    substitution sends r1 to r2 with r2's variables treated as constants."""
    return matches(r1, freeze_variables(r2), theory, budget)
