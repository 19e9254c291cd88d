"""Gate-preserving anti-unification engine.

Configurations hold a set of active subproblems (anti-unification triples),
a store of solved ones, and the accumulated mapping from the root variable.
Rules transform configurations: Decompose for symbols without equational
attributes, a commutative variant that branches over argument pairings, an
associative variant that branches over binary splits of flattened argument
lists (multiset bipartitions for associative-commutative symbols, contiguous
splits otherwise, empty blocks standing for the unit where one exists), a
unit-expansion rule that wraps one side when the other is headed by a
unit-carrying symbol, Solve for special-constant-free head conflicts, and
Recover for sharing previously solved subproblems. A Fail rule prunes any
branch containing a subproblem whose sides disagree on their special
constants, which can never be emptied.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, replace

from .terms import (
    App,
    Substitution,
    Symbol,
    Term,
    Var,
    canonical_renaming,
    is_ground,
    size,
    special_constants,
    variables,
)
from .matching import BudgetExhausted, subsumes
from .theory import (
    Theory,
    flatten_assoc,
    fold_assoc,
    normalize,
    require_sc_preserving,
)


@dataclass(frozen=True)
class AUT:
    """Anti-unification triple: a pending subproblem indexed by a variable."""

    index: int
    left: Term
    right: Term
    expansions: frozenset[str] = frozenset()

    @property
    def size(self) -> int:
        return size(self.left) + size(self.right)

    def pair(self) -> tuple[Term, Term]:
        return (self.left, self.right)


@dataclass(frozen=True)
class Configuration:
    active: tuple[AUT, ...]
    store: tuple[AUT, ...]
    theta: Substitution
    root: int
    next_var: int

    def generalization(self) -> Term:
        return self.theta.apply(Var(self.root))

    def left_witness(self) -> Substitution:
        return Substitution({a.index: a.left for a in self.active + self.store})

    def right_witness(self) -> Substitution:
        return Substitution({a.index: a.right for a in self.active + self.store})


@dataclass(frozen=True)
class Bottom:
    """Result of the Fail rule: the branch can never reach a solved state."""

    blocking: frozenset[tuple[Term, Term]]


def initial_config(s0: Term, t0: Term) -> Configuration:
    if not (is_ground(s0) and is_ground(t0)):
        raise ValueError("anti-unification inputs must be ground")
    return Configuration(
        active=(AUT(0, s0, t0),),
        store=(),
        theta=Substitution(),
        root=0,
        next_var=1,
    )


def measure(c: Configuration) -> tuple[int, ...]:
    """Multiset of active subproblem sizes, as a sorted tuple."""
    return tuple(sorted(a.size for a in c.active))


@dataclass
class Solution:
    generalization: Term
    left_witness: Substitution
    right_witness: Substitution


@dataclass
class GenResult:
    pass


@dataclass
class Solutions(GenResult):
    solutions: list[Solution]


@dataclass
class Failure(GenResult):
    blocking: frozenset[tuple[Term, Term]]


@dataclass
class Timeout(GenResult):
    pass


@dataclass
class GenOptions:
    fail_rule: bool = True
    mode: str = "maximal"  # first | all | maximal
    timeout: float | None = None
    node_budget: int = 10**6
    check_invariants: bool = True
    memoize: bool = True
    subsume_budget: int = 10**6


@dataclass
class EngineStats:
    explored: int = 0
    solved_finals: int = 0
    measure_violations: int = 0
    invariant_violations: int = 0
    max_expansions_per_aut: int = 0


_EXPANSION_FORMS = ("L:pre", "L:post", "R:pre", "R:post")


def _head_symbol(t: Term) -> Symbol | None:
    return t.symbol if isinstance(t, App) else None


def _norm_pair(a: AUT, theory: Theory) -> tuple[Term, Term]:
    return (normalize(a.left, theory), normalize(a.right, theory))


def successors(
    c: Configuration, theory: Theory, fail_rule: bool
) -> Bottom | list[tuple[str, Configuration]]:
    """All configurations reachable in one rule application, or Bottom.

    The rule fires on the first active subproblem that admits one, in the
    priority order Fail > Recover > Decompose family > Expand-Unit > Solve;
    an empty list means the configuration is final.
    """
    if fail_rule:
        mismatched = [
            a.pair()
            for a in c.active
            if special_constants(a.left) != special_constants(a.right)
        ]
        if mismatched:
            return Bottom(frozenset(mismatched))
    store_index = {_norm_pair(a, theory): a.index for a in c.store}
    for pos, aut in enumerate(c.active):
        out = _aut_successors(c, pos, aut, theory, store_index)
        if out:
            return out
    return []


def _aut_successors(
    c: Configuration,
    pos: int,
    aut: AUT,
    theory: Theory,
    store_index: dict[tuple[Term, Term], int],
) -> list[tuple[str, Configuration]]:
    s, t = aut.left, aut.right
    shared = store_index.get(_norm_pair(aut, theory))
    if shared is not None:
        theta = c.theta.compose(Substitution({aut.index: Var(shared)}))
        cfg = replace(
            c,
            active=c.active[:pos] + c.active[pos + 1 :],
            theta=theta,
        )
        return [("Recover", cfg)]

    hs, ht = _head_symbol(s), _head_symbol(t)
    if hs is not None and hs == ht:
        attrs = theory.attributes(hs)
        if attrs.associative:
            return _decompose_assoc(c, pos, aut, hs, theory)
        if attrs.commutative:
            return _decompose_comm(c, pos, aut, hs)
        return _decompose_plain(c, pos, aut, hs)

    expansions = _expand_unit(c, pos, aut, theory)
    if expansions:
        return expansions

    if not special_constants(s) and not special_constants(t):
        cfg = replace(
            c,
            active=c.active[:pos] + c.active[pos + 1 :],
            store=c.store + (aut,),
        )
        return [("Solve", cfg)]
    return []


def _spawn(
    c: Configuration,
    pos: int,
    parent: AUT,
    new_pairs: list[tuple[Term, Term]],
    image: Term,
    next_var: int,
    rule: str,
) -> tuple[str, Configuration]:
    new_auts = tuple(
        AUT(next_var + i, l, r) for i, (l, r) in enumerate(new_pairs)
    )
    theta = c.theta.compose(Substitution({parent.index: image}))
    cfg = Configuration(
        active=c.active[:pos] + new_auts + c.active[pos + 1 :],
        store=c.store,
        theta=theta,
        root=c.root,
        next_var=next_var + len(new_pairs),
    )
    return (rule, cfg)


def _decompose_plain(
    c: Configuration, pos: int, aut: AUT, f: Symbol
) -> list[tuple[str, Configuration]]:
    assert isinstance(aut.left, App) and isinstance(aut.right, App)
    pairs = list(zip(aut.left.children, aut.right.children))
    fresh = [Var(c.next_var + i) for i in range(f.arity)]
    image: Term = App(f, tuple(fresh)) if f.arity else App(f, ())
    return [_spawn(c, pos, aut, pairs, image, c.next_var, "Decompose")]


def _decompose_comm(
    c: Configuration, pos: int, aut: AUT, f: Symbol
) -> list[tuple[str, Configuration]]:
    assert isinstance(aut.left, App) and isinstance(aut.right, App)
    s1, s2 = aut.left.children
    t1, t2 = aut.right.children
    image = App(f, (Var(c.next_var), Var(c.next_var + 1)))
    out = []
    for name, pairs in (
        ("Decompose-C/1", [(s1, t1), (s2, t2)]),
        ("Decompose-C/2", [(s1, t2), (s2, t1)]),
    ):
        out.append(_spawn(c, pos, aut, pairs, image, c.next_var, name))
    return _dedup(out)


def _decompose_assoc(
    c: Configuration, pos: int, aut: AUT, f: Symbol, theory: Theory
) -> list[tuple[str, Configuration]]:
    attrs = theory.attributes(f)
    unit = attrs.unit
    se = flatten_assoc(aut.left, f)
    te = flatten_assoc(aut.right, f)
    image = App(f, (Var(c.next_var), Var(c.next_var + 1)))

    def fold(elems: list[Term]) -> Term:
        return fold_assoc(f, elems, unit)

    out: list[tuple[str, Configuration]] = []
    if attrs.commutative:
        m, n = len(se), len(te)
        for smask in range(2**m):
            s1 = [se[i] for i in range(m) if smask >> i & 1]
            s2 = [se[i] for i in range(m) if not smask >> i & 1]
            if unit is None and (not s1 or not s2):
                continue
            for tmask in range(2**n):
                t1 = [te[i] for i in range(n) if tmask >> i & 1]
                t2 = [te[i] for i in range(n) if not tmask >> i & 1]
                if unit is None and (not t1 or not t2):
                    continue
                if (not s1 and not t1) or (not s2 and not t2):
                    continue
                pairs = [(fold(s1), fold(t1)), (fold(s2), fold(t2))]
                out.append(
                    _spawn(c, pos, aut, pairs, image, c.next_var, "Decompose-AC")
                )
    else:
        m, n = len(se), len(te)
        for k in range(m + 1):
            if unit is None and k in (0, m):
                continue
            for l in range(n + 1):
                if unit is None and l in (0, n):
                    continue
                if (k == 0 and l == 0) or (k == m and l == n):
                    continue
                pairs = [
                    (fold(se[:k]), fold(te[:l])),
                    (fold(se[k:]), fold(te[l:])),
                ]
                out.append(
                    _spawn(c, pos, aut, pairs, image, c.next_var, "Decompose-A")
                )
    return _dedup(out)


def _expand_unit(
    c: Configuration, pos: int, aut: AUT, theory: Theory
) -> list[tuple[str, Configuration]]:
    out: list[tuple[str, Configuration]] = []
    s, t = aut.left, aut.right
    hs, ht = _head_symbol(s), _head_symbol(t)
    # Rewrite the left side when the right head carries a unit, and dually.
    cases = []
    if ht is not None and theory.unit_of(ht) is not None and hs != ht:
        cases.append(("L", ht, s))
    if hs is not None and theory.unit_of(hs) is not None and ht != hs:
        cases.append(("R", hs, t))
    for side, f, w in cases:
        u = App(theory.unit_of(f), ())  # type: ignore[arg-type]
        forms = [(f"{side}:pre", App(f, (u, w)))]
        if not theory.is_commutative(f):
            forms.append((f"{side}:post", App(f, (w, u))))
        for tag, wrapped in forms:
            if tag in aut.expansions:
                continue
            new_aut = (
                AUT(aut.index, wrapped, t, aut.expansions | {tag})
                if side == "L"
                else AUT(aut.index, s, wrapped, aut.expansions | {tag})
            )
            cfg = replace(
                c, active=c.active[:pos] + (new_aut,) + c.active[pos + 1 :]
            )
            out.append(("Expand-Unit", cfg))
    return _dedup(out)


def _dedup(
    succ: list[tuple[str, Configuration]]
) -> list[tuple[str, Configuration]]:
    seen: set[tuple] = set()
    out = []
    for name, cfg in succ:
        key = tuple((a.index, a.left, a.right, a.expansions) for a in cfg.active)
        if key in seen:
            continue
        seen.add(key)
        out.append((name, cfg))
    return out


class _Search:
    def __init__(self, theory: Theory, opts: GenOptions, stats: EngineStats):
        self.theory = theory
        self.opts = opts
        self.stats = stats
        self.deadline = (
            time.monotonic() + opts.timeout if opts.timeout is not None else None
        )
        self.budget = opts.node_budget
        self.path: set = set()
        self.dead: set = set()
        self.solutions: list[tuple] = []
        self.seen_keys: set = set()
        self.blocking: set[tuple[Term, Term]] = set()
        self.exhausted = False
        self.found_first = False

    def fingerprint(self, c: Configuration):
        counts: dict = {}
        for a in c.active:
            item = (_norm_pair(a, self.theory), a.expansions)
            counts[item] = counts.get(item, 0) + 1
        sto = frozenset(_norm_pair(a, self.theory) for a in c.store)
        return (frozenset(counts.items()), sto)

    def out_of_resources(self) -> bool:
        if self.budget <= 0:
            self.exhausted = True
            return True
        if self.deadline is not None and time.monotonic() > self.deadline:
            self.exhausted = True
            return True
        return False

    def check_edge(self, c: Configuration, rule: str, child: Configuration) -> None:
        if not self.opts.check_invariants:
            return
        if rule == "Expand-Unit":
            before = {a.index: a.expansions for a in c.active}
            for a in child.active:
                prev = before.get(a.index)
                if prev is not None and a.expansions > prev:
                    n = len(a.expansions)
                    self.stats.max_expansions_per_aut = max(
                        self.stats.max_expansions_per_aut, n
                    )
                    if n > len(_EXPANSION_FORMS):
                        self.stats.measure_violations += 1
        else:
            if not _multiset_decreases(measure(c), measure(child)):
                self.stats.measure_violations += 1
        _check_configuration(child, self.stats)

    def explore(self, c: Configuration) -> None:
        if self.found_first and self.opts.mode == "first":
            return
        self.stats.explored += 1
        self.budget -= 1
        if self.out_of_resources():
            return
        fp = self.fingerprint(c)
        if fp in self.path:
            return
        if self.opts.memoize and fp in self.dead:
            return
        succ = successors(c, self.theory, self.opts.fail_rule)
        if isinstance(succ, Bottom):
            self.blocking |= succ.blocking
            return
        if not succ:
            if c.active:
                self.blocking |= {a.pair() for a in c.active}
            else:
                self.record_solution(c)
            return
        self.path.add(fp)
        had_solutions = len(self.solutions)
        complete = True
        for rule, child in succ:
            self.check_edge(c, rule, child)
            self.explore(child)
            if self.exhausted or (self.found_first and self.opts.mode == "first"):
                complete = False
                break
        self.path.discard(fp)
        if (
            self.opts.memoize
            and complete
            and len(self.solutions) == had_solutions
        ):
            self.dead.add(fp)

    def record_solution(self, c: Configuration) -> None:
        self.stats.solved_finals += 1
        r = c.generalization()
        keep = variables(r)
        left = c.left_witness().restrict(keep)
        right = c.right_witness().restrict(keep)
        ren = canonical_renaming(r)
        canon_r = ren.apply(r)
        canon_wit = tuple(
            (ren.apply(Var(x)), left[x], right[x]) for x in sorted(keep)
        )
        key = (canon_r, canon_wit)
        if key in self.seen_keys:
            return
        self.seen_keys.add(key)
        self.solutions.append((r, left, right))
        if self.opts.mode == "first":
            self.found_first = True


def _multiset_decreases(before: tuple[int, ...], after: tuple[int, ...]) -> bool:
    """Strict decrease in the multiset order over naturals."""
    b = list(before)
    a = list(after)
    for x in before:
        if x in a and x in b:
            a.remove(x)
            b.remove(x)
    if not b:
        return False
    mx = max(b)
    return all(y < mx for y in a) if a else True


def _check_configuration(c: Configuration, stats: EngineStats) -> None:
    indices = [a.index for a in c.active + c.store]
    gen_vars = variables(c.generalization())
    ok = len(indices) == len(set(indices)) and set(indices) == gen_vars
    ok = ok and c.theta.variable_range() == gen_vars - {c.root}
    if not ok:
        stats.invariant_violations += 1


def generalize(
    s0: Term,
    t0: Term,
    theory: Theory,
    opts: GenOptions | None = None,
    stats: EngineStats | None = None,
) -> GenResult:
    """Search for gate-preserving generalizations of two ground terms.

    Returns Solutions with witness substitutions (mode "first" stops at the
    first solved configuration, "all" collects every distinct one, "maximal"
    additionally filters to the most specific candidates), Failure with the
    blocking subterm pairs when no branch can be solved, or Timeout when the
    node budget or wall-clock limit ran out.
    """
    opts = opts or GenOptions()
    stats = stats if stats is not None else EngineStats()
    require_sc_preserving(theory)
    search = _Search(theory, opts, stats)
    search.explore(initial_config(s0, t0))
    if search.exhausted and not (opts.mode == "first" and search.solutions):
        return Timeout()
    if not search.solutions:
        return Failure(frozenset(search.blocking))
    sols = search.solutions
    if opts.mode == "maximal":
        sols = _maximal_only(sols, theory, opts.subsume_budget)
    ordered = sorted(
        sols,
        key=lambda s: (
            -size(s[0]),
            _render_key(normalize(s[0], theory)),
            _render_key(s[0]),
            repr(s[1]),
            repr(s[2]),
        ),
    )
    return Solutions([Solution(r, l, rr) for r, l, rr in ordered])


def _render_key(t: Term) -> str:
    return repr(canonical_renaming(t).apply(t))


def _maximal_only(
    sols: list[tuple], theory: Theory, budget: int
) -> list[tuple]:
    """Keep candidates not strictly subsumed by another; on budget exhaustion
    a candidate is conservatively kept."""
    out = []
    for i, (r, _, _) in enumerate(sols):
        dominated = False
        for j, (r2, _, _) in enumerate(sols):
            if i == j:
                continue
            try:
                if subsumes(r, r2, theory, budget) and not subsumes(
                    r2, r, theory, budget
                ):
                    dominated = True
                    break
            except BudgetExhausted:
                continue
        if not dominated:
            out.append(sols[i])
    return out
