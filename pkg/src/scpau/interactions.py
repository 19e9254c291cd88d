"""Interaction models as ground terms, their projections, and composition.

An interaction is a ground term over atomic actions (emissions ``l!m`` and
receptions ``l?m``), value-passings ``vp(l1,m,l2)``, the empty behavior,
unary ``loop`` and binary ``seq``/``alt``/``par``. Sequencing and both
choice operators are associative, ``alt`` and ``par`` commutative, and the
empty behavior is the unit of ``seq`` and ``par``.

Composition merges two views with disjoint lifelines: tagged action pairs
are replaced by shared gates, the gated terms are anti-unified preserving
the gates, and the resulting generalization is instantiated by gluing the
two witnesses with ``seq`` and mapping each gate back to a value-passing.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .engine import (
    EngineStats,
    Failure,
    GenOptions,
    GenResult,
    Solution,
    Solutions,
    Timeout,
    generalize,
)
from .terms import (
    App,
    Position,
    Substitution,
    Symbol,
    SymbolKind,
    Term,
    Var,
    const,
    positions,
    replace_at,
    special_constants,
    subterm_at,
)
from .theory import Attributes, Theory, eq_modulo, normalize

EMPTY_SYMBOL = Symbol("0", 0, SymbolKind.CONSTANT)
EMPTY = const(EMPTY_SYMBOL)

SEQ = Symbol("seq", 2)
ALT = Symbol("alt", 2)
PAR = Symbol("par", 2)
LOOP = Symbol("loop", 1)

INTERACTION_THEORY = Theory(
    {
        SEQ: Attributes(associative=True, unit=EMPTY_SYMBOL),
        ALT: Attributes(associative=True, commutative=True),
        PAR: Attributes(associative=True, commutative=True, unit=EMPTY_SYMBOL),
    }
)

_IDENT = r"[A-Za-z0-9_]+"
_ACTION_RE = re.compile(rf"^({_IDENT})([!?])({_IDENT})$")
_VP_RE = re.compile(rf"^vp\(({_IDENT}),({_IDENT}),({_IDENT})\)$")


def seq(a: Term, b: Term) -> Term:
    return App(SEQ, (a, b))


def alt(a: Term, b: Term) -> Term:
    return App(ALT, (a, b))


def par(a: Term, b: Term) -> Term:
    return App(PAR, (a, b))


def loop(a: Term) -> Term:
    return App(LOOP, (a,))


def seqn(*parts: Term) -> Term:
    """Right-nested seq spine over the given parts."""
    return _nest(SEQ, parts)


def altn(*parts: Term) -> Term:
    return _nest(ALT, parts)


def parn(*parts: Term) -> Term:
    return _nest(PAR, parts)


def _nest(op: Symbol, parts: tuple[Term, ...]) -> Term:
    if not parts:
        return EMPTY
    out = parts[-1]
    for p in reversed(parts[:-1]):
        out = App(op, (p, out))
    return out


def action(lifeline: str, direction: str, message: str) -> Term:
    if direction not in ("!", "?"):
        raise ValueError("direction must be '!' or '?'")
    return const(Symbol(f"{lifeline}{direction}{message}", 0, SymbolKind.CONSTANT))


class SelfLoopError(ValueError):
    pass


def vp(sender: str, message: str, receiver: str) -> Term:
    if sender == receiver:
        raise SelfLoopError(f"value-passing with sender = receiver {sender!r}")
    return const(Symbol(f"vp({sender},{message},{receiver})", 0, SymbolKind.CONSTANT))


@dataclass(frozen=True)
class Action:
    lifeline: str
    direction: str  # "!" or "?"
    message: str


@dataclass(frozen=True)
class ValuePassing:
    sender: str
    message: str
    receiver: str


def decode_atom(sym: Symbol) -> Action | ValuePassing | None:
    m = _ACTION_RE.match(sym.name)
    if m:
        return Action(m.group(1), m.group(2), m.group(3))
    m = _VP_RE.match(sym.name)
    if m:
        return ValuePassing(m.group(1), m.group(2), m.group(3))
    return None


def lifelines_of(i: Term) -> frozenset[str]:
    out: set[str] = set()
    stack = [i]
    while stack:
        t = stack.pop()
        if isinstance(t, Var):
            continue
        if t.children:
            stack.extend(t.children)
            continue
        atom = decode_atom(t.symbol)
        if isinstance(atom, Action):
            out.add(atom.lifeline)
        elif isinstance(atom, ValuePassing):
            out.add(atom.sender)
            out.add(atom.receiver)
    return frozenset(out)


def project(k: Term, lifelines: set[str] | frozenset[str]) -> Term:
    """Restriction of an interaction to the given lifelines: actions outside
    them become the empty behavior, value-passings split into their local
    halves, operators map homomorphically, gates and variables are fixed."""
    if isinstance(k, Var):
        return k
    if k.children:
        return App(k.symbol, tuple(project(c, lifelines) for c in k.children))
    atom = decode_atom(k.symbol)
    if isinstance(atom, Action):
        return k if atom.lifeline in lifelines else EMPTY
    if isinstance(atom, ValuePassing):
        s_in = atom.sender in lifelines
        r_in = atom.receiver in lifelines
        if s_in and r_in:
            return k
        if s_in:
            return action(atom.sender, "!", atom.message)
        if r_in:
            return action(atom.receiver, "?", atom.message)
        return EMPTY
    return k  # empty behavior, gates, foreign constants


@dataclass(frozen=True)
class TagEntry:
    pos_left: Position
    pos_right: Position
    gate: Symbol


@dataclass(frozen=True)
class Tagging:
    entries: frozenset[TagEntry]

    def gates(self) -> frozenset[Symbol]:
        return frozenset(e.gate for e in self.entries)

    def __iter__(self):
        return iter(sorted(self.entries, key=lambda e: (e.pos_left, e.pos_right)))

    def __len__(self) -> int:
        return len(self.entries)


class DisjointnessError(ValueError):
    pass


class TaggingError(ValueError):
    pass


def compatible_actions(a: Term, b: Term) -> bool:
    """True iff {a, b} = {l1!m, l2?m} with l1 != l2."""
    if not (isinstance(a, App) and isinstance(b, App)):
        return False
    da, db = decode_atom(a.symbol), decode_atom(b.symbol)
    if not (isinstance(da, Action) and isinstance(db, Action)):
        return False
    if da.message != db.message or da.lifeline == db.lifeline:
        return False
    return {da.direction, db.direction} == {"!", "?"}


def validate_tagging(i: Term, j: Term, gamma: Tagging) -> bool:
    """Check positions, pairwise compatibility (condition 1) and gate
    uniqueness (condition 2); lifeline-disjointness of the views is a
    precondition and violating it is an error, not a False."""
    if lifelines_of(i) & lifelines_of(j):
        raise DisjointnessError("views share lifelines")
    by_gate: dict[Symbol, tuple[Term, Term]] = {}
    for e in gamma.entries:
        if e.gate.kind is not SymbolKind.SPECIAL:
            return False
        try:
            a = subterm_at(i, e.pos_left)
            b = subterm_at(j, e.pos_right)
        except Exception:
            return False
        if not compatible_actions(a, b):
            return False
        prev = by_gate.setdefault(e.gate, (a, b))
        if prev != (a, b):
            return False
    return True


class PartitionError(ValueError):
    pass


def derive_tagging(
    k: Term, part1: set[str] | frozenset[str], part2: set[str] | frozenset[str]
) -> tuple[Term, Term, Tagging]:
    """Project a global interaction onto a lifeline partition and tag the
    cross-partition value-passings: one gate per distinct (sender, message,
    receiver) triple, placed at every occurrence. Projection preserves term
    shape, so both tagged positions coincide."""
    part1, part2 = frozenset(part1), frozenset(part2)
    if part1 & part2:
        raise PartitionError("partition parts overlap")
    if not lifelines_of(k) <= (part1 | part2):
        raise PartitionError("partition does not cover the interaction")
    i = project(k, part1)
    j = project(k, part2)
    gates: dict[ValuePassing, Symbol] = {}
    entries: set[TagEntry] = set()
    for p in positions(k):
        sub = subterm_at(k, p)
        if isinstance(sub, Var) or sub.children:
            continue
        atom = decode_atom(sub.symbol)
        if not isinstance(atom, ValuePassing):
            continue
        crosses = (atom.sender in part1) != (atom.receiver in part1)
        if not crosses:
            continue
        gate = gates.setdefault(
            atom, Symbol(f"#g{len(gates)}", 0, SymbolKind.SPECIAL)
        )
        entries.add(TagEntry(p, p, gate))
    gamma = Tagging(frozenset(entries))
    assert validate_tagging(i, j, gamma)
    return i, j, gamma


@dataclass(frozen=True)
class GateMapping:
    bindings: tuple[tuple[Symbol, Term], ...]

    def as_dict(self) -> dict[Symbol, Term]:
        return dict(self.bindings)

    def apply(self, t: Term) -> Term:
        table = self.as_dict()

        def walk(x: Term) -> Term:
            if isinstance(x, Var):
                return x
            if not x.children:
                return table.get(x.symbol, x)
            return App(x.symbol, tuple(walk(c) for c in x.children))

        return walk(t)


def apply_gate_mapping(t: Term, lam: GateMapping) -> Term:
    return lam.apply(t)


def abstract_with_gates(
    i: Term, side: str, gamma: Tagging
) -> tuple[Term, GateMapping]:
    """Replace each tagged position of the chosen side by its gate; the
    returned mapping restores the original term exactly."""
    if side not in ("left", "right"):
        raise ValueError("side must be 'left' or 'right'")
    s = i
    bindings: dict[Symbol, Term] = {}
    for e in gamma.entries:
        p = e.pos_left if side == "left" else e.pos_right
        replaced = subterm_at(i, p)
        bindings[e.gate] = replaced
        s = replace_at(s, p, const(e.gate))
    lam = GateMapping(tuple(sorted(bindings.items(), key=lambda kv: kv[0].name)))
    assert apply_gate_mapping(s, lam) == i
    return s, lam


class CompositionError(RuntimeError):
    pass


class CompositionTimeout(CompositionError):
    pass


@dataclass
class Composition:
    interaction: Term
    generalization: Term
    left_witness: Substitution
    right_witness: Substitution


def _orient_vp(a: Term, b: Term) -> Term:
    """Value-passing for a compatible action pair, sender = the emission."""
    da = decode_atom(a.symbol)  # type: ignore[union-attr]
    db = decode_atom(b.symbol)  # type: ignore[union-attr]
    assert isinstance(da, Action) and isinstance(db, Action)
    if da.direction == "!":
        return vp(da.lifeline, da.message, db.lifeline)
    return vp(db.lifeline, db.message, da.lifeline)


def compose(
    i: Term,
    j: Term,
    gamma: Tagging,
    theory: Theory = INTERACTION_THEORY,
    opts: GenOptions | None = None,
    stats: EngineStats | None = None,
) -> Composition:
    """Compose two views over disjoint lifelines via a tagging.

    Both views are gate-abstracted, anti-unified preserving the gates, and
    the most specific generalization (largest, then lexicographically first
    normal form) is instantiated back: each variable by the seq of its two
    witness images, each gate by the oriented value-passing of the actions
    it stood for.
    """
    if not validate_tagging(i, j, gamma):
        raise TaggingError("invalid tagging")
    s, lam_i = abstract_with_gates(i, "left", gamma)
    t, lam_j = abstract_with_gates(j, "right", gamma)
    opts = opts or GenOptions(mode="maximal")
    if opts.mode != "maximal":
        opts = GenOptions(**{**opts.__dict__, "mode": "maximal"})
    result: GenResult = generalize(s, t, theory, opts, stats)
    if isinstance(result, Timeout):
        raise CompositionTimeout("generalization timed out")
    if isinstance(result, Failure):
        raise CompositionError(
            f"views admit no gate-preserving generalization: {sorted(map(repr, result.blocking))}"
        )
    assert isinstance(result, Solutions)
    best: Solution = result.solutions[0]
    r = best.generalization
    sigma_r = Substitution(
        {
            x: seq(best.left_witness[x], best.right_witness[x])
            for x in best.left_witness.domain
        }
    )
    table = {}
    d_i = lam_i.as_dict()
    d_j = lam_j.as_dict()
    for gate in gamma.gates():
        table[gate] = _orient_vp(d_i[gate], d_j[gate])
    lam_k = GateMapping(tuple(sorted(table.items(), key=lambda kv: kv[0].name)))
    k = lam_k.apply(sigma_r.apply(r))
    assert not special_constants(k)
    return Composition(k, r, best.left_witness, best.right_witness)


def check_composition_sound(
    i: Term, j: Term, k: Term, theory: Theory = INTERACTION_THEORY
) -> bool:
    """Projecting the composition onto each view's lifelines must give back
    that view, modulo the interaction theory."""
    if lifelines_of(i) & lifelines_of(j):
        raise DisjointnessError("views share lifelines")
    return eq_modulo(project(k, lifelines_of(i)), i, theory) and eq_modulo(
        project(k, lifelines_of(j)), j, theory
    )
