"""First-order terms: symbols, positions, substitutions, gate-aware queries."""

from __future__ import annotations

import enum
from collections.abc import Iterator, Mapping
from dataclasses import dataclass, field


class SymbolKind(enum.Enum):
    FUNCTION = "function"
    CONSTANT = "constant"
    SPECIAL = "special"
    VAR_MARKER = "var-marker"


@dataclass(frozen=True, eq=False)
class Symbol:
    """A function symbol. Two symbols are equal iff their names are equal;
    a signature is responsible for keeping names unique."""

    name: str
    arity: int
    kind: SymbolKind = SymbolKind.FUNCTION

    def __post_init__(self) -> None:
        if self.arity < 0:
            raise ValueError(f"negative arity for {self.name!r}")
        if self.kind in (SymbolKind.SPECIAL, SymbolKind.VAR_MARKER) and self.arity != 0:
            raise ValueError(f"{self.kind.value} symbol {self.name!r} must have arity 0")

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Symbol) and self.name == other.name

    def __hash__(self) -> int:
        return hash(self.name)

    def __repr__(self) -> str:
        return f"Symbol({self.name!r}/{self.arity})"


@dataclass(frozen=True, eq=False)
class Var:
    id: int

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Var) and self.id == other.id

    def __hash__(self) -> int:
        return hash(("var", self.id))

    def __repr__(self) -> str:
        return f"?x{self.id}"


@dataclass(frozen=True, eq=False)
class App:
    symbol: Symbol
    children: tuple["Term", ...] = ()
    _hash: int = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if len(self.children) != self.symbol.arity:
            raise ValueError(
                f"{self.symbol.name!r} expects {self.symbol.arity} children, "
                f"got {len(self.children)}"
            )
        object.__setattr__(self, "_hash", hash((self.symbol.name, self.children)))

    def __eq__(self, other: object) -> bool:
        if self is other:
            return True
        return (
            isinstance(other, App)
            and self._hash == other._hash
            and self.symbol == other.symbol
            and self.children == other.children
        )

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        if not self.children:
            return self.symbol.name
        return f"{self.symbol.name}({', '.join(map(repr, self.children))})"


Term = Var | App

# Positions are 1-based paths; () is the root.
Position = tuple[int, ...]


class InvalidPositionError(ValueError):
    pass


def const(symbol: Symbol) -> App:
    return App(symbol, ())


def size(t: Term) -> int:
    if isinstance(t, Var):
        return 1
    return 1 + sum(size(c) for c in t.children)


def head_name(t: Term) -> object:
    """Head of a term: the variable itself, or the application's symbol."""
    return t if isinstance(t, Var) else t.symbol


def positions(t: Term) -> Iterator[Position]:
    yield ()
    if isinstance(t, App):
        for i, c in enumerate(t.children, 1):
            for p in positions(c):
                yield (i, *p)


def subterm_at(t: Term, p: Position) -> Term:
    for i in p:
        if isinstance(t, Var) or not 1 <= i <= len(t.children):
            raise InvalidPositionError(f"position {list(p)} not in term")
        t = t.children[i - 1]
    return t


def replace_at(t: Term, p: Position, new: Term) -> Term:
    if not p:
        return new
    if isinstance(t, Var) or not 1 <= p[0] <= len(t.children):
        raise InvalidPositionError(f"position {list(p)} not in term")
    i = p[0] - 1
    kids = list(t.children)
    kids[i] = replace_at(kids[i], p[1:], new)
    return App(t.symbol, tuple(kids))


def variables(t: Term) -> set[int]:
    out: set[int] = set()
    stack = [t]
    while stack:
        x = stack.pop()
        if isinstance(x, Var):
            out.add(x.id)
        else:
            stack.extend(x.children)
    return out


def is_ground(t: Term) -> bool:
    if isinstance(t, Var):
        return False
    return all(is_ground(c) for c in t.children)


def special_constants(t: Term) -> frozenset[Symbol]:
    out: set[Symbol] = set()
    stack = [t]
    while stack:
        x = stack.pop()
        if isinstance(x, App):
            if x.symbol.kind is SymbolKind.SPECIAL:
                out.add(x.symbol)
            stack.extend(x.children)
    return frozenset(out)


def term_key(t: Term):
    """Total-order key: variables by id and before applications, applications
    by head name, then arity, then lexicographically on children."""
    if isinstance(t, Var):
        return (0, t.id)
    return (1, t.symbol.name, t.symbol.arity, tuple(term_key(c) for c in t.children))


class Substitution(Mapping[int, Term]):
    """Finite map from variable ids to terms; identity bindings are dropped."""

    __slots__ = ("_bindings",)

    def __init__(self, bindings: Mapping[int, Term] | None = None):
        self._bindings: dict[int, Term] = {
            x: t for x, t in (bindings or {}).items() if t != Var(x)
        }

    def __getitem__(self, x: int) -> Term:
        return self._bindings[x]

    def __iter__(self):
        return iter(self._bindings)

    def __len__(self) -> int:
        return len(self._bindings)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Substitution) and self._bindings == other._bindings

    def __hash__(self) -> int:
        return hash(frozenset(self._bindings.items()))

    def __repr__(self) -> str:
        inner = ", ".join(f"?x{x} -> {t!r}" for x, t in sorted(self._bindings.items()))
        return "{" + inner + "}"

    @property
    def domain(self) -> frozenset[int]:
        return frozenset(self._bindings)

    def range_terms(self) -> tuple[Term, ...]:
        return tuple(self._bindings[x] for x in sorted(self._bindings))

    def variable_range(self) -> frozenset[int]:
        out: set[int] = set()
        for t in self._bindings.values():
            out |= variables(t)
        return frozenset(out)

    def apply(self, t: Term) -> Term:
        if isinstance(t, Var):
            return self._bindings.get(t.id, t)
        if not self._bindings:
            return t
        return App(t.symbol, tuple(self.apply(c) for c in t.children))

    def compose(self, other: "Substitution") -> "Substitution":
        """Left-to-right composition: t.(self.compose(other)) == other(self(t))."""
        out = {x: other.apply(t) for x, t in self._bindings.items()}
        for y, t in other._bindings.items():
            if y not in out:
                out[y] = t
        return Substitution(out)

    def restrict(self, keep: set[int] | frozenset[int]) -> "Substitution":
        return Substitution({x: t for x, t in self._bindings.items() if x in keep})

    def bind(self, x: int, t: Term) -> "Substitution":
        out = dict(self._bindings)
        out[x] = t
        return Substitution(out)


def apply_substitution(t: Term, sigma: Substitution) -> Term:
    return sigma.apply(t)


@dataclass(frozen=True)
class ConflictReport:
    solvable: frozenset[Position]
    failure: frozenset[Position]


def conflict_positions(s: Term, t: Term) -> ConflictReport:
    """Partition the conflict positions of (s, t): common positions where heads
    first differ, split by whether either diverging subterm mentions a special
    constant (failure) or neither does (solvable)."""
    solvable: set[Position] = set()
    failure: set[Position] = set()

    def walk(a: Term, b: Term, p: Position) -> None:
        if head_name(a) == head_name(b):
            if isinstance(a, App) and isinstance(b, App):
                for i, (ca, cb) in enumerate(zip(a.children, b.children), 1):
                    walk(ca, cb, (*p, i))
            return
        if special_constants(a) or special_constants(b):
            failure.add(p)
        else:
            solvable.add(p)

    walk(s, t, ())
    return ConflictReport(frozenset(solvable), frozenset(failure))


def renaming_equivalent(a: Term, b: Term) -> bool:
    """True iff some bijective variable-to-variable renaming maps a onto b."""
    fwd: dict[int, int] = {}
    bwd: dict[int, int] = {}

    def walk(x: Term, y: Term) -> bool:
        if isinstance(x, Var) and isinstance(y, Var):
            if fwd.setdefault(x.id, y.id) != y.id:
                return False
            if bwd.setdefault(y.id, x.id) != x.id:
                return False
            return True
        if isinstance(x, App) and isinstance(y, App) and x.symbol == y.symbol:
            return all(walk(cx, cy) for cx, cy in zip(x.children, y.children))
        return False

    return walk(a, b)


def canonical_renaming(t: Term) -> Substitution:
    """Renaming that renumbers the variables of t in first-occurrence order."""
    mapping: dict[int, int] = {}

    def walk(x: Term) -> None:
        if isinstance(x, Var):
            if x.id not in mapping:
                mapping[x.id] = len(mapping)
        else:
            for c in x.children:
                walk(c)

    walk(t)
    return Substitution({old: Var(new) for old, new in mapping.items()})


class Signature:
    """Explicit symbol table; terms are validated against it at parse time."""

    def __init__(self, symbols: list[Symbol] | None = None):
        self._by_name: dict[str, Symbol] = {}
        for sym in symbols or []:
            self.declare(sym)

    def declare(self, sym: Symbol) -> Symbol:
        prev = self._by_name.get(sym.name)
        if prev is not None:
            if prev.arity != sym.arity or prev.kind is not sym.kind:
                raise ValueError(
                    f"symbol {sym.name!r} redeclared with different arity or kind"
                )
            return prev
        self._by_name[sym.name] = sym
        return sym

    def lookup(self, name: str) -> Symbol | None:
        return self._by_name.get(name)

    def __contains__(self, name: str) -> bool:
        return name in self._by_name

    def symbols(self) -> list[Symbol]:
        return list(self._by_name.values())
