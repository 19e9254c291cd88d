"""Shared term constructors for the test suite."""

from __future__ import annotations

from scpau.terms import App, Symbol, SymbolKind, Term, Var, const

F = Symbol("f", 2)
G = Symbol("g", 2)
H = Symbol("h", 1)

GATE_A = Symbol("#a", 0, SymbolKind.SPECIAL)
GATE_B = Symbol("#b", 0, SymbolKind.SPECIAL)
GATE_C = Symbol("#c", 0, SymbolKind.SPECIAL)

U = Symbol("u", 0, SymbolKind.CONSTANT)
V = Symbol("v", 0, SymbolKind.CONSTANT)
W = Symbol("w", 0, SymbolKind.CONSTANT)


def f(a: Term, b: Term) -> Term:
    return App(F, (a, b))


def g(a: Term, b: Term) -> Term:
    return App(G, (a, b))


def h(a: Term) -> Term:
    return App(H, (a,))


ga = const(GATE_A)
gb = const(GATE_B)
gc = const(GATE_C)
u = const(U)
v = const(V)
w = const(W)


def x(i: int) -> Var:
    return Var(i)
