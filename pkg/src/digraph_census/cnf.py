"""First-order CNF input files for an external finite model finder.

The ``pq`` template is the interchange format the census fixes by example and
is emitted byte-exactly: term names ``p`` and ``g`` (the second term is
conventionally named ``g`` in these files), predicate ``gr``, constants
``n0..n{n-1}``, clause tags ``mt``/``pr``/``wnu``/``graph``/``elems``, one
``gr``/``~gr`` fact per edge slot in row-major order, all pairwise
distinctness clauses, then the domain-closure clause. The axiom blocks for the
other kinds are constructed by analogy with the same scaffolding; only the
``pq`` block is fixed by an external example.

Output is 7-bit text with LF line endings; emission is a pure function of
(digraph, kind).
"""

from __future__ import annotations

from .core import Digraph

# the two-premise/three-premise edge-preservation clause bodies, including the
# double space after the second premise that the pq template carries
_PRESERVE3 = "cnf(pr, axiom, ~gr(X0,X1) | ~gr(X2,X3) |  ~gr(X4,X5) | gr({f}(X0,X2,X4),{f}(X1,X3,X5)))."
_PRESERVE2 = "cnf(pr, axiom, ~gr(X0,X1) | ~gr(X2,X3) | gr({f}(X0,X2),{f}(X1,X3)))."

_AXIOM_BLOCKS = {
    "pq": [
        "cnf(mt, axiom, p(X,X,X)=X).",
        "cnf(mt, axiom, p(X,X,Y)=p(X,Y,Y)).",
        _PRESERVE3.format(f="p"),
        "cnf(wnu, axiom, g(X,X,X)=X).",
        "cnf(wnu, axiom, g(X,X,Y)=g(X,Y,X)).",
        "cnf(wnu, axiom, g(X,X,Y)=g(Y,X,X)).",
        _PRESERVE3.format(f="g"),
        "cnf(mt, axiom, p(X,Y,X)=g(Y,X,X)).",
    ],
    "majority": [
        "cnf(mt, axiom, m(X,X,Y)=X).",
        "cnf(mt, axiom, m(X,Y,X)=X).",
        "cnf(mt, axiom, m(Y,X,X)=X).",
        _PRESERVE3.format(f="m"),
    ],
    "wnu3": [
        "cnf(wnu, axiom, g(X,X,X)=X).",
        "cnf(wnu, axiom, g(X,X,Y)=g(X,Y,X)).",
        "cnf(wnu, axiom, g(X,X,Y)=g(Y,X,X)).",
        _PRESERVE3.format(f="g"),
    ],
    "wnu2": [
        "cnf(wnu, axiom, f(X,X)=X).",
        "cnf(wnu, axiom, f(X,Y)=f(Y,X)).",
        _PRESERVE2.format(f="f"),
    ],
}

KINDS = tuple(_AXIOM_BLOCKS)


def emit_cnf(g: Digraph, kind: str) -> str:
    """CNF document deciding whether ``g`` admits the kind's polymorphism(s)."""
    if kind not in _AXIOM_BLOCKS:
        raise ValueError(f"unknown cnf kind {kind!r}; expected one of {KINDS}")
    n = g.n
    lines = list(_AXIOM_BLOCKS[kind])
    for i in range(n):
        for j in range(n):
            fact = f"gr(n{i},n{j})" if g.has_edge(i, j) else f"~gr(n{i},n{j})"
            lines.append(f"cnf(graph, axiom, {fact}).")
    for i in range(n):
        for j in range(i + 1, n):
            lines.append(f"cnf(elems, axiom, n{i}!=n{j}).")
    closure = " | ".join(f"X=n{i}" for i in range(n))
    lines.append(f"cnf(elems, axiom, ({closure})).")
    return "\n".join(lines) + "\n"
