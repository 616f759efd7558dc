"""Pretty-printing back to concrete syntax.

``parse(render(t))`` is structurally equal to ``t`` for every well-formed
AST; subexpressions are parenthesized whenever nesting could rebind.
"""

from __future__ import annotations

from .terms import (
    BCall,
    BCond,
    BDef,
    BinOp,
    BoolV,
    BRecv,
    BSend,
    BNil,
    Call,
    Cell,
    Com,
    Cond,
    Def,
    ErrV,
    IntV,
    Lit,
    Network,
    Nil,
    Not,
    RtRecv,
    RtSend,
    Tag,
)

_PREC = {"or": 1, "and": 2, "=": 3, "<": 3, "+": 4, "-": 4, "*": 5}


def render_value(v) -> str:
    if isinstance(v, IntV):
        return str(v.n)
    if isinstance(v, BoolV):
        return "true" if v.b else "false"
    if isinstance(v, ErrV):
        return "err"
    raise TypeError(f"not a value: {v!r}")


def render_expr(e, parent_prec: int = 0) -> str:
    if isinstance(e, Lit):
        return render_value(e.value)
    if isinstance(e, Cell):
        return "@"
    if isinstance(e, Not):
        return f"not {render_expr(e.arg, 6)}"
    if isinstance(e, BinOp):
        prec = _PREC[e.op]
        text = (f"{render_expr(e.left, prec)} {e.op} "
                f"{render_expr(e.right, prec + 1)}")
        return f"({text})" if prec < parent_prec else text
    raise TypeError(f"not an expression: {e!r}")


def _render_payload(payload) -> str:
    if isinstance(payload, Tag):
        return f"#{payload.id}"
    return render_value(payload)


def render_choreography(c) -> str:
    if isinstance(c, Nil):
        return "0"
    if isinstance(c, Com):
        return (f"{c.src}.{render_expr(c.expr, 6)} -> {c.dst}; "
                f"{render_choreography(c.cont)}")
    if isinstance(c, RtSend):
        return (f"{c.src}.{render_expr(c.expr, 6)} ~> [#{c.tag.id}]; "
                f"{render_choreography(c.cont)}")
    if isinstance(c, RtRecv):
        return (f"{c.dst} <~ ({c.src}, {_render_payload(c.payload)}); "
                f"{render_choreography(c.cont)}")
    if isinstance(c, Cond):
        return (f"if {c.decider}.{render_expr(c.expr)} "
                f"then {{ {render_choreography(c.then)} }} "
                f"else {{ {render_choreography(c.orelse)} }}")
    if isinstance(c, Def):
        return (f"def {c.var} = {{ {render_choreography(c.body)} }} "
                f"in {render_choreography(c.cont)}")
    if isinstance(c, Call):
        return c.var
    raise TypeError(f"not a choreography: {c!r}")


def render_behaviour(b) -> str:
    if isinstance(b, BNil):
        return "0"
    if isinstance(b, BSend):
        return (f"{b.dst}!{render_expr(b.expr, 6)}; "
                f"{render_behaviour(b.cont)}")
    if isinstance(b, BRecv):
        return f"{b.src}?; {render_behaviour(b.cont)}"
    if isinstance(b, BCond):
        text = (f"if {render_expr(b.expr)} "
                f"then {{ {render_behaviour(b.then)} }} "
                f"else {{ {render_behaviour(b.orelse)} }}")
        if not isinstance(b.cont, BNil):
            text += f"; {render_behaviour(b.cont)}"
        return text
    if isinstance(b, BDef):
        return (f"def {b.var} = {{ {render_behaviour(b.body)} }} "
                f"in {render_behaviour(b.cont)}")
    if isinstance(b, BCall):
        return b.var
    raise TypeError(f"not a behaviour: {b!r}")


def render_network(n: Network) -> str:
    parts = []
    for name, proc in n.procs:
        text = f"{name}[{render_value(proc.state)}]"
        messages = proc.queue.messages()
        if messages:
            inner = ", ".join(f"({m.sender}, {render_value(m.payload)})"
                              for m in messages)
            text += f"<{inner}>"
        text += f"{{ {render_behaviour(proc.behaviour)} }}"
        parts.append(text)
    return " | ".join(parts)


def render(term) -> str:
    """Render any choreography, behaviour or network term."""
    if isinstance(term, Network):
        return render_network(term)
    if isinstance(term, (BNil, BSend, BRecv, BCond, BDef, BCall)):
        return render_behaviour(term)
    return render_choreography(term)
