"""Abstract syntax for choreographies, behaviours, networks and expressions.

All nodes are frozen dataclasses: terms are immutable after construction and
safe to share between concurrent explorations.  The only mutable object in
this module is :class:`TagSupply`.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

# ---------------------------------------------------------------------------
# Values


@dataclass(frozen=True)
class IntV:
    n: int


@dataclass(frozen=True)
class BoolV:
    b: bool


@dataclass(frozen=True)
class ErrV:
    """Distinguished error value.  First-class and storable."""


ERR = ErrV()

Value = Union[IntV, BoolV, ErrV]


# ---------------------------------------------------------------------------
# Expressions


@dataclass(frozen=True)
class Lit:
    value: Value


@dataclass(frozen=True)
class Cell:
    """The running process's own memory cell, written ``@``."""


@dataclass(frozen=True)
class BinOp:
    op: str  # one of + - * = < and or
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Not:
    arg: "Expr"


Expr = Union[Lit, Cell, BinOp, Not]


# ---------------------------------------------------------------------------
# Tags

@dataclass(frozen=True)
class Tag:
    """Globally unique marker linking a detached send to its receive."""

    id: int


class TagSupply:
    """Monotonic source of fresh tags.

    Confined to a single execution context; see the concurrency notes in the
    module docstring.
    """

    def __init__(self, start: int = 0):
        self._next = start

    def fresh(self) -> Tag:
        t = Tag(self._next)
        self._next += 1
        return t

    def reserve_above(self, tag_id: int) -> None:
        """Bump the counter so every future tag exceeds ``tag_id``."""
        if tag_id >= self._next:
            self._next = tag_id + 1

    @classmethod
    def above(cls, term) -> "TagSupply":
        """A supply strictly above every tag occurring in ``term``."""
        supply = cls()
        for t in iter_tags(term):
            supply.reserve_above(t.id)
        return supply


# ---------------------------------------------------------------------------
# Choreographies


@dataclass(frozen=True)
class Com:
    src: str
    expr: Expr
    dst: str
    cont: "Chor"


@dataclass(frozen=True)
class Cond:
    decider: str
    expr: Expr
    then: "Chor"
    orelse: "Chor"


@dataclass(frozen=True)
class Def:
    var: str
    body: "Chor"
    cont: "Chor"


@dataclass(frozen=True)
class Call:
    var: str


@dataclass(frozen=True)
class Nil:
    pass


NIL = Nil()


@dataclass(frozen=True)
class RtSend:
    """Detached send: the message from ``src`` is in transit under ``tag``."""

    src: str
    expr: Expr
    tag: Tag
    cont: "Chor"


@dataclass(frozen=True)
class RtRecv:
    """Detached receive at ``dst``, annotated with the sender name.

    ``payload`` is either a :class:`Tag` (uninstantiated: the matching send
    has not fired yet) or a :class:`Value` (instantiated: in transit).
    """

    src: str
    payload: Union[Tag, Value]
    dst: str
    cont: "Chor"


Chor = Union[Com, Cond, Def, Call, Nil, RtSend, RtRecv]


# ---------------------------------------------------------------------------
# Behaviours


@dataclass(frozen=True)
class BSend:
    dst: str
    expr: Expr
    cont: "Behaviour"


@dataclass(frozen=True)
class BRecv:
    src: str
    cont: "Behaviour"


@dataclass(frozen=True)
class BCond:
    expr: Expr
    then: "Behaviour"
    orelse: "Behaviour"
    cont: "Behaviour"


@dataclass(frozen=True)
class BDef:
    var: str
    body: "Behaviour"
    cont: "Behaviour"


@dataclass(frozen=True)
class BCall:
    var: str


@dataclass(frozen=True)
class BNil:
    pass


BNIL = BNil()

Behaviour = Union[BSend, BRecv, BCond, BDef, BCall, BNil]


# ---------------------------------------------------------------------------
# Networks


@dataclass(frozen=True)
class Message:
    sender: str
    payload: Value


@dataclass(frozen=True)
class Queue:
    """Incoming messages, one FIFO lane per sender.

    The lane decomposition is the canonical form of the congruence that lets
    messages from different senders commute: two queues are congruent iff
    they have the same lanes.  ``lanes`` is kept sorted by sender name so
    queues compare and hash structurally.
    """

    lanes: tuple  # tuple[(sender, tuple[Value, ...]), ...], sorted, no empties

    @staticmethod
    def empty() -> "Queue":
        return Queue(())

    @staticmethod
    def of(messages) -> "Queue":
        q = Queue.empty()
        for m in messages:
            q = q.enqueue(m)
        return q

    def is_empty(self) -> bool:
        return not self.lanes

    def enqueue(self, msg: Message) -> "Queue":
        lanes = dict(self.lanes)
        lanes[msg.sender] = lanes.get(msg.sender, ()) + (msg.payload,)
        return Queue(tuple(sorted(lanes.items())))

    def dequeue_from(self, sender: str) -> Optional[tuple]:
        """Pop the head of ``sender``'s lane; ``None`` if the lane is absent.

        Absence of the lane exactly characterizes a blocked receive.
        """
        lanes = dict(self.lanes)
        lane = lanes.get(sender)
        if not lane:
            return None
        value, rest = lane[0], lane[1:]
        if rest:
            lanes[sender] = rest
        else:
            del lanes[sender]
        return value, Queue(tuple(sorted(lanes.items())))

    def messages(self):
        """All messages, lanes flattened in sender order (a canonical
        representative of the congruence class)."""
        return [Message(s, v) for s, lane in self.lanes for v in lane]


@dataclass(frozen=True)
class Process:
    state: Value
    queue: Queue
    behaviour: Behaviour


@dataclass(frozen=True)
class Network:
    """Finite composition of named processes, kept name-sorted.

    The sorted-map representation makes parallel composition associative,
    commutative and unit-respecting by construction.
    """

    procs: tuple  # tuple[(name, Process), ...], sorted by name

    @staticmethod
    def of(mapping) -> "Network":
        return Network(tuple(sorted(mapping.items())))

    def as_dict(self) -> dict:
        return dict(self.procs)

    def names(self):
        return [name for name, _ in self.procs]

    def is_empty(self) -> bool:
        return not self.procs


EMPTY_NETWORK = Network(())


# ---------------------------------------------------------------------------
# Process-name and tag scans


def pn(term) -> frozenset:
    """Set of process names in a choreography (or single interaction).

    A detached send contributes only the sender, a detached receive only the
    receiver; tags and payloads contribute nothing.
    """
    names = set()
    _pn_into(term, names)
    return frozenset(names)


def _pn_into(term, names):
    while True:
        if isinstance(term, Com):
            names.add(term.src)
            names.add(term.dst)
            term = term.cont
        elif isinstance(term, RtSend):
            names.add(term.src)
            term = term.cont
        elif isinstance(term, RtRecv):
            names.add(term.dst)
            term = term.cont
        elif isinstance(term, Cond):
            names.add(term.decider)
            _pn_into(term.then, names)
            term = term.orelse
        elif isinstance(term, Def):
            _pn_into(term.body, names)
            term = term.cont
        else:  # Call, Nil
            return


def head_pn(term) -> frozenset:
    """Process names of the head interaction only (not the continuation)."""
    if isinstance(term, Com):
        return frozenset((term.src, term.dst))
    if isinstance(term, RtSend):
        return frozenset((term.src,))
    if isinstance(term, RtRecv):
        return frozenset((term.dst,))
    raise TypeError(f"not an interaction: {term!r}")


def iter_tags(term):
    """Yield every Tag occurring in a choreography, behaviour or network."""
    stack = [term]
    while stack:
        t = stack.pop()
        if isinstance(t, RtSend):
            yield t.tag
            stack.append(t.cont)
        elif isinstance(t, RtRecv):
            if isinstance(t.payload, Tag):
                yield t.payload
            stack.append(t.cont)
        elif isinstance(t, Com):
            stack.append(t.cont)
        elif isinstance(t, Cond):
            stack.extend((t.then, t.orelse))
        elif isinstance(t, Def):
            stack.extend((t.body, t.cont))
        elif isinstance(t, Network):
            stack.extend(p for _, p in t.procs)


def check_tag_linearity(term) -> None:
    """Raise DupTagError unless each tag occurs in at most one send and at
    most one receive."""
    from .errors import DupTagError

    sends, recvs = set(), set()
    stack = [term]
    while stack:
        t = stack.pop()
        if isinstance(t, RtSend):
            if t.tag.id in sends:
                raise DupTagError(f"tag #{t.tag.id} used by two sends")
            sends.add(t.tag.id)
            stack.append(t.cont)
        elif isinstance(t, RtRecv):
            if isinstance(t.payload, Tag):
                if t.payload.id in recvs:
                    raise DupTagError(f"tag #{t.payload.id} used by two receives")
                recvs.add(t.payload.id)
            stack.append(t.cont)
        elif isinstance(t, Com):
            stack.append(t.cont)
        elif isinstance(t, Cond):
            stack.extend((t.then, t.orelse))
        elif isinstance(t, Def):
            stack.extend((t.body, t.cont))


def check_bound(term, bound=frozenset(), _behaviour=False) -> None:
    """Raise BindError on any recursion call outside its definition."""
    from .errors import BindError

    if isinstance(term, (Call, BCall)):
        if term.var not in bound:
            raise BindError(f"unbound recursion variable {term.var}")
    elif isinstance(term, (Com, RtSend, RtRecv, BSend, BRecv)):
        check_bound(term.cont, bound)
    elif isinstance(term, Cond):
        check_bound(term.then, bound)
        check_bound(term.orelse, bound)
    elif isinstance(term, BCond):
        check_bound(term.then, bound)
        check_bound(term.orelse, bound)
        check_bound(term.cont, bound)
    elif isinstance(term, (Def, BDef)):
        inner = bound | {term.var}
        check_bound(term.body, inner)
        check_bound(term.cont, inner)


# ---------------------------------------------------------------------------
# Sequencing helpers


def chor_seq(first: Chor, cont: Chor) -> Chor:
    """Graft ``cont`` onto the terminated leaves of ``first``.

    Realizes the concrete syntax's trailing continuation after a
    conditional; recursion calls never return, so their leaves are left
    alone.
    """
    if isinstance(cont, Nil):
        return first
    if isinstance(first, Nil):
        return cont
    if isinstance(first, (Com, RtSend, RtRecv, Def)):
        return _replace_cont(first, chor_seq(first.cont, cont))
    if isinstance(first, Cond):
        return Cond(first.decider, first.expr,
                    chor_seq(first.then, cont), chor_seq(first.orelse, cont))
    return first  # Call


def behaviour_seq(first: Behaviour, cont: Behaviour) -> Behaviour:
    if isinstance(cont, BNil):
        return first
    if isinstance(first, BNil):
        return cont
    if isinstance(first, (BSend, BRecv, BDef)):
        return _replace_cont(first, behaviour_seq(first.cont, cont))
    if isinstance(first, BCond):
        return BCond(first.expr, first.then, first.orelse,
                     behaviour_seq(first.cont, cont))
    return first  # BCall


def _replace_cont(node, new_cont):
    from dataclasses import replace

    return replace(node, cont=new_cont)
