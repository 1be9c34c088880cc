"""Answer queries over sessions by finite-trace model checking.

Each session becomes a linear automaton with one state per event, and the
formula is evaluated over state indices 0..n-1: Next is strong (false at
the last state) and negation is decided by non-entailment within a state.
A query matches a session when its session constraints hold and the
formula is satisfied at index 0.

``oracle_eval`` is a deliberately naive recursive transcription of the
same semantics, kept structurally independent of ``satisfying_states`` so
the two can check each other.
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import datetime
from typing import Iterable

from .errors import EmptySession, NotAbsoluteUrl
from .logs import Parameter, decompose_url, normalize_url
from .ontology import WAM, local_name
from .query import (
    Atom,
    AtomFormula,
    BaseUrlAtom,
    ClassAtom,
    ContentAtom,
    EndsBeforeAtom,
    FalseFormula,
    Formula,
    FullUrlAtom,
    FunctionAtom,
    Next,
    Not,
    And,
    Or,
    ParamAtom,
    Query,
    StartsAfterAtom,
    TrueFormula,
    Until,
    UserAtom,
    desugar,
)
from .sessions import BrowsingEvent, Session


@dataclass(frozen=True)
class StateContext:
    """One automaton state: a single event plus its session's metadata.

    Content and function types on the event already carry the subclass
    closure, so atom checks need no ontology access here.
    """

    session_id: str
    user: str
    start_time: datetime
    end_time: datetime
    event: BrowsingEvent


@dataclass(frozen=True)
class SessionAutomaton:
    """Linear automaton over a session's events, in order."""

    states: tuple[StateContext, ...]

    @property
    def start(self) -> int:
        return 0

    @property
    def transitions(self) -> tuple[tuple[int, int], ...]:
        return tuple((i, i + 1) for i in range(len(self.states) - 1))


def build_automaton(session: Session) -> SessionAutomaton:
    if not session.events:
        raise EmptySession()
    states = tuple(
        StateContext(
            session_id=session.id,
            user=session.user,
            start_time=session.start_time,
            end_time=session.end_time,
            event=event,
        )
        for event in session.events
    )
    return SessionAutomaton(states=states)


_STRUCTURAL_CLASSES = frozenset({WAM.SESSION, WAM.EVENT})


def _class_matches(cls: str, types: frozenset[str]) -> bool:
    # full IRIs compare exactly; bare short names match by local name
    if cls in types:
        return True
    if "/" in cls or "#" in cls or ":" in cls:
        return False
    return any(local_name(t) == cls for t in types)


def _base_matches(wanted: str, actual_base: str) -> bool:
    try:
        wanted = decompose_url(wanted).base
    except NotAbsoluteUrl:
        pass
    return wanted == actual_base


def _url_matches(wanted: str, actual: str) -> bool:
    try:
        return normalize_url(wanted) == normalize_url(actual)
    except NotAbsoluteUrl:
        return wanted == actual


def eval_atom(atom: Atom, state: StateContext) -> bool:
    """Decide one atom against one state; unknown class IRIs are false."""
    if isinstance(atom, ContentAtom):
        return _class_matches(atom.cls, state.event.content_types)
    if isinstance(atom, FunctionAtom):
        return _class_matches(atom.cls, state.event.function_types)
    if isinstance(atom, ClassAtom):
        # sessions and events satisfy their own typing atoms vacuously
        return _class_matches(atom.cls, _STRUCTURAL_CLASSES)
    if isinstance(atom, BaseUrlAtom):
        return _base_matches(atom.url, state.event.base_url)
    if isinstance(atom, FullUrlAtom):
        return _url_matches(atom.url, state.event.full_url)
    if isinstance(atom, ParamAtom):
        return Parameter(atom.name, atom.value) in state.event.params
    if isinstance(atom, UserAtom):
        return atom.user == state.user
    if isinstance(atom, StartsAfterAtom):
        return state.start_time >= atom.bound
    if isinstance(atom, EndsBeforeAtom):
        return state.end_time <= atom.bound
    raise TypeError(f"not an atom: {atom!r}")


def eval_session_constraints(session: Session, atoms: Iterable[Atom]) -> bool:
    """Conjunction of session-level atoms, checked against the first state."""
    atoms = tuple(atoms)
    if not atoms:
        return True
    state = build_automaton(session).states[0]
    return all(eval_atom(atom, state) for atom in atoms)


def satisfying_states(automaton: SessionAutomaton, formula: Formula) -> frozenset[int]:
    """All state indices where the (desugared) formula holds.

    Until is computed right-to-left in one pass, so evaluation costs
    O(formula size x trace length) per session.
    """
    states = automaton.states
    n = len(states)
    everything = frozenset(range(n))

    def sat(node: Formula) -> frozenset[int]:
        if isinstance(node, TrueFormula):
            return everything
        if isinstance(node, FalseFormula):
            return frozenset()
        if isinstance(node, AtomFormula):
            return frozenset(i for i in range(n) if eval_atom(node.atom, states[i]))
        if isinstance(node, Not):
            return everything - sat(node.operand)
        if isinstance(node, And):
            return sat(node.left) & sat(node.right)
        if isinstance(node, Or):
            return sat(node.left) | sat(node.right)
        if isinstance(node, Next):
            inner = sat(node.operand)
            return frozenset(i for i in range(n - 1) if i + 1 in inner)
        if isinstance(node, Until):
            hold = sat(node.left)
            goal = sat(node.right)
            out: set[int] = set()
            for i in range(n - 1, -1, -1):
                if i in goal or (i in hold and (i + 1) in out):
                    out.add(i)
            return frozenset(out)
        raise ValueError(
            f"{type(node).__name__} is not a core operator; desugar the formula first"
        )

    return sat(formula)


def oracle_eval(session: Session, formula: Formula, index: int) -> bool:
    """Reference semantics: plain recursion straight off the definitions.

    No sets, no memoization, no sharing with satisfying_states beyond the
    per-state atom test.
    """
    n = len(session.events)
    if not 0 <= index < n:
        raise IndexError(f"index {index} outside trace of length {n}")

    def state(i: int) -> StateContext:
        return StateContext(
            session_id=session.id,
            user=session.user,
            start_time=session.start_time,
            end_time=session.end_time,
            event=session.events[i],
        )

    def holds(node: Formula, i: int) -> bool:
        if isinstance(node, TrueFormula):
            return True
        if isinstance(node, FalseFormula):
            return False
        if isinstance(node, AtomFormula):
            return eval_atom(node.atom, state(i))
        if isinstance(node, Not):
            return not holds(node.operand, i)
        if isinstance(node, And):
            return holds(node.left, i) and holds(node.right, i)
        if isinstance(node, Or):
            return holds(node.left, i) or holds(node.right, i)
        if isinstance(node, Next):
            return i + 1 < n and holds(node.operand, i + 1)
        if isinstance(node, Until):
            for k in range(i, n):
                if holds(node.right, k) and all(holds(node.left, j) for j in range(i, k)):
                    return True
            return False
        raise ValueError(
            f"{type(node).__name__} is not a core operator; desugar the formula first"
        )

    return holds(formula, index)


def answer(query: Query, sessions: Iterable[Session]) -> list[str]:
    """Ids of sessions matching the query, in input order.

    A session matches when every session atom holds and the desugared
    formula is satisfied at the first event.
    """
    core = desugar(query.formula)
    matched: list[str] = []
    for session in sessions:
        if not eval_session_constraints(session, query.session_atoms):
            continue
        automaton = build_automaton(session)
        if 0 in satisfying_states(automaton, core):
            matched.append(session.id)
    return matched
