"""Automaton data model for plants with protectable, cost-leveled events.

A plant is a deterministic finite automaton with a partial transition
function, an initial state and a set of secret states. Every event carries
an :data:`EventClass`: unprotectable, protectable at some cost level, or a
relabeled copy of a protectable event produced during synthesis.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator, Mapping, Optional, Protocol, Sequence, Union

__all__ = [
    "Unprotectable",
    "Protectable",
    "Relabeled",
    "EventClass",
    "Alphabet",
    "Plant",
    "Supervisor",
    "Policy",
    "PlantError",
    "validate_plant",
    "check_plant",
    "step_string",
    "reachable_states",
    "erase_relabels",
    "language_equivalent",
    "language_included",
    "RELABEL_MARK",
]

#: Infix used for synthesized event identifiers, ``<original>#r<round>``.
RELABEL_MARK = "#r"


class PlantError(ValueError):
    """Raised for malformed plants or inputs naming unknown states/events."""


@dataclass(frozen=True)
class Unprotectable:
    def __str__(self) -> str:
        return "u"


@dataclass(frozen=True)
class Protectable:
    level: int

    def __str__(self) -> str:
        return f"p{self.level}"


@dataclass(frozen=True)
class Relabeled:
    original: str

    def __str__(self) -> str:
        return f"r({self.original})"


EventClass = Union[Unprotectable, Protectable, Relabeled]


@dataclass(frozen=True)
class Alphabet:
    """Ordered events with their classes, plus the number of cost levels."""

    events: tuple[tuple[str, EventClass], ...]
    levels: int

    @cached_property
    def classes(self) -> dict[str, EventClass]:
        return dict(self.events)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(name for name, _ in self.events)

    def __contains__(self, event: object) -> bool:
        return event in self.classes

    def __iter__(self) -> Iterator[str]:
        return iter(self.names)

    def __len__(self) -> int:
        return len(self.events)

    def index(self, event: str) -> int:
        return self._order[event]

    @cached_property
    def _order(self) -> dict[str, int]:
        return {name: i for i, (name, _) in enumerate(self.events)}

    def is_protectable(self, event: str) -> bool:
        return isinstance(self.classes.get(event), Protectable)

    def level(self, event: str) -> Optional[int]:
        cls = self.classes.get(event)
        return cls.level if isinstance(cls, Protectable) else None

    @cached_property
    def protectable(self) -> frozenset[str]:
        return frozenset(n for n, c in self.events if isinstance(c, Protectable))

    def protectable_up_to(self, k: int) -> frozenset[str]:
        """Events protectable at cost level 0..k (empty for k < 0)."""
        return frozenset(
            n for n, c in self.events if isinstance(c, Protectable) and c.level <= k
        )

    def original(self, event: str) -> str:
        """Name of the event a relabeled copy stands for (identity otherwise)."""
        cls = self.classes[event]
        return cls.original if isinstance(cls, Relabeled) else event


class Automaton(Protocol):
    """Anything with an initial state and a deterministic transition map."""

    @property
    def alphabet(self) -> Alphabet: ...

    @property
    def initial(self) -> Optional[str]: ...

    @property
    def delta(self) -> Mapping[tuple[str, str], str]: ...


def _index_transitions(transitions: Iterable[tuple[str, str, str]]):
    delta: dict[tuple[str, str], str] = {}
    out: dict[str, list[tuple[str, str]]] = {}
    for src, event, dst in transitions:
        delta.setdefault((src, event), dst)
        out.setdefault(src, []).append((event, dst))
    return delta, out


@dataclass(frozen=True)
class Plant:
    """A plant ``(Q, Sigma, delta, q0)`` with secret states.

    ``states`` and ``transitions`` keep declaration order, which fixes the
    ordering of every printed document. Construction does not validate; use
    :func:`validate_plant` or :func:`check_plant`.
    """

    states: tuple[str, ...]
    alphabet: Alphabet
    transitions: tuple[tuple[str, str, str], ...]
    initial: Optional[str]
    secrets: frozenset[str] = frozenset()

    @cached_property
    def _index(self):
        return _index_transitions(self.transitions)

    @property
    def delta(self) -> dict[tuple[str, str], str]:
        return self._index[0]

    def out(self, state: str) -> list[tuple[str, str]]:
        """Outgoing ``(event, target)`` pairs of ``state`` in declaration order."""
        return self._index[1].get(state, [])

    @cached_property
    def state_set(self) -> frozenset[str]:
        return frozenset(self.states)

    @property
    def is_empty(self) -> bool:
        return self.initial is None

    def replace(self, **changes) -> "Plant":
        fields = dict(
            states=self.states,
            alphabet=self.alphabet,
            transitions=self.transitions,
            initial=self.initial,
            secrets=self.secrets,
        )
        fields.update(changes)
        return Plant(**fields)


@dataclass(frozen=True)
class Supervisor:
    """A subautomaton of a host plant; ``initial is None`` marks the empty one."""

    states: frozenset[str]
    transitions: tuple[tuple[str, str, str], ...]
    initial: Optional[str]
    alphabet: Alphabet

    @classmethod
    def empty(cls, alphabet: Alphabet) -> "Supervisor":
        return cls(frozenset(), (), None, alphabet)

    @property
    def is_empty(self) -> bool:
        return self.initial is None

    @cached_property
    def delta(self) -> dict[tuple[str, str], str]:
        return {(s, e): d for s, e, d in self.transitions}

    def __bool__(self) -> bool:
        return not self.is_empty


@dataclass(frozen=True)
class Policy:
    """State-indexed event sets; ``vocabulary`` is ``"protection"`` or ``"control"``.

    States mapping to the empty set are not stored, so two policies compare
    equal iff they assign the same events everywhere.
    """

    entries: Mapping[str, frozenset[str]] = field(default_factory=dict)
    vocabulary: str = "control"

    def __post_init__(self) -> None:
        if self.vocabulary not in ("protection", "control"):
            raise ValueError(f"unknown policy vocabulary {self.vocabulary!r}")
        cleaned = {q: frozenset(es) for q, es in self.entries.items() if es}
        object.__setattr__(self, "entries", cleaned)

    def __getitem__(self, state: str) -> frozenset[str]:
        return self.entries.get(state, frozenset())

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Policy):
            return NotImplemented
        return self.vocabulary == other.vocabulary and self.entries == other.entries

    def __hash__(self) -> int:
        return hash((self.vocabulary, frozenset(self.entries.items())))

    def pairs(self) -> set[tuple[str, str]]:
        return {(q, e) for q, es in self.entries.items() for e in es}

    def __len__(self) -> int:
        return sum(len(es) for es in self.entries.values())

    def as_dict(self) -> dict[str, set[str]]:
        return {q: set(es) for q, es in self.entries.items()}


def validate_plant(plant: Plant) -> list[str]:
    """Return a list of invariant violations; empty iff the plant is well formed."""
    problems: list[str] = []
    seen_states: set[str] = set()
    for q in plant.states:
        if q in seen_states:
            problems.append(f"duplicate state {q!r}")
        seen_states.add(q)

    seen_events: set[str] = set()
    for name, cls in plant.alphabet.events:
        if name in seen_events:
            problems.append(f"duplicate event {name!r}")
        seen_events.add(name)
        if isinstance(cls, Protectable):
            if not 0 <= cls.level < plant.alphabet.levels:
                problems.append(
                    f"event {name!r} has level {cls.level} outside "
                    f"0..{plant.alphabet.levels - 1}"
                )
        elif isinstance(cls, Relabeled):
            if not plant.alphabet.is_protectable(cls.original):
                problems.append(
                    f"relabeled event {name!r} does not name a protectable event"
                )
        elif not isinstance(cls, Unprotectable):
            problems.append(f"event {name!r} has unknown class {cls!r}")
    if plant.alphabet.levels < 0:
        problems.append(f"negative level count {plant.alphabet.levels}")

    if plant.initial is None:
        problems.append("no initial state")
    elif plant.initial not in seen_states:
        problems.append(f"initial state {plant.initial!r} is not a declared state")
    for q in sorted(plant.secrets - seen_states):
        problems.append(f"secret state {q!r} is not a declared state")

    targets: dict[tuple[str, str], str] = {}
    for src, event, dst in plant.transitions:
        for end in (src, dst):
            if end not in seen_states:
                problems.append(f"transition ({src}, {event}, {dst}): unknown state {end!r}")
        if event not in seen_events:
            problems.append(f"transition ({src}, {event}, {dst}): unknown event {event!r}")
        prior = targets.setdefault((src, event), dst)
        if prior != dst:
            problems.append(
                f"nondeterminism: event {event!r} at {src!r} leads to {prior!r} and {dst!r}"
            )
    dup = len(plant.transitions) - len({t for t in plant.transitions})
    if dup:
        problems.append(f"{dup} duplicated transition(s)")
    return problems


def check_plant(plant: Plant) -> Plant:
    """Return ``plant`` unchanged, raising :class:`PlantError` if it is malformed."""
    problems = validate_plant(plant)
    if problems:
        raise PlantError("; ".join(problems))
    return plant


def step_string(plant: Automaton, start: str, events: Sequence[str]) -> Optional[str]:
    """Extended transition function: the state reached from ``start`` by ``events``.

    Returns ``None`` as soon as a step is undefined.
    """
    for event in events:
        if event not in plant.alphabet:
            raise PlantError(f"unknown event {event!r}")
    state = start
    for event in events:
        nxt = plant.delta.get((state, event))
        if nxt is None:
            return None
        state = nxt
    return state


def _successors(automaton: Automaton) -> dict[str, list[str]]:
    succ: dict[str, list[str]] = {}
    for (src, _), dst in automaton.delta.items():
        succ.setdefault(src, []).append(dst)
    return succ


def reachable_states(plant: Plant, start: str) -> set[str]:
    if start not in plant.state_set:
        raise PlantError(f"unknown state {start!r}")
    succ = _successors(plant)
    seen = {start}
    queue = deque([start])
    while queue:
        q = queue.popleft()
        for nxt in succ.get(q, ()):
            if nxt not in seen:
                seen.add(nxt)
                queue.append(nxt)
    return seen


def erase_relabels(plant: Plant) -> Plant:
    """Map every relabeled event back to its original event."""
    transitions = []
    seen: dict[tuple[str, str], str] = {}
    for src, event, dst in plant.transitions:
        event = plant.alphabet.original(event)
        if (src, event) in seen:
            raise PlantError(
                f"cannot erase relabels: {event!r} defined twice at state {src!r}"
            )
        seen[(src, event)] = dst
        transitions.append((src, event, dst))
    events = tuple(
        (name, cls) for name, cls in plant.alphabet.events if not isinstance(cls, Relabeled)
    )
    return plant.replace(
        alphabet=Alphabet(events, plant.alphabet.levels),
        transitions=tuple(transitions),
    )


def _check_shared_alphabet(a: Automaton, b: Automaton) -> None:
    if set(a.alphabet.names) != set(b.alphabet.names):
        raise PlantError("automata are defined over different alphabets")


def _enabled(automaton: Automaton) -> dict[str, dict[str, str]]:
    table: dict[str, dict[str, str]] = {}
    for (src, event), dst in automaton.delta.items():
        table.setdefault(src, {})[event] = dst
    return table


def language_included(a: Automaton, b: Automaton) -> bool:
    """Whether the generated language of ``a`` is contained in that of ``b``."""
    _check_shared_alphabet(a, b)
    if a.initial is None:
        return True
    if b.initial is None:
        return False
    ta, tb = _enabled(a), _enabled(b)
    start = (a.initial, b.initial)
    seen = {start}
    queue = deque([start])
    while queue:
        x, y = queue.popleft()
        moves_b = tb.get(y, {})
        for event, xn in ta.get(x, {}).items():
            yn = moves_b.get(event)
            if yn is None:
                return False
            pair = (xn, yn)
            if pair not in seen:
                seen.add(pair)
                queue.append(pair)
    return True


def language_equivalent(a: Automaton, b: Automaton) -> bool:
    """Whether two deterministic automata generate the same prefix-closed language."""
    _check_shared_alphabet(a, b)
    if a.initial is None or b.initial is None:
        return a.initial is None and b.initial is None
    ta, tb = _enabled(a), _enabled(b)
    start = (a.initial, b.initial)
    seen = {start}
    queue = deque([start])
    while queue:
        x, y = queue.popleft()
        moves_a, moves_b = ta.get(x, {}), tb.get(y, {})
        if moves_a.keys() != moves_b.keys():
            return False
        for event, xn in moves_a.items():
            pair = (xn, moves_b[event])
            if pair not in seen:
                seen.add(pair)
                queue.append(pair)
    return True
