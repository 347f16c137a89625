"""Text formats for plants and policies, and Graphviz export.

Plant files are line oriented, one declaration per line, in this order::

    states: q0 q1 q2
    initial: q0
    secret: q2
    levels: 2
    event: a p0
    event: b u
    trans: q0 a q1
    trans: q1 b q2

``#`` starts a comment when it begins a line or follows whitespace.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Optional

from .core import (
    RELABEL_MARK,
    Alphabet,
    EventClass,
    Plant,
    PlantError,
    Policy,
    Protectable,
    Relabeled,
    Unprotectable,
    validate_plant,
)
from .synth import SynthesisResult

__all__ = [
    "ParseError",
    "PolicyDocument",
    "parse_plant",
    "print_plant",
    "parse_policy",
    "print_policy",
    "print_policy_document",
    "policy_document",
    "export_dot",
    "LOCK",
]

LOCK = "[lock]"

_IDENT = re.compile(r"[^\s:,#']+")
_COMMENT = re.compile(r"(^|\s)#.*$")
_PLANT_KEYS = ("states", "initial", "secret", "levels", "event", "trans")


class ParseError(PlantError):
    def __init__(self, message: str, line: int = 0, column: int = 0):
        self.message = message
        self.line = line
        self.column = column
        where = f"line {line}, column {column}: " if line else ""
        super().__init__(where + message)


@dataclass(frozen=True)
class _Line:
    number: int
    key: str
    # (column, token) pairs after the key
    tokens: tuple[tuple[int, str], ...]
    rest_column: int
    raw: str


def _lines(text: str) -> list[_Line]:
    out = []
    for number, raw in enumerate(text.splitlines(), start=1):
        body = _COMMENT.sub(lambda mo: mo.group(1), raw)
        if not body.strip():
            continue
        key, sep, rest = body.partition(":")
        if not sep:
            col = len(body) - len(body.lstrip()) + 1
            raise ParseError(f"expected '<key>: ...', got {body.strip()!r}", number, col)
        offset = len(key) + 1
        tokens = tuple(
            (offset + mo.start() + 1, mo.group()) for mo in re.finditer(r"\S+", rest)
        )
        out.append(_Line(number, key.strip(), tokens, offset + 1, raw))
    return out


def _ident(line: _Line, column: int, token: str) -> str:
    if RELABEL_MARK in token:
        raise ParseError(f"identifier {token!r} uses the reserved {RELABEL_MARK!r} infix",
                         line.number, column)
    if not _IDENT.fullmatch(token):
        raise ParseError(f"invalid identifier {token!r}", line.number, column)
    return token


def _event_class(line: _Line, column: int, token: str) -> EventClass:
    if token == "u":
        return Unprotectable()
    mo = re.fullmatch(r"p(\d+)", token)
    if mo is None:
        raise ParseError(f"event class must be 'u' or 'p<level>', got {token!r}",
                         line.number, column)
    return Protectable(int(mo.group(1)))


def parse_plant(text: str) -> Plant:
    """Parse and validate a plant document."""
    lines = _lines(text)
    if not lines:
        raise ParseError("empty plant document", 1, 1)

    seen: dict[str, _Line] = {}
    last_rank = -1
    states: list[str] = []
    initial: Optional[str] = None
    secrets: list[str] = []
    levels: Optional[int] = None
    events: list[tuple[str, EventClass]] = []
    transitions: list[tuple[str, str, str]] = []

    for line in lines:
        if line.key not in _PLANT_KEYS:
            raise ParseError(f"unknown section {line.key!r}", line.number, 1)
        rank = _PLANT_KEYS.index(line.key)
        if rank < last_rank:
            raise ParseError(f"section {line.key!r} out of order", line.number, 1)
        if line.key in ("states", "initial", "secret", "levels") and line.key in seen:
            raise ParseError(f"repeated section {line.key!r}", line.number, 1)
        last_rank = rank
        seen[line.key] = line
        toks = line.tokens

        def arity(n: int) -> None:
            if len(toks) != n:
                col = toks[n][0] if len(toks) > n else line.rest_column
                raise ParseError(f"{line.key!r} expects {n} field(s), got {len(toks)}",
                                 line.number, col)

        if line.key == "states":
            states = [_ident(line, c, t) for c, t in toks]
        elif line.key == "initial":
            arity(1)
            initial = _ident(line, *toks[0])
        elif line.key == "secret":
            secrets = [_ident(line, c, t) for c, t in toks]
        elif line.key == "levels":
            arity(1)
            col, tok = toks[0]
            if not tok.isdigit():
                raise ParseError(f"level count must be a nonnegative integer, got {tok!r}",
                                 line.number, col)
            levels = int(tok)
        elif line.key == "event":
            arity(2)
            name = _ident(line, *toks[0])
            events.append((name, _event_class(line, *toks[1])))
        else:
            arity(3)
            transitions.append(tuple(_ident(line, c, t) for c, t in toks))  # type: ignore[arg-type]

    for key in ("states", "initial", "levels"):
        if key not in seen:
            raise ParseError(f"missing section {key!r}", lines[-1].number, 1)

    plant = Plant(
        states=tuple(states),
        alphabet=Alphabet(tuple(events), levels or 0),
        transitions=tuple(transitions),
        initial=initial,
        secrets=frozenset(secrets),
    )
    problems = validate_plant(plant)
    if problems:
        raise PlantError("invalid plant: " + "; ".join(problems))
    return plant


def print_plant(plant: Plant) -> str:
    for name, cls in plant.alphabet.events:
        if isinstance(cls, Relabeled):
            raise PlantError(f"relabeled event {name!r} cannot be written to a plant file")
    secrets = [q for q in plant.states if q in plant.secrets]
    lines = [
        "states: " + " ".join(plant.states),
        f"initial: {plant.initial}",
        "secret: " + " ".join(secrets) if secrets else "secret:",
        f"levels: {plant.alphabet.levels}",
    ]
    lines += [f"event: {name} {cls}" for name, cls in plant.alphabet.events]
    lines += [f"trans: {s} {e} {d}" for s, e, d in plant.transitions]
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class PolicyDocument:
    m: int
    k: Optional[int]
    solvable: bool
    policy: Policy


def policy_document(result: SynthesisResult) -> PolicyDocument:
    return PolicyDocument(result.m, result.least_k, result.solvable, result.merged_protection)


def _ordered(policy: Policy, plant: Optional[Plant]) -> Iterable[tuple[str, list[str]]]:
    if plant is None:
        for q in sorted(policy.entries):
            yield q, sorted(policy[q])
        return
    alpha = plant.alphabet
    known = set(plant.states)
    for q in list(plant.states) + sorted(set(policy.entries) - known):
        events = policy[q]
        if events:
            yield q, sorted(events, key=lambda e: (alpha.index(e) if e in alpha else len(alpha), e))


def print_policy_document(doc: PolicyDocument, plant: Optional[Plant] = None) -> str:
    """Render a policy document; ``plant`` fixes state and event order."""
    lines = [
        f"m: {doc.m}",
        f"k: {'none' if doc.k is None else doc.k}",
        f"solvable: {'true' if doc.solvable else 'false'}",
    ]
    for q, events in _ordered(doc.policy, plant):
        lines.append(f"{q}: {', '.join(events)}")
    return "\n".join(lines) + "\n"


def print_policy(result: SynthesisResult) -> str:
    return print_policy_document(policy_document(result), result.plant)


def parse_policy(text: str) -> PolicyDocument:
    header: dict[str, tuple[int, str]] = {}
    entries: dict[str, frozenset[str]] = {}
    order = ("m", "k", "solvable")
    count = 0
    for number, raw in enumerate(text.splitlines(), start=1):
        body = _COMMENT.sub(lambda mo: mo.group(1), raw)
        if not body.strip():
            continue
        key, sep, rest = body.partition(":")
        key = key.strip()
        if not sep:
            raise ParseError("expected '<key>: ...'", number, 1)
        if count < len(order):
            if key != order[count]:
                raise ParseError(f"expected header {order[count]!r}, got {key!r}", number, 1)
            header[key] = (number, rest.strip())
            count += 1
            continue
        if key in entries:
            raise ParseError(f"state {key!r} listed twice", number, 1)
        names = [e.strip() for e in rest.split(",")]
        col = len(key) + 2
        for name in names:
            if not name or not _IDENT.fullmatch(name):
                raise ParseError(f"invalid event list {rest.strip()!r}", number, col)
        entries[key] = frozenset(names)
    if count < len(order):
        raise ParseError(f"missing header {order[count]!r}", max(count, 1), 1)

    line, m_text = header["m"]
    if not m_text.isdigit():
        raise ParseError(f"m must be an integer, got {m_text!r}", line, 4)
    line, k_text = header["k"]
    if k_text != "none" and not k_text.isdigit():
        raise ParseError(f"k must be an integer or 'none', got {k_text!r}", line, 4)
    line, solv_text = header["solvable"]
    if solv_text not in ("true", "false"):
        raise ParseError(f"solvable must be 'true' or 'false', got {solv_text!r}", line, 11)
    return PolicyDocument(
        m=int(m_text),
        k=None if k_text == "none" else int(k_text),
        solvable=solv_text == "true",
        policy=Policy(entries, "protection"),
    )


def _quote(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def export_dot(plant: Plant, policy: Optional[Policy] = None) -> str:
    """Graphviz rendering; secrets are shaded, protected edges carry a lock marker."""
    classes = plant.alphabet.classes
    out = ["digraph plant {", "  rankdir=LR;", "  node [shape=circle];"]
    if plant.initial is not None:
        out.append('  "__start" [shape=point, label=""];')
        out.append(f'  "__start" -> {_quote(plant.initial)};')
    for q in plant.states:
        if q in plant.secrets:
            out.append(f"  {_quote(q)} [style=filled, fillcolor=lightgray];")
        else:
            out.append(f"  {_quote(q)};")
    for src, event, dst in plant.transitions:
        cls = classes.get(event)
        label = cls.original + "'" if isinstance(cls, Relabeled) else event
        attrs = []
        if policy is not None and event in policy[src]:
            label = f"{label} {LOCK}"
            attrs = ["style=bold", "color=red"]
        attrs.insert(0, f"label={_quote(label)}")
        out.append(f"  {_quote(src)} -> {_quote(dst)} [{', '.join(attrs)}];")
    out.append("}")
    return "\n".join(out) + "\n"
