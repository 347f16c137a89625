"""Protection-policy synthesis through supervisory control.

Protectable events play the role of controllable events. Each round
computes the supremal controllable sublanguage of the plant with its secret
states cut away, sweeping the cost level upward until a nonempty supervisor
exists. The transitions that supervisor disables are then relabeled as
fresh uncontrollable events, so the next round is forced to find a further,
distinct protection on every path to a secret.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Collection, Iterable, Optional, Sequence

from .core import (
    RELABEL_MARK,
    Alphabet,
    Plant,
    PlantError,
    Policy,
    Relabeled,
    Supervisor,
)

__all__ = [
    "InternalError",
    "Round",
    "SynthesisResult",
    "build_spec",
    "supcon",
    "rcmc1",
    "derive_control_policy",
    "relabel",
    "relabel_name",
    "rcmc",
    "merge_policies",
    "to_protection_policy",
    "uncontrollable_witness",
    "relabeled_transitions",
]


class InternalError(AssertionError):
    """A synthesis invariant that should hold by construction was violated."""


@dataclass(frozen=True)
class Round:
    plant: Plant
    supervisor: Supervisor
    k: int
    policy: Policy


@dataclass(frozen=True)
class SynthesisResult:
    plant: Plant
    m: int
    rounds: tuple[Round, ...]
    merged_control: Policy
    merged_protection: Policy
    least_k: Optional[int]
    solvable: bool
    #: Round index that found no supervisor at any cost level.
    failed_round: Optional[int] = None
    #: Path ``[(state, event), ...]`` into a secret avoiding every protectable event.
    witness: Optional[tuple[tuple[str, str], ...]] = None
    final_plant: Optional[Plant] = field(default=None, compare=False)

    @property
    def ks(self) -> list[int]:
        return [r.k for r in self.rounds]


def build_spec(plant: Plant) -> Plant:
    """The plant with secret states and every transition touching them removed."""
    secrets = plant.secrets
    if plant.initial in secrets:
        return plant.replace(states=(), transitions=(), initial=None)
    return plant.replace(
        states=tuple(q for q in plant.states if q not in secrets),
        transitions=tuple(
            t for t in plant.transitions if t[0] not in secrets and t[2] not in secrets
        ),
    )


def _check_subautomaton(plant: Plant, spec: Plant) -> None:
    extra = spec.state_set - plant.state_set
    if extra:
        raise PlantError(f"spec states not in plant: {sorted(extra)}")
    if spec.initial is not None and spec.initial != plant.initial:
        raise PlantError("spec initial state differs from plant initial state")
    delta = plant.delta
    for src, event, dst in spec.transitions:
        if delta.get((src, event)) != dst:
            raise PlantError(f"spec transition ({src}, {event}, {dst}) is not in plant")


def supcon(plant: Plant, spec: Plant, controllable: Collection[str]) -> Supervisor:
    """Supervisor generating the supremal controllable sublanguage of ``L(spec)``.

    Both languages are prefix-closed, so this is a greatest fixpoint on spec
    states: a state is dropped whenever some uncontrollable plant event at it
    is missing from the spec or leads to a dropped state. The survivors are
    then trimmed to those reachable from the initial state.
    """
    _check_subautomaton(plant, spec)
    controllable = frozenset(controllable)
    if spec.initial is None or spec.initial not in spec.state_set:
        return Supervisor.empty(plant.alphabet)

    spec_delta = spec.delta
    good = set(spec.states)
    # Reverse uncontrollable edges let each deletion revisit only its predecessors.
    preds: dict[str, set[str]] = {}
    pending = deque()
    for q in spec.states:
        for event, dst in plant.out(q):
            if event in controllable:
                continue
            if spec_delta.get((q, event)) != dst or dst not in good:
                pending.append(q)
            else:
                preds.setdefault(dst, set()).add(q)
    while pending:
        q = pending.popleft()
        if q not in good:
            continue
        good.discard(q)
        pending.extend(p for p in preds.get(q, ()) if p in good)

    x0 = spec.initial
    if x0 not in good:
        return Supervisor.empty(plant.alphabet)

    kept = [t for t in spec.transitions if t[0] in good and t[2] in good]
    succ: dict[str, list[str]] = {}
    for src, _, dst in kept:
        succ.setdefault(src, []).append(dst)
    reach = {x0}
    queue = deque([x0])
    while queue:
        q = queue.popleft()
        for nxt in succ.get(q, ()):
            if nxt not in reach:
                reach.add(nxt)
                queue.append(nxt)
    return Supervisor(
        states=frozenset(reach),
        transitions=tuple(t for t in kept if t[0] in reach),
        initial=x0,
        alphabet=plant.alphabet,
    )


def rcmc1(plant: Plant, spec: Plant) -> Optional[tuple[Supervisor, int]]:
    """First cost level whose protectable events admit a nonempty supervisor."""
    for k in range(plant.alphabet.levels):
        sup = supcon(plant, spec, plant.alphabet.protectable_up_to(k))
        if not sup.is_empty:
            return sup, k
    return None


def derive_control_policy(plant: Plant, supervisor: Supervisor) -> Policy:
    alphabet = plant.alphabet
    entries: dict[str, frozenset[str]] = {}
    sup_delta = supervisor.delta
    for q in plant.states:
        if q not in supervisor.states:
            continue
        disabled = frozenset(
            e for e, _ in plant.out(q) if alphabet.is_protectable(e) and (q, e) not in sup_delta
        )
        if disabled:
            entries[q] = disabled
    return Policy(entries, "control")


def relabel_name(event: str, round_: int) -> str:
    return f"{event}{RELABEL_MARK}{round_}"


def relabel(plant: Plant, policy: Policy, round_: int) -> Plant:
    """Replace each transition the policy names by a fresh uncontrollable copy.

    The original events stay in the alphabet since they may still label
    transitions at states the policy does not touch.
    """
    alphabet = plant.alphabet
    fresh: dict[str, str] = {}
    transitions = []
    for src, event, dst in plant.transitions:
        if event in policy[src]:
            if not alphabet.is_protectable(event):
                raise PlantError(f"policy names non-protectable event {event!r} at {src!r}")
            name = fresh.get(event)
            if name is None:
                name = relabel_name(event, round_)
                if name in alphabet:
                    raise PlantError(f"relabeled event {name!r} collides with an existing event")
                fresh[event] = name
            transitions.append((src, name, dst))
        else:
            transitions.append((src, event, dst))
    if not fresh:
        return plant
    events = alphabet.events + tuple((name, Relabeled(orig)) for orig, name in fresh.items())
    return plant.replace(
        alphabet=Alphabet(events, alphabet.levels),
        transitions=tuple(transitions),
    )


def merge_policies(policies: Sequence[Policy]) -> Policy:
    """Pointwise union of per-round policies, which must name disjoint pairs."""
    if not policies:
        return Policy({}, "control")
    vocab = policies[0].vocabulary
    entries: dict[str, set[str]] = {}
    for policy in policies:
        if policy.vocabulary != vocab:
            raise PlantError("cannot merge policies of different vocabularies")
        for q, events in policy.entries.items():
            bucket = entries.setdefault(q, set())
            overlap = bucket & events
            if overlap:
                raise InternalError(
                    f"rounds disable the same transition(s) {sorted(overlap)} at {q!r}"
                )
            bucket |= events
    return Policy({q: frozenset(es) for q, es in entries.items()}, vocab)


def to_protection_policy(control: Policy, alphabet: Optional[Alphabet] = None) -> Policy:
    if control.vocabulary != "control":
        raise PlantError("expected a control policy")
    for q, events in control.entries.items():
        for event in events:
            if RELABEL_MARK in event or (
                alphabet is not None and isinstance(alphabet.classes.get(event), Relabeled)
            ):
                raise PlantError(f"policy names relabeled event {event!r} at {q!r}")
    return Policy(control.entries, "protection")


def uncontrollable_witness(
    plant: Plant, controllable: Iterable[str]
) -> Optional[tuple[tuple[str, str], ...]]:
    """Shortest path into a secret using no event from ``controllable``.

    Returned as ``((state, event), ...)`` steps followed by the secret state
    as ``(secret, "")``; ``None`` when no such path exists.
    """
    if plant.initial is None:
        return None
    controllable = frozenset(controllable)
    parent: dict[str, Optional[tuple[str, str]]] = {plant.initial: None}
    queue = deque([plant.initial])
    while queue:
        q = queue.popleft()
        if q in plant.secrets:
            steps = [(q, "")]
            while parent[q] is not None:
                q, event = parent[q]
                steps.append((q, event))
            return tuple(reversed(steps))
        for event, dst in plant.out(q):
            if event not in controllable and dst not in parent:
                parent[dst] = (q, event)
                queue.append(dst)
    return None


def rcmc(plant: Plant, m: int) -> SynthesisResult:
    """Synthesize a policy putting ``m`` protections on every path to a secret."""
    if m < 1:
        raise PlantError(f"protection count must be at least 1, got {m}")
    rounds: list[Round] = []
    current = plant
    for j in range(m):
        found = rcmc1(current, build_spec(current))
        if found is None:
            witness = uncontrollable_witness(
                current, current.alphabet.protectable_up_to(current.alphabet.levels - 1)
            )
            return SynthesisResult(
                plant=plant,
                m=m,
                rounds=tuple(rounds),
                merged_control=Policy({}, "control"),
                merged_protection=Policy({}, "protection"),
                least_k=None,
                solvable=False,
                failed_round=j,
                witness=witness,
                final_plant=current,
            )
        sup, k = found
        if rounds and k < rounds[-1].k:
            raise InternalError(f"cost index decreased from {rounds[-1].k} to {k} in round {j}")
        policy = derive_control_policy(current, sup)
        rounds.append(Round(current, sup, k, policy))
        current = relabel(current, policy, j)

    merged = merge_policies([r.policy for r in rounds])
    return SynthesisResult(
        plant=plant,
        m=m,
        rounds=tuple(rounds),
        merged_control=merged,
        merged_protection=to_protection_policy(merged, current.alphabet),
        least_k=rounds[-1].k,
        solvable=True,
        final_plant=current,
    )


def relabeled_transitions(plant: Plant) -> set[tuple[str, str, str]]:
    """Relabeled transitions of ``plant`` written with their original events."""
    classes = plant.alphabet.classes
    return {
        (src, classes[e].original, dst)
        for src, e, dst in plant.transitions
        if isinstance(classes[e], Relabeled)
    }
