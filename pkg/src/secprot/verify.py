"""Path-counting checks that do not depend on supervisory control.

Everything here reduces to one question: over all paths from the initial
state to a secret, what is the fewest number of transitions that count as
protected? Counts are found with a 0/1-weight breadth-first search.
"""

from __future__ import annotations

import heapq
import math
from collections import deque
from typing import Callable, Optional, Union

from .core import Plant, PlantError, Policy

__all__ = [
    "INFINITY",
    "min_protected_count",
    "is_m_securely_reachable",
    "least_k",
    "verify_policy",
    "witness_path",
    "format_path",
]

#: Count reported when no secret is reachable at all.
INFINITY = math.inf

Counted = Callable[[str, str], bool]
Count = Union[int, float]


def min_protected_count(plant: Plant, counted: Counted) -> Count:
    """Fewest counted transitions on any path from the initial state to a secret.

    Returns :data:`INFINITY` when no secret is reachable. Reaching a secret
    again after a first visit never lowers the count, so the search stops at
    the first secret it settles.
    """
    if plant.initial is None or not plant.secrets:
        return INFINITY
    dist = {plant.initial: 0}
    queue = deque([plant.initial])
    done: set[str] = set()
    while queue:
        q = queue.popleft()
        if q in done:
            continue
        done.add(q)
        if q in plant.secrets:
            return dist[q]
        for event, dst in plant.out(q):
            w = 1 if counted(q, event) else 0
            nd = dist[q] + w
            if nd < dist.get(dst, INFINITY):
                dist[dst] = nd
                if w:
                    queue.append(dst)
                else:
                    queue.appendleft(dst)
    return INFINITY


def _level_counter(plant: Plant, k: int) -> Counted:
    events = plant.alphabet.protectable_up_to(k)
    return lambda q, e: e in events


def is_m_securely_reachable(plant: Plant, k: int, m: int) -> bool:
    """Whether every string reaching a secret holds ``m`` events of cost level ``<= k``."""
    if not 0 <= k < plant.alphabet.levels:
        raise PlantError(f"cost index {k} outside 0..{plant.alphabet.levels - 1}")
    if m < 1:
        raise PlantError(f"protection count must be at least 1, got {m}")
    return min_protected_count(plant, _level_counter(plant, k)) >= m


def least_k(plant: Plant, m: int) -> Optional[int]:
    for k in range(plant.alphabet.levels):
        if is_m_securely_reachable(plant, k, m):
            return k
    return None


def _policy_counter(plant: Plant, policy: Policy) -> Counted:
    for q, events in policy.entries.items():
        if q not in plant.state_set:
            raise PlantError(f"policy names unknown state {q!r}")
        for e in events:
            if e not in plant.alphabet:
                raise PlantError(f"policy names unknown event {e!r} at {q!r}")
    pairs = policy.pairs()
    return lambda q, e: (q, e) in pairs


def witness_path(plant: Plant, counted: Counted) -> Optional[list[tuple[str, str, str]]]:
    """A path to a secret with the fewest counted transitions.

    Ties go to the shortest path, then to the lexicographically smallest
    sequence of (event, target) declaration indices.
    """
    if plant.initial is None or not plant.secrets:
        return None
    state_idx = {q: i for i, q in enumerate(plant.states)}
    alpha = plant.alphabet
    heap = [(0, 0, (), plant.initial, ())]
    settled: set[str] = set()
    while heap:
        count, length, key, q, path = heapq.heappop(heap)
        if q in settled:
            continue
        settled.add(q)
        if q in plant.secrets:
            return list(path)
        for event, dst in plant.out(q):
            if dst in settled:
                continue
            step = (alpha.index(event), state_idx[dst])
            heapq.heappush(
                heap,
                (
                    count + (1 if counted(q, event) else 0),
                    length + 1,
                    key + (step,),
                    dst,
                    path + ((q, event, dst),),
                ),
            )
    return None


def verify_policy(
    plant: Plant, policy: Policy, m: int
) -> tuple[bool, Optional[list[tuple[str, str, str]]]]:
    """Check that ``policy`` puts ``m`` protections on every path to a secret.

    Returns ``(True, None)`` or ``(False, path)`` where ``path`` reaches a
    secret through fewer than ``m`` protected transitions.
    """
    counter = _policy_counter(plant, policy)
    for q, events in policy.entries.items():
        for e in events:
            if (q, e) not in plant.delta:
                raise PlantError(f"policy protects {e!r} at {q!r} where it is undefined")
            if not plant.alphabet.is_protectable(e):
                raise PlantError(f"policy protects non-protectable event {e!r} at {q!r}")
    if min_protected_count(plant, counter) >= m:
        return True, None
    return False, witness_path(plant, counter)


def format_path(start: str, path: list[tuple[str, str, str]]) -> str:
    parts = [start]
    for _, event, dst in path:
        parts.append(f"-{event}-> {dst}")
    return " ".join(parts)
