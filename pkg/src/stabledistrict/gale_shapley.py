"""Deferred-acceptance solvers over fully materialized preference tables.

Both variants first run one shortest-path pass per center and sort the
resulting k x n score table into explicit preference lists, so memory is
Theta(n*k). Because that wall is a real failure mode on large inputs,
``build_preferences`` refuses up front (raising ``MemoryCapExceeded``)
when the estimated table size exceeds a configurable byte budget, instead
of crashing mid-run; pass ``memory_cap_bytes=None`` to override.
"""

from __future__ import annotations

from array import array
from collections import deque
from dataclasses import dataclass
from heapq import heappop, heappush
from typing import NamedTuple

from .model import Assignment, Instance, MemoryCapExceeded, compute_center_distances

# One materialized preference entry: an 8-byte distance plus a 4-byte id.
PAIR_ENTRY_BYTES = 12
DEFAULT_MEMORY_CAP_BYTES = 2 * 1024**3


def estimate_preference_bytes(n: int, k: int) -> int:
    return n * k * PAIR_ENTRY_BYTES


@dataclass(frozen=True)
class PreferenceTables:
    """Sorted preference lists for both sides plus the k x n distance table.

    center_prefs[c] ranks all nodes for center c, best first; node_prefs[u]
    ranks all center indices for node u. Both orders are strict under the
    Score total order: ties in distance fall back to node id (center side)
    or center index (node side).
    """

    center_prefs: list[array]
    node_prefs: list[array]
    dist: list[array]


class GsRun(NamedTuple):
    assignment: Assignment
    proposals: int


def build_preferences(
    inst: Instance, memory_cap_bytes: int | None = DEFAULT_MEMORY_CAP_BYTES
) -> PreferenceTables:
    """Run one Dijkstra per center and sort both sides' preference lists."""
    n = inst.graph.node_count
    k = inst.k
    required = estimate_preference_bytes(n, k)
    if memory_cap_bytes is not None and required > memory_cap_bytes:
        raise MemoryCapExceeded("gale-shapley", required, memory_cap_bytes)
    rows = compute_center_distances(inst)
    dist = [array("d", row.dist) for row in rows]
    # Stable sorts over an index range break distance ties by id/index,
    # which is exactly the Score order with the first component fixed.
    center_prefs = [
        array("i", sorted(range(n), key=dist[c].__getitem__)) for c in range(k)
    ]
    node_prefs = []
    for u in range(n):
        column = [dist[c][u] for c in range(k)]
        node_prefs.append(array("i", sorted(range(k), key=column.__getitem__)))
    return PreferenceTables(center_prefs=center_prefs, node_prefs=node_prefs, dist=dist)


def gs_centers_run(inst: Instance, prefs: PreferenceTables) -> GsRun:
    """Centers propose down their lists while under quota.

    A node accepts a proposal when unmatched or when the proposer scores
    strictly better than its current center; the displaced center then
    resumes proposing. Each center proposes to each node at most once, so
    the matching phase is O(n*k) after preference construction.
    """
    n = inst.graph.node_count
    k = inst.k
    dist = prefs.dist
    slots = list(inst.quotas)
    pointer = [0] * k
    cur_center = [-1] * n
    cur_dist = [0.0] * n
    active = deque(range(k))
    queued = [True] * k
    proposals = 0
    while active:
        c = active.popleft()
        queued[c] = False
        pref_row = prefs.center_prefs[c]
        dist_row = dist[c]
        p = pointer[c]
        while slots[c] > 0:
            assert p < n, "center exhausted its list with quota unfilled"
            u = pref_row[p]
            p += 1
            proposals += 1
            d = dist_row[u]
            holder = cur_center[u]
            if holder < 0:
                cur_center[u] = c
                cur_dist[u] = d
                slots[c] -= 1
            elif (d, c) < (cur_dist[u], holder):
                cur_center[u] = c
                cur_dist[u] = d
                slots[c] -= 1
                slots[holder] += 1
                if not queued[holder]:
                    active.append(holder)
                    queued[holder] = True
        pointer[c] = p
    assert all(c >= 0 for c in cur_center)
    return GsRun(Assignment(match=cur_center, dist=cur_dist), proposals)


def gs_nodes_run(inst: Instance, prefs: PreferenceTables) -> GsRun:
    """Nodes propose down their lists; full centers bump their worst match.

    Each center tracks its least-preferred current member in a max-heap
    keyed by Score (lazy deletion guards against stale tops). The bumped
    node resumes proposing from where it left off.
    """
    n = inst.graph.node_count
    dist = prefs.dist
    slots = list(inst.quotas)
    pointer = [0] * n
    cur_center = [-1] * n
    cur_dist = [0.0] * n
    worst: list[list[tuple[float, int]]] = [[] for _ in range(inst.k)]
    free = list(range(n - 1, -1, -1))  # stack; node 0 proposes first
    proposals = 0
    while free:
        u = free.pop()
        p = pointer[u]
        assert p < inst.k, "node exhausted its list while unmatched"
        c = prefs.node_prefs[u][p]
        pointer[u] = p + 1
        proposals += 1
        d = dist[c][u]
        if slots[c] > 0:
            slots[c] -= 1
            cur_center[u] = c
            cur_dist[u] = d
            heappush(worst[c], (-d, -u))
        else:
            heap = worst[c]
            while heap and cur_center[-heap[0][1]] != c:
                heappop(heap)  # stale entry
            assert heap, "full center with empty member heap"
            wd, wu = -heap[0][0], -heap[0][1]
            if (d, u) < (wd, wu):
                heappop(heap)
                cur_center[wu] = -1
                free.append(wu)
                cur_center[u] = c
                cur_dist[u] = d
                heappush(heap, (-d, -u))
            else:
                free.append(u)
    return GsRun(Assignment(match=cur_center, dist=cur_dist), proposals)


def solve_gs_centers(inst: Instance, prefs: PreferenceTables) -> Assignment:
    return gs_centers_run(inst, prefs).assignment


def solve_gs_nodes(inst: Instance, prefs: PreferenceTables) -> Assignment:
    return gs_nodes_run(inst, prefs).assignment
