"""Leiden-style modularity clustering: local moving, refinement, aggregation.

Works on symmetric weighted adjacency dicts (self-loops allowed). All node
orderings are either sorted or drawn from a seeded RNG, so a fixed seed gives
identical partitions across runs and platforms.
"""

from __future__ import annotations

import random
from collections import deque
from typing import Hashable, Iterable, Sequence

from .errors import ValidationError

Adjacency = dict  # node -> {neighbor: weight}; symmetric

_EPS = 1e-12


def strengths(graph: Adjacency) -> tuple[dict, float]:
    """Node strengths (self-loops counted twice) and total 2m."""
    k: dict = {}
    m2 = 0.0
    for u, nbrs in graph.items():
        s = 0.0
        for v, w in nbrs.items():
            s += w * (2.0 if v == u else 1.0)
        k[u] = s
        m2 += s
    return k, m2


def modularity(graph: Adjacency, partition: Iterable[Iterable[Hashable]], resolution: float = 1.0) -> float:
    """Weighted modularity of a partition at the given resolution."""
    k, m2 = strengths(graph)
    if m2 <= 0:
        return 0.0
    block_of: dict = {}
    for idx, block in enumerate(partition):
        for node in block:
            block_of[node] = idx
    internal: dict[int, float] = {}
    sigma: dict[int, float] = {}
    for u, nbrs in graph.items():
        b = block_of[u]
        sigma[b] = sigma.get(b, 0.0) + k[u]
        for v, w in nbrs.items():
            if v == u:
                internal[b] = internal.get(b, 0.0) + w
            elif block_of[v] == b and u < v:
                internal[b] = internal.get(b, 0.0) + w
    q = 0.0
    for b in sigma:
        q += 2.0 * internal.get(b, 0.0) / m2 - resolution * (sigma[b] / m2) ** 2
    return q


def _local_move(
    graph: Adjacency,
    resolution: float,
    rng: random.Random,
    init: dict | None = None,
) -> dict:
    """Queue-based greedy node moving; returns node -> community label."""
    nodes = sorted(graph)
    k, m2 = strengths(graph)
    if m2 <= 0:
        return {u: i for i, u in enumerate(nodes)}
    if init is None:
        label = {u: i for i, u in enumerate(nodes)}
    else:
        label = dict(init)
    sigma: dict = {}
    for u in nodes:
        sigma[label[u]] = sigma.get(label[u], 0.0) + k[u]
    order = nodes[:]
    rng.shuffle(order)
    queue = deque(order)
    queued = set(order)
    next_label = max(label.values()) + 1
    while queue:
        u = queue.popleft()
        queued.discard(u)
        c_old = label[u]
        sigma[c_old] -= k[u]
        wcomm: dict = {}
        for v, w in graph[u].items():
            if v != u:
                cv = label[v]
                wcomm[cv] = wcomm.get(cv, 0.0) + w
        best_c = c_old
        best_gain = wcomm.get(c_old, 0.0) - resolution * k[u] * sigma[c_old] / m2
        for c in sorted(wcomm):
            if c == c_old:
                continue
            gain = wcomm[c] - resolution * k[u] * sigma[c] / m2
            if gain > best_gain + _EPS:
                best_c, best_gain = c, gain
        if best_gain < -_EPS:
            # isolating the node (gain exactly 0) beats every candidate
            best_c = next_label
            next_label += 1
        label[u] = best_c
        sigma[best_c] = sigma.get(best_c, 0.0) + k[u]
        if best_c != c_old:
            for v in graph[u]:
                if v != u and label[v] != best_c and v not in queued:
                    queue.append(v)
                    queued.add(v)
    return label


def _refine(
    graph: Adjacency,
    label: dict,
    resolution: float,
    rng: random.Random,
) -> list[set]:
    """Split each community into well-connected sub-blocks (single merge pass).

    Starts from singletons inside each community; only nodes still alone may
    merge, which is what keeps the refined partition a refinement of `label`.
    """
    k, m2 = strengths(graph)
    communities: dict = {}
    for u in sorted(graph):
        communities.setdefault(label[u], []).append(u)
    blocks: list[set] = []
    for c in sorted(communities):
        members = communities[c]
        sub = {u: i for i, u in enumerate(members)}
        sigma = {i: k[u] for i, u in enumerate(members)}
        size = {i: 1 for i in range(len(members))}
        order = members[:]
        rng.shuffle(order)
        for u in order:
            su = sub[u]
            if size[su] > 1:
                continue
            wsub: dict[int, float] = {}
            for v, w in graph[u].items():
                if v != u and label.get(v) == c and sub[v] != su:
                    wsub[sub[v]] = wsub.get(sub[v], 0.0) + w
            best_s, best_gain = su, 0.0
            for s in sorted(wsub):
                gain = wsub[s] - resolution * k[u] * (sigma[s] if m2 else 0.0) / m2
                if gain > best_gain + _EPS:
                    best_s, best_gain = s, gain
            if best_s != su:
                sigma[su] -= k[u]
                size[su] -= 1
                sub[u] = best_s
                sigma[best_s] += k[u]
                size[best_s] += 1
        grouped: dict[int, set] = {}
        for u in members:
            grouped.setdefault(sub[u], set()).add(u)
        blocks.extend(grouped.values())
    return blocks


def aggregate(graph: Adjacency, blocks: Sequence[Iterable[Hashable]]) -> Adjacency:
    """Collapse each block into one node (indexed by block position)."""
    index: dict = {}
    for i, block in enumerate(blocks):
        for u in block:
            index[u] = i
    agg: Adjacency = {i: {} for i in range(len(blocks))}
    for u, nbrs in graph.items():
        iu = index[u]
        for v, w in nbrs.items():
            iv = index[v]
            if u == v:
                agg[iu][iu] = agg[iu].get(iu, 0.0) + w
            elif iu == iv:
                if u < v:
                    agg[iu][iu] = agg[iu].get(iu, 0.0) + w
            else:
                agg[iu][iv] = agg[iu].get(iv, 0.0) + w
    return agg


def leiden_communities(
    graph: Adjacency, resolution: float = 1.0, seed: int = 0
) -> list[set]:
    """Partition nodes of a weighted graph by Leiden-style modularity search.

    Returns blocks of original nodes, sorted by smallest member.
    """
    if resolution <= 0:
        raise ValidationError(f"resolution must be > 0, got {resolution}")
    if not graph:
        return []
    rng = random.Random(seed)
    current: Adjacency = {u: dict(nbrs) for u, nbrs in graph.items()}
    members: dict = {u: frozenset([u]) for u in graph}
    init: dict | None = None
    while True:
        label = _local_move(current, resolution, rng, init)
        parts: dict = {}
        for u in sorted(current):
            parts.setdefault(label[u], set()).add(u)
        if len(parts) == len(current):
            break
        refined = _refine(current, label, resolution, rng)
        if len(refined) == len(current):
            # refinement kept everything singleton; aggregate on the communities
            refined = list(parts.values())
        blocks = sorted(refined, key=lambda b: min(min(members[u]) for u in b))
        new_members: dict = {}
        init = {}
        for i, block in enumerate(blocks):
            new_members[i] = frozenset().union(*(members[u] for u in block))
            init[i] = label[next(iter(block))]
        current = aggregate(current, blocks)
        members = new_members
    final = [set(members[u]) for u in current]
    return sorted(final, key=min)
