"""Exact integer max-flow / min-cut on small directed networks.

Blocking-flow (Dinic) solver over adjacency lists with paired residual
arcs.  The reported minimum cut is canonical: the source side is the set
of nodes reachable from s in the final residual network, which makes
witness extraction deterministic for the potential classifier.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field


class FlowError(ValueError):
    """Invalid network construction."""


@dataclass(frozen=True)
class FlowNetwork:
    """Directed network with nonnegative integer capacities."""

    num_nodes: int
    arcs: tuple[tuple[int, int, int], ...]  # (tail, head, capacity)
    source: int
    sink: int

    def __post_init__(self):
        if self.source == self.sink:
            raise FlowError("source equals sink")
        for tail, head, cap in self.arcs:
            if not (0 <= tail < self.num_nodes and 0 <= head < self.num_nodes):
                raise FlowError(f"arc ({tail},{head}) out of range")
            if cap < 0:
                raise FlowError(f"negative capacity on arc ({tail},{head})")
            if not isinstance(cap, int):
                raise FlowError("capacities must be integers")


@dataclass(frozen=True)
class CutResult:
    """Max-flow value with the canonical minimum cut (S, T)."""

    flow_value: int
    source_side: frozenset[int]
    sink_side: frozenset[int]
    arc_flows: tuple[int, ...] = field(repr=False, default=())


def max_flow(net: FlowNetwork) -> CutResult:
    """Exact max flow; S = residual-reachable nodes from the source.

    The solver cross-checks itself before returning: flow conservation at
    every node except s/t, and equality of the flow value with the
    capacity of the extracted cut.
    """
    n = net.num_nodes
    heads: list[int] = []
    caps: list[int] = []
    adj: list[list[int]] = [[] for _ in range(n)]
    for tail, head, cap in net.arcs:
        adj[tail].append(len(heads))
        heads.append(head)
        caps.append(cap)
        adj[head].append(len(heads))
        heads.append(tail)
        caps.append(0)

    s, t = net.source, net.sink
    level = [-1] * n
    it = [0] * n
    total = 0

    def bfs() -> bool:
        for i in range(n):
            level[i] = -1
        level[s] = 0
        q = deque([s])
        while q:
            v = q.popleft()
            for e in adj[v]:
                if caps[e] > 0 and level[heads[e]] < 0:
                    level[heads[e]] = level[v] + 1
                    q.append(heads[e])
        return level[t] >= 0

    def dfs(v: int, pushed: int) -> int:
        if v == t:
            return pushed
        while it[v] < len(adj[v]):
            e = adj[v][it[v]]
            u = heads[e]
            if caps[e] > 0 and level[u] == level[v] + 1:
                got = dfs(u, min(pushed, caps[e]))
                if got > 0:
                    caps[e] -= got
                    caps[e ^ 1] += got
                    return got
            it[v] += 1
        return 0

    while bfs():
        it = [0] * n
        while True:
            pushed = dfs(s, 1 << 300)
            if pushed == 0:
                break
            total += pushed

    # Residual reachability from s gives the canonical minimum cut.
    seen = [False] * n
    seen[s] = True
    q = deque([s])
    while q:
        v = q.popleft()
        for e in adj[v]:
            if caps[e] > 0 and not seen[heads[e]]:
                seen[heads[e]] = True
                q.append(heads[e])
    if seen[t]:
        raise AssertionError("augmenting path remained after max flow")

    source_side = frozenset(v for v in range(n) if seen[v])
    sink_side = frozenset(v for v in range(n) if not seen[v])

    flows = tuple(net.arcs[i][2] - caps[2 * i] for i in range(len(net.arcs)))
    _check_conservation(net, flows, total)
    cut_cap = sum(
        cap for (tail, head, cap) in net.arcs if seen[tail] and not seen[head]
    )
    if cut_cap != total:
        raise AssertionError(f"max-flow {total} != min-cut capacity {cut_cap}")
    return CutResult(total, source_side, sink_side, flows)


def _check_conservation(net: FlowNetwork, flows: tuple[int, ...], value: int) -> None:
    balance = [0] * net.num_nodes
    for (tail, head, cap), f in zip(net.arcs, flows):
        if not 0 <= f <= cap:
            raise AssertionError(f"flow {f} outside [0,{cap}] on arc ({tail},{head})")
        balance[tail] -= f
        balance[head] += f
    for v in range(net.num_nodes):
        if v == net.source or v == net.sink:
            continue
        if balance[v] != 0:
            raise AssertionError(f"conservation violated at node {v}")
    if balance[net.sink] != value or balance[net.source] != -value:
        raise AssertionError("flow value inconsistent with node balances")
