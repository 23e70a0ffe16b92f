"""Kernel-perfect orientations and list coloring.

The digraphs here always come from one construction: an independent
side A, a side B whose internal edges are bidirected, and all A-B edges
oriented one way or the other.  Every induced subdigraph of that shape
has a kernel (an independent set that every outside vertex points
into), found by a simple recursion; repeatedly coloring kernels then
yields a list coloring whenever every list exceeds the out-degree.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .graphs import Graph, bits_to_tuple, iter_bits, mask_of


class KernelError(ValueError):
    pass


class HallViolation(KernelError):
    """No matching covers A; carries a deficient witness set."""

    def __init__(self, violator: tuple[int, ...]):
        super().__init__(f"Hall condition fails at A-subset {violator}")
        self.violator = violator


@dataclass(frozen=True)
class Digraph:
    """Loopless digraph; succ[v] is the out-neighbor bitmask of v."""

    n: int
    succ: tuple[int, ...]

    def __post_init__(self):
        if len(self.succ) != self.n:
            raise KernelError("successor row count != n")
        full = (1 << self.n) - 1
        for v, row in enumerate(self.succ):
            if row >> v & 1:
                raise KernelError(f"self-arc at {v}")
            if row & ~full:
                raise KernelError(f"arcs out of range at {v}")

    def out_degree(self, v: int) -> int:
        return self.succ[v].bit_count()

    def underlying_row(self, v: int) -> int:
        row = self.succ[v]
        for u in range(self.n):
            if self.succ[u] >> v & 1:
                row |= 1 << u
        return row

    def arcs(self) -> list[tuple[int, int]]:
        return [(u, v) for u in range(self.n) for v in iter_bits(self.succ[u])]

    def induced(self, vertices: Iterable[int]) -> tuple["Digraph", tuple[int, ...]]:
        old = tuple(sorted(set(vertices)))
        pos = {v: i for i, v in enumerate(old)}
        keep = mask_of(old)
        rows = []
        for v in old:
            row = 0
            for u in iter_bits(self.succ[v] & keep):
                row |= 1 << pos[u]
            rows.append(row)
        return Digraph(len(old), tuple(rows)), old


def _check_shape(d: Digraph, a_mask: int, b_mask: int) -> None:
    if a_mask & b_mask:
        raise KernelError("A and B overlap")
    if (a_mask | b_mask) != (1 << d.n) - 1:
        raise KernelError("A and B must partition the digraph's vertices")
    for v in iter_bits(a_mask):
        if d.succ[v] & a_mask:
            raise KernelError("A is not independent")
        for u in iter_bits(a_mask):
            if d.succ[u] >> v & 1:
                raise KernelError("A is not independent")
    for v in iter_bits(b_mask):
        inside = d.succ[v] & b_mask
        for u in iter_bits(inside):
            if not d.succ[u] >> v & 1:
                raise KernelError(f"B-internal arc ({v},{u}) is not bidirected")


def find_kernel(d: Digraph, a: Iterable[int], b: Iterable[int]) -> tuple[int, ...]:
    """Kernel of a digraph with independent A and bidirected B-internal arcs.

    If every b has an out-neighbor in A, A itself is the kernel;
    otherwise the first b whose neighbors all point into it is removed
    together with its in-neighborhood, and the kernel of the remainder
    absorbs b.
    """
    a_mask = mask_of(a)
    b_mask = mask_of(b)
    _check_shape(d, a_mask, b_mask)
    kernel = _kernel_rec(d, a_mask, b_mask)
    _check_kernel(d, a_mask | b_mask, kernel)
    return bits_to_tuple(kernel)


def _kernel_rec(d: Digraph, a_mask: int, b_mask: int) -> int:
    while True:
        blocker = -1
        for v in iter_bits(b_mask):
            if not d.succ[v] & a_mask:
                blocker = v
                break
        if blocker < 0:
            return a_mask
        # All of blocker's neighbors point into it; drop the closed
        # in-neighborhood and keep blocker for the kernel.
        preds = 0
        for u in iter_bits(a_mask | b_mask):
            if u != blocker and d.succ[u] >> blocker & 1:
                preds |= 1 << u
        rest = _kernel_rec(d, a_mask & ~preds, b_mask & ~preds & ~(1 << blocker))
        return rest | (1 << blocker)


def _check_kernel(d: Digraph, domain: int, kernel: int) -> None:
    for v in iter_bits(kernel):
        under = d.succ[v] & domain
        for u in iter_bits(domain):
            if d.succ[u] >> v & 1:
                under |= 1 << u
        if under & kernel:
            raise AssertionError("kernel is not independent")
    for v in iter_bits(domain & ~kernel):
        if not d.succ[v] & kernel:
            raise AssertionError(f"vertex {v} has no out-neighbor in the kernel")


def list_color_via_kernels(
    d: Digraph,
    lists: Mapping[int, Iterable[int]],
    a: Iterable[int] | None = None,
    b: Iterable[int] | None = None,
) -> dict[int, int]:
    """Color every vertex from its list; needs |L(v)| >= 1 + outdeg(v).

    Round by round: take the lowest color alpha present in any list,
    find a kernel of the subdigraph of vertices holding alpha, color it
    alpha, delete it, strip alpha from the remaining lists.  A and B
    default to (empty, everything), the fully bidirected shape.
    """
    a_mask = mask_of(a) if a is not None else 0
    b_mask = mask_of(b) if b is not None else ((1 << d.n) - 1) & ~a_mask
    _check_shape(d, a_mask, b_mask)

    remaining: dict[int, set[int]] = {}
    for v in range(d.n):
        if v not in lists:
            raise KernelError(f"vertex {v} has no list")
        lv = set(lists[v])
        if len(lv) < 1 + d.out_degree(v):
            raise KernelError(
                f"list of vertex {v} has {len(lv)} colors but out-degree {d.out_degree(v)}"
            )
        remaining[v] = lv

    colors: dict[int, int] = {}
    alive = (1 << d.n) - 1
    while alive:
        alpha = min(min(remaining[v]) for v in iter_bits(alive))
        holders = [v for v in iter_bits(alive) if alpha in remaining[v]]
        sub, old = d.induced(holders)
        local_a = [i for i, v in enumerate(old) if a_mask >> v & 1]
        local_b = [i for i, v in enumerate(old) if b_mask >> v & 1]
        kernel_local = _kernel_rec(sub, mask_of(local_a), mask_of(local_b))
        kernel = [old[i] for i in iter_bits(kernel_local)]
        if not kernel:
            raise AssertionError("empty kernel on a nonempty subdigraph")
        for v in kernel:
            colors[v] = alpha
            alive &= ~(1 << v)
        for v in iter_bits(alive):
            remaining[v].discard(alpha)
            if not remaining[v]:
                raise AssertionError(f"list of vertex {v} ran dry")

    _check_list_coloring(d, lists, colors)
    return colors


def _check_list_coloring(
    d: Digraph, lists: Mapping[int, Iterable[int]], colors: Mapping[int, int]
) -> None:
    for v in range(d.n):
        if colors[v] not in set(lists[v]):
            raise AssertionError(f"vertex {v} colored outside its list")
    for u, v in d.arcs():
        if colors[u] == colors[v]:
            raise AssertionError(f"monochromatic arc ({u},{v})")


# -- bipartite split-and-match ------------------------------------------


def split_and_match(
    g: Graph, a: Sequence[int], b: Sequence[int], split_cap: int
) -> list[tuple[int, int]]:
    """Match every a in A to a B-neighbor, B-multiplicity ceil(deg/split_cap).

    Each b is split into ceil(d(b)/split_cap) copies of degree at most
    split_cap and a matching covering A is found in the split graph
    (guaranteed by Hall when A-side degrees reach split_cap).  Returned
    pairs are vertex-disjoint on A; a b may appear once per copy.
    """
    if split_cap not in (2, 3):
        raise KernelError(f"split_cap must be 2 or 3, got {split_cap}")
    a = list(a)
    b_set = set(b)
    a_index = {v: i for i, v in enumerate(a)}
    if set(a) & b_set:
        raise KernelError("A and B overlap")

    # Each b's A-edges are dealt to its copies in blocks of split_cap.
    b_edge_copy: dict[tuple[int, int], int] = {}
    copy_owner: list[int] = []
    for u in sorted(b_set):
        nbrs = [w for w in sorted(g.neighbors(u)) if w in a_index]
        if not nbrs:
            continue
        ncopies = -(-len(nbrs) // split_cap)
        ids = list(range(len(copy_owner), len(copy_owner) + ncopies))
        copy_owner.extend(u for _ in ids)
        for j, w in enumerate(nbrs):
            b_edge_copy[(u, w)] = ids[j // split_cap]

    adj: list[list[int]] = []
    for v in a:
        adj.append([b_edge_copy[(u, v)] for u in sorted(set(g.neighbors(v)) & b_set)])

    match_a, match_copy = _hopcroft_karp(adj, len(copy_owner))
    uncovered = [i for i, mv in enumerate(match_a) if mv < 0]
    if uncovered:
        raise HallViolation(_hall_violator(adj, match_a, match_copy, uncovered, a))
    return [(a[i], copy_owner[match_a[i]]) for i in range(len(a))]


def _hopcroft_karp(adj: list[list[int]], n_right: int) -> tuple[list[int], list[int]]:
    """Maximum matching by layered augmenting paths; returns both match arrays."""
    n_left = len(adj)
    inf = float("inf")
    match_l = [-1] * n_left
    match_r = [-1] * n_right
    dist = [0.0] * n_left

    def bfs() -> bool:
        queue = []
        for u in range(n_left):
            if match_l[u] < 0:
                dist[u] = 0
                queue.append(u)
            else:
                dist[u] = inf
        found = False
        qi = 0
        while qi < len(queue):
            u = queue[qi]
            qi += 1
            for r in adj[u]:
                w = match_r[r]
                if w < 0:
                    found = True
                elif dist[w] == inf:
                    dist[w] = dist[u] + 1
                    queue.append(w)
        return found

    def dfs(u: int) -> bool:
        for r in adj[u]:
            w = match_r[r]
            if w < 0 or (dist[w] == dist[u] + 1 and dfs(w)):
                match_l[u] = r
                match_r[r] = u
                return True
        dist[u] = inf
        return False

    while bfs():
        for u in range(n_left):
            if match_l[u] < 0:
                dfs(u)
    return match_l, match_r


def _hall_violator(
    adj: list[list[int]],
    match_l: list[int],
    match_r: list[int],
    uncovered: list[int],
    a: Sequence[int],
) -> tuple[int, ...]:
    """Alternating-path closure of an unmatched vertex: |N(S)| < |S|."""
    seen_l = set(uncovered[:1])
    seen_r: set[int] = set()
    frontier = list(seen_l)
    while frontier:
        nxt = []
        for u in frontier:
            for r in adj[u]:
                if r in seen_r:
                    continue
                seen_r.add(r)
                w = match_r[r]
                if w >= 0 and w not in seen_l:
                    seen_l.add(w)
                    nxt.append(w)
        frontier = nxt
    return tuple(sorted(a[u] for u in seen_l))


def orient_AB(
    g: Graph, a: Sequence[int], b: Sequence[int], matching: Sequence[tuple[int, int]]
) -> Digraph:
    """Orientation rules: matched A-B edges point to A, the rest to B,
    and the non-independent side's internal edges become arc pairs.

    Vertices of the result are g's vertices; arcs exist only inside
    A union B.
    """
    a_set, b_set = set(a), set(b)
    if a_set & b_set:
        raise KernelError("A and B overlap")
    a_internal = any(g.has_edge(u, v) for u in a_set for v in a_set if u < v)
    b_internal = any(g.has_edge(u, v) for u in b_set for v in b_set if u < v)
    if a_internal and b_internal:
        raise KernelError("neither side is independent")

    matched_of_a: dict[int, int] = {}
    seen_pairs = set()
    for x, y in matching:
        if x in a_set and y in b_set:
            av, bv = x, y
        elif y in a_set and x in b_set:
            av, bv = y, x
        else:
            raise KernelError(f"matching pair ({x},{y}) does not cross A-B")
        if not g.has_edge(av, bv):
            raise KernelError(f"matching pair ({av},{bv}) is not an edge")
        if av in matched_of_a:
            raise KernelError(f"vertex {av} matched twice")
        if (av, bv) in seen_pairs:
            raise KernelError(f"duplicate matching pair ({av},{bv})")
        seen_pairs.add((av, bv))
        matched_of_a[av] = bv
    if set(matched_of_a) != a_set:
        missing = sorted(a_set - set(matched_of_a))
        raise KernelError(f"matching does not cover A (missing {missing})")

    succ = [0] * g.n
    for u in a_set:
        for v in iter_bits(g.rows[u]):
            if v in a_set and u < v:  # A-internal, only when B independent
                succ[u] |= 1 << v
                succ[v] |= 1 << u
            elif v in b_set:
                if matched_of_a.get(u) == v:
                    succ[v] |= 1 << u
                else:
                    succ[u] |= 1 << v
    for u in b_set:
        for v in iter_bits(g.rows[u]):
            if v in b_set and u < v:
                succ[u] |= 1 << v
                succ[v] |= 1 << u
    return Digraph(g.n, tuple(succ))
