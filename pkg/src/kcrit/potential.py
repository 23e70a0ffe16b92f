"""Vertex-set potentials and the flow-based classifier (outcomes S1-S5).

The k-potential of a nonempty R is

    rho(R) = (k-2)(k+1)|R| - 2(k-1)|E(G[R])|

and the classifier locates minimizers of rho over proper subsets via
min cuts in small auxiliary networks.  One capacity is fractional on
paper (a -1/(2n) correction per source arc); every capacity here is
pre-scaled by 2n so the whole classification runs in exact integer
arithmetic, including all five threshold comparisons.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable

from .flow import CutResult, FlowNetwork, max_flow
from .graphs import Graph, bits_to_tuple, mask_of

DEFAULT_ORACLE_LIMIT = 20


def oracle_limit(override: int | None = None) -> int:
    """Size cap for exponential searches; KCRIT_ORACLE_LIMIT overrides."""
    if override is not None:
        return override
    env = os.environ.get("KCRIT_ORACLE_LIMIT")
    return int(env) if env else DEFAULT_ORACLE_LIMIT


class PotentialError(ValueError):
    pass


class OracleSizeError(PotentialError):
    """Input too large for an exponential-time oracle."""


@dataclass(frozen=True)
class PotentialWitness:
    """A vertex set W with its k-potential; the failure certificate."""

    vertices: tuple[int, ...]
    rho: int
    k: int

    def validate(self, g: Graph) -> None:
        if not self.vertices:
            raise PotentialError("witness set is empty")
        if rho(g, self.k, self.vertices) != self.rho:
            raise PotentialError("witness potential does not recompute")


@dataclass(frozen=True)
class R1Outcome:
    """Classifier outcome. Witness present for S1-S4, absent for S5.

    ``h_flow_scaled`` is the max-flow value of the plain network and
    ``mk_scaled`` the minimum over all (e0, v0) networks actually solved;
    both are in 2n-scaled units (``scale``) for audit.
    """

    tag: str
    witness: PotentialWitness | None
    scale: int
    h_flow_scaled: int | None = None
    mk_scaled: int | None = None


def rho(g: Graph, k: int, subset: Iterable[int]) -> int:
    """Exact k-potential of a nonempty vertex subset."""
    if k < 4:
        raise PotentialError(f"potential defined for k >= 4, got {k}")
    mask = mask_of(subset)
    if mask == 0:
        raise PotentialError("potential of the empty set is undefined")
    if mask >> g.n:
        raise PotentialError("subset contains vertices outside the graph")
    return (k - 2) * (k + 1) * mask.bit_count() - 2 * (k - 1) * g.edges_within(mask)


def _edge_counts_all_subsets(g: Graph) -> list[int]:
    """edges[W] for every subset bitmask W, by incremental extension."""
    n = g.n
    counts = [0] * (1 << n)
    for w in range(1, 1 << n):
        low = w & -w
        v = low.bit_length() - 1
        rest = w ^ low
        counts[w] = counts[rest] + (g.rows[v] & rest).bit_count()
    return counts


def brute_min_potential(
    g: Graph, k: int, restricted: bool = False, limit: int | None = None
) -> PotentialWitness:
    """Exact minimizer of rho by subset enumeration (independent oracle).

    restricted=True confines the minimum to 2 <= |W| <= n-1.  Ties break
    toward smaller sets, then lexicographically smaller vertex tuples.
    """
    n = g.n
    cap = oracle_limit(limit)
    if n > cap:
        raise OracleSizeError(f"brute_min_potential refuses n={n} > {cap}")
    if n == 0:
        raise PotentialError("graph is empty")
    if restricted and n < 3:
        raise PotentialError("restricted minimum needs n >= 3")

    vk = (k - 2) * (k + 1)
    ek = 2 * (k - 1)
    counts = _edge_counts_all_subsets(g)
    best: tuple[int, int, tuple[int, ...]] | None = None
    lo_size = 2 if restricted else 1
    hi_size = n - 1 if restricted else n
    for w in range(1, 1 << n):
        size = w.bit_count()
        if not lo_size <= size <= hi_size:
            continue
        val = vk * size - ek * counts[w]
        if best is not None and val > best[0]:
            continue
        key = (val, size, bits_to_tuple(w))
        if best is None or key < best:
            best = key
    assert best is not None
    return PotentialWitness(best[2], best[0], k)


# -- auxiliary networks -------------------------------------------------


def build_R1_network(
    g: Graph,
    k: int,
    e0: tuple[int, int] | None = None,
    v0: int | None = None,
) -> FlowNetwork:
    """Auxiliary network (plain, or the (e0, v0) variant), scaled by 2n.

    Nodes: vertices 0..n-1, then edges in lexicographic order, then s, t.
    The v->e arcs carry a sentinel capacity exceeding the total source
    capacity, so they can never sit in a minimum cut.
    """
    if k < 4:
        raise PotentialError(f"k >= 4 required, got {k}")
    if (e0 is None) != (v0 is None):
        raise PotentialError("e0 and v0 must be given together")
    n = g.n
    if n == 0:
        raise PotentialError("graph is empty")
    edges = g.edges()
    if e0 is not None:
        e0 = (min(e0), max(e0))
        if e0 not in edges:
            raise PotentialError(f"e0={e0} is not an edge")
        assert v0 is not None
        if v0 in e0:
            raise PotentialError(f"v0={v0} is incident to e0={e0}")
        if not 0 <= v0 < n:
            raise PotentialError(f"v0={v0} out of range")

    sc = 2 * n
    s = n + len(edges)
    t = s + 1
    base_sv = sc * (k + 1) * (k - 2) - (0 if e0 is None else 1)
    bonus_v0 = sc * (2 * (k - 1) * (k - 2) + 1)
    cap_et = sc * 2 * (k - 1)
    cap_e0t = sc * 2 * (k - 1) * (k - 1)

    arcs: list[tuple[int, int, int]] = []
    total_source = 0
    for v in range(n):
        cap = base_sv + (bonus_v0 if v == v0 else 0)
        arcs.append((s, v, cap))
        total_source += cap
    for i, e in enumerate(edges):
        arcs.append((n + i, t, cap_e0t if e == e0 else cap_et))
    sentinel = total_source + 1
    for i, (u, v) in enumerate(edges):
        arcs.append((u, n + i, sentinel))
        arcs.append((v, n + i, sentinel))
    return FlowNetwork(n + len(edges) + 2, tuple(arcs), s, t)


def _cut_vertex_side(g: Graph, cut: CutResult) -> tuple[int, ...]:
    """Graph vertices on the sink side of a cut of an R1 network (T_V)."""
    return tuple(sorted(v for v in cut.sink_side if v < g.n))


def _cut_edge_side(g: Graph, cut: CutResult) -> tuple[tuple[int, int], ...]:
    edges = g.edges()
    return tuple(edges[i - g.n] for i in sorted(cut.sink_side) if g.n <= i < g.n + len(edges))


def procedure_R1(g: Graph, k: int) -> R1Outcome:
    """Classify g into S1-S5 with a witness set for S1-S4.

    Order of checks: rho(V) directly, then the plain network (detects a
    negative global minimum), then every (e0, v0) network with edges in
    lexicographic order and v0 ascending, exiting early the moment a
    pair certifies S1.  All comparisons are 2n-scaled integers.
    """
    if k < 4:
        raise PotentialError(f"k >= 4 required, got {k}")
    n = g.n
    if n == 0:
        raise PotentialError("graph is empty")
    sc = 2 * n
    kk3 = k * (k - 3)

    rho_v = rho(g, k, range(n))
    if rho_v <= kk3:
        w = PotentialWitness(tuple(range(n)), rho_v, k)
        return R1Outcome("S1", w, sc)

    edges = g.edges()
    m = len(edges)
    base = sc * 2 * (k - 1) * m

    h_flow = None
    if m > 0:
        cut = max_flow(build_R1_network(g, k))
        h_flow = cut.flow_value
        if h_flow < base:
            tv = _cut_vertex_side(g, cut)
            w = PotentialWitness(tv, rho(g, k, tv), k)
            w.validate(g)
            if w.rho > kk3:
                raise AssertionError("plain-network witness above S1 threshold")
            return R1Outcome("S1", w, sc, h_flow_scaled=h_flow)
    else:
        h_flow = 0

    t1 = base + sc * kk3
    t2 = base + sc * (k + 1) * (k - 2)
    t3 = base + sc * (2 * (k - 1) * (k - 2) - 1)
    t4 = base + sc * 2 * (k - 1) * (k - 2) - (k - 1)

    best: tuple[int, tuple[int, ...]] | None = None
    for e0 in edges:
        for v0 in range(n):
            if v0 in e0:
                continue
            cut = max_flow(build_R1_network(g, k, e0, v0))
            tv = _cut_vertex_side(g, cut)
            if best is None or cut.flow_value < best[0]:
                best = (cut.flow_value, tv)
            if cut.flow_value <= t1:
                w = PotentialWitness(tv, rho(g, k, tv), k)
                w.validate(g)
                if w.rho > kk3:
                    raise AssertionError("S1 cut witness above threshold")
                return R1Outcome("S1", w, sc, h_flow_scaled=h_flow, mk_scaled=cut.flow_value)

    if best is None:
        # No valid (e0, v0) pair exists; every proper subset of size >= 2
        # is independent or n <= 2, so the restricted minimum clears the
        # S5 threshold vacuously.
        return R1Outcome("S5", None, sc, h_flow_scaled=h_flow)

    mk, tv = best
    if mk >= t4:
        return R1Outcome("S5", None, sc, h_flow_scaled=h_flow, mk_scaled=mk)

    w = PotentialWitness(tv, rho(g, k, tv), k)
    w.validate(g)
    if mk < t2:
        tag = "S2"
    elif mk < t3:
        tag = "S3"
    else:
        tag = "S4"
        if w.rho != 2 * (k - 1) * (k - 2) or len(tv) < k:
            raise AssertionError("S4 witness shape violated")
    if not 1 <= len(tv) <= n - 1:
        raise AssertionError(f"{tag} witness must be a proper subset")
    return R1Outcome(tag, w, sc, h_flow_scaled=h_flow, mk_scaled=mk)


def scaled_h_flow_identity(g: Graph, k: int, limit: int | None = None) -> tuple[int, int]:
    """(flow value of plain network, 2n*(2(k-1)|E| + min{P_k, 0})).

    Exponential in n; used by tests and the brute audit mode.
    """
    n = g.n
    m = g.num_edges()
    if m == 0:
        return 0, 0
    flow = max_flow(build_R1_network(g, k)).flow_value
    pk = brute_min_potential(g, k, limit=limit).rho
    expected = 2 * n * (2 * (k - 1) * m + min(pk, 0))
    return flow, expected


def brute_classify(g: Graph, k: int, limit: int | None = None) -> R1Outcome:
    """Ground-truth S1-S5 classification by subset enumeration.

    Mirrors the flow classifier's decision boundaries exactly: S2 covers
    k(k-3) < P~ <= (k+1)(k-2) (the upper boundary lands in S2 because a
    cut for a set W sits |W|/2n below the scaled potential), S4 needs a
    tight set of size >= k, and S5 means all tight sets induce K_{k-1}.
    """
    n = g.n
    cap = oracle_limit(limit)
    if n > cap:
        raise OracleSizeError(f"brute_classify refuses n={n} > {cap}")
    kk3 = k * (k - 3)
    sc = 2 * n

    unres = brute_min_potential(g, k, restricted=False, limit=cap)
    if unres.rho <= kk3:
        rho_v = rho(g, k, range(n))
        if rho_v <= kk3:
            return R1Outcome("S1", PotentialWitness(tuple(range(n)), rho_v, k), sc)
        return R1Outcome("S1", unres, sc)

    if n < 3:
        return R1Outcome("S5", None, sc)
    res = brute_min_potential(g, k, restricted=True, limit=cap)
    ub_s2 = (k + 1) * (k - 2)
    s4_level = 2 * (k - 1) * (k - 2)
    if res.rho <= ub_s2:
        return R1Outcome("S2", res, sc)
    if res.rho < s4_level:
        return R1Outcome("S3", res, sc)
    if res.rho == s4_level:
        big = _tight_set_at_least(g, k, s4_level, k)
        if big is not None:
            return R1Outcome("S4", PotentialWitness(big, s4_level, k), sc)
    return R1Outcome("S5", None, sc)


def _tight_set_at_least(
    g: Graph, k: int, level: int, min_size: int
) -> tuple[int, ...] | None:
    """Largest proper subset of size >= min_size with rho == level, if any."""
    n = g.n
    counts = _edge_counts_all_subsets(g)
    vk = (k - 2) * (k + 1)
    ek = 2 * (k - 1)
    best: tuple[int, tuple[int, ...]] | None = None
    for w in range(1, 1 << n):
        size = w.bit_count()
        if size < min_size or size > n - 1:
            continue
        if vk * size - ek * counts[w] == level:
            key = (-size, bits_to_tuple(w))
            if best is None or key < best:
                best = key
    return best[1] if best else None


def tight_sets(g: Graph, k: int, level: int | None = None) -> list[tuple[int, ...]]:
    """All proper subsets (2 <= |W| <= n-1) with rho == level (default S4/S5 level)."""
    if level is None:
        level = 2 * (k - 1) * (k - 2)
    out = []
    for size in range(2, g.n):
        for comb in combinations(range(g.n), size):
            if rho(g, k, comb) == level:
                out.append(comb)
    return out
