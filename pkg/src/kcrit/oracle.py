"""Independent ground truth: exact coloring, criticality, and sharp bounds.

The chromatic-number search is a saturation-ordered branch and bound
with forward checking and fresh-color symmetry breaking.  It is meant
to be obviously correct at desk scale (default refusal above n = 20,
overridable via KCRIT_ORACLE_LIMIT), not fast at benchmark scale.
"""

from __future__ import annotations

from dataclasses import dataclass

from .graphs import Graph, GraphError, iter_bits
from .potential import OracleSizeError, oracle_limit


# -- exact coloring -----------------------------------------------------


def greedy_clique(g: Graph) -> tuple[int, ...]:
    """Maximal clique grown greedily from high-degree vertices."""
    order = sorted(range(g.n), key=lambda v: (-g.degree(v), v))
    best: tuple[int, ...] = ()
    for start in order[: max(1, min(g.n, 8))]:
        clique = [start]
        cand = g.rows[start]
        while cand:
            u = max(iter_bits(cand), key=lambda x: ((g.rows[x] & cand).bit_count(), -x))
            clique.append(u)
            cand &= g.rows[u]
        if len(clique) > len(best):
            best = tuple(sorted(clique))
    return best


def greedy_coloring_bound(g: Graph) -> int:
    """DSATUR greedy upper bound on the chromatic number."""
    n = g.n
    if n == 0:
        return 0
    color = [-1] * n
    neighbor_colors = [0] * n
    for _ in range(n):
        v = max(
            (u for u in range(n) if color[u] < 0),
            key=lambda u: (neighbor_colors[u].bit_count(), g.degree(u), -u),
        )
        c = 0
        while neighbor_colors[v] >> c & 1:
            c += 1
        color[v] = c
        for u in iter_bits(g.rows[v]):
            neighbor_colors[u] |= 1 << c
    return max(color) + 1


def find_coloring(g: Graph, num_colors: int) -> dict[int, int] | None:
    """A proper coloring with colors 1..num_colors, or None if impossible.

    Branch and bound: most-saturated vertex first (fewest allowed colors),
    colors restricted to those already used plus one fresh color, with a
    greedy clique pre-assigned to break symmetry.
    """
    n = g.n
    if n == 0:
        return {}
    if num_colors <= 0:
        return None if g.n else {}

    full = (1 << num_colors) - 1
    allowed = [full] * n
    assigned: list[int] = [-1] * n

    clique = greedy_clique(g)
    if len(clique) > num_colors:
        return None
    for i, v in enumerate(clique):
        assigned[v] = i
        bit = 1 << i
        for u in iter_bits(g.rows[v]):
            allowed[u] &= ~bit

    used_mask = (1 << len(clique)) - 1
    remaining = [v for v in range(n) if assigned[v] < 0]

    def search(used: int, todo: list[int]) -> bool:
        if not todo:
            return True
        # Most constrained vertex; ties by degree, then index.
        best_i = 0
        best_key = None
        for i, v in enumerate(todo):
            a = allowed[v]
            if a == 0:
                return False
            key = (a.bit_count(), -g.degree(v), v)
            if best_key is None or key < best_key:
                best_key = key
                best_i = i
        v = todo[best_i]
        todo2 = todo[:best_i] + todo[best_i + 1 :]
        options = allowed[v] & used
        fresh = allowed[v] & ~used
        if fresh:
            options |= fresh & -fresh
        for c in iter_bits(options):
            bit = 1 << c
            assigned[v] = c
            touched = []
            dead = False
            for u in iter_bits(g.rows[v]):
                if assigned[u] < 0 and allowed[u] & bit:
                    allowed[u] &= ~bit
                    touched.append(u)
                    if allowed[u] == 0:
                        dead = True
                        break
            if not dead and search(used | bit, todo2):
                return True
            assigned[v] = -1
            for u in touched:
                allowed[u] |= bit
        return False

    if any(allowed[v] == 0 for v in remaining):
        return None
    if not search(used_mask, remaining):
        return None
    return {v: assigned[v] + 1 for v in range(n)}


def is_colorable(g: Graph, num_colors: int, limit: int | None = None) -> bool:
    cap = oracle_limit(limit)
    if g.n > cap:
        raise OracleSizeError(f"coloring oracle refuses n={g.n} > {cap}")
    return find_coloring(g, num_colors) is not None


def chromatic_number(g: Graph, limit: int | None = None) -> int:
    """Exact chromatic number (branch and bound with clique lower bound)."""
    cap = oracle_limit(limit)
    if g.n > cap:
        raise OracleSizeError(f"chromatic oracle refuses n={g.n} > {cap}")
    if g.n == 0:
        return 0
    if g.num_edges() == 0:
        return 1
    lb = len(greedy_clique(g))
    ub = greedy_coloring_bound(g)
    for c in range(lb, ub):
        if find_coloring(g, c) is not None:
            return c
    return ub


def is_k_critical(g: Graph, k: int, limit: int | None = None) -> bool:
    """chi(G) = k and every single-edge deletion is (k-1)-colorable.

    The edge test covers vertex deletions as long as no vertex is
    isolated, so criticality additionally requires min degree >= 1
    (except K_1, the unique 1-critical graph).
    """
    cap = oracle_limit(limit)
    if g.n > cap:
        raise OracleSizeError(f"criticality oracle refuses n={g.n} > {cap}")
    if g.n == 0:
        return False
    if g.n == 1:
        return k == 1
    if any(g.degree(v) == 0 for v in range(g.n)):
        return False
    if chromatic_number(g, limit=cap) != k:
        return False
    for u, v in g.edges():
        rows = list(g.rows)
        rows[u] &= ~(1 << v)
        rows[v] &= ~(1 << u)
        if find_coloring(Graph(g.n, rows), k - 1) is None:
            return False
    return True


# -- closed-form bounds -------------------------------------------------


def _ceil_div(a: int, b: int) -> int:
    return -(-a // b)


def F(k: int, n: int) -> int:
    """Edge lower bound ceil(((k+1)(k-2)n - k(k-3)) / (2(k-1)))."""
    if k < 4:
        raise ValueError(f"F defined for k >= 4, got {k}")
    if n < 1:
        raise ValueError(f"F needs n >= 1, got {n}")
    return _ceil_div((k + 1) * (k - 2) * n - k * (k - 3), 2 * (k - 1))


def gallai_exact(k: int, n: int) -> int:
    """Exact minimum edge count for k+2 <= n <= 2k-1."""
    if k < 4:
        raise ValueError(f"gallai_exact defined for k >= 4, got {k}")
    if not k + 2 <= n <= 2 * k - 1:
        raise ValueError(f"gallai_exact needs k+2 <= n <= 2k-1, got n={n}, k={k}")
    num = (k - 1) * n + (n - k) * (2 * k - n)
    assert num % 2 == 0
    return num // 2 - 1


def dirac_lb(k: int, n: int) -> int:
    """Classical halved-degree bound (valid for n >= k+2)."""
    if k < 4 or n < 1:
        raise ValueError(f"dirac_lb needs k >= 4 and n >= 1, got k={k}, n={n}")
    return _ceil_div((k - 1) * n + (k - 3), 2)


def ks_lb(k: int, n: int) -> int:
    """Strengthened bound, valid when n not in {k, 2k-1}."""
    if k < 4 or n < 1:
        raise ValueError(f"ks_lb needs k >= 4 and n >= 1, got k={k}, n={n}")
    return _ceil_div((k - 1) * n + 2 * (k - 3), 2)


def ore_upper_step(k: int) -> int:
    """Edge increment (k-2)(k+1)/2 of one Hajos step with a k-clique."""
    if k < 4:
        raise ValueError(f"ore_upper_step needs k >= 4, got {k}")
    prod = (k - 2) * (k + 1)
    assert prod % 2 == 0
    return prod // 2


def _exact_base(k: int, n: int) -> int | None:
    """Known-exact minimum edge counts used to seed the upper recurrence."""
    if n == k:
        return k * (k - 1) // 2
    if k + 2 <= n <= 2 * k - 1:
        return gallai_exact(k, n)
    if n == 2 * k:
        return k * k - 3
    return None


def ore_upper(k: int, n: int) -> int | None:
    """Upper bound on the minimum edge count via the step recurrence.

    Chains down to a known-exact base (n = k, the Gallai window, or
    n = 2k); None when n cannot be reached (n = k+1, or n < k).
    """
    if k < 4:
        raise ValueError(f"ore_upper needs k >= 4, got {k}")
    if n < k or n == k + 1:
        return None
    steps = 0
    m = n
    while m > 2 * k:
        m -= k - 1
        steps += 1
    # After reduction m lies in {k} or [k+2, 2k], all of which have bases.
    base = _exact_base(k, m)
    assert base is not None
    return base + steps * ore_upper_step(k)


def phi_k_limit(k: int) -> tuple[int, int]:
    """Asymptotic edge density k/2 - 1/(k-1) as an exact fraction (num, den)."""
    num = k * (k - 1) - 2
    den = 2 * (k - 1)
    return num, den


@dataclass(frozen=True)
class BoundReport:
    """Bound calculator outputs for one (k, n)."""

    k: int
    n: int
    F: int
    dirac: int
    kostochka_stiebitz: int
    gallai: int | None = None
    ore_upper: int | None = None


def bound_report(k: int, n: int) -> BoundReport:
    gallai = gallai_exact(k, n) if k + 2 <= n <= 2 * k - 1 else None
    return BoundReport(
        k=k,
        n=n,
        F=F(k, n),
        dirac=dirac_lb(k, n),
        kostochka_stiebitz=ks_lb(k, n),
        gallai=gallai,
        ore_upper=ore_upper(k, n),
    )


# -- constructions ------------------------------------------------------


def hajos_join(
    g1: Graph,
    g2: Graph,
    e1: tuple[int, int] | None = None,
    e2: tuple[int, int] | None = None,
) -> Graph:
    """Join across deleted edges e1 = uv, e2 = ab: identify u with a, add vb.

    Operands are taken disjoint; the result keeps g1's indices, then g2's
    shifted with a mapped onto u.  Defaults pick each operand's
    lexicographically first edge.
    """
    if e1 is None:
        edges1 = g1.edges()
        if not edges1:
            raise GraphError("g1 has no edge to join on")
        e1 = edges1[0]
    if e2 is None:
        edges2 = g2.edges()
        if not edges2:
            raise GraphError("g2 has no edge to join on")
        e2 = edges2[0]
    u, v = min(e1), max(e1)
    a, b = min(e2), max(e2)
    if not g1.has_edge(u, v):
        raise GraphError(f"e1={e1} is not an edge of g1")
    if not g2.has_edge(a, b):
        raise GraphError(f"e2={e2} is not an edge of g2")

    n = g1.n + g2.n - 1
    offset = [0] * g2.n
    nxt = g1.n
    for w in range(g2.n):
        if w == a:
            offset[w] = u
        else:
            offset[w] = nxt
            nxt += 1
    edges = [e for e in g1.edges() if e != (u, v)]
    for x, y in g2.edges():
        if (x, y) == (a, b):
            continue
        ex, ey = offset[x], offset[y]
        edges.append((min(ex, ey), max(ex, ey)))
    edges.append((min(v, offset[b]), max(v, offset[b])))
    joined = Graph.from_edges(n, edges)
    assert joined.num_edges() == g1.num_edges() + g2.num_edges() - 1
    return joined


def iterate_ore_chain(k: int, steps: int) -> list[Graph]:
    """K_k, then `steps` Hajos joins with K_k (canonical edge choices)."""
    if k < 4:
        raise ValueError(f"ore chain needs k >= 4, got {k}")
    if steps < 0:
        raise ValueError("steps must be >= 0")
    chain = [Graph.complete(k)]
    for _ in range(steps):
        chain.append(hajos_join(chain[-1], Graph.complete(k)))
    return chain
