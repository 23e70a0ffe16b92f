"""Simple undirected graphs on dense vertex indices 0..n-1.

Adjacency is stored as one integer bitmask per vertex, which keeps the
structural queries used by the rest of the package (degrees, induced
subgraphs, clique search, cluster detection) cheap and allocation-free.
Graphs are immutable; every "mutation" builds a new Graph.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator


class GraphError(ValueError):
    """Invalid graph construction or query."""


class ParseError(GraphError):
    """Malformed graph6 / DIMACS input; carries a byte or line offset."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (offset {offset})")
        self.offset = offset


def iter_bits(mask: int) -> Iterator[int]:
    """Yield set-bit positions of ``mask`` in ascending order."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def bits_to_tuple(mask: int) -> tuple[int, ...]:
    return tuple(iter_bits(mask))


def mask_of(vertices: Iterable[int]) -> int:
    m = 0
    for v in vertices:
        m |= 1 << v
    return m


class Graph:
    """Immutable simple graph: ``rows[v]`` is the neighbor bitmask of v."""

    __slots__ = ("n", "rows", "labels")

    def __init__(self, n: int, rows: Iterable[int], labels: tuple[str, ...] | None = None):
        rows = tuple(rows)
        if n < 0 or len(rows) != n:
            raise GraphError(f"need {n} adjacency rows, got {len(rows)}")
        full = (1 << n) - 1
        for v, row in enumerate(rows):
            if row >> v & 1:
                raise GraphError(f"self-loop at vertex {v}")
            if row & ~full:
                raise GraphError(f"row {v} references vertices >= {n}")
        for v, row in enumerate(rows):
            for u in iter_bits(row):
                if not rows[u] >> v & 1:
                    raise GraphError(f"adjacency not symmetric at ({v},{u})")
        if labels is not None and len(labels) != n:
            raise GraphError("label count does not match vertex count")
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "labels", labels)

    def __setattr__(self, name, value):
        raise AttributeError("Graph is immutable")

    def __eq__(self, other):
        return isinstance(other, Graph) and self.n == other.n and self.rows == other.rows

    def __hash__(self):
        return hash((self.n, self.rows))

    def __repr__(self):
        return f"Graph(n={self.n}, m={self.num_edges()})"

    # -- basic queries -------------------------------------------------

    def degree(self, v: int) -> int:
        return self.rows[v].bit_count()

    def degrees(self) -> list[int]:
        return [row.bit_count() for row in self.rows]

    def num_edges(self) -> int:
        return sum(row.bit_count() for row in self.rows) // 2

    def has_edge(self, u: int, v: int) -> bool:
        return bool(self.rows[u] >> v & 1)

    def neighbors(self, v: int) -> tuple[int, ...]:
        return bits_to_tuple(self.rows[v])

    def closed_row(self, v: int) -> int:
        return self.rows[v] | (1 << v)

    def edges(self) -> list[tuple[int, int]]:
        """All edges (u, v) with u < v, in lexicographic order."""
        out = []
        for u in range(self.n):
            row = self.rows[u] >> (u + 1)
            for off in iter_bits(row):
                out.append((u, u + 1 + off))
        return out

    def edges_within(self, mask: int) -> int:
        """Number of edges with both endpoints in the vertex bitmask."""
        total = 0
        for v in iter_bits(mask):
            total += (self.rows[v] & mask).bit_count()
        return total // 2

    def vertex_mask(self) -> int:
        return (1 << self.n) - 1

    # -- constructors --------------------------------------------------

    @classmethod
    def empty(cls, n: int) -> "Graph":
        return cls(n, [0] * n)

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> "Graph":
        rows = [0] * n
        for u, v in edges:
            if u == v:
                raise GraphError(f"self-loop ({u},{v})")
            if not (0 <= u < n and 0 <= v < n):
                raise GraphError(f"edge ({u},{v}) out of range for n={n}")
            rows[u] |= 1 << v
            rows[v] |= 1 << u
        return cls(n, rows)

    @classmethod
    def complete(cls, n: int) -> "Graph":
        full = (1 << n) - 1
        return cls(n, [full ^ (1 << v) for v in range(n)])

    @classmethod
    def cycle(cls, n: int) -> "Graph":
        if n < 3:
            raise GraphError("cycle needs at least 3 vertices")
        return cls.from_edges(n, [(i, (i + 1) % n) for i in range(n)])

    # -- surgery (returns new graphs) -----------------------------------

    def add_edges(self, edges: Iterable[tuple[int, int]]) -> "Graph":
        rows = list(self.rows)
        for u, v in edges:
            if u == v:
                raise GraphError(f"self-loop ({u},{v})")
            rows[u] |= 1 << v
            rows[v] |= 1 << u
        return Graph(self.n, rows)

    def induced(self, vertices: Iterable[int]) -> tuple["Graph", tuple[int, ...]]:
        """Induced subgraph; returns (graph, new_to_old index map)."""
        old = tuple(sorted(set(vertices)))
        pos = {v: i for i, v in enumerate(old)}
        keep = mask_of(old)
        rows = []
        for v in old:
            row = 0
            for u in iter_bits(self.rows[v] & keep):
                row |= 1 << pos[u]
            rows.append(row)
        return Graph(len(old), rows), old

    def remove_vertices(self, vertices: Iterable[int]) -> tuple["Graph", tuple[int, ...]]:
        drop = set(vertices)
        return self.induced(v for v in range(self.n) if v not in drop)

    def rewire_vertex(self, v: int, neighbors: Iterable[int]) -> "Graph":
        """Replace v's adjacency in place (vertex count unchanged)."""
        new_row = mask_of(neighbors)
        if new_row >> v & 1:
            raise GraphError(f"self-loop at {v}")
        rows = list(self.rows)
        bit = 1 << v
        for u in iter_bits(rows[v] | new_row):
            if new_row >> u & 1:
                rows[u] |= bit
            else:
                rows[u] &= ~bit
        rows[v] = new_row
        return Graph(self.n, rows)

    def merge_vertices(self, a: int, b: int) -> tuple["Graph", tuple[int, ...]]:
        """Glue nonadjacent b onto a: union neighborhoods, drop parallels.

        Returns (graph, new_to_old); the merged vertex reports a's old index.
        """
        if a == b or self.has_edge(a, b):
            raise GraphError(f"can only glue distinct nonadjacent vertices, got ({a},{b})")
        merged_row = (self.rows[a] | self.rows[b]) & ~(1 << a) & ~(1 << b)
        g = self.rewire_vertex(a, iter_bits(merged_row))
        return g.remove_vertices([b])

    # -- connectivity ---------------------------------------------------

    def components(self) -> list[tuple[int, ...]]:
        """Connected components as sorted vertex tuples, by smallest member."""
        unseen = self.vertex_mask()
        comps = []
        while unseen:
            frontier = unseen & -unseen
            comp = 0
            while frontier:
                comp |= frontier
                grow = 0
                for v in iter_bits(frontier):
                    grow |= self.rows[v]
                frontier = grow & ~comp
            comps.append(bits_to_tuple(comp))
            unseen &= ~comp
        return comps

    def is_connected(self) -> bool:
        return self.n <= 1 or len(self.components()) == 1

    def cut_vertices(self) -> tuple[int, ...]:
        """Articulation vertices via iterative DFS low-link."""
        n = self.n
        disc = [-1] * n
        low = [0] * n
        parent = [-1] * n
        cut = [False] * n
        timer = 0
        for root in range(n):
            if disc[root] != -1:
                continue
            root_children = 0
            stack = [(root, iter(self.neighbors(root)))]
            disc[root] = low[root] = timer
            timer += 1
            while stack:
                v, it = stack[-1]
                advanced = False
                for u in it:
                    if disc[u] == -1:
                        parent[u] = v
                        if v == root:
                            root_children += 1
                        disc[u] = low[u] = timer
                        timer += 1
                        stack.append((u, iter(self.neighbors(u))))
                        advanced = True
                        break
                    elif u != parent[v]:
                        low[v] = min(low[v], disc[u])
                if not advanced:
                    stack.pop()
                    if stack:
                        p = stack[-1][0]
                        low[p] = min(low[p], low[v])
                        if p != root and low[v] >= disc[p]:
                            cut[p] = True
            if root_children >= 2:
                cut[root] = True
        return tuple(v for v in range(n) if cut[v])

    def blocks(self) -> list[tuple[int, ...]]:
        """Biconnected blocks (vertex sets); isolated vertices as singletons."""
        n = self.n
        disc = [-1] * n
        low = [0] * n
        parent = [-1] * n
        timer = 0
        edge_stack: list[tuple[int, int]] = []
        out: list[tuple[int, ...]] = []

        def pop_block(u: int, v: int) -> None:
            verts = set()
            while edge_stack:
                a, b = edge_stack.pop()
                verts.add(a)
                verts.add(b)
                if (a, b) == (u, v):
                    break
            out.append(tuple(sorted(verts)))

        for root in range(n):
            if disc[root] != -1:
                continue
            if not self.rows[root]:
                out.append((root,))
                continue
            stack = [(root, iter(self.neighbors(root)))]
            disc[root] = low[root] = timer
            timer += 1
            while stack:
                v, it = stack[-1]
                advanced = False
                for u in it:
                    if disc[u] == -1:
                        parent[u] = v
                        edge_stack.append((v, u))
                        disc[u] = low[u] = timer
                        timer += 1
                        stack.append((u, iter(self.neighbors(u))))
                        advanced = True
                        break
                    elif u != parent[v] and disc[u] < disc[v]:
                        edge_stack.append((v, u))
                        low[v] = min(low[v], disc[u])
                if not advanced:
                    stack.pop()
                    if stack:
                        p = stack[-1][0]
                        low[p] = min(low[p], low[v])
                        if low[v] >= disc[p]:
                            pop_block(p, v)
        return sorted(out, key=lambda b: (b[0], len(b)))

    # -- structure used by the coloring pipeline ------------------------

    def find_clique_of(self, v: int, size: int) -> tuple[int, ...] | None:
        """First clique (in lexicographic vertex order) of `size` containing v."""
        if size <= 0:
            return None
        if size == 1:
            return (v,)

        chosen: list[int] = []

        def extend(cand: int, need: int) -> bool:
            if need == 0:
                return True
            if cand.bit_count() < need:
                return False
            for u in iter_bits(cand):
                chosen.append(u)
                if extend(cand & self.rows[u] & ~((1 << (u + 1)) - 1), need - 1):
                    return True
                chosen.pop()
            return False

        if extend(self.rows[v], size - 1):
            return tuple(sorted([v] + chosen))
        return None

    def twin_pair_count(self) -> int:
        """Number of vertex pairs sharing a closed neighborhood."""
        groups: dict[int, int] = {}
        for v in range(self.n):
            key = self.closed_row(v)
            groups[key] = groups.get(key, 0) + 1
        return sum(c * (c - 1) // 2 for c in groups.values())


@dataclass(frozen=True)
class Cluster:
    """Maximal set of degree-(k-1) vertices sharing one closed neighborhood."""

    members: tuple[int, ...]
    closed_neighborhood: tuple[int, ...]


def clusters(g: Graph, k: int) -> list[Cluster]:
    """Partition the degree-(k-1) vertices into clusters, ordered by least member."""
    if k < 4:
        raise GraphError(f"clusters defined for k >= 4, got {k}")
    groups: dict[int, list[int]] = {}
    for v in range(g.n):
        if g.degree(v) == k - 1:
            groups.setdefault(g.closed_row(v), []).append(v)
    out = [
        Cluster(tuple(sorted(vs)), bits_to_tuple(key))
        for key, vs in groups.items()
    ]
    out.sort(key=lambda c: c.members[0])
    return out


def cluster_of(g: Graph, v: int) -> tuple[int, ...]:
    """All vertices with the same closed neighborhood as v (v included)."""
    key = g.closed_row(v)
    return tuple(u for u in range(g.n) if g.closed_row(u) == key)


# -- graph6 ------------------------------------------------------------


def parse_graph6(text: str | bytes) -> Graph:
    """Decode one graph6 line (McKay bit-packing, >= 0 vertices)."""
    if isinstance(text, str):
        data = text.strip().encode("ascii", errors="replace")
    else:
        data = bytes(text).strip()
    if data.startswith(b">>graph6<<"):
        data = data[10:]
    if not data:
        raise ParseError("empty graph6 input", 0)

    pos = 0
    if data[0] == 126:  # '~'
        if len(data) >= 2 and data[1] == 126:
            if len(data) < 8:
                raise ParseError("truncated graph6 size header", len(data))
            n = 0
            for i in range(2, 8):
                b = data[i]
                if not 63 <= b <= 126:
                    raise ParseError(f"bad graph6 size byte {b}", i)
                n = (n << 6) | (b - 63)
            pos = 8
        else:
            if len(data) < 4:
                raise ParseError("truncated graph6 size header", len(data))
            n = 0
            for i in range(1, 4):
                b = data[i]
                if not 63 <= b <= 126:
                    raise ParseError(f"bad graph6 size byte {b}", i)
                n = (n << 6) | (b - 63)
            pos = 4
    else:
        b = data[0]
        if not 63 <= b <= 125:
            raise ParseError(f"bad graph6 order byte {b}", 0)
        n = b - 63
        pos = 1

    nbits = n * (n - 1) // 2
    nbytes = (nbits + 5) // 6
    if len(data) - pos < nbytes:
        raise ParseError(
            f"graph6 body too short: need {nbytes} bytes, got {len(data) - pos}",
            len(data),
        )
    if len(data) - pos > nbytes:
        raise ParseError("trailing bytes after graph6 body", pos + nbytes)

    rows = [0] * n
    bit_index = 0
    for i in range(nbytes):
        b = data[pos + i]
        if not 63 <= b <= 126:
            raise ParseError(f"bad graph6 data byte {b}", pos + i)
        chunk = b - 63
        for shift in range(5, -1, -1):
            if bit_index >= nbits:
                if chunk >> shift & 1:
                    raise ParseError("nonzero graph6 padding bits", pos + i)
                continue
            if chunk >> shift & 1:
                u, v = _graph6_bit_position(bit_index)
                rows[u] |= 1 << v
                rows[v] |= 1 << u
            bit_index += 1
    return Graph(n, rows)


def _graph6_bit_position(index: int) -> tuple[int, int]:
    # Bits run column-major over the upper triangle: (0,1),(0,2),(1,2),(0,3),...
    v = 1
    while v * (v - 1) // 2 <= index:
        v += 1
    v -= 1
    u = index - v * (v - 1) // 2
    return u, v


def to_graph6(g: Graph) -> str:
    """Encode as a canonical graph6 line (bit-exact for n <= 62)."""
    n = g.n
    if n <= 62:
        header = bytes([n + 63])
    elif n <= 258047:
        header = bytes([126, (n >> 12) + 63, (n >> 6 & 63) + 63, (n & 63) + 63])
    else:
        header = bytes([126, 126]) + bytes(((n >> (6 * i)) & 63) + 63 for i in range(5, -1, -1))

    nbits = n * (n - 1) // 2
    body = bytearray()
    chunk = 0
    filled = 0
    for v in range(1, n):
        for u in range(v):
            chunk = (chunk << 1) | (g.rows[u] >> v & 1)
            filled += 1
            if filled == 6:
                body.append(chunk + 63)
                chunk = 0
                filled = 0
    if filled:
        body.append((chunk << (6 - filled)) + 63)
    assert len(body) == (nbits + 5) // 6
    return (header + bytes(body)).decode("ascii")


# -- DIMACS ------------------------------------------------------------


def parse_dimacs(text: str) -> Graph:
    """Parse DIMACS .col: 'p edge n m' then 1-based 'e u v' lines."""
    n = None
    edges: list[tuple[int, int]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        parts = line.split()
        if parts[0] == "p":
            if len(parts) != 4 or parts[1] not in ("edge", "edges", "col"):
                raise ParseError(f"bad problem line {line!r}", lineno)
            try:
                new_n = int(parts[2])
                int(parts[3])
            except ValueError:
                raise ParseError(f"bad problem line {line!r}", lineno) from None
            if n is not None and new_n != n:
                raise ParseError("duplicate contradictory p-line", lineno)
            if n is not None:
                raise ParseError("duplicate p-line", lineno)
            if new_n < 0:
                raise ParseError("negative vertex count", lineno)
            n = new_n
        elif parts[0] == "e":
            if n is None:
                raise ParseError("edge line before problem line", lineno)
            if len(parts) != 3:
                raise ParseError(f"bad edge line {line!r}", lineno)
            try:
                u, v = int(parts[1]), int(parts[2])
            except ValueError:
                raise ParseError(f"bad edge line {line!r}", lineno) from None
            if not (1 <= u <= n and 1 <= v <= n):
                raise ParseError(f"edge ({u},{v}) out of range 1..{n}", lineno)
            if u == v:
                raise ParseError(f"self-loop at vertex {u}", lineno)
            edges.append((u - 1, v - 1))
        else:
            raise ParseError(f"unrecognized line {line!r}", lineno)
    if n is None:
        raise ParseError("missing problem line", 0)
    return Graph.from_edges(n, edges)
