"""Colored graphs: distances, flips, recoloring, induced subgraphs, contractions.

Graphs are immutable after construction (vertices are dense ids 0..n-1,
edges undirected and loopless, colors are named vertex sets that may
overlap).  All operations are pure functions returning new graphs, so
values can be shared freely across threads.
"""

import numpy as np

from . import _kernels
from ._kernels import UNREACHED


class GraphFormatError(ValueError):
    pass


class ColoredGraph:
    """Finite loopless undirected graph with named unary color predicates."""

    __slots__ = ("n", "adj", "colors", "_indptr", "_indices", "_apsp")

    def __init__(self, n, edges=(), colors=None):
        if n < 0:
            raise ValueError("vertex count must be nonnegative")
        self.n = n
        nbrs = [set() for _ in range(n)]
        for u, v in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u},{v}) out of range for n={n}")
            if u == v:
                raise ValueError(f"self-loop at {u} not allowed")
            nbrs[u].add(v)
            nbrs[v].add(u)
        self.adj = tuple(tuple(sorted(s)) for s in nbrs)
        cmap = {}
        for name, verts in (colors or {}).items():
            vs = frozenset(verts)
            for v in vs:
                if not (0 <= v < n):
                    raise ValueError(f"color {name!r} contains out-of-range vertex {v}")
            cmap[name] = vs
        self.colors = cmap
        self._indptr = None
        self._indices = None
        self._apsp = None

    # -- basic queries ------------------------------------------------------

    def vertices(self):
        return range(self.n)

    def edges(self):
        return [(u, v) for u in range(self.n) for v in self.adj[u] if u < v]

    def num_edges(self):
        return sum(len(a) for a in self.adj) // 2

    def has_edge(self, u, v):
        return v in self.adj[u]

    def degree(self, v):
        return len(self.adj[v])

    def has_color(self, name, v):
        return v in self.colors.get(name, frozenset())

    def __eq__(self, other):
        if not isinstance(other, ColoredGraph):
            return NotImplemented
        return (self.n == other.n and self.adj == other.adj
                and self.colors == other.colors)

    def __ne__(self, other):
        eq = self.__eq__(other)
        return NotImplemented if eq is NotImplemented else not eq

    def __repr__(self):
        return f"ColoredGraph(n={self.n}, m={self.num_edges()}, colors={sorted(self.colors)})"

    # -- distances ----------------------------------------------------------

    def _csr(self):
        if self._indptr is None:
            indptr = np.zeros(self.n + 1, dtype=np.int64)
            for v in range(self.n):
                indptr[v + 1] = indptr[v] + len(self.adj[v])
            indices = np.empty(indptr[-1], dtype=np.int64)
            for v in range(self.n):
                indices[indptr[v]:indptr[v + 1]] = self.adj[v]
            self._indptr, self._indices = indptr, indices
        return self._indptr, self._indices

    def distances(self, seeds, cap=None):
        """Array of BFS distances from the seed set (UNREACHED if beyond cap
        or disconnected)."""
        seeds = np.asarray(sorted(seeds), dtype=np.int64)
        if seeds.size and (seeds[0] < 0 or seeds[-1] >= self.n):
            raise ValueError("seed vertex out of range")
        if cap is None:
            cap = self.n
        indptr, indices = self._csr()
        return _kernels.bfs_distances(indptr, indices, seeds, cap, self.n)

    def neighborhood(self, seeds, r):
        """Closed r-neighborhood of a vertex set."""
        if r < 0:
            raise ValueError("radius must be nonnegative")
        dist = self.distances(seeds, cap=r)
        return frozenset(np.nonzero(dist <= r)[0].tolist())

    def dist(self, u, v):
        d = self.distances([u])[v]
        return float("inf") if d == UNREACHED else int(d)

    def set_distance(self, a, b):
        """Minimum distance between two vertex sets (inf if disconnected)."""
        if not a or not b:
            return float("inf")
        dist = self.distances(a)
        d = min(dist[v] for v in b)
        return float("inf") if d == UNREACHED else int(d)


class Flip:
    """A pair of vertex sets; applying it complements adjacency between them.

    The sets need not be subsets of the current vertex set: out-of-range
    vertices are ignored when the flip is applied.
    """

    __slots__ = ("a", "b")

    def __init__(self, a, b):
        self.a = frozenset(a)
        self.b = frozenset(b)

    def __eq__(self, other):
        if not isinstance(other, Flip):
            return NotImplemented
        return self.a == other.a and self.b == other.b

    def __repr__(self):
        return f"Flip({sorted(self.a)}, {sorted(self.b)})"

    def is_empty(self):
        return not self.a or not self.b


def apply_flip(g, f):
    """Complement the adjacency between f.a and f.b (restricted to V(g)).

    An involution: applying the same flip twice restores the graph.
    Diagonal pairs are never touched, so the result stays loopless.
    """
    a = {v for v in f.a if 0 <= v < g.n}
    b = {v for v in f.b if 0 <= v < g.n}
    edges = set()
    for u in range(g.n):
        for v in g.adj[u]:
            if u < v:
                edges.add((u, v))
    for u in a:
        for v in b:
            if u == v:
                continue
            e = (u, v) if u < v else (v, u)
            if e in edges:
                edges.remove(e)
            else:
                edges.add(e)
    return ColoredGraph(g.n, edges, g.colors)


def apply_flips(g, flips):
    """Fold of apply_flip; the order of the list does not matter."""
    for f in flips:
        g = apply_flip(g, f)
    return g


def recolor(g, name, w):
    """Add (or overwrite: last writer wins) the color `name` as the set w."""
    w = frozenset(w)
    for v in w:
        if not (0 <= v < g.n):
            raise ValueError(f"recolor: vertex {v} out of range")
    colors = dict(g.colors)
    colors[name] = w
    return ColoredGraph(g.n, g.edges(), colors)


def induce(g, s):
    """Induced subgraph on s with vertices relabeled 0..|s|-1.

    Returns (subgraph, relabel) where relabel maps old ids to new ids.
    Colors are intersected with s and relabeled.
    """
    s = sorted(set(s))
    for v in s:
        if not (0 <= v < g.n):
            raise ValueError(f"induce: vertex {v} out of range")
    relabel = {v: i for i, v in enumerate(s)}
    edges = [(relabel[u], relabel[v]) for u in s for v in g.adj[u]
             if u < v and v in relabel]
    colors = {name: {relabel[v] for v in verts if v in relabel}
              for name, verts in g.colors.items()}
    return ColoredGraph(len(s), edges, colors), relabel


def contract(g, parts):
    """Simultaneously contract disjoint vertex subsets.

    Each part A becomes a new vertex adjacent to exactly the outside
    vertices having a neighbor in A; edges between two parts survive as an
    edge between the two new vertices.  Colors of contracted vertices are
    dropped, colors of untouched vertices are kept.

    Returns (graph, vmap, part_ids): vmap maps every old vertex to its new
    id, part_ids[i] is the new id of parts[i].
    """
    parts = [frozenset(p) for p in parts]
    seen = set()
    for p in parts:
        if not p:
            raise ValueError("contract: empty part")
        if p & seen:
            raise ValueError("contract: overlapping parts")
        for v in p:
            if not (0 <= v < g.n):
                raise ValueError(f"contract: vertex {v} out of range")
        seen |= p
    untouched = [v for v in range(g.n) if v not in seen]
    vmap = {}
    for i, v in enumerate(untouched):
        vmap[v] = i
    part_ids = []
    for k, p in enumerate(parts):
        pid = len(untouched) + k
        part_ids.append(pid)
        for v in p:
            vmap[v] = pid
    edges = set()
    for u in range(g.n):
        for v in g.adj[u]:
            if u < v:
                a, b = vmap[u], vmap[v]
                if a != b:
                    edges.add((min(a, b), max(a, b)))
    colors = {name: {vmap[v] for v in verts if v not in seen}
              for name, verts in g.colors.items()}
    return ColoredGraph(len(untouched) + len(parts), edges, colors), vmap, part_ids


# -- generators --------------------------------------------------------------

def path(n):
    if n < 1:
        raise ValueError("path: n >= 1 required")
    return ColoredGraph(n, [(i, i + 1) for i in range(n - 1)])


def grid(w, h):
    if w < 1 or h < 1:
        raise ValueError("grid: dimensions >= 1 required")
    def vid(x, y):
        return y * w + x
    edges = []
    for y in range(h):
        for x in range(w):
            if x + 1 < w:
                edges.append((vid(x, y), vid(x + 1, y)))
            if y + 1 < h:
                edges.append((vid(x, y), vid(x, y + 1)))
    return ColoredGraph(w * h, edges)


def star(n):
    """Star on n vertices: center 0 adjacent to 1..n-1."""
    if n < 1:
        raise ValueError("star: n >= 1 required")
    return ColoredGraph(n, [(0, i) for i in range(1, n)])


def complete(n):
    return ColoredGraph(n, [(i, j) for i in range(n) for j in range(i + 1, n)])


def half_graph(order):
    """Bipartite half graph: a_i (ids 0..order-1) adjacent to b_j
    (ids order..2*order-1) iff i <= j (1-based sides)."""
    if order < 1:
        raise ValueError("half_graph: order >= 1 required")
    edges = [(i, order + j) for i in range(order) for j in range(order) if i <= j]
    return ColoredGraph(2 * order, edges)


def random_bounded_degree(n, d, seed):
    """Random graph with maximum degree <= d, reproducible for a fixed seed."""
    if n < 1:
        raise ValueError("random_bounded_degree: n >= 1 required")
    rng = np.random.default_rng(seed)
    deg = [0] * n
    edges = set()
    attempts = 2 * n * max(d, 1)
    for _ in range(attempts):
        u = int(rng.integers(n))
        v = int(rng.integers(n))
        if u == v:
            continue
        e = (min(u, v), max(u, v))
        if e in edges or deg[u] >= d or deg[v] >= d:
            continue
        edges.add(e)
        deg[u] += 1
        deg[v] += 1
    return ColoredGraph(n, edges)


def random_flips_of(g, count, seed):
    """Apply `count` random flips to g (each side a random vertex subset)."""
    rng = np.random.default_rng(seed)
    for _ in range(count):
        a = {v for v in range(g.n) if rng.random() < 0.3}
        b = {v for v in range(g.n) if rng.random() < 0.3}
        g = apply_flip(g, Flip(a, b))
    return g


def random_tree(n, seed):
    """Uniform-attachment random tree, reproducible for a fixed seed."""
    if n < 1:
        raise ValueError("random_tree: n >= 1 required")
    rng = np.random.default_rng(seed)
    edges = [(int(rng.integers(v)), v) for v in range(1, n)]
    return ColoredGraph(n, edges)


# -- text format --------------------------------------------------------------

def write_graph(g):
    """Canonical text serialization: `p graph n m c` header, sorted `e` edge
    lines (1-based), `k` color lines sorted by name with sorted vertices."""
    lines = [f"p graph {g.n} {g.num_edges()} {len(g.colors)}"]
    for u, v in sorted(g.edges()):
        lines.append(f"e {u + 1} {v + 1}")
    for name in sorted(g.colors):
        verts = " ".join(str(v + 1) for v in sorted(g.colors[name]))
        lines.append(f"k {name} {verts}".rstrip())
    return "\n".join(lines) + "\n"


def read_graph(text):
    n = None
    m_declared = c_declared = 0
    edges = []
    colors = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if parts[0] == "p":
            if n is not None:
                raise GraphFormatError(f"line {lineno}: duplicate header")
            if len(parts) != 5 or parts[1] != "graph":
                raise GraphFormatError(f"line {lineno}: malformed header {line!r}")
            n, m_declared, c_declared = int(parts[2]), int(parts[3]), int(parts[4])
        elif parts[0] == "e":
            if n is None:
                raise GraphFormatError(f"line {lineno}: edge before header")
            if len(parts) != 3:
                raise GraphFormatError(f"line {lineno}: malformed edge {line!r}")
            u, v = int(parts[1]) - 1, int(parts[2]) - 1
            if not (0 <= u < n and 0 <= v < n):
                raise GraphFormatError(f"line {lineno}: edge endpoint out of range")
            edges.append((u, v))
        elif parts[0] == "k":
            if n is None:
                raise GraphFormatError(f"line {lineno}: color before header")
            if len(parts) < 2:
                raise GraphFormatError(f"line {lineno}: malformed color line")
            name = parts[1]
            verts = {int(x) - 1 for x in parts[2:]}
            if any(not (0 <= v < n) for v in verts):
                raise GraphFormatError(f"line {lineno}: color vertex out of range")
            colors[name] = verts
        else:
            raise GraphFormatError(f"line {lineno}: unknown record {parts[0]!r}")
    if n is None:
        raise GraphFormatError("missing header line")
    g = ColoredGraph(n, edges, colors)
    if g.num_edges() != m_declared:
        raise GraphFormatError(f"header declares {m_declared} edges, found {g.num_edges()}")
    if len(colors) != c_declared:
        raise GraphFormatError(f"header declares {c_declared} colors, found {len(colors)}")
    return g
