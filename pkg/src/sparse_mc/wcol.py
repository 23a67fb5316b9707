"""Weak r-reachability, weak coloring numbers, and the order-based cover.

A vertex u is weakly r-reachable from v under an order when some path of
length at most r from v to u has u as its order-minimum.  wcol_r of an
order is the largest weak-reachability set; wcol_r of the graph is the
minimum over all orders (exact search is capped at 9 vertices, use the
degeneracy-style heuristic beyond that).
"""

import numpy as np

from . import _kernels
from .covers import Cover


def check_order(g, order):
    order = list(order)
    if sorted(order) != list(range(g.n)):
        raise ValueError("order must be a permutation of the vertices")
    return order


def _positions(g, order):
    pos = np.empty(g.n, dtype=np.int64)
    for i, v in enumerate(order):
        pos[v] = i
    return pos


def _root_reach(g, pos, root, r):
    """Vertices v such that root is weakly r-reachable from v: breadth-first
    search from root restricted to vertices placed after root."""
    indptr, indices = g._csr()
    return _kernels.order_reach(indptr, indices, pos, root, r, g.n)


def all_wreach(g, order, r):
    """wreach_r sets for every vertex, as a list of sorted lists."""
    order = check_order(g, order)
    pos = _positions(g, order)
    sets = [[] for _ in range(g.n)]
    for root in range(g.n):
        for v in _root_reach(g, pos, root, r):
            sets[int(v)].append(root)
    return [sorted(s) for s in sets]


def wreach(g, order, r, v):
    """Weak r-reachability set of a single vertex."""
    if r < 0:
        raise ValueError("radius must be nonnegative")
    return frozenset(all_wreach(g, order, r)[v])


def wcol_given_order(g, order, r):
    return max(len(s) for s in all_wreach(g, order, r)) if g.n else 0


EXACT_CAP = 9


def wcol_exact(g, r):
    """True weak r-coloring number with a witnessing order, by pruned search
    over all orders.  Limited to graphs with at most 9 vertices."""
    if g.n > EXACT_CAP:
        raise ValueError(
            f"wcol_exact is capped at {EXACT_CAP} vertices (got {g.n}); "
            "use heuristic_order + wcol_given_order instead")
    if g.n == 0:
        return 0, []
    n = g.n
    best = [n + 1, None]
    counts = [0] * n
    placed = [False] * n
    prefix = []

    def reach_unplaced(u):
        # BFS from u through unplaced vertices only
        seen = {u}
        frontier = [u]
        for _ in range(r):
            nxt = []
            for x in frontier:
                for y in g.adj[x]:
                    if y not in seen and not placed[y]:
                        seen.add(y)
                        nxt.append(y)
            if not nxt:
                break
            frontier = nxt
        return seen

    def dfs(depth, current_max):
        if current_max >= best[0]:
            return
        if depth == n:
            best[0] = current_max
            best[1] = list(prefix)
            return
        tried = set()
        for u in range(n):
            if placed[u]:
                continue
            key = (counts[u], frozenset(x for x in g.adj[u] if not placed[x]))
            if key in tried:
                continue
            tried.add(key)
            reach = reach_unplaced(u)
            placed[u] = True
            prefix.append(u)
            newmax = current_max
            for v in reach:
                counts[v] += 1
                if counts[v] > newmax:
                    newmax = counts[v]
            dfs(depth + 1, newmax)
            for v in reach:
                counts[v] -= 1
            prefix.pop()
            placed[u] = False

    dfs(0, 0)
    return best[0], best[1]


def heuristic_order(g):
    """Reverse degeneracy order: repeatedly remove a minimum-degree vertex
    (ties by lowest id) and place it last.  Every vertex then has at most
    degeneracy-many neighbors before it, so wcol_1 <= degeneracy + 1."""
    deg = [g.degree(v) for v in range(g.n)]
    alive = set(range(g.n))
    removal = []
    for _ in range(g.n):
        u = min(alive, key=lambda v: (deg[v], v))
        removal.append(u)
        alive.remove(u)
        for w in g.adj[u]:
            if w in alive:
                deg[w] -= 1
    return removal[::-1]


def cover_from_order(g, order, r):
    """Weak r-neighborhood cover with spread 2r and degree wcol_2r(g, order):
    the cluster around w collects every vertex that weakly 2r-reaches w, and
    each vertex is assigned the cluster of the order-minimum of its closed
    r-neighborhood.  The construction is verified on the fly and fails
    loudly if a neighborhood is ever missed."""
    order = check_order(g, order)
    pos = _positions(g, order)
    clusters = []
    centers = []
    index_of = {}
    for w in range(g.n):
        members = frozenset(int(v) for v in _root_reach(g, pos, w, 2 * r))
        if not members:
            continue
        index_of[w] = len(clusters)
        clusters.append(members)
        centers.append(w)
    assignment = []
    for v in range(g.n):
        ball = g.neighborhood([v], r)
        m = min(ball, key=lambda u: pos[u])
        idx = index_of[m]
        if not ball <= clusters[idx]:
            raise AssertionError(
                f"order cover missed N_{r}[{v}]: not inside cluster of {m}")
        assignment.append(idx)
    return Cover(r=r, spread=2 * r, clusters=clusters, centers=centers,
                 assignment=assignment)
