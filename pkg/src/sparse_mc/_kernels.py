"""Numeric inner loops: CSR breadth-first search and dense simplex pivoting.

Two interchangeable backends live here.  The default is a set of numba
@njit kernels; a pure-numpy implementation of every kernel is kept as a
fallback and for cross-checking.  Selection is done once at import time
through the environment variable SPARSE_MC_KERNELS:

    SPARSE_MC_KERNELS=numba   force numba (error if unavailable)
    SPARSE_MC_KERNELS=numpy   force the pure-numpy path
    unset                     numba if importable, else numpy

`sparse-mc bench` times both backends against each other.
"""

import os

import numpy as np

UNREACHED = np.iinfo(np.int32).max

_MODE = os.environ.get("SPARSE_MC_KERNELS", "").strip().lower()
if _MODE not in ("", "numba", "numpy"):
    raise RuntimeError(f"SPARSE_MC_KERNELS must be 'numba' or 'numpy', got {_MODE!r}")

_HAVE_NUMBA = False
if _MODE != "numpy":
    try:
        import numba

        _HAVE_NUMBA = True
    except ImportError:
        if _MODE == "numba":
            raise


# ---------------------------------------------------------------------------
# pure-numpy backend
# ---------------------------------------------------------------------------

def _bfs_numpy(indptr, indices, seeds, cap, n):
    """Distances from a seed set, cut off above `cap` (UNREACHED beyond)."""
    dist = np.full(n, UNREACHED, dtype=np.int32)
    dist[seeds] = 0
    frontier = np.unique(seeds)
    d = 0
    while frontier.size and d < cap:
        d += 1
        # gather all neighbors of the frontier in one shot
        starts = indptr[frontier]
        ends = indptr[frontier + 1]
        counts = ends - starts
        if counts.sum() == 0:
            break
        flat = np.concatenate([indices[s:e] for s, e in zip(starts, ends)])
        nxt = np.unique(flat)
        nxt = nxt[dist[nxt] == UNREACHED]
        if nxt.size == 0:
            break
        dist[nxt] = d
        frontier = nxt
    return dist


def _order_reach_numpy(indptr, indices, pos, root, r, n):
    """Vertices reached from `root` within r steps using only vertices that
    come strictly after `root` in the order (the root itself excepted)."""
    dist = np.full(n, UNREACHED, dtype=np.int32)
    dist[root] = 0
    rootpos = pos[root]
    frontier = np.array([root], dtype=np.int64)
    d = 0
    out = [root]
    while frontier.size and d < r:
        d += 1
        flat = np.concatenate([indices[indptr[v]:indptr[v + 1]] for v in frontier])
        if flat.size == 0:
            break
        nxt = np.unique(flat)
        nxt = nxt[(dist[nxt] == UNREACHED) & (pos[nxt] > rootpos)]
        if nxt.size == 0:
            break
        dist[nxt] = d
        out.append(nxt)
        frontier = nxt
    if len(out) == 1:
        return np.array([root], dtype=np.int64)
    return np.concatenate([np.atleast_1d(np.asarray(x, dtype=np.int64)) for x in out])


def _simplex_loop_numpy(T, basis, bland, max_iter, eps):
    """Dense simplex iterations on tableau T (last column = rhs, last row =
    reduced costs with objective value at T[-1, -1]).  Returns a status code:
    0 optimal, 1 unbounded, 2 iteration limit."""
    m = T.shape[0] - 1
    ncols = T.shape[1] - 1
    stall = 0
    use_bland = bland
    last_obj = T[-1, -1]
    for _ in range(max_iter):
        cost = T[-1, :ncols]
        if use_bland:
            neg = np.nonzero(cost < -eps)[0]
            if neg.size == 0:
                return 0
            j = int(neg[0])
        else:
            j = int(np.argmin(cost))
            if cost[j] >= -eps:
                return 0
        col = T[:m, j]
        pos = col > eps
        if not pos.any():
            return 1
        ratios = np.full(m, np.inf)
        ratios[pos] = T[:m, -1][pos] / col[pos]
        best = ratios.min()
        ties = np.nonzero(ratios <= best + eps)[0]
        if use_bland and ties.size > 1:
            i = int(ties[np.argmin(basis[ties])])
        else:
            i = int(ties[0])
        piv = T[i, j]
        T[i, :] /= piv
        colvals = T[:, j].copy()
        colvals[i] = 0.0
        T -= np.outer(colvals, T[i, :])
        T[:, j] = 0.0
        T[i, j] = 1.0
        basis[i] = j
        if not use_bland:
            # corner holds -objective; progress means it strictly increases
            obj = T[-1, -1]
            if obj <= last_obj + eps:
                stall += 1
                if stall > 2 * (m + ncols):
                    use_bland = True
            else:
                stall = 0
            last_obj = obj
    return 2


# ---------------------------------------------------------------------------
# numba backend
# ---------------------------------------------------------------------------

if _HAVE_NUMBA:

    @numba.njit(cache=True)
    def _bfs_numba(indptr, indices, seeds, cap, n):
        dist = np.full(n, UNREACHED, dtype=np.int32)
        queue = np.empty(n, dtype=np.int64)
        head = 0
        tail = 0
        for s in seeds:
            if dist[s] != 0:
                dist[s] = 0
                queue[tail] = s
                tail += 1
        while head < tail:
            v = queue[head]
            head += 1
            dv = dist[v]
            if dv >= cap:
                continue
            for k in range(indptr[v], indptr[v + 1]):
                u = indices[k]
                if dist[u] == UNREACHED:
                    dist[u] = dv + 1
                    queue[tail] = u
                    tail += 1
        return dist

    @numba.njit(cache=True)
    def _order_reach_numba(indptr, indices, pos, root, r, n):
        dist = np.full(n, UNREACHED, dtype=np.int32)
        queue = np.empty(n, dtype=np.int64)
        dist[root] = 0
        queue[0] = root
        head = 0
        tail = 1
        rootpos = pos[root]
        while head < tail:
            v = queue[head]
            head += 1
            dv = dist[v]
            if dv >= r:
                continue
            for k in range(indptr[v], indptr[v + 1]):
                u = indices[k]
                if dist[u] == UNREACHED and pos[u] > rootpos:
                    dist[u] = dv + 1
                    queue[tail] = u
                    tail += 1
        return queue[:tail].copy()

    @numba.njit(cache=True)
    def _simplex_loop_numba(T, basis, bland, max_iter, eps):
        m = T.shape[0] - 1
        ncols = T.shape[1] - 1
        stall = 0
        use_bland = bland
        last_obj = T[-1, -1]
        for _ in range(max_iter):
            j = -1
            if use_bland:
                for jj in range(ncols):
                    if T[-1, jj] < -eps:
                        j = jj
                        break
                if j < 0:
                    return 0
            else:
                best = -eps
                for jj in range(ncols):
                    if T[-1, jj] < best:
                        best = T[-1, jj]
                        j = jj
                if j < 0:
                    return 0
            i = -1
            bestratio = np.inf
            for ii in range(m):
                if T[ii, j] > eps:
                    ratio = T[ii, -1] / T[ii, j]
                    if ratio < bestratio - eps:
                        bestratio = ratio
                        i = ii
                    elif ratio <= bestratio + eps and i >= 0:
                        if use_bland and basis[ii] < basis[i]:
                            i = ii
            if i < 0:
                return 1
            piv = T[i, j]
            for jj in range(ncols + 1):
                T[i, jj] /= piv
            for ii in range(m + 1):
                if ii == i:
                    continue
                f = T[ii, j]
                if f != 0.0:
                    for jj in range(ncols + 1):
                        T[ii, jj] -= f * T[i, jj]
            basis[i] = j
            if not use_bland:
                # corner holds -objective; progress means it strictly increases
                obj = T[-1, -1]
                if obj <= last_obj + eps:
                    stall += 1
                    if stall > 2 * (m + ncols):
                        use_bland = True
                else:
                    stall = 0
                last_obj = obj
        return 2


# ---------------------------------------------------------------------------
# backend selection
# ---------------------------------------------------------------------------

if _HAVE_NUMBA:
    ACTIVE = "numba"
    bfs_distances = _bfs_numba
    order_reach = _order_reach_numba
    simplex_loop = _simplex_loop_numba
else:
    ACTIVE = "numpy"
    bfs_distances = _bfs_numpy
    order_reach = _order_reach_numpy
    simplex_loop = _simplex_loop_numpy

BACKENDS = {
    "numpy": (_bfs_numpy, _order_reach_numpy, _simplex_loop_numpy),
}
if _HAVE_NUMBA:
    BACKENDS["numba"] = (_bfs_numba, _order_reach_numba, _simplex_loop_numba)
