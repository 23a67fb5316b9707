"""Weak neighborhood covers via LP relaxation, rounding, and MMSC.

The pipeline: build the cover LP (one indicator per candidate
center/neighborhood pair), solve it with the simplex module, convert the
fractional solution into a fractional cover by ceiling-scaling, reduce
cluster selection to Minimum Membership Set Cover, and round the MMSC LP
deterministically with a pessimistic estimator.  A randomized sampling
path is kept for experimentation; the deterministic MMSC path is the
default.  verify_cover is the source of truth for every produced cover
and the pipeline fails loudly if a check is ever missed.
"""

import json
import math

import numpy as np

from . import lp as lpmod
from .lp import LE, GE, LinearProgram


class CoverInfeasibleError(ValueError):
    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class Cover:
    """Clusters with centers, a covering assignment, radius r and spread s.

    Invariants (enforced by verify_cover): N_r[v] is inside the assigned
    cluster of v, every cluster is inside N_s of its center, and the
    degree of a vertex is the number of clusters containing it.
    """

    def __init__(self, r, spread, clusters, centers, assignment, meta=None):
        self.r = r
        self.spread = spread
        self.clusters = [frozenset(c) for c in clusters]
        self.centers = list(centers)
        self.assignment = list(assignment)
        self.meta = dict(meta or {})

    def degree(self):
        counts = {}
        for c in self.clusters:
            for v in c:
                counts[v] = counts.get(v, 0) + 1
        return max(counts.values(), default=0)

    def __repr__(self):
        return (f"Cover(r={self.r}, s={self.spread}, "
                f"clusters={len(self.clusters)}, degree={self.degree()})")


class FractionalCover:
    """Weighted clusters: covering weights sum to >= 1 per r-neighborhood
    and to <= degree per vertex; every cluster sits in an s-neighborhood
    of its center.  Entries may repeat a vertex set under different
    centers; weights are per entry."""

    def __init__(self, r, spread, entries):
        self.r = r
        self.spread = spread
        self.entries = [(frozenset(c), float(w), ctr) for c, w, ctr in entries]

    def degree(self):
        counts = {}
        for c, w, _ in self.entries:
            for v in c:
                counts[v] = counts.get(v, 0.0) + w
        return max(counts.values(), default=0.0)

    def validate(self, g, max_degree=None):
        balls = [g.neighborhood([v], self.r) for v in range(g.n)]
        for v in range(g.n):
            total = sum(w for c, w, _ in self.entries if balls[v] <= c)
            if total < 1.0 - 1e-9:
                raise AssertionError(
                    f"fractional cover: N_{self.r}[{v}] covered with weight {total} < 1")
        for c, w, ctr in self.entries:
            if not (0.0 <= w <= 1.0 + 1e-9):
                raise AssertionError(f"fractional cover: weight {w} outside [0,1]")
            if not c <= g.neighborhood([ctr], self.spread):
                raise AssertionError(
                    f"fractional cover: cluster around {ctr} exceeds spread {self.spread}")
        if max_degree is not None and self.degree() > max_degree:
            raise AssertionError(
                f"fractional cover: degree {self.degree()} > {max_degree}")


class CoverReport:
    __slots__ = ("ok", "violation", "degree", "max_spread_seen", "clusters")

    def __init__(self, ok, violation, degree, max_spread_seen, clusters):
        self.ok = ok
        self.violation = violation
        self.degree = degree
        self.max_spread_seen = max_spread_seen
        self.clusters = clusters

    def __repr__(self):
        state = "OK" if self.ok else f"VIOLATION: {self.violation}"
        return (f"CoverReport({state}, degree={self.degree}, "
                f"spread<={self.max_spread_seen}, clusters={self.clusters})")


def verify_cover(g, cover, r, s, max_degree=None):
    """Check the three cover conditions; returns the first violation or OK
    with the measured degree and spread."""
    def fail(msg):
        return CoverReport(False, msg, None, None, len(cover.clusters))

    for idx, c in enumerate(cover.clusters):
        for v in c:
            if not (0 <= v < g.n):
                return fail(f"cluster {idx} contains out-of-range vertex {v}")
    if len(cover.assignment) != g.n:
        return fail(f"assignment covers {len(cover.assignment)} of {g.n} vertices")
    if len(cover.centers) != len(cover.clusters):
        return fail("centers and clusters differ in length")
    for v in range(g.n):
        idx = cover.assignment[v]
        if not (0 <= idx < len(cover.clusters)):
            return fail(f"vertex {v} assigned to missing cluster {idx}")
        ball = g.neighborhood([v], r)
        if not ball <= cover.clusters[idx]:
            missing = sorted(ball - cover.clusters[idx])[0]
            return fail(f"N_{r}[{v}] not inside assigned cluster {idx} "
                        f"(misses {missing})")
    max_seen = 0
    for idx, (c, ctr) in enumerate(zip(cover.clusters, cover.centers)):
        if not c:
            continue
        dist = g.distances([ctr], cap=s)
        ecc = max(int(dist[v]) if dist[v] != np.iinfo(np.int32).max else s + 1
                  for v in c)
        if ecc > s:
            far = max(c, key=lambda v: dist[v])
            return fail(f"cluster {idx} leaves N_{s}[{ctr}] (vertex {far})")
        max_seen = max(max_seen, ecc)
    degree = cover.degree()
    if max_degree is not None and degree > max_degree:
        return fail(f"degree {degree} exceeds bound {max_degree}")
    return CoverReport(True, None, degree, max_seen, len(cover.clusters))


# -- cover LP -----------------------------------------------------------------

class CoverVarMap:
    __slots__ = ("d", "p", "q")

    def __init__(self, d, p, q):
        self.d = d
        self.p = p  # (v, w) -> lp var
        self.q = q  # (u, w) -> lp var


def _balls(g, radius):
    return [g.neighborhood([v], radius) for v in range(g.n)]


def build_cover_ilp(g, r, s):
    """LP relaxation of the cover program: minimize the degree d subject to
    (1) every N_r[v] fractionally packed into candidate clusters, (2) every
    vertex in at most d clusters, (3) cluster-membership consistency.
    Variables p_vw exist only when N_r[v] fits in N_s[w]; q_uw only when
    u is in N_s[w] (the explicit spread equations are then redundant)."""
    if r < 0 or s < 0:
        raise ValueError("radii must be nonnegative")
    ball_r = _balls(g, r)
    ball_s = _balls(g, s)
    prog = LinearProgram()
    d = prog.add_var(obj=1.0, lo=0.0)
    p = {}
    q = {}
    for w in range(g.n):
        for u in sorted(ball_s[w]):
            q[(u, w)] = prog.add_var(obj=0.0, lo=0.0, hi=1.0)
    for v in range(g.n):
        admissible = [w for w in range(g.n) if ball_r[v] <= ball_s[w]]
        if not admissible:
            raise CoverInfeasibleError(
                f"N_{r}[{v}] fits in no N_{s}[w]; no cover with spread {s} exists",
                witness=v)
        for w in admissible:
            p[(v, w)] = prog.add_var(obj=0.0, lo=0.0, hi=1.0)
    for v in range(g.n):
        row = {p[(v, w)]: 1.0 for w in range(g.n) if (v, w) in p}
        prog.add_constraint(row, GE, 1.0)
    for u in range(g.n):
        row = {q[(u, w)]: 1.0 for w in range(g.n) if (u, w) in q}
        row[d] = -1.0
        prog.add_constraint(row, LE, 0.0)
    for (v, w), pj in sorted(p.items()):
        for u in sorted(ball_r[v]):
            prog.add_constraint({q[(u, w)]: 1.0, pj: -1.0}, GE, 0.0)
    return prog, CoverVarMap(d, p, q)


class CoverLpResult:
    """Solved cover LP: optimum d_lp plus (clamped) p and q value maps."""

    __slots__ = ("d_lp", "p", "q")

    def __init__(self, d_lp, p, q):
        self.d_lp = d_lp
        self.p = p
        self.q = q


def solve_cover_lp(g, r, s, pivot="auto"):
    """Solve the cover LP after an exact presolve.

    The presolve merges centers with identical N_s-balls, fixes variables
    forced by single-candidate neighborhoods, substitutes q variables with
    a unique lower bound, and drops q variables that appear in no
    consistency row.  Each step preserves the optimum exactly; values are
    clamped to [0,1] on reconstruction, which keeps all constraints
    satisfied.
    """
    ball_r = _balls(g, r)
    ball_s = _balls(g, s)

    reps = {}
    for w in range(g.n):
        reps.setdefault(ball_s[w], w)
    rep_list = sorted(reps.values())

    cand = {}
    for v in range(g.n):
        ws = [w for w in rep_list if ball_r[v] <= ball_s[w]]
        if not ws:
            raise CoverInfeasibleError(
                f"N_{r}[{v}] fits in no N_{s}[w]; no cover with spread {s} exists",
                witness=v)
        cand[v] = ws

    fixed_p = {}
    for v in range(g.n):
        if len(cand[v]) == 1:
            fixed_p[(v, cand[v][0])] = 1.0
    fixed_q = {}
    for (v, w) in fixed_p:
        for u in ball_r[v]:
            fixed_q[(u, w)] = 1.0

    # partners[(u, w)] = unfixed p variables lower-bounding q_uw
    partners = {}
    free_p_keys = []
    for v in range(g.n):
        if len(cand[v]) == 1:
            continue
        for w in cand[v]:
            free_p_keys.append((v, w))
            for u in sorted(ball_r[v]):
                partners.setdefault((u, w), []).append(v)

    prog = LinearProgram()
    d = prog.add_var(obj=1.0, lo=0.0)
    p_var = {key: prog.add_var() for key in sorted(free_p_keys)}
    q_var = {}
    subst = {}  # (u, w) -> p key whose value q_uw copies
    for (u, w), vs in sorted(partners.items()):
        if (u, w) in fixed_q:
            continue
        if len(vs) == 1:
            subst[(u, w)] = (vs[0], w)
        else:
            q_var[(u, w)] = prog.add_var()

    for v in range(g.n):
        if len(cand[v]) == 1:
            continue
        prog.add_constraint({p_var[(v, w)]: 1.0 for w in cand[v]}, GE, 1.0)
    for u in range(g.n):
        row = {}
        const = 0.0
        for w in rep_list:
            if (u, w) in fixed_q:
                const += 1.0
            elif (u, w) in q_var:
                row[q_var[(u, w)]] = 1.0
            elif (u, w) in subst:
                key = subst[(u, w)]
                row[p_var[key]] = row.get(p_var[key], 0.0) + 1.0
        if not row and const == 0.0:
            continue
        row[d] = -1.0
        prog.add_constraint(row, LE, -const)
    for (u, w), qj in sorted(q_var.items()):
        for v in partners[(u, w)]:
            prog.add_constraint({qj: 1.0, p_var[(v, w)]: -1.0}, GE, 0.0)

    sol = lpmod.solve(prog, pivot=pivot)
    if sol.status != lpmod.OPTIMAL:
        raise CoverInfeasibleError(f"cover LP unexpectedly {sol.status}")

    def clamp(x):
        return min(1.0, max(0.0, x))

    p_out = dict(fixed_p)
    for key, j in p_var.items():
        p_out[key] = clamp(sol.x[j])
    q_out = dict(fixed_q)
    for key, j in q_var.items():
        q_out[key] = clamp(sol.x[j])
    for key, pkey in subst.items():
        q_out[key] = p_out[pkey]
    return CoverLpResult(float(sol.objective), p_out, q_out)


def lp_to_fractional(g, r, s, res):
    """Ceiling-scale the LP values by n and slice each center's membership
    counts into level sets: cluster i around w collects the vertices whose
    scaled membership is at least i, with weight 1/n per level.  Level
    sets are aggregated (weight multiplicity/n); the result has degree at
    most d_lp + 1 and spread s."""
    n = g.n
    by_center = {}
    for (u, w), val in res.q.items():
        if val > 0.0:
            lvl = math.ceil(n * val - 1e-9)
            if lvl > 0:
                by_center.setdefault(w, []).append((u, lvl))
    entries = []
    for w in sorted(by_center):
        members = by_center[w]
        values = sorted({lvl for _, lvl in members}, reverse=True)
        prev = 0
        cluster = set()
        # iterate thresholds from the highest scaled value down
        for bound in values:
            cluster = {u for u, lvl in members if lvl >= bound}
            lower = max((v for v in values if v < bound), default=0)
            entries.append((frozenset(cluster), (bound - lower) / n, w))
    frac = FractionalCover(r, s, entries)
    frac.validate(g, max_degree=res.d_lp + 1.0 + 1e-6)
    return frac


# -- randomized sampling ------------------------------------------------------

def sample_cover(g, frac, seed, max_retries=20):
    """Randomized rounding of a fractional cover: each cluster is sampled
    ceil(24 ln n) times with its weight as probability.  Succeeds with
    probability at least 1 - 4/n per attempt (n >= 5); retries a few times
    and errors out advising the deterministic path."""
    n = g.n
    if n < 5:
        raise ValueError("sample_cover requires n >= 5")
    rng = np.random.default_rng(seed)
    rounds = math.ceil(24 * math.log(n))
    dmax = 36 * math.log(n) * max(frac.degree(), 1e-12)
    balls = [g.neighborhood([v], frac.r) for v in range(g.n)]
    for _ in range(max_retries):
        clusters = []
        centers = []
        for c, w, ctr in frac.entries:
            mult = int(round(w * n))
            count = rng.binomial(rounds * max(mult, 1), min(w / max(mult, 1) * 1.0, 1.0)) \
                if mult <= 1 else rng.binomial(rounds * mult, 1.0 / n)
            if mult <= 1:
                count = rng.binomial(rounds, w)
            for _ in range(count):
                clusters.append(c)
                centers.append(ctr)
        assignment = []
        ok = True
        for v in range(g.n):
            idx = next((i for i, c in enumerate(clusters) if balls[v] <= c), None)
            if idx is None:
                ok = False
                break
            assignment.append(idx)
        if not ok:
            continue
        cover = Cover(frac.r, frac.spread, clusters, centers, assignment,
                      meta={"sampled_rounds": rounds})
        if cover.degree() <= dmax:
            return cover
    raise RuntimeError(
        f"sampling failed {max_retries} times; use the deterministic "
        "MMSC path (approx_cover)")


# -- minimum membership set cover ---------------------------------------------

class MMSCInstance:
    """Universe 0..n_elements-1 plus a set system that must cover it."""

    __slots__ = ("n_elements", "sets")

    def __init__(self, n_elements, sets):
        self.n_elements = n_elements
        self.sets = [frozenset(s) for s in sets]
        for s in self.sets:
            for e in s:
                if not (0 <= e < n_elements):
                    raise ValueError(f"set element {e} out of range")


class MMSCSolution:
    __slots__ = ("chosen", "membership")

    def __init__(self, chosen, membership):
        self.chosen = list(chosen)
        self.membership = membership

    def __repr__(self):
        return f"MMSCSolution(chosen={self.chosen}, M={self.membership})"


def mmsc_reduce(g, r, clusters):
    """Reduce cluster selection to MMSC over a doubled universe: element v
    demands a cluster containing N_r[v], element n+v meters how often v is
    covered.  Solutions of membership z correspond exactly to covers of
    degree z."""
    n = g.n
    balls = [g.neighborhood([v], r) for v in range(n)]
    sets = []
    for c in clusters:
        covered = {v for v in range(n) if balls[v] <= c}
        sets.append(frozenset(covered | {n + u for u in c}))
    inst = MMSCInstance(2 * n, sets)
    for v in range(n):
        if not any(v in s for s in inst.sets):
            raise CoverInfeasibleError(
                f"no candidate cluster contains N_{r}[{v}]", witness=v)
    return inst


def mmsc_approx(instance, pivot="auto"):
    """Deterministic logarithmic-factor MMSC approximation: solve the
    membership LP, scale to probabilities p_j = min(1, (ln n + 1) x_j),
    then round each p_j to 0/1 minimizing a pessimistic estimator that
    combines the uncover probabilities prod(1 - p_j) with the Markov terms
    prod(1 + p_j) / 2^T for the membership threshold T."""
    m = len(instance.sets)
    n = instance.n_elements
    if n == 0:
        return MMSCSolution([], 0)
    incidence = [[] for _ in range(n)]
    for j, s in enumerate(instance.sets):
        for e in s:
            incidence[e].append(j)
    for e in range(n):
        if not incidence[e]:
            raise CoverInfeasibleError(f"element {e} is in no set", witness=e)

    groups = {}
    for e in range(n):
        groups.setdefault(tuple(incidence[e]), 0)
        groups[tuple(incidence[e])] += 1

    prog = LinearProgram()
    z = prog.add_var(obj=1.0, lo=0.0)
    xs = [prog.add_var() for _ in range(m)]
    for inc in sorted(groups):
        row = {xs[j]: 1.0 for j in inc}
        prog.add_constraint(row, GE, 1.0)
        row2 = {xs[j]: 1.0 for j in inc}
        row2[z] = -1.0
        prog.add_constraint(row2, LE, 0.0)
    sol = lpmod.solve(prog, pivot=pivot)
    if sol.status != lpmod.OPTIMAL:
        raise CoverInfeasibleError(f"MMSC LP unexpectedly {sol.status}")
    z_lp = max(float(sol.objective), 1.0)

    alpha = math.log(n) + 1.0
    p = [min(1.0, alpha * max(0.0, float(sol.x[xs[j]]))) for j in range(m)]
    threshold = math.ceil(alpha * (z_lp + 1.0) / math.log(2.0))

    glist = list(sorted(groups))
    gsize = [groups[inc] for inc in glist]
    # per group: count of p_j == 1 factors and log sums over the rest
    zero_cnt = [0] * len(glist)
    logA = [0.0] * len(glist)
    logB = [0.0] * len(glist)
    member = [[] for _ in range(m)]
    for gi, inc in enumerate(glist):
        for j in inc:
            member[j].append(gi)
            if p[j] >= 1.0:
                zero_cnt[gi] += 1
            else:
                logA[gi] += math.log1p(-p[j])
            logB[gi] += math.log1p(p[j])

    log2 = math.log(2.0)

    def estimator():
        total = 0.0
        for gi in range(len(glist)):
            a = 0.0 if zero_cnt[gi] else math.exp(logA[gi])
            b = math.exp(logB[gi] - threshold * log2)
            total += gsize[gi] * (a + b)
        return total

    def set_p(j, value):
        for gi in member[j]:
            if p[j] >= 1.0:
                zero_cnt[gi] -= 1
            else:
                logA[gi] -= math.log1p(-p[j])
            logB[gi] -= math.log1p(p[j])
            if value >= 1.0:
                zero_cnt[gi] += 1
            else:
                logA[gi] += math.log1p(-value)
            logB[gi] += math.log1p(value)
        p[j] = value

    start = estimator()
    if start >= 1.0:
        raise AssertionError(f"pessimistic estimator starts at {start} >= 1")
    for j in range(m):
        old = p[j]
        set_p(j, 0.0)
        p0 = estimator()
        set_p(j, 1.0)
        p1 = estimator()
        if p0 <= p1:
            set_p(j, 0.0)
        # else keep 1
        del old

    chosen = [j for j in range(m) if p[j] >= 1.0]
    counts = [0] * n
    for j in chosen:
        for e in instance.sets[j]:
            counts[e] += 1
    if min(counts) < 1:
        raise AssertionError("derandomized rounding left an element uncovered")
    membership = max(counts)
    if membership > threshold:
        raise AssertionError(
            f"membership {membership} exceeds estimator threshold {threshold}")
    return MMSCSolution(chosen, membership)


# -- the full pipeline --------------------------------------------------------

def approx_cover(g, r, s, pivot="auto"):
    """End-to-end deterministic cover approximation: cover LP, fractional
    conversion, MMSC reduction, derandomized rounding.  The result always
    passes verify_cover; the LP optimum and the achieved degree are left in
    cover.meta for reporting."""
    res = solve_cover_lp(g, r, s, pivot=pivot)
    frac = lp_to_fractional(g, r, s, res)

    distinct = {}
    for c, w, ctr in frac.entries:
        distinct.setdefault(c, ctr)
    clusters = sorted(distinct, key=sorted)
    centers = [distinct[c] for c in clusters]

    inst = mmsc_reduce(g, r, clusters)
    sol = mmsc_approx(inst, pivot=pivot)
    chosen_clusters = [clusters[j] for j in sol.chosen]
    chosen_centers = [centers[j] for j in sol.chosen]

    balls = [g.neighborhood([v], r) for v in range(g.n)]
    assignment = []
    for v in range(g.n):
        idx = next((i for i, c in enumerate(chosen_clusters) if balls[v] <= c), None)
        if idx is None:
            raise AssertionError(f"MMSC solution misses N_{r}[{v}]")
        assignment.append(idx)

    cover = Cover(r, s, chosen_clusters, chosen_centers, assignment,
                  meta={"d_lp": res.d_lp, "mmsc_membership": sol.membership})
    report = verify_cover(g, cover, r, s)
    if not report.ok:
        raise AssertionError(f"pipeline produced an invalid cover: {report.violation}")
    cover.meta["degree"] = report.degree
    return cover


def lift_cover(g, vmap, cover_prime, contraction_radius):
    """Pull a cover of a contraction back to the original graph: each
    cluster becomes the union of the preimages of its vertices.  The
    degree is preserved exactly and the spread grows to (2k+1)*s for a
    k-contraction."""
    n_prime = max(vmap.values()) + 1 if vmap else 0
    if set(vmap.keys()) != set(range(g.n)):
        raise ValueError("part map does not cover the original vertex set")
    preimage = [[] for _ in range(n_prime)]
    for v, w in vmap.items():
        if not (0 <= w < n_prime):
            raise ValueError(f"part map target {w} out of range")
        preimage[w].append(v)
    clusters = []
    centers = []
    for c, ctr in zip(cover_prime.clusters, cover_prime.centers):
        lifted = set()
        for w in c:
            if w >= n_prime or not preimage[w]:
                raise ValueError(f"cover references vertex {w} outside the contraction")
        for w in c:
            lifted.update(preimage[w])
        clusters.append(frozenset(lifted))
        centers.append(min(preimage[cover_prime.centers[len(centers)]]))
    assignment = [cover_prime.assignment[vmap[v]] for v in range(g.n)]
    spread = (2 * contraction_radius + 1) * cover_prime.spread
    return Cover(cover_prime.r, spread, clusters, centers, assignment,
                 meta={"lifted_from_spread": cover_prime.spread})


# -- brute force oracle -------------------------------------------------------

def brute_force_cover_degree(g, r, s, cap=7):
    """Exact minimum cover degree by exhausting center assignments: each
    vertex picks an admissible center, the cluster around a center is the
    union of the neighborhoods assigned to it.  Exponential; capped."""
    if g.n > cap:
        raise ValueError(f"brute force capped at {cap} vertices")
    ball_r = _balls(g, r)
    ball_s = _balls(g, s)
    options = []
    for v in range(g.n):
        ws = [w for w in range(g.n) if ball_r[v] <= ball_s[w]]
        if not ws:
            raise CoverInfeasibleError(f"N_{r}[{v}] fits in no N_{s}[w]", witness=v)
        options.append(ws)
    best = [g.n + 1]
    cluster_of = {}

    def degree_now():
        counts = {}
        for members in cluster_of.values():
            for u in set().union(*members) if members else ():
                counts[u] = counts.get(u, 0) + 1
        return max(counts.values(), default=0)

    def dfs(v):
        if degree_now() >= best[0]:
            return
        if v == g.n:
            best[0] = degree_now()
            return
        for w in options[v]:
            cluster_of.setdefault(w, []).append(ball_r[v])
            dfs(v + 1)
            cluster_of[w].pop()
            if not cluster_of[w]:
                del cluster_of[w]

    dfs(0)
    return best[0]


# -- serialization ------------------------------------------------------------

def cover_to_json(cover):
    return json.dumps({
        "schema": 1,
        "r": cover.r,
        "s": cover.spread,
        "clusters": [sorted(c) for c in cover.clusters],
        "centers": cover.centers,
        "assignment": cover.assignment,
        "meta": cover.meta,
    }, indent=None, sort_keys=True)


def cover_from_json(text):
    data = json.loads(text)
    if data.get("schema") != 1:
        raise ValueError(f"unsupported cover schema {data.get('schema')!r}")
    return Cover(data["r"], data["s"], data["clusters"], data["centers"],
                 data["assignment"], data.get("meta"))
