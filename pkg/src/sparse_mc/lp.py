"""Dense two-phase simplex solver for desk-scale linear programs.

Minimizes c.x subject to general rows (<=, >=, =) and per-variable bounds
(finite lower bounds are shifted away, free variables split, finite upper
bounds become rows).  Pivoting is deterministic: Dantzig pricing with
lowest-index tie-breaking by default, switching permanently to the
least-index (Bland) rule when the objective stalls long enough, which
gives a termination guarantee on degenerate instances.  `pivot="bland"`
forces the least-index rule from the start.

One solver call is single-threaded; independent calls may run in
parallel.  Optimal solutions are feasible within TOLERANCE and the
objective is reproducible bit-for-bit for a fixed input.
"""

import math

import numpy as np

from . import _kernels

TOLERANCE = 1e-7
_PIVOT_EPS = 1e-9

LE, GE, EQ = "<=", ">=", "="


class LpError(ValueError):
    pass


class LinearProgram:
    """min c.x subject to rows and variable bounds."""

    def __init__(self):
        self.obj = []
        self.lo = []
        self.hi = []
        self.rows = []

    @property
    def n_vars(self):
        return len(self.obj)

    @property
    def n_rows(self):
        return len(self.rows)

    def add_var(self, obj=0.0, lo=0.0, hi=math.inf):
        if lo > hi:
            raise LpError(f"variable bound lo={lo} > hi={hi}")
        self.obj.append(float(obj))
        self.lo.append(float(lo))
        self.hi.append(float(hi))
        return len(self.obj) - 1

    def add_constraint(self, coeffs, rel, rhs):
        if rel not in (LE, GE, EQ):
            raise LpError(f"unknown relation {rel!r}")
        coeffs = {int(j): float(c) for j, c in coeffs.items() if c != 0.0}
        for j in coeffs:
            if not (0 <= j < self.n_vars):
                raise LpError(f"constraint references unknown variable {j}")
        self.rows.append((coeffs, rel, float(rhs)))

    def dump(self):
        """Debug text dump, one constraint per line."""
        def term(j, c):
            return f"{c:+g}*x{j}"

        lines = ["min " + " ".join(term(j, c) for j, c in enumerate(self.obj) if c)]
        for coeffs, rel, rhs in self.rows:
            body = " ".join(term(j, c) for j, c in sorted(coeffs.items()))
            lines.append(f"{body} {rel} {rhs:g}")
        for j, (lo, hi) in enumerate(zip(self.lo, self.hi)):
            lines.append(f"{lo:g} <= x{j} <= {hi:g}")
        return "\n".join(lines) + "\n"


class LpSolution:
    __slots__ = ("status", "x", "objective")

    def __init__(self, status, x=None, objective=None):
        self.status = status
        self.x = x
        self.objective = objective

    def __repr__(self):
        return f"LpSolution(status={self.status!r}, objective={self.objective})"


OPTIMAL, INFEASIBLE, UNBOUNDED = "optimal", "infeasible", "unbounded"


def _to_standard_form(lp):
    """Rewrite into min c.y, A y (<=,>=,=) b with y >= 0.

    Returns (cols, c, rows) where cols[j] describes how to recover original
    variable j from the standard-form vector: (kind, data).
    """
    cols = []
    c = []
    extra_rows = []
    for j in range(lp.n_vars):
        lo, hi = lp.lo[j], lp.hi[j]
        if lo == -math.inf:
            # free (or upper-bounded) variable: x = y+ - y-
            plus = len(c)
            c.append(lp.obj[j])
            minus = len(c)
            c.append(-lp.obj[j])
            cols.append(("split", plus, minus, 0.0))
            if hi < math.inf:
                extra_rows.append(({plus: 1.0, minus: -1.0}, LE, hi))
        else:
            y = len(c)
            c.append(lp.obj[j])
            cols.append(("shift", y, None, lo))
            if hi < math.inf:
                extra_rows.append(({y: 1.0}, LE, hi - lo))
    rows = []
    for coeffs, rel, rhs in lp.rows:
        new = {}
        shift = 0.0
        for j, a in coeffs.items():
            kind, y, ym, lo = cols[j]
            new[y] = new.get(y, 0.0) + a
            if kind == "split":
                new[ym] = new.get(ym, 0.0) - a
            else:
                shift += a * lo
        rows.append((new, rel, rhs - shift))
    for coeffs, rel, rhs in extra_rows:
        base = {}
        for y, a in coeffs.items():
            base[y] = a
        # upper-bound rows reference standard-form vars directly but must
        # account for the shift of the bounded variable, already applied
        rows.append((base, rel, rhs))
    return cols, np.array(c, dtype=np.float64), rows


def _run_simplex(T, basis, bland, max_iter):
    status = _kernels.simplex_loop(T, basis, bland, max_iter, _PIVOT_EPS)
    if status == 2:
        raise LpError("simplex iteration limit exceeded")
    return status


def solve(lp, pivot="auto", max_iter=2_000_000):
    """Solve the LP.  pivot="auto" prices by the most negative reduced cost
    and falls back to the least-index rule when stalling; pivot="bland"
    uses the least-index rule throughout."""
    if pivot not in ("auto", "bland"):
        raise LpError(f"unknown pivot rule {pivot!r}")
    bland = pivot == "bland"
    cols, c, rows = _to_standard_form(lp)
    nvars = c.size
    m = len(rows)

    if m == 0:
        # only bounds: minimize each variable at its cheapest bound
        x = np.zeros(lp.n_vars)
        for j in range(lp.n_vars):
            if lp.obj[j] > 0:
                x[j] = lp.lo[j]
            elif lp.obj[j] < 0:
                x[j] = lp.hi[j]
            else:
                x[j] = lp.lo[j] if lp.lo[j] > -math.inf else 0.0
            if not (-math.inf < x[j] < math.inf):
                return LpSolution(UNBOUNDED)
        obj = float(np.dot(lp.obj, x))
        return LpSolution(OPTIMAL, x, obj)

    # slack/surplus columns, then artificials
    n_slack = sum(1 for _, rel, _ in rows if rel != EQ)
    A = np.zeros((m, nvars + n_slack), dtype=np.float64)
    b = np.zeros(m, dtype=np.float64)
    slack_col = nvars
    slack_of = [-1] * m
    for i, (coeffs, rel, rhs) in enumerate(rows):
        sign = 1.0
        if rhs < 0:
            sign = -1.0
            rhs = -rhs
            rel = {LE: GE, GE: LE, EQ: EQ}[rel]
        for j, a in coeffs.items():
            A[i, j] = sign * a
        b[i] = rhs
        if rel == LE:
            A[i, slack_col] = 1.0
            slack_of[i] = slack_col
            slack_col += 1
        elif rel == GE:
            A[i, slack_col] = -1.0
            slack_of[i] = slack_col
            slack_col += 1

    need_artificial = [i for i in range(m)
                       if slack_of[i] < 0 or A[i, slack_of[i]] < 0]
    n_art = len(need_artificial)
    total = nvars + n_slack + n_art

    # phase 1 tableau
    T = np.zeros((m + 1, total + 1), dtype=np.float64)
    T[:m, :nvars + n_slack] = A
    T[:m, -1] = b
    basis = np.empty(m, dtype=np.int64)
    art_cols = set()
    k = nvars + n_slack
    for i in range(m):
        if i in set(need_artificial):
            T[i, k] = 1.0
            basis[i] = k
            art_cols.add(k)
            k += 1
        else:
            basis[i] = slack_of[i]
    # phase-1 objective: sum of artificials, expressed over nonbasic columns
    for col in art_cols:
        T[-1, col] = 1.0
    for i in range(m):
        if basis[i] in art_cols:
            T[-1, :] -= T[i, :]

    _run_simplex(T, basis, bland, max_iter)
    if T[-1, -1] < -TOLERANCE:
        return LpSolution(INFEASIBLE)

    # drive artificials out of the basis; drop redundant rows
    keep = []
    for i in range(m):
        if basis[i] in art_cols:
            pivot_col = -1
            for j in range(nvars + n_slack):
                if abs(T[i, j]) > _PIVOT_EPS:
                    pivot_col = j
                    break
            if pivot_col < 0:
                continue  # redundant row
            piv = T[i, pivot_col]
            T[i, :] /= piv
            for ii in range(m + 1):
                if ii != i and T[ii, pivot_col] != 0.0:
                    T[ii, :] -= T[ii, pivot_col] * T[i, :]
            basis[i] = pivot_col
        keep.append(i)

    # phase 2 tableau without artificial columns
    rows_kept = len(keep)
    T2 = np.zeros((rows_kept + 1, nvars + n_slack + 1), dtype=np.float64)
    for new_i, i in enumerate(keep):
        T2[new_i, :nvars + n_slack] = T[i, :nvars + n_slack]
        T2[new_i, -1] = T[i, -1]
    basis2 = np.array([basis[i] for i in keep], dtype=np.int64)
    T2[-1, :nvars] = c
    for i in range(rows_kept):
        bj = basis2[i]
        coef = T2[-1, bj]
        if coef != 0.0:
            T2[-1, :] -= coef * T2[i, :]

    status = _run_simplex(T2, basis2, bland, max_iter)
    if status == 1:
        return LpSolution(UNBOUNDED)

    y = np.zeros(nvars + n_slack)
    for i in range(rows_kept):
        y[basis2[i]] = T2[i, -1]

    x = np.zeros(lp.n_vars)
    for j, (kind, col, col2, lo) in enumerate(cols):
        if kind == "split":
            x[j] = y[col] - y[col2]
        else:
            x[j] = y[col] + lo
    obj = float(np.dot(lp.obj, x))

    _verify_feasible(lp, x)
    return LpSolution(OPTIMAL, x, obj)


def _verify_feasible(lp, x):
    for j in range(lp.n_vars):
        if x[j] < lp.lo[j] - TOLERANCE or x[j] > lp.hi[j] + TOLERANCE:
            raise LpError(f"solver bug: bound violation on x{j}={x[j]}")
    for coeffs, rel, rhs in lp.rows:
        lhs = sum(c * x[j] for j, c in coeffs.items())
        scale = 1.0 + abs(rhs)
        if rel == LE and lhs > rhs + TOLERANCE * scale:
            raise LpError(f"solver bug: {lhs} <= {rhs} violated")
        if rel == GE and lhs < rhs - TOLERANCE * scale:
            raise LpError(f"solver bug: {lhs} >= {rhs} violated")
        if rel == EQ and abs(lhs - rhs) > TOLERANCE * scale:
            raise LpError(f"solver bug: {lhs} = {rhs} violated")
