"""Brute-force ground truth at desk scale.

Grid scans, sphere sampling, and sampled convex-hull membership.  These are
one-sided evidence used to validate checker verdicts; they never certify.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.optimize
import scipy.stats.qmc

from . import linalg, model, solver


@dataclass(frozen=True)
class CompareReport:
    opt_grid: float
    opt_sdp: float
    gap: float
    exactness_flag: bool
    argmin: np.ndarray | None


def _feasibility_slack(inst, resolution: float) -> float:
    curv = max(
        (np.linalg.norm(q.A, 2) for q in inst.constraints), default=0.0
    )
    # equality-constrained sets are measure zero; scale the accept band with
    # the grid cell so tight constraints keep representatives
    return max(1e-8, curv * inst.n * resolution**2 * 4.0 + 2.0 * resolution * max(
        (np.linalg.norm(q.b) for q in inst.constraints), default=0.0))


def grid_opt(inst, box, resolution: float = 0.01):
    """Exhaustive scan of a box; returns (approx min, argmin or None)."""
    if inst.n > 3:
        raise ValueError("grid oracle limited to n <= 3")
    if resolution <= 0:
        raise ValueError("resolution must be positive")
    axes = [np.arange(lo, hi + resolution / 2, resolution) for lo, hi in box]
    slack = _feasibility_slack(inst, resolution)
    best = np.inf
    arg = None
    grids = np.meshgrid(*axes, indexing="ij")
    pts = np.stack([g.reshape(-1) for g in grids], axis=1)
    # vectorized evaluation per form
    def ev(q):
        return np.einsum("ki,ij,kj->k", pts, q.A, pts) + 2.0 * pts @ q.b + q.c

    ok = np.ones(pts.shape[0], dtype=bool)
    for q in inst.inequalities:
        ok &= ev(q) <= slack
    for q in inst.equalities:
        ok &= np.abs(ev(q)) <= slack
    if not np.any(ok):
        return np.inf, None
    vals = ev(inst.objective)[ok]
    sel = pts[ok]
    k = int(np.argmin(vals))
    best = float(vals[k])
    arg = sel[k]
    return best, arg


def sphere_min_rank_one(Mset, C, samples: int = 200000, seed: int = 0):
    """Approximate min of z^T C z over unit z with z^T M z <= 1e-6 for all M."""
    Mlist = [linalg.sym(M) for M in Mset]
    C = linalg.sym(C)
    d = C.shape[0]
    if d > 4 + 1:
        raise ValueError("sphere oracle limited to dimension <= 5")
    eng = scipy.stats.qmc.Sobol(d, scramble=True, seed=seed)
    # Sobol balance requires power-of-two sample counts
    raw = eng.random_base2(max(1, int(np.ceil(np.log2(samples)))))[:samples]
    z = scipy.stats.norm.ppf(np.clip(raw, 1e-12, 1 - 1e-12))
    nrm = np.linalg.norm(z, axis=1)
    z = z[nrm > 1e-9] / nrm[nrm > 1e-9][:, None]
    viol = np.zeros(z.shape[0])
    for M in Mlist:
        viol = np.maximum(viol, np.einsum("ki,ij,kj->k", z, M, z))
    all_vals = np.einsum("ki,ij,kj->k", z, C, z)

    best_val = np.inf
    best_vec = None
    strict = viol <= 1e-6
    if np.any(strict):
        k = int(np.argmin(np.where(strict, all_vals, np.inf)))
        best_val = float(all_vals[k])
        best_vec = z[k]

    # Multi-start polish.  The feasible set can be thin (e.g. the kernel of a
    # PSD combination of the constraints), so strict samples alone may miss
    # it entirely; SLSQP from mildly infeasible low-objective candidates
    # recovers those regions.
    cons = [{"type": "ineq",
             "fun": (lambda v, M=M: -float(v @ M @ v) / max(1e-12, v @ v))}
            for M in Mlist]
    cons.append({"type": "eq", "fun": lambda v: float(v @ v) - 1.0})
    loose = viol <= 1e-2 * max(1.0, float(np.max(np.abs(all_vals))))
    order = np.argsort(np.where(loose, all_vals, np.inf))
    starts = [z[j] for j in order[: min(8, int(np.sum(loose)))]]
    if best_vec is not None and not any(np.allclose(best_vec, s) for s in starts):
        starts.append(best_vec)
    # generic fallback starts so an empty candidate list still gets polished
    starts.extend(np.linalg.eigh(C)[1].T)
    for s in starts:
        res = scipy.optimize.minimize(lambda v: float(v @ C @ v), s,
                                      constraints=cons, method="SLSQP",
                                      options={"maxiter": 200, "ftol": 1e-12})
        if not res.success:
            continue
        nrm = float(np.linalg.norm(res.x))
        if nrm < 1e-9:
            continue
        v = res.x / nrm
        if all(float(v @ M @ v) <= 1e-6 for M in Mlist):
            cand = float(v @ C @ v)
            if cand < best_val:
                best_val = cand
                best_vec = v
    if best_vec is None:
        return np.inf, None
    return best_val, best_vec


def conv_membership_sample(inst, x, t, n_samples: int = 2000, seed: int = 0,
                           box=None, tol: float = 1e-2):
    """One-sided sampled membership of (x, t) in the convex epigraph hull.

    Collects feasible sample points (x_k, q_obj(x_k)), then solves an LP for
    the smallest sup-norm deviation of (x, t) from their convex hull plus
    the vertical recession direction.  Returns "LIKELY_IN" or "NOT_SHOWN".
    """
    if inst.n > 3:
        raise ValueError("membership oracle limited to n <= 3")
    x = np.asarray(x, dtype=float).reshape(-1)
    t = float(t)
    if box is None:
        r = max(2.0, 2.0 * float(np.linalg.norm(x)))
        box = [(-r, r)] * inst.n
    rng = np.random.default_rng(seed)
    pts = []
    lo = np.array([b[0] for b in box])
    hi = np.array([b[1] for b in box])
    # structured grid plus random fill
    res = max((hi - lo).max() / 40.0, 1e-3)
    axes = [np.arange(b[0], b[1] + res / 2, res) for b in box]
    grids = np.meshgrid(*axes, indexing="ij")
    cand = np.stack([g.reshape(-1) for g in grids], axis=1)
    cand = np.vstack([cand, lo + (hi - lo) * rng.random((n_samples, inst.n))])
    slack = _feasibility_slack(inst, res)
    for p in cand:
        feas = all(model.eval_form(q, p) <= slack for q in inst.inequalities)
        feas = feas and all(abs(model.eval_form(q, p)) <= slack for q in inst.equalities)
        if feas:
            pts.append(np.concatenate([p, [model.eval_form(inst.objective, p)]]))
    if not pts:
        return "NOT_SHOWN"
    P = np.array(pts)  # (N, n+1)
    N = P.shape[0]
    target = np.concatenate([x, [t]])
    # variables: lambda (N), mu >= 0 (vertical ray), d (deviation)
    # |P^T lambda + mu e_t - target| <= d componentwise, sum lambda = 1
    nv = N + 2
    c = np.zeros(nv)
    c[-1] = 1.0
    dim = inst.n + 1
    A_ub = []
    b_ub = []
    e_t = np.zeros(dim)
    e_t[-1] = 1.0
    for j in range(dim):
        row = np.zeros(nv)
        row[:N] = P[:, j]
        row[N] = e_t[j]
        row[-1] = -1.0
        A_ub.append(row.copy())
        b_ub.append(target[j])
        row2 = -row
        row2[-1] = -1.0
        A_ub.append(row2)
        b_ub.append(-target[j])
    A_eq = np.zeros((1, nv))
    A_eq[0, :N] = 1.0
    res_lp = scipy.optimize.linprog(
        c, A_ub=np.array(A_ub), b_ub=np.array(b_ub), A_eq=A_eq, b_eq=[1.0],
        bounds=[(0, None)] * (N + 1) + [(0, None)], method="highs")
    if res_lp.status == 0 and res_lp.fun <= tol:
        return "LIKELY_IN"
    return "NOT_SHOWN"


def compare_opt(inst, box=None, resolution: float = 0.01) -> CompareReport:
    """Grid value vs relaxation value with an exactness flag."""
    if box is None:
        box = [(-2.0, 2.0)] * inst.n
    opt_grid, arg = grid_opt(inst, box, resolution)
    opt_sdp, _, _ = solver.solve_opt_sdp(inst)
    if np.isinf(opt_grid):
        gap = np.inf
        flag = False
    else:
        gap = opt_grid - opt_sdp
        flag = abs(gap) <= 1e-2 * max(1.0, abs(opt_grid))
    return CompareReport(opt_grid=opt_grid, opt_sdp=opt_sdp, gap=gap,
                         exactness_flag=flag, argmin=arg)
