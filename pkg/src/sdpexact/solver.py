"""Desk-scale dense SDP/LP solver.

First-order operator splitting: the iterate alternates between projection
onto the affine constraint set (a dense linear solve whose normal matrix is
factorized once) and projection onto the product cone PSD x R_+ (eigenvalue
clipping plus slack clipping), with scaled dual updates, over-relaxation,
and adaptive penalty rebalancing.

Matrix variables are stored in scaled vector form (off-diagonal entries
multiplied by sqrt(2)) so that the Frobenius inner product is the ordinary
dot product.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from . import linalg

DEFAULT_EPS = 1e-7
DEFAULT_MAX_ITER = 50000
OVER_RELAXATION = 1.6
PENALTY_CHECK_EVERY = 100
PENALTY_RATIO = 10.0


class SolveStatus(enum.Enum):
    OPTIMAL = "OPTIMAL"
    MAX_ITER = "MAX_ITER"
    INFEASIBLE_LIKELY = "INFEASIBLE_LIKELY"
    UNBOUNDED_LIKELY = "UNBOUNDED_LIKELY"


@dataclass(frozen=True)
class Constraint:
    matrix: np.ndarray
    sense: str  # "LE" or "EQ"
    rhs: float

    def __post_init__(self):
        object.__setattr__(self, "matrix", linalg.sym(self.matrix))
        if self.sense not in ("LE", "EQ"):
            raise ValueError(f"sense must be LE or EQ, got {self.sense!r}")
        object.__setattr__(self, "rhs", float(self.rhs))


@dataclass(frozen=True)
class ConicProgram:
    dim: int
    objective_matrix: np.ndarray
    constraints: tuple
    trace_normalization: float | None = None
    diagonal_only: bool = False

    def __post_init__(self):
        object.__setattr__(self, "objective_matrix", linalg.sym(self.objective_matrix))
        object.__setattr__(self, "constraints", tuple(self.constraints))
        if self.objective_matrix.shape[0] != self.dim:
            raise ValueError("objective matrix dimension mismatch")
        for con in self.constraints:
            if con.matrix.shape[0] != self.dim:
                raise ValueError("constraint matrix dimension mismatch")


@dataclass
class SdpSolution:
    Z: np.ndarray
    y: np.ndarray  # per-constraint multipliers; LE multipliers >= -eps
    objective_value: float
    primal_residual: float
    dual_residual: float
    gap: float
    status: SolveStatus
    iterations: int = 0


_SVEC_CACHE: dict = {}


def _svec_idx(d: int):
    if d not in _SVEC_CACHE:
        iu = np.triu_indices(d)
        scale = np.where(iu[0] == iu[1], 1.0, np.sqrt(2.0))
        _SVEC_CACHE[d] = (iu, scale)
    return _SVEC_CACHE[d]


def svec(M: np.ndarray, d: int) -> np.ndarray:
    iu, scale = _svec_idx(d)
    return M[iu] * scale


def smat(v: np.ndarray, d: int) -> np.ndarray:
    iu, scale = _svec_idx(d)
    M = np.zeros((d, d))
    M[iu] = v / scale
    return M + np.triu(M, 1).T


def _project_psd(M: np.ndarray) -> np.ndarray:
    w, V = np.linalg.eigh(M)
    w = np.clip(w, 0.0, None)
    return (V * w) @ V.T


def solve(
    prog: ConicProgram,
    eps: float = DEFAULT_EPS,
    max_iter: int = DEFAULT_MAX_ITER,
) -> SdpSolution:
    """Solve min <C,Z> s.t. constraints, Z PSD (Z diagonal-nonneg in LP mode)."""
    if eps <= 0:
        raise ValueError("eps must be positive")
    d = prog.dim
    cons = list(prog.constraints)
    if prog.trace_normalization is not None:
        cons.append(Constraint(np.eye(d), "EQ", prog.trace_normalization))

    if prog.diagonal_only:
        nz = d

        def to_vec(M):
            return np.diag(M).astype(float).copy()

        def cone_proj_z(v):
            return np.clip(v, 0.0, None)

    else:
        nz = d * (d + 1) // 2

        def to_vec(M):
            return svec(M, d)

        def cone_proj_z(v):
            return svec(_project_psd(smat(v, d)), d)

    le_idx = [k for k, con in enumerate(cons) if con.sense == "LE"]
    p = len(le_idx)
    ncon = len(cons)
    nvar = nz + p

    # Rows of the affine system: <M_k, Z> (+ s_j for LE rows) = rhs_k.
    A = np.zeros((ncon, nvar))
    rhs = np.zeros(ncon)
    for k, con in enumerate(cons):
        A[k, :nz] = to_vec(con.matrix)
        rhs[k] = con.rhs
    for j, k in enumerate(le_idx):
        A[k, nz + j] = 1.0

    c = np.zeros(nvar)
    c[:nz] = to_vec(prog.objective_matrix)

    if ncon == 0:
        # No affine rows: the cone projection of -c/rho decides everything.
        Z = np.zeros((d, d))
        val = 0.0
        return SdpSolution(
            Z=Z, y=np.zeros(0), objective_value=val,
            primal_residual=0.0, dual_residual=0.0, gap=0.0,
            status=SolveStatus.OPTIMAL, iterations=0,
        )

    gram = A @ A.T
    # Tiny ridge keeps redundant rows (duplicated constraints) solvable.
    gram += 1e-12 * max(1.0, np.trace(gram) / ncon) * np.eye(ncon)
    chol = scipy.linalg.cho_factor(gram)

    scale_b = max(1.0, float(np.linalg.norm(rhs)))
    scale_c = max(1.0, float(np.linalg.norm(c)))

    rho = 1.0
    x = np.zeros(nvar)
    v = np.zeros(nvar)
    u = np.zeros(nvar)
    mu = np.zeros(ncon)

    def cone_proj(t):
        out = np.empty_like(t)
        out[:nz] = cone_proj_z(t[:nz])
        out[nz:] = np.clip(t[nz:], 0.0, None)
        return out

    pri = dua = np.inf
    it = 0
    for it in range(1, max_iter + 1):
        w = v - u - c / rho
        mu = scipy.linalg.cho_solve(chol, rhs - A @ w)
        x = w + A.T @ mu
        x_r = OVER_RELAXATION * x + (1.0 - OVER_RELAXATION) * v
        v_prev = v
        v = cone_proj(x_r + u)
        u = u + x_r - v

        if it % 25 == 0 or it == max_iter:
            pri = float(np.linalg.norm(A @ v - rhs)) / scale_b
            dua = rho * float(np.linalg.norm(v - v_prev)) / scale_c
            gap_now = abs(float(c @ v) - float(rhs @ (rho * mu))) / max(
                1.0, abs(float(c @ v))
            )
            if pri <= eps and dua <= eps and gap_now <= max(eps, 1e-7) * 10:
                break
        if it % PENALTY_CHECK_EVERY == 0:
            if pri > PENALTY_RATIO * dua and np.isfinite(pri):
                rho *= 2.0
                u /= 2.0
            elif dua > PENALTY_RATIO * pri and np.isfinite(dua):
                rho /= 2.0
                u *= 2.0

    y_eq = rho * mu  # multipliers of the affine rows (max b^T y convention)
    # Reported per-constraint multipliers follow the aggregation convention
    # C + sum(lambda_k M_k) PSD, i.e. lambda = -y; LE multipliers come out >= 0.
    lam = -y_eq
    Z = smat(v[:nz], d) if not prog.diagonal_only else np.diag(v[:nz])
    obj = float(np.sum(to_vec(prog.objective_matrix) * v[:nz]))
    dual_obj = float(rhs @ y_eq)
    gap = abs(obj - dual_obj) / max(1.0, abs(obj), abs(dual_obj))

    if pri <= eps and dua <= eps:
        status = SolveStatus.OPTIMAL
    elif float(np.linalg.norm(v)) > 1e8:
        status = SolveStatus.UNBOUNDED_LIKELY
    elif pri > 1e-3:
        status = SolveStatus.INFEASIBLE_LIKELY
    else:
        status = SolveStatus.MAX_ITER

    return SdpSolution(
        Z=Z,
        y=lam,
        objective_value=obj,
        primal_residual=pri,
        dual_residual=dua,
        gap=gap,
        status=status,
        iterations=it,
    )


# ---------------------------------------------------------------------------
# QCQP relaxation front ends
# ---------------------------------------------------------------------------


def relaxation_program(inst) -> ConicProgram:
    """Lifted program: Z in S^{n+1}, <M_i,Z> <= 0 / = 0, Z[n,n] = 1, Z PSD."""
    from . import model

    n = inst.n
    mats, M_obj = model.homogenize(inst)
    cons = [Constraint(M, sense, 0.0) for M, sense in mats]
    corner = np.zeros((n + 1, n + 1))
    corner[n, n] = 1.0
    cons.append(Constraint(corner, "EQ", 1.0))
    return ConicProgram(dim=n + 1, objective_matrix=M_obj, constraints=tuple(cons))


def solve_opt_sdp(inst, eps: float = DEFAULT_EPS, max_iter: int = DEFAULT_MAX_ITER):
    """Optimal value of the lifted relaxation; returns (value, Z, solution)."""
    sol = solve(relaxation_program(inst), eps=eps, max_iter=max_iter)
    return sol.objective_value, sol.Z, sol


def dsdp_membership(inst, x, t, tol: float = 1e-6, max_iter: int = DEFAULT_MAX_ITER) -> bool:
    """Whether (x, t) belongs to the projected feasible region of the relaxation.

    Solves a feasibility program with the last row/column of Z pinned to
    (x, 1) and the objective row relaxed to <M_obj, Z> <= t.
    """
    from . import model

    x = np.asarray(x, dtype=float).reshape(-1)
    n = inst.n
    mats, M_obj = model.homogenize(inst)
    cons = [Constraint(M, sense, 0.0) for M, sense in mats]
    cons.append(Constraint(M_obj, "LE", float(t)))
    for j in range(n):
        E = np.zeros((n + 1, n + 1))
        E[j, n] = 0.5
        E[n, j] = 0.5
        cons.append(Constraint(E, "EQ", float(x[j])))
    corner = np.zeros((n + 1, n + 1))
    corner[n, n] = 1.0
    cons.append(Constraint(corner, "EQ", 1.0))
    # Bounded surrogate objective: minimize tr Z to keep iterates tame.
    prog = ConicProgram(dim=n + 1, objective_matrix=np.eye(n + 1), constraints=tuple(cons))
    sol = solve(prog, eps=max(tol / 10, 1e-9), max_iter=max_iter)
    if sol.status in (SolveStatus.OPTIMAL, SolveStatus.MAX_ITER):
        return sol.primal_residual <= tol
    return False


def extract_rank_one(Z, Mset=(), tol: float = 1e-5):
    """Attempt to read a rank-one representative off an optimal Z.

    Returns z with Z ~ z z^T when the second singular value is negligible.
    For a single LMI, falls back to a two-term splitting: rotate within the
    top-2 eigenspace so the leading rank-one piece satisfies the LMI.
    """
    Z = linalg.sym(Z)
    spec = linalg.eig_sym(Z)
    w = spec.eigenvalues[::-1]
    V = spec.eigenvectors[:, ::-1]
    if w[0] <= 0:
        return None
    if Z.shape[0] == 1 or w[1] / w[0] <= tol:
        return np.sqrt(max(w[0], 0.0)) * V[:, 0]
    Mlist = [linalg.sym(M) for M in Mset]
    if len(Mlist) == 1 and w[1] > 0:
        M = Mlist[0]
        a = np.sqrt(w[0]) * V[:, 0]
        b = np.sqrt(w[1]) * V[:, 1]
        # z(theta) = cos(theta) a + sin(theta) b; find theta with z^T M z = 0
        # scaled to the sign of <M, Z>: solve the scalar quadratic in tan(theta).
        qa = float(a @ M @ a)
        qb = float(b @ M @ b)
        qab = float(a @ M @ b)
        target = float(np.sum(M * Z))
        # want z^T M z <= tol (mirrors the LE sense of the LMI)
        if qa <= tol * max(1.0, abs(target)):
            return a
        if qb <= tol * max(1.0, abs(target)):
            return b
        # qa > 0 and qb > 0: no rotation helps unless qab bridges a sign change
        disc = qab * qab - qa * qb
        if disc >= 0:
            root = (-qab + np.sqrt(disc)) / qa
            z = root * a + b
            if float(z @ M @ z) <= tol * max(1.0, np.linalg.norm(z) ** 2):
                return z
    return None
