"""Rank-one-generated analysis of PSD cone slices cut by homogeneous LMIs.

A set {Z PSD : <M,Z> <= 0 for M in Mset} is rank-one generated (ROG) when it
equals the convex hull of its rank-one members.  For one or two LMIs the
property is decidable with small certificates; for larger sets only
sufficient rules and sampled refutation evidence are attempted.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import linalg, solver

ANGLE_TOL = 1e-8  # on |cos| for "same direction"
RESULTANT_TOL = 1e-9
PD_WITNESS_TOL = 1e-6


class ConstructionFailed(RuntimeError):
    pass


class DecompositionImpossible(ValueError):
    pass


@dataclass(frozen=True)
class LmiSet:
    matrices: tuple
    senses: tuple  # per matrix, "LE" or "EQ"

    def __post_init__(self):
        mats = tuple(linalg.sym(M) for M in self.matrices)
        object.__setattr__(self, "matrices", mats)
        senses = tuple(self.senses)
        if len(senses) != len(mats):
            raise ValueError("senses length mismatch")
        if any(s not in ("LE", "EQ") for s in senses):
            raise ValueError("senses must be LE or EQ")
        object.__setattr__(self, "senses", senses)

    @property
    def dim(self) -> int:
        return self.matrices[0].shape[0] if self.matrices else 0

    def expanded(self) -> list:
        """Inequality-only view: EQ members contribute +M and -M."""
        out = []
        for M, s in zip(self.matrices, self.senses):
            out.append(M)
            if s == "EQ":
                out.append(-M)
        return out


@dataclass
class RogVerdict:
    status: str  # ROG_CERTIFIED | NOT_ROG_CERTIFIED | ROG_BY_SUFFICIENT_RULE | UNDECIDED
    certificate: dict = field(default_factory=dict)
    seed: int = 0
    diagnostics: dict = field(default_factory=dict)


def _unit(v):
    n = float(np.linalg.norm(v))
    return v / n if n > 0 else v


def _same_direction(u, v, tol=ANGLE_TOL) -> bool:
    nu, nv = np.linalg.norm(u), np.linalg.norm(v)
    if nu == 0 or nv == 0:
        return False
    return abs(float(u @ v) / (nu * nv)) >= 1.0 - tol


def envelope_member(z, Z, mset: LmiSet, tol: float = 1e-8) -> bool:
    """Whether z^T M z is pinched between <M,Z> and 0 for every member."""
    z = np.asarray(z, dtype=float).reshape(-1)
    Z = linalg.sym(Z)
    for M in mset.expanded():
        val = float(z @ M @ z)
        inner = float(np.sum(M * Z))
        lo, hi = min(inner, 0.0), max(inner, 0.0)
        # LE members have <M,Z> <= 0, so the band is [<M,Z>, 0]
        if not (lo - tol <= val <= hi + tol):
            return False
    return True


def decompose_rank2_indefinite(M):
    """Split M = Sym(a b^T) when M has rank <= 2 and is not definite.

    Returns (eta, a, b) with eta = 1 and M = Sym(a b^T); raises
    DecompositionImpossible for rank > 2 or a definite rank-2 matrix.
    """
    M = linalg.sym(M)
    r = linalg.rank_eps(M)
    if r > 2:
        raise DecompositionImpossible("rank exceeds 2")
    if r == 0:
        raise DecompositionImpossible("zero matrix")
    spec = linalg.eig_sym(M)
    w, V = spec.eigenvalues, spec.eigenvectors
    scale = float(np.max(np.abs(w)))
    cut = linalg.RANK_TOL * max(1.0, scale)
    pos = [k for k in range(len(w)) if w[k] > cut]
    neg = [k for k in range(len(w)) if w[k] < -cut]
    if r == 1:
        if pos:
            a = np.sqrt(w[pos[0]]) * V[:, pos[0]]
            return 1.0, a, a.copy()
        a = np.sqrt(-w[neg[0]]) * V[:, neg[0]]
        return 1.0, a, -a
    if len(pos) != 1 or len(neg) != 1:
        raise DecompositionImpossible("rank-2 matrix is definite")
    vp = np.sqrt(w[pos[0]]) * V[:, pos[0]]
    vm = np.sqrt(-w[neg[0]]) * V[:, neg[0]]
    return 1.0, vp + vm, vp - vm


def _linear_dependence(M1, M2, tol=1e-9):
    """kappa with M2 ~ kappa*M1, or None."""
    n1 = float(np.linalg.norm(M1))
    n2 = float(np.linalg.norm(M2))
    if n2 <= tol * max(1.0, n1):
        return 0.0
    if n1 <= tol * max(1.0, n2):
        return None  # M1 ~ 0, M2 not: dependence the other way; caller swaps
    kappa = float(np.sum(M1 * M2)) / (n1 * n1)
    if np.linalg.norm(M2 - kappa * M1) <= tol * max(n1, n2):
        return kappa
    return None


def gordan_stiemke(M1, M2, eps: float = 1e-7, max_iter: int = 20000):
    """Decide whether some nonzero combination of M1, M2 is PSD.

    Returns one of
      ("psd_combo", alpha)  -- condition (i) holds, ||alpha||_inf = 1
      ("pd_witness", Z)     -- condition (i) fails; Z PD with <M_i, Z> = 0
      ("undecided", diag)
    assuming {M1, M2} linearly independent (caller handles dependence).

    The search runs the normalized program max tau over {Y PSD, tau >= 0,
    <M_i, Y> + tau tr(M_i) = 0, tr Y + tau d = 1}; a positive optimum yields
    the definite witness Z = Y + tau I, while at optimum ~0 the equality
    multipliers aggregate the M_i into a PSD combination.
    """
    M1 = linalg.sym(M1)
    M2 = linalg.sym(M2)
    d = M1.shape[0]
    scale = max(1.0, np.linalg.norm(M1, 2), np.linalg.norm(M2, 2))

    def blk(M, extra):
        W = np.zeros((d + 1, d + 1))
        W[:d, :d] = M
        W[d, d] = extra
        return W

    C = blk(np.zeros((d, d)), -1.0)
    cons = (
        solver.Constraint(blk(M1, float(np.trace(M1))), "EQ", 0.0),
        solver.Constraint(blk(M2, float(np.trace(M2))), "EQ", 0.0),
        solver.Constraint(blk(np.eye(d), float(d)), "EQ", 1.0),
    )
    prog = solver.ConicProgram(dim=d + 1, objective_matrix=C, constraints=cons)
    sol = solver.solve(prog, eps=eps, max_iter=max_iter)
    tau = float(sol.Z[d, d])
    if tau > PD_WITNESS_TOL:
        Z = _polish_pd_witness(M1, M2, sol.Z[:d, :d] + tau * np.eye(d))
        if Z is not None:
            return "pd_witness", Z
    # dual recovery: C + lam_1 B_1 + lam_2 B_2 + lam_3 I_blk PSD implies
    # lam_1 M1 + lam_2 M2 >= -lam_3 I with lam_3 ~ -tau* ~ 0
    alpha = np.array([sol.y[0], sol.y[1]]) if len(sol.y) >= 2 else np.zeros(2)
    alpha = _verify_alpha(M1, M2, alpha)
    if alpha is not None:
        return "psd_combo", alpha
    # fallback: angular scan of the smallest eigenvalue over directions
    alpha = _angular_scan(M1, M2)
    if alpha is not None:
        return "psd_combo", alpha
    # last resort for slow boundary convergence: one long resolve
    sol = solver.solve(prog, eps=eps, max_iter=10 * max_iter)
    tau = float(sol.Z[d, d])
    if tau > PD_WITNESS_TOL:
        Z = _polish_pd_witness(M1, M2, sol.Z[:d, :d] + tau * np.eye(d))
        if Z is not None:
            return "pd_witness", Z
    alpha = _verify_alpha(M1, M2, np.array(sol.y[:2]))
    if alpha is not None:
        return "psd_combo", alpha
    return "undecided", {"tau": tau, "status": sol.status.name}


def _polish_pd_witness(M1, M2, Z):
    """Remove the span{M1, M2} component of Z, then verify it stays PD."""
    Z = 0.5 * (Z + Z.T)
    G = np.array([
        [float(np.sum(M1 * M1)), float(np.sum(M1 * M2))],
        [float(np.sum(M2 * M1)), float(np.sum(M2 * M2))],
    ])
    rhs = np.array([float(np.sum(M1 * Z)), float(np.sum(M2 * Z))])
    try:
        coef = np.linalg.solve(G, rhs)
    except np.linalg.LinAlgError:
        coef, *_ = np.linalg.lstsq(G, rhs, rcond=None)
    Zc = Z - coef[0] * M1 - coef[1] * M2
    Zc = 0.5 * (Zc + Zc.T)
    spec = linalg.eig_sym(Zc)
    scale = max(1.0, np.linalg.norm(M1, 2), np.linalg.norm(M2, 2))
    if spec.eigenvalues[0] > 1e-7 and all(
        abs(float(np.sum(M * Zc))) <= 1e-7 * scale * max(1.0, np.linalg.norm(Zc))
        for M in (M1, M2)
    ):
        return Zc
    return None


def _verify_alpha(M1, M2, alpha, tol=1e-7):
    alpha = np.asarray(alpha, dtype=float)
    nrm = float(np.max(np.abs(alpha)))
    if nrm <= 1e-9:
        return None
    alpha = alpha / nrm
    combo = alpha[0] * M1 + alpha[1] * M2
    scale = max(1.0, np.linalg.norm(M1, 2), np.linalg.norm(M2, 2))
    w = linalg.eig_sym(combo).eigenvalues
    if w[0] >= -tol * scale:
        return alpha
    return None


def _angular_scan(M1, M2, grid: int = 4000):
    thetas = np.linspace(0.0, 2.0 * np.pi, grid, endpoint=False)
    scale = max(1.0, np.linalg.norm(M1, 2), np.linalg.norm(M2, 2))

    def lmin(th):
        return float(
            np.linalg.eigvalsh(np.cos(th) * M1 + np.sin(th) * M2)[0]
        )

    vals = np.array([lmin(th) for th in thetas])
    k = int(np.argmax(vals))
    lo = thetas[k] - 2.0 * np.pi / grid
    hi = thetas[k] + 2.0 * np.pi / grid
    # golden-section refinement of the (concave near max) profile
    gr = (np.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - gr * (b - a)
    e = a + gr * (b - a)
    for _ in range(200):
        if lmin(c) > lmin(e):
            b = e
        else:
            a = c
        c = b - gr * (b - a)
        e = a + gr * (b - a)
    th = 0.5 * (a + b)
    if lmin(th) >= -1e-9 * scale:
        return _verify_alpha(M1, M2, np.array([np.cos(th), np.sin(th)]), tol=1e-7)
    return None


def _joint_range_dim(M1, M2) -> int:
    stacked = np.hstack([M1, M2])
    return int(np.linalg.matrix_rank(stacked, tol=1e-9 * max(1.0, np.linalg.norm(stacked, 2))))


def _try_common_factor(M1, M2):
    """Common-direction search over the rank-2 splittings of both matrices."""
    try:
        _, a1, b1 = decompose_rank2_indefinite(M1)
        _, a2, b2 = decompose_rank2_indefinite(M2)
    except DecompositionImpossible:
        return None
    for c1, o1 in ((a1, b1), (b1, a1)):
        for c2, o2 in ((a2, b2), (b2, a2)):
            if _same_direction(c1, c2):
                c = _unit(c1)
                # rescale the co-factors so M_i = Sym(a c^T) exactly
                a = o1 * float(np.linalg.norm(c1))
                sign2 = 1.0 if float(c2 @ c1) > 0 else -1.0
                b = o2 * float(np.linalg.norm(c2)) * sign2
                r1 = np.linalg.norm(M1 - 0.5 * (np.outer(a, c) + np.outer(c, a)))
                r2 = np.linalg.norm(M2 - 0.5 * (np.outer(b, c) + np.outer(c, b)))
                if r1 <= 1e-7 * max(1.0, np.linalg.norm(M1)) and r2 <= 1e-7 * max(
                    1.0, np.linalg.norm(M2)
                ):
                    return {"a": a, "b": b, "c": c,
                            "residuals": [float(r1), float(r2)]}
    return None


def _rank_refutation(M1, M2, seed: int = 0, draws: int = 100):
    rng = np.random.default_rng(seed)
    for _ in range(draws):
        al = rng.standard_normal(2)
        combo = al[0] * M1 + al[1] * M2
        if linalg.rank_eps(combo) >= 3:
            return {"alpha": al, "rank": linalg.rank_eps(combo)}
    return None


def check_pair(M1, M2, seed: int = 0, eps: float = 1e-7,
               max_iter: int = 20000) -> RogVerdict:
    """Complete two-LMI ROG decision with a machine-checkable certificate."""
    M1 = linalg.sym(M1)
    M2 = linalg.sym(M2)
    if M1.shape != M2.shape:
        raise ValueError("dimension mismatch")

    # (a) linear dependence: a single LMI is always ROG
    kappa = _linear_dependence(M1, M2)
    if kappa is not None:
        alpha = _verify_alpha(M1, M2, np.array([kappa, -1.0]))
        if alpha is None:
            alpha = np.array([1.0, 0.0]) if kappa == 0.0 else np.array([kappa, -1.0]) / max(1.0, abs(kappa))
        return RogVerdict(
            status="ROG_CERTIFIED", seed=seed,
            certificate={"kind": "AggregationWeights", "alpha": alpha,
                         "note": "linearly dependent pair"},
        )
    if _linear_dependence(M2, M1) is not None:
        return RogVerdict(
            status="ROG_CERTIFIED", seed=seed,
            certificate={"kind": "AggregationWeights", "alpha": np.array([1.0, 0.0]),
                         "note": "first matrix numerically zero"},
        )

    # (b) condition (i): some nonzero combination PSD.  Two cheap routes
    # decide almost all generic pairs; the normalized SDP handles boundary
    # cases.
    alpha = _angular_scan(M1, M2)
    if alpha is not None:
        return RogVerdict(
            status="ROG_CERTIFIED", seed=seed,
            certificate={"kind": "AggregationWeights", "alpha": alpha},
        )
    Zq = _polish_pd_witness(M1, M2, np.eye(M1.shape[0]))
    if Zq is not None:
        outcome, payload = "pd_witness", Zq
    else:
        outcome, payload = gordan_stiemke(M1, M2, eps=eps, max_iter=max_iter)
    if outcome == "psd_combo":
        return RogVerdict(
            status="ROG_CERTIFIED", seed=seed,
            certificate={"kind": "AggregationWeights", "alpha": payload},
        )
    if outcome == "undecided":
        return RogVerdict(status="UNDECIDED", seed=seed, diagnostics=payload)
    Zpd = payload

    span_dim = _joint_range_dim(M1, M2)
    # (c) condition (ii): shared factor across rank-2 splittings
    common = _try_common_factor(M1, M2)
    if common is not None and span_dim == 3:
        return RogVerdict(
            status="ROG_CERTIFIED", seed=seed,
            certificate={"kind": "CommonFactor", **common},
        )

    # (d) neither condition: not ROG
    cert = {"kind": "PdWitness", "Z": Zpd, "span_dim": span_dim}
    ref = _rank_refutation(M1, M2, seed=seed)
    if ref is not None:
        cert["rank_refutation"] = ref
    else:
        try:
            _, a1, b1 = decompose_rank2_indefinite(M1)
            _, a2, b2 = decompose_rank2_indefinite(M2)
            cert["distinct_factors"] = {
                "a1": a1, "b1": b1, "a2": a2, "b2": b2,
                "note": "no pairing of factors shares a direction",
            }
        except DecompositionImpossible as exc:
            cert["distinct_factors_note"] = str(exc)
    return RogVerdict(status="NOT_ROG_CERTIFIED", seed=seed, certificate=cert)


def verify_certificate(verdict: RogVerdict, M1, M2) -> bool:
    """Independent re-verification of a pair verdict's certificate."""
    M1 = linalg.sym(M1)
    M2 = linalg.sym(M2)
    scale = max(1.0, np.linalg.norm(M1, 2), np.linalg.norm(M2, 2))
    cert = verdict.certificate
    kind = cert.get("kind")
    if verdict.status == "ROG_CERTIFIED" and kind == "AggregationWeights":
        alpha = np.asarray(cert["alpha"], dtype=float)
        if abs(float(np.max(np.abs(alpha))) - 1.0) > 1e-6 and float(np.max(np.abs(alpha))) <= 1e-9:
            return False
        combo = alpha[0] * M1 + alpha[1] * M2
        w = linalg.eig_sym(combo).eigenvalues
        return bool(w[0] >= -1e-7 * max(1.0, np.linalg.norm(combo, 2), 1.0))
    if verdict.status == "ROG_CERTIFIED" and kind == "CommonFactor":
        a, b, c = (np.asarray(cert[k], dtype=float) for k in ("a", "b", "c"))
        r1 = np.linalg.norm(M1 - 0.5 * (np.outer(a, c) + np.outer(c, a)))
        r2 = np.linalg.norm(M2 - 0.5 * (np.outer(b, c) + np.outer(c, b)))
        return r1 <= 1e-7 * max(1.0, np.linalg.norm(M1)) and r2 <= 1e-7 * max(
            1.0, np.linalg.norm(M2))
    if verdict.status == "NOT_ROG_CERTIFIED" and kind == "PdWitness":
        Z = linalg.sym(cert["Z"])
        if linalg.eig_sym(Z).eigenvalues[0] <= 1e-7:
            return False
        if any(abs(float(np.sum(M * Z))) > 1e-6 * scale * max(1.0, np.linalg.norm(Z))
               for M in (M1, M2)):
            return False
        ref = cert.get("rank_refutation")
        if ref is not None:
            al = np.asarray(ref["alpha"], dtype=float)
            return linalg.rank_eps(al[0] * M1 + al[1] * M2) >= 3
        df = cert.get("distinct_factors")
        if df is not None:
            for u in (df["a1"], df["b1"]):
                for v in (df["a2"], df["b2"]):
                    if _same_direction(u, v):
                        return False
            return True
        # span dim != 3: condition (i) alone decides
        return cert.get("span_dim") != 3
    return False


# ---------------------------------------------------------------------------
# 3x3 zero-set lines and rank-two extreme-ray witnesses
# ---------------------------------------------------------------------------


def _binary_form_mul(p, q):
    return np.convolve(p, q)


def _quartic_from_pair(M1, M2):
    """Coefficients (in z1^4 ... z2^4) of the z3-resultant of the two conics."""
    def parts(M):
        a = M[2, 2]
        b = np.array([2.0 * M[0, 2], 2.0 * M[1, 2]])  # linear in (z1, z2)
        c = np.array([M[0, 0], 2.0 * M[0, 1], M[1, 1]])  # quadratic
        return a, b, c

    a1, b1, c1 = parts(M1)
    a2, b2, c2 = parts(M2)
    t1 = _binary_form_mul(a1 * c2 - a2 * c1, a1 * c2 - a2 * c1)
    t2 = _binary_form_mul(a1 * b2 - a2 * b1, _binary_form_mul(b1, c2) - _binary_form_mul(b2, c1))
    return t1 - t2


def null_set_lines_3d(M1, M2, seed: int = 0, check_preconditions: bool = True):
    """Unit directions spanning the common zero lines of two 3x3 forms.

    Eliminates z3 via the resultant of the two conics (a degree-4 binary
    form in (z1, z2)), with seeded random rotations restoring genericity
    when leading coefficients vanish.  At most four lines exist when the
    pair admits neither a PSD combination nor a common factor.
    """
    M1 = linalg.sym(M1)
    M2 = linalg.sym(M2)
    if M1.shape[0] != 3:
        raise ValueError("dimension must be 3")
    if check_preconditions:
        if _linear_dependence(M1, M2) is not None or _linear_dependence(M2, M1) is not None:
            raise ValueError("pair is linearly dependent")
        outcome, _ = gordan_stiemke(M1, M2)
        if outcome == "psd_combo":
            raise ValueError("a PSD combination exists; zero set is not four lines")
        if _try_common_factor(M1, M2) is not None:
            raise ValueError("pair shares a common factor; zero set contains a plane")

    rng = np.random.default_rng(seed)
    scale = max(np.linalg.norm(M1), np.linalg.norm(M2), 1.0)
    R = np.eye(3)
    for attempt in range(6):
        A1 = R @ M1 @ R.T
        A2 = R @ M2 @ R.T
        if min(abs(A1[2, 2]), abs(A2[2, 2])) > 1e-6 * scale:
            quartic = _quartic_from_pair(A1, A2)
            if np.max(np.abs(quartic)) > 1e-10 * scale**2:
                break
        q, _ = np.linalg.qr(rng.standard_normal((3, 3)))
        R = q
    else:
        raise ConstructionFailed("could not reach a generic frame")

    directions = []

    def add(zp):
        nrm = np.linalg.norm(zp)
        if nrm < 1e-9:
            return
        z = R.T @ (zp / nrm)
        v1 = abs(float(z @ M1 @ z))
        v2 = abs(float(z @ M2 @ z))
        if max(v1, v2) > 1e-8 * scale:
            return
        for d0 in directions:
            if _same_direction(z, d0, tol=1e-7):
                return
        directions.append(z)

    def z3_roots(A, z1, z2):
        a = A[2, 2]
        b = 2.0 * (A[0, 2] * z1 + A[1, 2] * z2)
        c = A[0, 0] * z1**2 + 2.0 * A[0, 1] * z1 * z2 + A[1, 1] * z2**2
        disc = b * b - 4.0 * a * c
        if disc < -1e-9 * scale**2:
            return []
        disc = max(disc, 0.0)
        return [(-b + np.sqrt(disc)) / (2.0 * a), (-b - np.sqrt(disc)) / (2.0 * a)]

    # chart z1 = 1: roots of the quartic in s = z2/z1
    coeffs = _quartic_from_pair(A1, A2)  # ordered z1^4 ... z2^4
    poly = coeffs[::-1] if False else coeffs
    # numpy wants highest power of s first; quartic(s) = sum coeffs[k] s^k? build:
    # form = sum_k coeffs[k] z1^{4-k} z2^k  ->  s-poly coeffs highest-first:
    spoly = coeffs[::-1]
    lead_scale = np.max(np.abs(spoly))
    roots = np.roots(spoly) if lead_scale > 0 else []
    for r in roots:
        if abs(np.imag(r)) > 1e-7 * max(1.0, abs(r)):
            continue
        s = float(np.real(r))
        for z3 in z3_roots(A1, 1.0, s):
            zp = np.array([1.0, s, z3])
            if abs(zp @ A2 @ zp) <= 1e-6 * scale * float(zp @ zp):
                # polish with a couple of Newton steps on (Q1, Q2)
                zp = _polish_null_direction(A1, A2, zp)
                add(zp)
    # chart z1 = 0: binary forms in (z2, z3)
    q1 = (A1[1, 1], 2.0 * A1[1, 2], A1[2, 2])
    q2 = (A2[1, 1], 2.0 * A2[1, 2], A2[2, 2])
    if abs(linalg.binary_quadratic_resultant(q1, q2)) <= 1e-9 * scale**4:
        for z3 in z3_roots(A1, 0.0, 1.0):
            zp = np.array([0.0, 1.0, z3])
            if abs(zp @ A2 @ zp) <= 1e-6 * scale * float(zp @ zp):
                add(_polish_null_direction(A1, A2, zp))
    return directions


def _polish_null_direction(A1, A2, z, iters: int = 20):
    z = z.astype(float).copy()
    for _ in range(iters):
        f = np.array([float(z @ A1 @ z), float(z @ A2 @ z)])
        if np.max(np.abs(f)) < 1e-14 * max(1.0, float(z @ z)):
            break
        J = np.vstack([2.0 * (A1 @ z), 2.0 * (A2 @ z)])
        step, *_ = np.linalg.lstsq(J, -f, rcond=None)
        z = z + step
    return z


def construct_rank2_witness_3d(M1, M2, seed: int = 0):
    """Rank-two extreme-ray witness for a 3x3 pair failing both conditions.

    Picks a seeded direction w off the zero-line pair planes, then matches
    u with (u^T M_i u) = -(w^T M_i w) by damped Newton (the joint range of
    two quadratic forms is convex, so a solution exists), and returns
    Z = w w^T + u u^T after extreme-ray verification.
    """
    M1 = linalg.sym(M1)
    M2 = linalg.sym(M2)
    lines = null_set_lines_3d(M1, M2, seed=seed, check_preconditions=False)
    rng = np.random.default_rng(seed)
    normals = []
    for i in range(len(lines)):
        for j in range(i + 1, len(lines)):
            nrm = np.cross(lines[i], lines[j])
            if np.linalg.norm(nrm) > 1e-9:
                normals.append(_unit(nrm))

    scale = max(np.linalg.norm(M1), np.linalg.norm(M2), 1.0)
    for attempt in range(200):
        w = _unit(rng.standard_normal(3))
        # reject w inside any plane spanned by a pair of zero lines
        if any(abs(float(w @ nrm)) < 1e-3 for nrm in normals):
            continue
        target = -np.array([float(w @ M1 @ w), float(w @ M2 @ w)])
        u = _dines_match(M1, M2, target, rng)
        if u is None:
            continue
        Z = np.outer(w, w) + np.outer(u, u)
        ok, res_val = verify_extreme_rank2(Z, M1, M2)
        if ok:
            return {"Z": Z, "w": w, "u": u, "resultant": res_val, "seed": seed,
                    "attempt": attempt}
    raise ConstructionFailed("witness construction budget exhausted")


def _dines_match(M1, M2, target, rng, starts: int = 40, iters: int = 100):
    """Solve (u^T M1 u, u^T M2 u) = target by damped least-squares Newton."""
    scale = max(1.0, float(np.linalg.norm(target)))
    for _ in range(starts):
        u = rng.standard_normal(3)
        for _ in range(iters):
            f = np.array([float(u @ M1 @ u), float(u @ M2 @ u)]) - target
            if float(np.linalg.norm(f)) <= 1e-10 * scale:
                return u
            J = np.vstack([2.0 * (M1 @ u), 2.0 * (M2 @ u)])
            step, *_ = np.linalg.lstsq(J, -f, rcond=None)
            nstep = float(np.linalg.norm(step))
            if nstep > 2.0 * max(1.0, float(np.linalg.norm(u))):
                step *= 2.0 * max(1.0, float(np.linalg.norm(u))) / nstep
            u = u + step
        f = np.array([float(u @ M1 @ u), float(u @ M2 @ u)]) - target
        if float(np.linalg.norm(f)) <= 1e-10 * scale:
            return u
    return None


def verify_extreme_rank2(Z, M1, M2):
    """Certify that Z spans a rank-two extreme ray of the two-LME slice.

    Checks rank 2, both inner products ~0, and a nonzero resultant of the
    two forms restricted to range(Z) (no rank-one feasible direction inside
    the range).  Returns (bool, resultant value).
    """
    Z = linalg.sym(Z)
    M1 = linalg.sym(M1)
    M2 = linalg.sym(M2)
    scale = max(1.0, np.linalg.norm(M1, 2), np.linalg.norm(M2, 2)) * max(
        1.0, float(np.linalg.norm(Z, 2)))
    if linalg.rank_eps(Z) != 2:
        return False, 0.0
    for M in (M1, M2):
        if abs(float(np.sum(M * Z))) > 1e-7 * scale:
            return False, 0.0
    spec = linalg.eig_sym(Z)
    p = spec.eigenvectors[:, -1]
    q = spec.eigenvectors[:, -2]
    q1 = (float(p @ M1 @ p), 2.0 * float(p @ M1 @ q), float(q @ M1 @ q))
    q2 = (float(p @ M2 @ p), 2.0 * float(p @ M2 @ q), float(q @ M2 @ q))
    res = linalg.binary_quadratic_resultant(q1, q2)
    return abs(res) > RESULTANT_TOL, res


# ---------------------------------------------------------------------------
# Larger families: sufficient rules and probe evidence
# ---------------------------------------------------------------------------


def check_pairwise_sufficient(mset: LmiSet) -> RogVerdict:
    """Every distinct pair admitting a PSD combination is sufficient for ROG."""
    mats = mset.expanded()
    weights = []
    for i in range(len(mats)):
        for j in range(i + 1, len(mats)):
            kappa = _linear_dependence(mats[i], mats[j])
            if kappa is not None or _linear_dependence(mats[j], mats[i]) is not None:
                weights.append(((i, j), "dependent"))
                continue
            outcome, payload = gordan_stiemke(mats[i], mats[j])
            if outcome != "psd_combo":
                return RogVerdict(status="UNDECIDED",
                                  diagnostics={"failing_pair": (i, j)})
            weights.append(((i, j), payload))
    return RogVerdict(status="ROG_BY_SUFFICIENT_RULE",
                      certificate={"kind": "PairwisePsd", "weights": weights})


def check_common_factor(mset: LmiSet) -> RogVerdict:
    """All members sharing one factor direction is sufficient for ROG."""
    mats = mset.expanded()
    if not mats:
        return RogVerdict(status="ROG_BY_SUFFICIENT_RULE",
                          certificate={"kind": "CommonFactor", "note": "empty set"})
    try:
        splits = [decompose_rank2_indefinite(M)[1:] for M in mats]
    except DecompositionImpossible:
        return RogVerdict(status="UNDECIDED",
                          diagnostics={"reason": "a member has rank > 2"})
    candidates = list(splits[0])
    for a, b in splits[1:]:
        candidates = [c for c in candidates
                      if _same_direction(c, a) or _same_direction(c, b)]
        if not candidates:
            return RogVerdict(status="UNDECIDED",
                              diagnostics={"reason": "no shared factor direction"})
    c = _unit(candidates[0])
    cofactors = []
    for (a, b), M in zip(splits, mats):
        other = b if _same_direction(c, a) else a
        shared = a if _same_direction(c, a) else b
        sgn = 1.0 if float(shared @ c) > 0 else -1.0
        cofactors.append(other * float(np.linalg.norm(shared)) * sgn)
    return RogVerdict(status="ROG_BY_SUFFICIENT_RULE",
                      certificate={"kind": "CommonFactor", "c": c,
                                   "cofactors": cofactors})


def build_cone_constraint_set(c, cone_generators) -> LmiSet:
    """LMIs enforcing Zc against a finitely generated cone: <Sym(-c k^T), Z> <= 0
    per generator k means k^T Z c >= 0."""
    c = np.asarray(c, dtype=float).reshape(-1)
    mats = []
    for k in cone_generators:
        k = np.asarray(k, dtype=float).reshape(-1)
        mats.append(-0.5 * (np.outer(c, k) + np.outer(k, c)))
    return LmiSet(matrices=tuple(mats), senses=("LE",) * len(mats))


def detect_soc_cap(mset: LmiSet) -> RogVerdict:
    """Structural rule: a common-factor family plus one capping LMI.

    Matches sets of the shape {Sym(-c k_j^T)} + {L} where L has exactly one
    negative eigenvalue and every co-factor k_j satisfies k_j^T L k_j <= 0;
    such caps of a rank-one-generated cone slice remain rank-one generated.
    """
    mats = list(mset.matrices)
    if len(mats) < 2 or any(s != "LE" for s in mset.senses):
        return RogVerdict(status="UNDECIDED", diagnostics={"reason": "shape mismatch"})
    for cap_idx in range(len(mats)):
        L = mats[cap_idx]
        w = linalg.eig_sym(L).eigenvalues
        scale = max(1.0, float(np.max(np.abs(w))))
        n_neg = int(np.sum(w < -1e-7 * scale))
        if n_neg != 1:
            continue
        rest = [m for k, m in enumerate(mats) if k != cap_idx]
        fam = check_common_factor(LmiSet(tuple(rest), ("LE",) * len(rest)))
        if fam.status != "ROG_BY_SUFFICIENT_RULE" or "c" not in fam.certificate:
            continue
        cofs = fam.certificate["cofactors"]
        if all(float(k @ L @ k) <= 1e-7 * scale * max(1.0, float(k @ k)) for k in cofs):
            return RogVerdict(
                status="ROG_BY_SUFFICIENT_RULE",
                certificate={"kind": "SocCap", "cap_index": cap_idx,
                             "c": fam.certificate["c"], "cofactors": cofs})
    return RogVerdict(status="UNDECIDED", diagnostics={"reason": "no cap structure"})


def restrict_to_joint_range(mset: LmiSet):
    """Project every member to the span of all ranges; verdicts transfer."""
    mats = list(mset.matrices)
    if not mats:
        return mset, np.zeros((0, 0))
    d = mats[0].shape[0]
    stacked = np.hstack(mats)
    U, s, _ = np.linalg.svd(stacked, full_matrices=False)
    rank = int(np.sum(s > 1e-9 * max(1.0, s[0] if s.size else 0.0)))
    B = U[:, :rank]
    reduced = tuple(B.T @ M @ B for M in mats)
    return LmiSet(reduced, mset.senses), B


def probe_random_objectives(mset: LmiSet, trials: int = 10, seed: int = 0,
                            gap_tol: float = 1e-3, samples: int = 200000,
                            eps: float = 1e-7, max_iter: int = 50000):
    """Sampled one-sided refutation: compare the slice optimum against the
    best feasible rank-one value for random objectives.  A gap beyond
    gap_tol is evidence against ROG; no gap never certifies ROG."""
    from . import oracles

    d = mset.dim
    if d > 4:
        raise ValueError("probe limited to dimension <= 4")
    rng = np.random.default_rng(seed)
    mats = mset.expanded()
    worst = -np.inf
    records = []
    for k in range(trials):
        G = rng.standard_normal((d, d))
        C = 0.5 * (G + G.T)
        cons = tuple(solver.Constraint(M, "LE", 0.0) for M in mats)
        prog = solver.ConicProgram(dim=d, objective_matrix=C, constraints=cons,
                                   trace_normalization=1.0)
        sol = solver.solve(prog, eps=eps, max_iter=max_iter)
        v_rank1, _ = oracles.sphere_min_rank_one(mats, C, seed=seed + 1000 + k,
                                                 samples=samples)
        gap = v_rank1 - sol.objective_value
        worst = max(worst, gap)
        records.append({"trial": k, "v_sdp": sol.objective_value,
                        "v_rank1": v_rank1, "gap": gap})
    return {"max_gap": worst, "flagged": bool(worst > gap_tol),
            "records": records, "seed": seed, "trials": trials}


def face_program(mset: LmiSet, subset) -> LmiSet:
    """Tighten the chosen members to equalities (a face of the slice)."""
    subset = set(subset)
    senses = tuple("EQ" if k in subset else s
                   for k, s in enumerate(mset.senses))
    return LmiSet(mset.matrices, senses)


def clconv_report(inst, verdict: RogVerdict):
    """Convex-hull consequence of an ROG relaxation slice.

    Searches the cone spanned by the homogenized objective and constraints
    for a combination whose leading block is definite: together with an ROG
    verdict, a definite block closes the hull (CLCONV_EQUALS_DSDP) and a
    semidefinite one closes it up to closure (CLCONV_EQUALS_CL_DSDP).
    """
    from . import model

    n = inst.n
    mats = [inst.objective.embed()]
    for q in inst.inequalities:
        mats.append(q.embed())
    for q in inst.equalities:
        mats.append(q.embed())
        mats.append(-q.embed())
    blocks = [M[:n, :n] for M in mats]
    t_star, theta = _max_min_eig_over_simplex(blocks)
    rog_ok = verdict.status in ("ROG_CERTIFIED", "ROG_BY_SUFFICIENT_RULE")
    if not rog_ok:
        return {"consequence": "NO_CONSEQUENCE", "t": t_star,
                "reason": "no rank-one-generated verdict"}
    if t_star > 1e-7:
        return {"consequence": "CLCONV_EQUALS_DSDP", "t": t_star, "theta": theta}
    if t_star > -1e-7:
        return {"consequence": "CLCONV_EQUALS_CL_DSDP", "t": t_star, "theta": theta}
    return {"consequence": "NO_CONSEQUENCE", "t": t_star}


def _max_min_eig_over_simplex(blocks):
    """max over simplex weights of lambda_min(sum theta_j A_j).

    Minimax dual: min over unit-trace PSD Z of max_j <A_j, Z>, solved with a
    shifted slack block so the scalar stays nonnegative.
    """
    d = blocks[0].shape[0]
    shift = max(float(np.linalg.norm(A, 2)) for A in blocks) + 1.0
    shifted = [A + shift * np.eye(d) for A in blocks]

    def blk(M, extra):
        W = np.zeros((d + 1, d + 1))
        W[:d, :d] = M
        W[d, d] = extra
        return W

    cons = [solver.Constraint(blk(A, -1.0), "LE", 0.0) for A in shifted]
    cons.append(solver.Constraint(blk(np.eye(d), 0.0), "EQ", 1.0))
    C = blk(np.zeros((d, d)), 1.0)
    prog = solver.ConicProgram(dim=d + 1, objective_matrix=C, constraints=tuple(cons))
    sol = solver.solve(prog)
    t_star = sol.objective_value - shift
    theta = np.clip(sol.y[: len(blocks)], 0.0, None)
    tot = float(np.sum(theta))
    theta = theta / tot if tot > 1e-12 else theta
    # polish: the dual weights maximize the smallest eigenvalue; verify
    combo = sum(th * A for th, A in zip(theta, blocks))
    if len(blocks) > 0 and tot > 1e-12:
        t_direct = float(np.linalg.eigvalsh(combo)[0])
        t_star = max(t_star, t_direct)
    return t_star, theta
