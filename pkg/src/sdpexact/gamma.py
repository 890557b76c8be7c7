"""Polyhedral analysis of the aggregation-multiplier cone.

The cone lives in R^{m+1} with coordinates (gamma_obj, gamma); membership
means gamma_obj >= 0, gamma_i >= 0 on inequality multipliers, and the
aggregated matrix gamma_obj*A_obj + A(gamma) is PSD.  For instances whose
quadratic terms are all diagonal the PSD condition reduces to n linear rows,
so the cone is polyhedral with an explicit H-representation; otherwise the
caller must supply a generator list and the analysis is relative to it.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import linalg, model

RAY_TOL = 1e-9
STRICT_TOL = 1e-7


class NotDiagonalError(ValueError):
    pass


class NotPointedError(ValueError):
    pass


@dataclass(frozen=True)
class HPolyCone:
    """H-representation {x : row . x >= 0 for each row} in R^{ambient}."""

    ambient: int
    rows: np.ndarray

    def __post_init__(self):
        rows = np.asarray(self.rows, dtype=float).reshape(-1, self.ambient)
        object.__setattr__(self, "rows", rows)

    def contains(self, x, tol: float = RAY_TOL) -> bool:
        x = np.asarray(x, dtype=float)
        scale = max(1.0, float(np.linalg.norm(x)))
        return bool(np.all(self.rows @ x >= -tol * scale))


@dataclass(frozen=True)
class FaceDescriptor:
    face_id: int
    active_rows: frozenset
    generator_indices: tuple
    classification: str  # "DEFINITE" | "SEMIDEFINITE"
    witness: np.ndarray | None  # point of the face with PD aggregate
    vf_basis: np.ndarray  # (n, k) orthonormal, k >= 1 when SEMIDEFINITE
    slice_vertices: tuple  # gamma with (1, gamma) in the face
    slice_rays: tuple  # recession gamma directions with gamma_obj = 0


@dataclass(frozen=True)
class GammaData:
    hrep: HPolyCone | None
    generators: tuple  # (m+1)-vectors
    faces: tuple  # FaceDescriptor list, deterministic order
    provenance: str  # "DIAGONAL_AUTO" | "GENERATOR_SUPPLIED"
    assumption1_witness: np.ndarray | None


def build_gamma_hrep_diag(inst: model.QcqpInstance) -> HPolyCone:
    """H-rep for diagonal instances: n diagonal rows plus sign rows."""
    if not model.is_diagonal_instance(inst):
        raise NotDiagonalError(
            "quadratic terms are not all diagonal; supply gamma generators "
            "or apply a congruence transform first"
        )
    m = inst.m
    rows = []
    d_obj = np.diag(inst.objective.A)
    d_cons = [np.diag(q.A) for q in inst.constraints]
    for j in range(inst.n):
        rows.append(np.concatenate(([d_obj[j]], [dc[j] for dc in d_cons])))
    e = np.eye(m + 1)
    rows.append(e[0])  # gamma_obj >= 0
    for i in range(inst.m_i):
        rows.append(e[1 + i])
    return HPolyCone(ambient=m + 1, rows=np.array(rows))


def _active_set(rows: np.ndarray, r: np.ndarray, tol: float) -> frozenset:
    vals = rows @ r
    scale = max(1.0, float(np.linalg.norm(r)))
    return frozenset(int(i) for i in np.flatnonzero(np.abs(vals) <= tol * scale))


def dd_extreme_rays(H: HPolyCone, tol: float = RAY_TOL) -> list:
    """Extreme rays of a pointed H-cone by incremental double description."""
    dim = H.ambient
    if dim > 12:
        raise ValueError("ambient dimension cap (12) exceeded")
    rows = H.rows
    if rows.shape[0] == 0:
        raise NotPointedError("no rows: cone is all of space")
    rank = np.linalg.matrix_rank(rows, tol=1e-10)
    if rank < dim:
        raise NotPointedError(
            "cone has a nontrivial lineality space; extreme rays undefined"
        )
    # initial simplicial cone from dim linearly independent rows
    from scipy.linalg import qr as _qr

    _, _, piv = _qr(rows.T, pivoting=True)
    base_idx = list(piv[:dim])
    A0 = rows[base_idx]
    rays = [col.copy() for col in np.linalg.inv(A0).T]
    processed = list(base_idx)
    remaining = [i for i in range(rows.shape[0]) if i not in base_idx]

    for i in remaining:
        a = rows[i]
        vals = [float(a @ r) / max(1.0, float(np.linalg.norm(r))) for r in rays]
        pos = [k for k, v in enumerate(vals) if v > tol]
        neg = [k for k, v in enumerate(vals) if v < -tol]
        zero = [k for k, v in enumerate(vals) if -tol <= v <= tol]
        if not neg:
            processed.append(i)
            continue
        proc_rows = rows[processed]
        act = [_active_set(proc_rows, r, tol) for r in rays]
        new_rays = [rays[k] for k in pos + zero]
        for kp in pos:
            for kn in neg:
                shared = act[kp] & act[kn]
                if dim > 2:
                    if not shared:
                        continue
                    sub = proc_rows[sorted(shared)]
                    if np.linalg.matrix_rank(sub, tol=1e-10) < dim - 2:
                        continue  # not adjacent
                r_new = float(a @ rays[kp]) * rays[kn] - float(a @ rays[kn]) * rays[kp]
                nrm = float(np.max(np.abs(r_new)))
                if nrm > tol:
                    new_rays.append(r_new / nrm)
        rays = new_rays
        processed.append(i)

    # normalize, dedupe, and keep only extreme rays (active-row rank dim-1)
    out = []
    for r in rays:
        nrm = float(np.max(np.abs(r)))
        if nrm <= tol:
            continue
        r = r / nrm
        act = _active_set(rows, r, tol)
        if act:
            sub = rows[sorted(act)]
            if np.linalg.matrix_rank(sub, tol=1e-10) < dim - 1:
                continue
        elif dim > 1:
            continue
        if any(np.linalg.norm(r - s) < 1e-7 or np.linalg.norm(r + s) < 1e-7 for s in out):
            continue
        out.append(r)
    out.sort(key=lambda r: tuple(np.round(r, 9)))
    return out


def verify_generator(inst: model.QcqpInstance, ray, tol: float = STRICT_TOL) -> bool:
    ray = np.asarray(ray, dtype=float).reshape(-1)
    if ray.shape[0] != inst.m + 1:
        return False
    if ray[0] < -tol:
        return False
    if np.any(ray[1 : 1 + inst.m_i] < -tol):
        return False
    agg = model.aggregate_with_obj(inst, ray[0], ray[1:])
    status = linalg.psd_status(agg.A, tol=tol)
    return status in (
        linalg.PsdStatus.POSITIVE_DEFINITE,
        linalg.PsdStatus.PSD_SINGULAR,
        linalg.PsdStatus.ZERO,
    )


def _aggregate_A(inst: model.QcqpInstance, ray) -> np.ndarray:
    ray = np.asarray(ray, dtype=float).reshape(-1)
    return model.aggregate_with_obj(inst, ray[0], ray[1:]).A


def check_definiteness_assumption(inst: model.QcqpInstance, gens, tol: float = STRICT_TOL):
    """Witness (gamma_obj, gamma) with PD aggregate, or None.

    Each generator aggregate is PSD, so the kernels of the generators
    intersect exactly in the kernel of their sum: the uniform mixture is PD
    if and only if some conic combination is.
    """
    gens = [np.asarray(g, dtype=float) for g in gens]
    if not gens:
        return None
    mix = np.mean(gens, axis=0)
    A = _aggregate_A(inst, mix)
    spec = linalg.eig_sym(A)
    lo = float(spec.eigenvalues[0])
    scale = max(1.0, float(np.max(np.abs(spec.eigenvalues), initial=0.0)))
    if lo > tol * scale:
        return mix
    return None


def _classify(inst, gens_on_face, tol=STRICT_TOL):
    mix = np.mean(gens_on_face, axis=0)
    A = _aggregate_A(inst, mix)
    spec = linalg.eig_sym(A)
    scale = max(1.0, float(np.max(np.abs(spec.eigenvalues), initial=0.0)))
    if float(spec.eigenvalues[0]) > tol * scale:
        return "DEFINITE", mix
    return "SEMIDEFINITE", None


def compute_VF(inst: model.QcqpInstance, gens_on_face, tol: float = STRICT_TOL) -> np.ndarray:
    """Shared zero eigenspace of the face's aggregated matrices.

    Each aggregate is PSD, so the shared kernel equals the kernel of the sum.
    """
    total = np.zeros((inst.n, inst.n))
    for g in gens_on_face:
        total += _aggregate_A(inst, g)
    return linalg.kernel_basis(total, tol=tol)


def face_slice_vrep(gens_on_face, tol: float = RAY_TOL):
    """Split face generators into unit-gamma_obj vertices and recession rays."""
    vertices = []
    rays = []
    for g in gens_on_face:
        g = np.asarray(g, dtype=float)
        if g[0] > tol:
            vertices.append(g[1:] / g[0])
        else:
            rays.append(g[1:])
    return vertices, rays


def _face_lattice_from_rows(rows: np.ndarray, gens, tol: float = RAY_TOL):
    """All distinct generator supports obtained by tightening H-rows.

    Breadth-first over row intersections starting from the full support;
    faces with identical supports are merged; the empty support (zero face)
    is dropped.
    """
    n_rows = rows.shape[0]
    gen_active = [_active_set(rows, g, tol) for g in gens]
    full = frozenset(range(len(gens)))
    seen = {}
    queue = [full]
    while queue:
        sup = queue.pop()
        if not sup or sup in seen:
            continue
        seen[sup] = True
        for i in range(n_rows):
            child = frozenset(k for k in sup if i in gen_active[k])
            if child and child != sup and child not in seen:
                queue.append(child)
    return sorted(seen.keys(), key=lambda s: (len(s), sorted(s)))


def build_gamma_data(inst: model.QcqpInstance, supplied_generators=None) -> GammaData:
    """Full pipeline: H-rep (diagonal path) or supplied rays, faces, V(F)."""
    if supplied_generators is None:
        hrep = build_gamma_hrep_diag(inst)
        gens = dd_extreme_rays(hrep)
        provenance = "DIAGONAL_AUTO"
        rows = hrep.rows
    else:
        hrep = None
        gens = [np.asarray(g, dtype=float).reshape(-1) for g in supplied_generators]
        bad = [i for i, g in enumerate(gens) if not verify_generator(inst, g)]
        if bad:
            raise ValueError(f"supplied generators at indices {bad} fail verification")
        provenance = "GENERATOR_SUPPLIED"
        # facet normals of cone(gens) recovered by dualizing twice; if the
        # generated cone is not full-dimensional the lattice degrades to
        # {singletons, full set}.
        try:
            dual = HPolyCone(ambient=inst.m + 1, rows=np.array(gens))
            rows = np.array(dd_extreme_rays(dual))
        except NotPointedError:
            rows = None

    if not gens:
        return GammaData(hrep=hrep, generators=(), faces=(), provenance=provenance,
                         assumption1_witness=None)

    if rows is not None and len(rows) > 0:
        supports = _face_lattice_from_rows(np.asarray(rows), gens)
    else:
        supports = [frozenset([k]) for k in range(len(gens))]
        if len(gens) > 1:
            supports.append(frozenset(range(len(gens))))
        supports.sort(key=lambda s: (len(s), sorted(s)))

    faces = []
    for fid, sup in enumerate(supports):
        face_gens = [gens[k] for k in sorted(sup)]
        classification, witness = _classify(inst, face_gens)
        vf = compute_VF(inst, face_gens) if classification == "SEMIDEFINITE" else np.zeros((inst.n, 0))
        vertices, rays_v = face_slice_vrep(face_gens)
        active = frozenset()
        if rows is not None and len(rows) > 0:
            common = None
            for g in face_gens:
                a = _active_set(np.asarray(rows), g, RAY_TOL)
                common = a if common is None else (common & a)
            active = common or frozenset()
        faces.append(
            FaceDescriptor(
                face_id=fid,
                active_rows=active,
                generator_indices=tuple(sorted(sup)),
                classification=classification,
                witness=witness,
                vf_basis=vf,
                slice_vertices=tuple(vertices),
                slice_rays=tuple(rays_v),
            )
        )

    witness1 = check_definiteness_assumption(inst, gens)
    return GammaData(
        hrep=hrep,
        generators=tuple(gens),
        faces=tuple(faces),
        provenance=provenance,
        assumption1_witness=witness1,
    )
