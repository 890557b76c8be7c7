"""QCQP data model.

A quadratic form is the triple (A, b, c) representing
x |-> x^T A x + 2 b^T x + c, together with its (n+1) x (n+1) homogeneous
embedding [[A, b], [b^T, c]].  An instance bundles an objective form with
inequality (<= 0) and equality (= 0) constraint forms.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from . import linalg

FEAS_TOL = 1e-8


@dataclass(frozen=True)
class QuadraticForm:
    A: np.ndarray
    b: np.ndarray
    c: float

    def __post_init__(self):
        object.__setattr__(self, "A", linalg.sym(self.A))
        b = np.asarray(self.b, dtype=float).reshape(-1)
        if b.shape[0] != self.A.shape[0]:
            raise ValueError("b length must match A dimension")
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "c", float(self.c))

    @property
    def n(self) -> int:
        return self.A.shape[0]

    def embed(self) -> np.ndarray:
        """Homogeneous (n+1)x(n+1) embedding [[A, b], [b^T, c]]."""
        n = self.n
        M = np.zeros((n + 1, n + 1))
        M[:n, :n] = self.A
        M[:n, n] = self.b
        M[n, :n] = self.b
        M[n, n] = self.c
        return M

    @staticmethod
    def zero(n: int) -> "QuadraticForm":
        return QuadraticForm(np.zeros((n, n)), np.zeros(n), 0.0)

    @staticmethod
    def from_embedding(M) -> "QuadraticForm":
        M = linalg.sym(M)
        n = M.shape[0] - 1
        return QuadraticForm(M[:n, :n], M[:n, n], M[n, n])


def eval_form(q: QuadraticForm, x) -> float:
    x = np.asarray(x, dtype=float).reshape(-1)
    if x.shape[0] != q.n:
        raise ValueError(f"x has length {x.shape[0]}, form has dimension {q.n}")
    return float(x @ q.A @ x + 2.0 * q.b @ x + q.c)


@dataclass(frozen=True)
class QcqpInstance:
    n: int
    objective: QuadraticForm
    inequalities: tuple = ()
    equalities: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "inequalities", tuple(self.inequalities))
        object.__setattr__(self, "equalities", tuple(self.equalities))
        for q in (self.objective, *self.inequalities, *self.equalities):
            if q.n != self.n:
                raise ValueError("all forms must share dimension n")

    @property
    def m_i(self) -> int:
        return len(self.inequalities)

    @property
    def m_e(self) -> int:
        return len(self.equalities)

    @property
    def m(self) -> int:
        return self.m_i + self.m_e

    @property
    def constraints(self) -> tuple:
        # inequality forms first (indices [m_I]), then equalities
        return self.inequalities + self.equalities


@dataclass(frozen=True)
class EpigraphPoint:
    x: np.ndarray
    t: float

    def __post_init__(self):
        object.__setattr__(self, "x", np.asarray(self.x, dtype=float).reshape(-1))
        object.__setattr__(self, "t", float(self.t))


def aggregate_constraints(inst: QcqpInstance, gamma) -> QuadraticForm:
    """Weighted sum of the constraint forms: (A(gamma), b(gamma), c(gamma))."""
    gamma = np.asarray(gamma, dtype=float).reshape(-1)
    if gamma.shape[0] != inst.m:
        raise ValueError(f"gamma has length {gamma.shape[0]}, expected m={inst.m}")
    A = np.zeros((inst.n, inst.n))
    b = np.zeros(inst.n)
    c = 0.0
    for g, q in zip(gamma, inst.constraints):
        A += g * q.A
        b += g * q.b
        c += g * q.c
    return QuadraticForm(A, b, c)


def aggregate_with_obj(inst: QcqpInstance, gamma_obj: float, gamma) -> QuadraticForm:
    agg = aggregate_constraints(inst, gamma)
    return QuadraticForm(
        gamma_obj * inst.objective.A + agg.A,
        gamma_obj * inst.objective.b + agg.b,
        gamma_obj * inst.objective.c + agg.c,
    )


def homogenize(inst: QcqpInstance):
    """Embeddings of the constraint forms with their senses.

    Returns (list of (M, sense) with sense in {"LE", "EQ"}, M_obj embedding).
    """
    mats = [(q.embed(), "LE") for q in inst.inequalities]
    mats += [(q.embed(), "EQ") for q in inst.equalities]
    return mats, inst.objective.embed()


def is_feasible(inst: QcqpInstance, x, tol: float = FEAS_TOL) -> bool:
    if tol < 0:
        raise ValueError("tol must be nonnegative")
    for q in inst.inequalities:
        if eval_form(q, x) > tol:
            return False
    for q in inst.equalities:
        if abs(eval_form(q, x)) > tol:
            return False
    return True


def epigraph_member(inst: QcqpInstance, x, t, tol: float = FEAS_TOL) -> bool:
    return is_feasible(inst, x, tol) and eval_form(inst.objective, x) <= float(t) + tol


def congruence_transform(inst: QcqpInstance, P) -> QcqpInstance:
    """Change of variables x = P y: each form (A,b,c) -> (P^T A P, P^T b, c)."""
    P = np.asarray(P, dtype=float)
    if P.shape != (inst.n, inst.n):
        raise ValueError("P must be n x n")
    if np.linalg.matrix_rank(P, tol=1e-10 * max(1.0, np.linalg.norm(P, 2))) < inst.n:
        raise ValueError("P must be invertible")

    def tf(q: QuadraticForm) -> QuadraticForm:
        return QuadraticForm(P.T @ q.A @ P, P.T @ q.b, q.c)

    return QcqpInstance(
        n=inst.n,
        objective=tf(inst.objective),
        inequalities=tuple(tf(q) for q in inst.inequalities),
        equalities=tuple(tf(q) for q in inst.equalities),
    )


def is_diagonal_instance(inst: QcqpInstance, tol: float = 1e-12) -> bool:
    for q in (inst.objective, *inst.constraints):
        off = q.A - np.diag(np.diag(q.A))
        if np.max(np.abs(off), initial=0.0) > tol:
            return False
    return True


# ---------------------------------------------------------------------------
# JSON (de)serialization.
#
# Canonical encoding: keys in fixed order, numbers formatted with 17
# significant digits so round-trips are bit-identical.
# ---------------------------------------------------------------------------


def _num(x: float) -> float:
    return float(format(float(x), ".17g"))


def _form_to_dict(q: QuadraticForm) -> dict:
    d = np.diag(q.A)
    if np.max(np.abs(q.A - np.diag(d)), initial=0.0) == 0.0:
        a_enc = {"kind": "diag", "data": [_num(v) for v in d]}
    else:
        a_enc = {"kind": "dense", "data": [_num(v) for v in q.A.reshape(-1)]}
    return {"A": a_enc, "b": [_num(v) for v in q.b], "c": _num(q.c)}


def _form_from_dict(d: dict, n: int) -> QuadraticForm:
    kind = d["A"]["kind"]
    data = [float(v) for v in d["A"]["data"]]
    if kind == "diag":
        A = np.diag(data)
    elif kind == "dense":
        A = np.array(data).reshape(n, n)
    else:
        raise ValueError(f"unknown matrix kind {kind!r}")
    return QuadraticForm(A, d.get("b", [0.0] * n), d.get("c", 0.0))


def instance_to_dict(inst: QcqpInstance, gamma_generators=None) -> dict:
    out = {
        "n": inst.n,
        "objective": _form_to_dict(inst.objective),
        "inequalities": [_form_to_dict(q) for q in inst.inequalities],
        "equalities": [_form_to_dict(q) for q in inst.equalities],
    }
    if gamma_generators is not None:
        out["gamma_generators"] = [[_num(v) for v in g] for g in gamma_generators]
    return out


def instance_from_dict(d: dict):
    """Parse an instance dict; returns (instance, gamma_generators or None)."""
    n = int(d["n"])
    inst = QcqpInstance(
        n=n,
        objective=_form_from_dict(d["objective"], n),
        inequalities=tuple(_form_from_dict(q, n) for q in d.get("inequalities", [])),
        equalities=tuple(_form_from_dict(q, n) for q in d.get("equalities", [])),
    )
    gens = d.get("gamma_generators")
    if gens is not None:
        gens = [np.asarray([float(v) for v in g]) for g in gens]
    return inst, gens


def dump_instance(inst: QcqpInstance, gamma_generators=None) -> str:
    return json.dumps(instance_to_dict(inst, gamma_generators), indent=2)


def load_instance(text: str):
    return instance_from_dict(json.loads(text))
