"""Moment maps on C^d and the floating-point checks built on them.

Points of C^d are complex numpy arrays.  Real coordinates are interleaved
``(x_0, y_0, x_1, y_1, ...)`` with ``z_j = x_j + i y_j``; the symplectic
form is ``sum_j dx_j ^ dy_j`` and ``xi`` in R^d acts by
``z_j -> exp(-2 i xi_j t) z_j``, whose Hamiltonian is ``<J(z), xi>``.
"""
from __future__ import annotations

from dataclasses import dataclass, fields, replace
from typing import Mapping, Sequence

import numpy as np

from .field import Scalar
from .polytope import Face, FacePoset
from .torus import TorusData

__all__ = [
    "Tolerances",
    "DEFAULT_TOL",
    "InfeasibleError",
    "LevelSetError",
    "ClassificationError",
    "rng_for",
    "zero_pattern",
    "to_real",
    "from_real",
    "moment_J",
    "moment_Psi",
    "fiber_point",
    "moment_Phi",
    "facet_residual",
    "classify_point",
    "psi_jacobian",
    "rank_dPsi",
    "tangent_basis",
    "check_symplectic_rank",
    "check_hamiltonian",
    "level_tangent_derivative",
    "sample_mu",
    "sample_face_mu",
    "sample_records",
]


@dataclass(frozen=True)
class Tolerances:
    zero: float = 1e-9   # |z_j| <= zero  ->  j in the zero pattern
    level: float = 1e-8  # |Psi(z)|_inf <= level  ->  on the level set
    rank: float = 1e-8   # singular values <= rank * sigma_max are dropped
    feas: float = 1e-9   # slack >= -feas  ->  feasible

    def with_overrides(self, overrides: Mapping[str, float]) -> "Tolerances":
        names = {f.name for f in fields(self)}
        bad = set(overrides) - names
        if bad:
            raise ValueError(f"unknown tolerance name(s): {', '.join(sorted(bad))}")
        return replace(self, **{k: float(v) for k, v in overrides.items()})


DEFAULT_TOL = Tolerances()


class InfeasibleError(ValueError):
    def __init__(self, index: int, slack: float):
        super().__init__(f"moment image infeasible: facet {index + 1} has slack {slack:.3e}")
        self.index = index


class LevelSetError(ValueError):
    pass


class ClassificationError(ValueError):
    pass


def rng_for(seed: int, *keys: int) -> np.random.Generator:
    """Independent stream for ``(seed, *keys)``; sample ``i`` never depends on sample ``i-1``."""
    return np.random.default_rng(np.random.SeedSequence([int(seed) & (2**64 - 1), *keys]))


def zero_pattern(z, tol: float = DEFAULT_TOL.zero) -> frozenset[int]:
    return frozenset(int(j) for j in np.flatnonzero(np.abs(z) <= tol))


def to_real(z) -> np.ndarray:
    z = np.asarray(z, dtype=complex)
    out = np.empty(2 * z.size)
    out[0::2] = z.real
    out[1::2] = z.imag
    return out


def from_real(v) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    return v[0::2] + 1j * v[1::2]


def _omega(u, v) -> float:
    return float(np.dot(u[0::2], v[1::2]) - np.dot(u[1::2], v[0::2]))


def _omega_matrix(d: int) -> np.ndarray:
    W = np.zeros((2 * d, 2 * d))
    for j in range(d):
        W[2 * j, 2 * j + 1] = 1.0
        W[2 * j + 1, 2 * j] = -1.0
    return W


def moment_J(T: TorusData, z) -> np.ndarray:
    """``J(z)_j = |z_j|^2 + lambda_j``."""
    z = np.asarray(z, dtype=complex)
    return np.abs(z) ** 2 + T.offsets_f


def moment_Psi(T: TorusData, z) -> np.ndarray:
    """``iota^* J(z)`` in the coordinates dual to the kernel basis."""
    return T.kernel_f.T @ moment_J(T, z)


def _slack(T: TorusData, mu) -> np.ndarray:
    if len(mu) and isinstance(mu[0], Scalar):
        exact = T.polytope.slack(mu)
        for j, s in enumerate(exact):
            if s.sign() < 0:
                raise InfeasibleError(j, s.to_float())
        return np.array([s.to_float() for s in exact])
    s = T.normals_f @ np.asarray(mu, dtype=float) - T.offsets_f
    return s


def fiber_point(T: TorusData, mu, theta=None, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """The point with ``|z_j|^2 = <mu, X_j> - lambda_j`` and phases ``theta``.

    ``mu`` may be exact (a sequence of Scalars), in which case coordinates on
    active facets are exactly zero.
    """
    s = _slack(T, mu)
    bad = np.flatnonzero(s < -tol.feas)
    if bad.size:
        raise InfeasibleError(int(bad[0]), float(s[bad[0]]))
    r = np.sqrt(np.clip(s, 0.0, None))
    if theta is None:
        return r.astype(complex)
    return r * np.exp(1j * np.asarray(theta, dtype=float))


def moment_Phi(T: TorusData, z, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Solve ``pi^* mu = J(z)`` (least squares) for ``z`` on the level set."""
    psi = moment_Psi(T, z)
    if psi.size and np.max(np.abs(psi)) > tol.level:
        raise LevelSetError(f"not on level set: |Psi| = {np.max(np.abs(psi)):.3e}")
    return T.pi_star_pinv @ moment_J(T, z)


def facet_residual(T: TorusData, z, mu) -> float:
    """``max_j | |z_j|^2 - (<mu, X_j> - lambda_j) |``."""
    z = np.asarray(z, dtype=complex)
    mu = np.array([m.to_float() for m in mu]) if len(mu) and isinstance(mu[0], Scalar) else np.asarray(mu, float)
    return float(np.max(np.abs(np.abs(z) ** 2 - (T.normals_f @ mu - T.offsets_f))))


def classify_point(T: TorusData, faces: FacePoset, z, tol: Tolerances = DEFAULT_TOL) -> Face:
    """The face whose active set is the zero pattern of ``z``."""
    I = zero_pattern(z, tol.zero)
    F = faces.get(I)
    if F is None:
        raise ClassificationError(f"zero pattern {sorted(j + 1 for j in I)} matches no face; check zero tolerance")
    mu = moment_Phi(T, z, tol)
    s = T.normals_f @ mu - T.offsets_f
    slack_tol = tol.zero ** 2 + tol.level + tol.feas
    if any(abs(s[j]) > slack_tol for j in I) or np.min(s) < -slack_tol:
        raise ClassificationError("moment image is not in the relative interior of the matched face")
    return F


def psi_jacobian(T: TorusData, z, tol: Tolerances = DEFAULT_TOL) -> tuple[np.ndarray, list[int]]:
    """Differential of Psi along the coordinates that are nonzero at ``z``.

    Returns the ``(d-n) x 2m`` matrix and the ``m`` free coordinate indices.
    """
    z = np.asarray(z, dtype=complex)
    I = zero_pattern(z, tol.zero)
    free = [j for j in range(T.d) if j not in I]
    K = T.kernel_f
    Jac = np.zeros((T.dim_n, 2 * len(free)))
    for c, j in enumerate(free):
        Jac[:, 2 * c] = 2.0 * K[j] * z[j].real
        Jac[:, 2 * c + 1] = 2.0 * K[j] * z[j].imag
    return Jac, free


def _numerical_rank(M: np.ndarray, rtol: float, scale: float | None = None) -> int:
    """Singular values above ``rtol * scale`` (``scale`` defaults to sigma_max)."""
    if M.size == 0:
        return 0
    s = np.linalg.svd(M, compute_uv=False)
    ref = s[0] if scale is None else scale
    if ref == 0.0:
        return 0
    return int(np.sum(s > rtol * ref))


def rank_dPsi(T: TorusData, z, tol: Tolerances = DEFAULT_TOL) -> int:
    Jac, _ = psi_jacobian(T, z, tol)
    return _numerical_rank(Jac, tol.rank)


def tangent_basis(T: TorusData, z, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Orthonormal basis (columns, in R^2d) of the tangent space of Psi^-1(0) ∩ C^d_F at ``z``."""
    Jac, free = psi_jacobian(T, z, tol)
    m2 = Jac.shape[1]
    if m2 == 0:
        return np.zeros((2 * T.d, 0))
    if Jac.shape[0] == 0:
        null = np.eye(m2)
    else:
        _, s, Vt = np.linalg.svd(Jac)
        rk = int(np.sum(s > tol.rank * s[0])) if s.size and s[0] > 0 else 0
        null = Vt[rk:].T
    B = np.zeros((2 * T.d, null.shape[1]))
    for c, j in enumerate(free):
        B[2 * j] = null[2 * c]
        B[2 * j + 1] = null[2 * c + 1]
    return B


def check_symplectic_rank(T: TorusData, F: Face, z, tol: Tolerances = DEFAULT_TOL) -> tuple[int, int]:
    """Rank and kernel dimension of the standard form restricted to the stratum manifold at ``z``."""
    if zero_pattern(z, tol.zero) != F.active:
        raise ClassificationError("point does not lie over the given face; check zero tolerance")
    psi = moment_Psi(T, z)
    if psi.size and np.max(np.abs(psi)) > tol.level:
        raise LevelSetError(f"not on level set: |Psi| = {np.max(np.abs(psi)):.3e}")
    B = tangent_basis(T, z, tol)
    Jac, free = psi_jacobian(T, z, tol)
    if B.shape[1] != 2 * len(free) - _numerical_rank(Jac, tol.rank):
        raise ClassificationError("tangent basis has the wrong dimension; check rank tolerance")
    W = B.T @ _omega_matrix(T.d) @ B
    # B is orthonormal and |omega| = 1, so the natural scale of W is 1
    rk = _numerical_rank(W, tol.rank, scale=1.0)
    return rk, B.shape[1] - rk


def check_hamiltonian(T: TorusData, z, xi, h: float = 1e-4, directions=None) -> float:
    """``max_v |omega(xi_M(z), v) - D_v <J, xi>(z)|`` with both sides by central differences.

    ``xi_M`` is the derivative at ``t = 0`` of the flow ``exp(-2 i xi t) z``,
    so the residual is the ``O(h^2)`` truncation error of that difference
    plus rounding.  ``directions`` are real 2d-vectors (default: the
    coordinate basis).
    """
    z = np.asarray(z, dtype=complex)
    xi = np.asarray(xi, dtype=float)
    d = z.size
    flow_p = np.exp(-2j * xi * h) * z
    flow_m = np.exp(2j * xi * h) * z
    velocity = to_real((flow_p - flow_m) / (2 * h))
    dirs = np.eye(2 * d) if directions is None else np.atleast_2d(np.asarray(directions, dtype=float))

    def H(w):
        return float(moment_J(T, w) @ xi)

    res = 0.0
    for v in dirs:
        vc = from_real(v)
        dH = (H(z + h * vc) - H(z - h * vc)) / (2 * h)
        res = max(res, abs(_omega(velocity, v) - dH))
    return res


def level_tangent_derivative(T: TorusData, z, xi, h: float = 1e-4, tol: Tolerances = DEFAULT_TOL) -> float:
    """``max_v |D_v <J, xi>|`` over a tangent basis of the stratum manifold at ``z`` (small for ``xi`` in n)."""
    z = np.asarray(z, dtype=complex)
    xi = np.asarray(xi, dtype=float)
    B = tangent_basis(T, z, tol)

    def H(w):
        return float(moment_J(T, w) @ xi)

    out = 0.0
    for v in B.T:
        vc = from_real(v)
        out = max(out, abs((H(z + h * vc) - H(z - h * vc)) / (2 * h)))
    return out


# -- sampling -------------------------------------------------------------------


def _bounding_box(T: TorusData):
    V = np.array([[x.to_float() for x in v.point] for v in T.polytope.vertices])
    return V.min(axis=0), V.max(axis=0)


def sample_mu(T: TorusData, rng: np.random.Generator, max_tries: int = 100_000) -> np.ndarray:
    """Uniform point of the polytope by rejection from the vertex bounding box."""
    lo, hi = _bounding_box(T)
    for _ in range(max_tries):
        mu = rng.uniform(lo, hi)
        if np.all(T.normals_f @ mu - T.offsets_f >= 0.0):
            return mu
    raise RuntimeError("rejection sampling failed; polytope too thin for its bounding box")


def sample_face_mu(T: TorusData, F: Face, rng: np.random.Generator) -> tuple[Scalar, ...]:
    """Exact point in the relative interior of ``F``: a random positive combination of its vertices."""
    P = T.polytope
    f = P.field
    w = rng.integers(1, 1025, size=len(F.vertex_ids))
    total = f(int(w.sum())).inverse()
    pts = [P.vertices[i].point for i in F.vertex_ids]
    return tuple(sum((f(int(wi)) * p[k] for wi, p in zip(w, pts)), f.zero) * total for k in range(P.n))


def _record(T: TorusData, faces: FacePoset, mu, theta, tol: Tolerances) -> dict:
    z = fiber_point(T, mu, theta, tol)
    mu_f = np.array([m.to_float() for m in mu]) if len(mu) and isinstance(mu[0], Scalar) else np.asarray(mu, float)
    back = moment_Phi(T, z, tol)
    F = classify_point(T, faces, z, tol)
    psi = moment_Psi(T, z)
    return {
        "mu": [float(x) for x in mu_f],
        "theta": [float(x) for x in theta],
        "z": [[float(c.real), float(c.imag)] for c in z],
        "face_I": [j + 1 for j in F.I],
        "psi_norm": float(np.max(np.abs(psi))) if psi.size else 0.0,
        "phi_residual": float(np.max(np.abs(back - mu_f))),
    }


def sample_records(T: TorusData, faces: FacePoset, count: int, seed: int,
                   tol: Tolerances = DEFAULT_TOL, per_face: bool = True) -> list[dict]:
    """``count`` bounding-box samples, then (optionally) one sample at every face witness."""
    out = []
    for i in range(count):
        rng = rng_for(seed, 0, i)
        mu = sample_mu(T, rng)
        theta = rng.uniform(0.0, 2 * np.pi, T.d)
        out.append(_record(T, faces, mu, theta, tol))
    if per_face:
        for k, F in enumerate(faces):
            theta = rng_for(seed, 1, k).uniform(0.0, 2 * np.pi, T.d)
            out.append(_record(T, faces, F.witness, theta, tol))
    return out
