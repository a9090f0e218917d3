"""The invariant checks behind ``quasistrat verify``.

Each check returns a :class:`CheckResult`; details are plain strings built
only from seeded computations, so two runs with the same seed print the
same report byte for byte.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .field import FieldError
from .moment import (
    DEFAULT_TOL,
    Tolerances,
    check_hamiltonian,
    check_symplectic_rank,
    classify_point,
    facet_residual,
    fiber_point,
    level_tangent_derivative,
    moment_Phi,
    moment_Psi,
    rank_dPsi,
    rng_for,
    sample_face_mu,
    sample_mu,
)
from .polytope import FacePoset, HPolytope, enumerate_faces, faces_by_subsets
from .strata import build_link, build_stratification, psi_F, sample_link_points
from .torus import TorusData, TorusError, build_torus_data, check_exactness, rationality_verdict, stabilizer_data

log = logging.getLogger(__name__)

ORACLE_MAX_FACETS = 16
ROUNDTRIP_TOL = 1e-10
CONSTRUCTION_TOL = 1e-12
HAMILTONIAN_TOL = 1e-6
HAMILTONIAN_STEP = 1e-4
LINK_TOL = 1e-10


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str

    def to_json(self) -> dict:
        return {"name": self.name, "passed": self.passed, "detail": self.detail}


class Context:
    def __init__(self, P: HPolytope, samples: int, seed: int, tol: Tolerances, epsilon: float):
        self.P = P
        self.T: TorusData = build_torus_data(P)
        self.faces: FacePoset = enumerate_faces(P)
        self.S = build_stratification(P, self.T, self.faces)
        self.samples = samples
        self.seed = seed
        self.tol = tol
        self.epsilon = epsilon


def _face_oracle(c: Context) -> CheckResult:
    if c.P.d > ORACLE_MAX_FACETS:
        return CheckResult("face_oracle", True, f"skipped: d = {c.P.d} > {ORACLE_MAX_FACETS}")
    brute = faces_by_subsets(c.P)
    mine = {F.active: F.dim for F in c.faces}
    ok = brute == mine
    return CheckResult("face_oracle", ok, f"{len(mine)} faces, subset oracle found {len(brute)}")


def _face_invariants(c: Context) -> CheckResult:
    P, bad = c.P, []
    for F in c.faces:
        rank = P.normal_matrix(F.active).rank() if F.active else 0
        if F.dim != P.n - rank or F.r < P.n - F.dim or P.active_set(F.witness) != F.active:
            bad.append(F.I)
        if F.singular != (F.r > P.n - F.dim):
            bad.append(F.I)
    return CheckResult("face_invariants", not bad, "ok" if not bad else f"violations at {bad}")


def _euler(c: Context) -> CheckResult:
    fv = c.faces.f_vector()
    n = c.P.n
    lhs = sum((-1) ** p * fv[p] for p in range(n))
    rhs = 1 - (-1) ** n
    return CheckResult("euler_relation", lhs == rhs, f"alternating sum {lhs}, expected {rhs}")


def _poset(c: Context) -> CheckResult:
    faces = c.faces
    tops = [G for G in faces if all(faces.leq(F, G) for F in faces)]
    graded = all(F.dim < G.dim for F, G in faces.covers())
    ok = len(tops) == 1 and tops[0].active == frozenset() and graded and c.faces.f_vector()[c.P.n] == 1
    return CheckResult("face_poset", ok, f"unique maximum: {len(tops) == 1}, graded: {graded}")


def _exactness(c: Context) -> CheckResult:
    try:
        check_exactness(c.T)
    except TorusError as e:
        return CheckResult("exact_sequence", False, str(e))
    return CheckResult("exact_sequence", True, f"dim n = {c.T.dim_n} = d - n")


def _stabilizers(c: Context) -> CheckResult:
    T, bad = c.T, []
    for F in c.faces:
        st = stabilizer_data(T, F)
        expected = F.r - c.P.n + F.dim
        inside = all((T.pi @ v) == tuple(T.field.zero for _ in range(T.n)) for v in st.n_basis)
        support = all(all(v[j].is_zero() for j in range(T.d) if j not in F.active) for v in st.n_basis)
        if st.dim_n != expected or st.dim_s != F.r or not inside or not support or (not F.singular and st.dim_n):
            bad.append(F.I)
    return CheckResult("stabilizer_formula", not bad, "dim n^F = r_F - n + p on all faces" if not bad else f"violations at {bad}")


def _rationality(c: Context) -> CheckResult:
    T = c.T
    try:
        v = rationality_verdict(T)
    except FieldError:
        return CheckResult("rationality_verdict", True, "skipped: float field")
    gens = T.generators
    extended = TorusData(T.polytope, T.pi, T.kernel_basis, gens + (tuple(a + 2 * b for a, b in zip(gens[0], gens[-1])),))
    stable = rationality_verdict(extended) == v
    return CheckResult("rationality_verdict", stable, f"{v}; stable under appending Z-combinations: {stable}")


def _dimensions(c: Context) -> CheckResult:
    n, bad = c.P.n, []
    memo: dict = {}
    for pc in c.S.singular:
        F = pc.face
        L = build_link(c.P, c.T, c.faces, F, c.epsilon, memo)
        if not (pc.dim == 2 * F.dim and pc.dim <= 2 * n - 4 and pc.dim % 2 == 0
                and L.dim == 2 * n - 2 * F.dim - 1 and L.dim >= 3 and pc.dim + L.dim + 1 == 2 * n):
            bad.append(F.I)
    ok = not bad and c.S.regular.dim == 2 * n
    return CheckResult("dimension_formulas", ok, f"{len(c.S.singular)} singular pieces" if ok else f"violations at {bad}")


def _roundtrip(c: Context) -> CheckResult:
    T, worst_rt, worst_facet, worst_build = c.T, 0.0, 0.0, 0.0
    for i in range(c.samples):
        rng = rng_for(c.seed, 0, i)
        mu = sample_mu(T, rng)
        z = fiber_point(T, mu, rng.uniform(0.0, 2 * np.pi, T.d), c.tol)
        worst_build = max(worst_build, facet_residual(T, z, mu))
        back = moment_Phi(T, z, c.tol)
        worst_rt = max(worst_rt, float(np.max(np.abs(back - mu))))
        worst_facet = max(worst_facet, facet_residual(T, z, back))
    ok = worst_rt <= ROUNDTRIP_TOL and worst_facet <= ROUNDTRIP_TOL and worst_build <= CONSTRUCTION_TOL
    return CheckResult("phi_roundtrip", ok,
                       f"max |Phi(z)-mu| = {worst_rt:.3e}, facet residual {worst_facet:.3e}, construction {worst_build:.3e}")


def _surjectivity(c: Context) -> CheckResult:
    missed = []
    for k, F in enumerate(c.faces):
        z = fiber_point(c.T, F.witness, rng_for(c.seed, 1, k).uniform(0.0, 2 * np.pi, c.T.d), c.tol)
        try:
            if classify_point(c.T, c.faces, z, c.tol) != F:
                missed.append(F.I)
        except ValueError:
            missed.append(F.I)
    return CheckResult("surjectivity", not missed, f"{len(c.faces) - len(missed)}/{len(c.faces)} faces realized")


def _ranks(c: Context) -> CheckResult:
    T, bad = c.T, []
    per_face = max(1, min(c.samples, 20))
    for k, F in enumerate(c.faces):
        st = stabilizer_data(T, F)
        want = T.dim_n - st.dim_n
        for i in range(per_face):
            rng = rng_for(c.seed, 3, k, i)
            z = fiber_point(T, sample_face_mu(T, F, rng), rng.uniform(0.0, 2 * np.pi, T.d), c.tol)
            if rank_dPsi(T, z, c.tol) != want or check_symplectic_rank(T, F, z, c.tol) != (2 * F.dim, want):
                bad.append(F.I)
                break
    return CheckResult("rank_checks", not bad, f"{per_face} points per face" if not bad else f"mismatch at {bad}")


def hamiltonian_xi(rng: np.random.Generator, d: int) -> np.ndarray:
    """Random generator with entries of magnitude in [0.5, 1.5] and random signs."""
    return rng.uniform(0.5, 1.5, d) * rng.choice([-1.0, 1.0], d)


def _hamiltonian(c: Context) -> CheckResult:
    T = c.T
    worst, worst_ratio = 0.0, np.inf
    for i in range(10):
        rng = rng_for(c.seed, 4, i)
        z = fiber_point(T, c.faces.interior.witness, rng.uniform(0.0, 2 * np.pi, T.d), c.tol)
        xi = hamiltonian_xi(rng, T.d)
        r1 = check_hamiltonian(T, z, xi, HAMILTONIAN_STEP)
        r2 = check_hamiltonian(T, z, xi, HAMILTONIAN_STEP / 2)
        worst = max(worst, r1)
        worst_ratio = min(worst_ratio, r1 / r2 if r2 > 0 else np.inf)
    ok = worst <= HAMILTONIAN_TOL and worst_ratio >= 3.0
    return CheckResult("hamiltonian", ok, f"max residual {worst:.3e} at h={HAMILTONIAN_STEP:g}, min halving ratio {worst_ratio:.2f}")


def _level_tangent(c: Context) -> CheckResult:
    T = c.T
    if not T.dim_n:
        return CheckResult("n_moment_constant", True, "skipped: n = 0")
    K = T.kernel_f
    worst = 0.0
    for i in range(10):
        rng = rng_for(c.seed, 5, i)
        z = fiber_point(T, sample_mu(T, rng), rng.uniform(0.0, 2 * np.pi, T.d), c.tol)
        xi = K @ rng.normal(size=T.dim_n)
        worst = max(worst, level_tangent_derivative(T, z, xi, HAMILTONIAN_STEP, c.tol))
    return CheckResult("n_moment_constant", worst <= HAMILTONIAN_TOL, f"max tangential derivative {worst:.3e}")


def _invariance(c: Context) -> CheckResult:
    T, worst = c.T, 0.0
    for i in range(10):
        rng = rng_for(c.seed, 6, i)
        mu = sample_mu(T, rng)
        theta = rng.uniform(0.0, 2 * np.pi, T.d)
        z = fiber_point(T, mu, theta, c.tol)
        xi = hamiltonian_xi(rng, T.d)
        for t in np.linspace(0.0, 1.0, 5):
            w = np.exp(-2j * xi * t) * z
            worst = max(worst, float(np.max(np.abs(moment_Phi(T, w, c.tol) - moment_Phi(T, z, c.tol)))))
    return CheckResult("torus_invariance", worst <= 1e-8, f"max |Phi(t.z) - Phi(z)| = {worst:.3e}")


def _links(c: Context) -> CheckResult:
    count = max(1, min(c.samples, 100))
    P, T, worst, depth, bad = c.P, c.T, 0.0, 0, []
    memo: dict = {}
    for pc in c.S.singular:
        F = pc.face
        L = build_link(P, T, c.faces, F, c.epsilon, memo)
        depth = max(depth, L.depth)
        if any(ch.dim >= node.dim for node in L.walk() for ch in node.children):
            bad.append(F.I)
        gens = np.array([[x.to_float() for x in v] for v in L.stabilizer.n_basis]).reshape(-1, T.d)[:, list(F.I)]
        for w in sample_link_points(P, T, c.faces, F, c.epsilon, count, c.seed):
            err = max(float(np.max(np.abs(psi_F(L, w)))), abs(float(np.sum(np.abs(w) ** 2)) - c.epsilon ** 2),
                      float(np.max(np.abs(psi_F(L, 0.5 * w)))))
            worst = max(worst, err)
            # action vectors -2i xi_j w_j of the n^F generators must not vanish
            if np.min(np.linalg.norm(gens * w[None, :], axis=1)) <= 1e-12:
                bad.append(F.I)
                break
    ok = worst <= LINK_TOL and depth <= P.n and not bad
    return CheckResult("link_sampler", ok, f"max constraint error {worst:.3e}, recursion depth {depth}")


CHECKS: list[Callable[[Context], CheckResult]] = [
    _face_oracle,
    _face_invariants,
    _euler,
    _poset,
    _exactness,
    _stabilizers,
    _rationality,
    _dimensions,
    _roundtrip,
    _surjectivity,
    _ranks,
    _hamiltonian,
    _level_tangent,
    _invariance,
    _links,
]


def run_verification(P: HPolytope, samples: int = 1000, seed: int = 42, tol: Tolerances = DEFAULT_TOL,
                     epsilon: float = 1.0) -> dict:
    c = Context(P, samples, seed, tol, epsilon)
    results = []
    for check in CHECKS:
        try:
            res = check(c)
        except Exception as e:  # a crashing check is a failed check
            log.exception("check %s raised", check.__name__)
            res = CheckResult(check.__name__.lstrip("_"), False, f"error: {e}")
        results.append(res)
    return {
        "input": P.name,
        "seed": seed,
        "samples": samples,
        "checks": [r.to_json() for r in results],
        "passed": all(r.passed for r in results),
    }
