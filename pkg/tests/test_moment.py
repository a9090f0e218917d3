import math

import numpy as np
import pytest

from quasistrat import Field
from quasistrat.moment import (
    ClassificationError,
    InfeasibleError,
    LevelSetError,
    Tolerances,
    check_hamiltonian,
    check_symplectic_rank,
    classify_point,
    facet_residual,
    fiber_point,
    level_tangent_derivative,
    moment_J,
    moment_Phi,
    moment_Psi,
    rank_dPsi,
    rng_for,
    sample_face_mu,
    sample_records,
    tangent_basis,
)
from quasistrat.torus import stabilizer_data

from conftest import load

Q = Field.rational()
S2 = 1 / math.sqrt(2)


def test_J_examples():
    _, T, _ = load("interval")
    assert np.allclose(moment_J(T, [1, 0]), [1, -1])
    assert np.allclose(moment_J(T, [S2, S2]), [0.5, -0.5], atol=1e-15)
    for name in ("pyramid", "triangle_sqrt2"):
        T = load(name)[1]
        assert np.allclose(moment_J(T, np.zeros(T.d)), T.offsets_f)


def test_Psi_examples():
    _, T, _ = load("interval")
    assert abs(moment_Psi(T, [S2, S2])[0]) < 1e-15
    assert moment_Psi(T, [1, 1])[0] == pytest.approx(1.0)


def test_Psi_vanishes_on_witness_fibers(fixture_name):
    _, T, faces = load(fixture_name)
    for F in faces:
        z = fiber_point(T, F.witness)
        assert np.max(np.abs(moment_Psi(T, z)), initial=0.0) <= 1e-12
        assert facet_residual(T, z, F.witness) <= 1e-12


def test_fiber_point_examples():
    _, T, _ = load("interval")
    z = fiber_point(T, [Q(1) / Q(4)], [0.0, 0.0])
    assert np.allclose(z, [0.5, math.sqrt(3) / 2], atol=1e-15)
    _, T, faces = load("pyramid")
    z = fiber_point(T, (Q(0), Q(0), Q(1)), np.zeros(5))
    assert list(z) == [1, 0, 0, 0, 0]


def test_simple_vertex_fiber_has_n_zeros():
    P, T, faces = load("cube")
    for F in faces:
        if F.dim == 0:
            z = fiber_point(T, F.witness)
            assert int(np.sum(z == 0)) == P.n


def test_fiber_point_infeasible():
    _, T, _ = load("interval")
    with pytest.raises(InfeasibleError) as exc:
        fiber_point(T, [Q(2)])
    assert exc.value.index == 1
    with pytest.raises(InfeasibleError) as exc:
        fiber_point(T, [-0.5])
    assert exc.value.index == 0


def test_Phi_examples():
    _, T, _ = load("interval")
    assert moment_Phi(T, [1, 0])[0] == pytest.approx(1.0, abs=1e-15)
    assert moment_Phi(T, [0.5, math.sqrt(3) / 2])[0] == pytest.approx(0.25, abs=1e-15)
    with pytest.raises(LevelSetError, match="not on level set"):
        moment_Phi(T, [1, 1])


def test_Phi_round_trip(fixture_name):
    _, T, faces = load(fixture_name)
    for rec in sample_records(T, faces, 50, seed=3):
        assert rec["phi_residual"] <= 1e-10
        assert rec["psi_norm"] <= 1e-10


def test_classify_point_examples():
    _, T, faces = load("pyramid")
    assert classify_point(T, faces, [1, 0, 0, 0, 0]) is faces[{1, 2, 3, 4}]
    _, T, faces = load("interval")
    assert classify_point(T, faces, [0.5, math.sqrt(3) / 2]) is faces.interior
    assert classify_point(T, faces, [0, 1]) is faces[{0}]


def test_classify_point_rejects_bad_patterns():
    _, T, faces = load("pyramid")
    # opposite slants meet only at the apex, so {2, 3} is not an active set
    with pytest.raises(ClassificationError, match="matches no face"):
        classify_point(T, faces, [1, 0, 0, 1, 1], Tolerances())


def test_surjectivity(fixture_name):
    _, T, faces = load(fixture_name)
    for k, F in enumerate(faces):
        theta = rng_for(0, 1, k).uniform(0, 2 * np.pi, T.d)
        assert classify_point(T, faces, fiber_point(T, F.witness, theta)) is F


def _points_over(T, F, count, seed=11):
    for i in range(count):
        rng = rng_for(seed, 3, i)
        mu = sample_face_mu(T, F, rng)
        yield fiber_point(T, mu, rng.uniform(0, 2 * np.pi, T.d))


def test_rank_examples():
    _, T, faces = load("interval")
    z = fiber_point(T, [Q(1) / Q(3)], [0.3, 1.1])
    assert rank_dPsi(T, z) == 1
    _, T, faces = load("pyramid")
    assert rank_dPsi(T, [1, 0, 0, 0, 0]) == 1
    base_vertex = faces[{0, 1, 3}]
    assert rank_dPsi(T, fiber_point(T, base_vertex.witness)) == 2


def test_symplectic_examples():
    _, T, faces = load("interval")
    z = fiber_point(T, [Q(1) / Q(3)], [0.3, 1.1])
    assert tangent_basis(T, z).shape[1] == 3
    assert check_symplectic_rank(T, faces.interior, z) == (2, 1)
    _, T, faces = load("pyramid")
    assert check_symplectic_rank(T, faces[{1, 2, 3, 4}], np.array([1, 0, 0, 0, 0], complex)) == (0, 1)
    base = faces[{0}]
    assert base.dim == 2
    z = next(_points_over(T, base, 1))
    assert check_symplectic_rank(T, base, z) == (4, 2)


def test_symplectic_rejects_wrong_face():
    _, T, faces = load("interval")
    with pytest.raises(ClassificationError):
        check_symplectic_rank(T, faces[{0}], [0.5, 0.5])


def test_rank_formulas(fixture_name):
    P, T, faces = load(fixture_name)
    for F in faces:
        k = stabilizer_data(T, F).dim_n
        for z in _points_over(T, F, 5):
            assert rank_dPsi(T, z) == T.dim_n - k
            assert check_symplectic_rank(T, F, z) == (2 * F.dim, T.dim_n - k)


def test_hamiltonian_zero_xi():
    _, T, _ = load("interval")
    assert check_hamiltonian(T, [0.5, math.sqrt(3) / 2], [0.0, 0.0]) == 0.0


def test_hamiltonian_interval_example():
    _, T, _ = load("interval")
    z = np.array([0.5, math.sqrt(3) / 2], complex)
    assert check_hamiltonian(T, z, [1.0, 0.0]) <= 1e-6


def test_hamiltonian_convergence():
    _, T, faces = load("pyramid")
    z = fiber_point(T, faces.interior.witness, rng_for(5).uniform(0, 2 * np.pi, T.d))
    xi = np.array([1.2, -0.7, 0.9, -1.4, 0.6])
    r1 = check_hamiltonian(T, z, xi, 1e-4)
    r2 = check_hamiltonian(T, z, xi, 5e-5)
    assert r1 <= 1e-6
    assert r1 / r2 >= 3.0


def test_hamiltonian_sign_convention():
    # the opposite flow direction would fail by the full size of the velocity
    _, T, _ = load("interval")
    z = np.array([0.5, math.sqrt(3) / 2], complex)
    xi = np.array([1.0, 0.0])
    assert check_hamiltonian(T, np.conj(z), xi) <= 1e-6


def test_n_directions_are_constant_on_level_set():
    _, T, faces = load("pyramid")
    z = fiber_point(T, faces.interior.witness, np.linspace(0, 1, T.d))
    for xi in T.kernel_f.T:
        assert level_tangent_derivative(T, z, xi) <= 1e-8
    # a direction outside n is not
    assert level_tangent_derivative(T, z, np.eye(T.d)[0]) > 1e-3


def test_phase_invariance():
    _, T, faces = load("cube")
    z = fiber_point(T, faces.interior.witness, np.zeros(T.d))
    mu = moment_Phi(T, z)
    for xi in T.kernel_f.T:
        for t in (0.0, 0.5, 1.0):
            w = np.exp(-2j * xi * t) * z
            assert np.max(np.abs(moment_Phi(T, w) - mu)) <= 1e-8


def test_sample_records_deterministic():
    _, T, faces = load("square")
    a = sample_records(T, faces, 10, seed=9)
    b = sample_records(T, faces, 10, seed=9)
    assert a == b
    assert len(a) == 10 + len(faces)
    assert sample_records(T, faces, 3, seed=9, per_face=False) == a[:3]


def test_tolerance_overrides():
    tol = Tolerances().with_overrides({"zero": 1e-6})
    assert tol.zero == 1e-6 and tol.rank == 1e-8
    with pytest.raises(ValueError, match="unknown tolerance"):
        Tolerances().with_overrides({"bogus": 1.0})
