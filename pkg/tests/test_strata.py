import numpy as np
import pytest

from quasistrat.strata import build_link, build_stratification, psi_F, sample_link_points, stratum_dimension

from conftest import load


@pytest.mark.parametrize("name, singular_dims", [
    ("interval", []), ("square", []), ("cube", []), ("triangle_sqrt2", []),
    ("pyramid", [0]), ("pyramid_sqrt2", [0]), ("octahedron", [0] * 6),
])
def test_pieces(name, singular_dims):
    P, T, faces = load(name)
    S = build_stratification(P, T, faces)
    assert [stratum_dimension(p) for p in S.singular] == singular_dims
    assert stratum_dimension(S.regular) == 2 * P.n
    assert len(S) == len(singular_dims) + 1


def test_pyramid_apex_piece():
    P, T, faces = load("pyramid")
    S = build_stratification(P, T, faces)
    (apex,) = S.singular
    assert apex.face is faces[{1, 2, 3, 4}]
    assert S.covers() == [(apex, S.regular)]


def test_regular_piece_collects_all_regular_faces(fixture_name):
    P, T, faces = load(fixture_name)
    S = build_stratification(P, T, faces)
    assert set(S.regular.faces) == {F for F in faces if not F.singular}
    assert all(S.leq(p, S.regular) for p in S)


def test_prism_singular_edge_below_nothing_else():
    P, T, faces = load("pyramid_prism")
    S = build_stratification(P, T, faces)
    sing = sorted(S.singular, key=lambda p: p.dim)
    assert [p.dim for p in sing] == [0, 0, 2]
    edge = sing[-1]
    for v in sing[:2]:
        assert S.leq(v, edge)
    # singular pieces are ordered by face containment
    for a in S.singular:
        for b in S.singular:
            assert S.leq(a, b) == (a.face.active >= b.face.active)


def test_dimension_bounds(fixture_name):
    P, T, faces = load(fixture_name)
    for F in faces.singular_faces():
        L = build_link(P, T, faces, F)
        assert 2 * F.dim <= 2 * P.n - 4
        assert L.dim == 2 * P.n - 2 * F.dim - 1
        assert 2 * F.dim + L.dim + 1 == 2 * P.n


def test_pyramid_apex_link():
    P, T, faces = load("pyramid")
    L = build_link(P, T, faces, faces[{1, 2, 3, 4}])
    assert L.dim == 5 and L.children == () and L.depth == 1
    assert set(L.psi_coefficients) == {1, 2, 3, 4}


def test_depth_two_link():
    P, T, faces = load("pyramid_prism")
    depths = [build_link(P, T, faces, F).depth for F in faces.singular_faces()]
    assert max(depths) == 2
    assert all(d <= P.n for d in depths)
    edge = next(F for F in faces.singular_faces() if F.dim == 1)
    L = build_link(P, T, faces, edge)
    # the edge's link has no singular children; the vertex links contain it
    assert L.children == ()
    vertex = next(F for F in faces.singular_faces() if F.dim == 0)
    assert [c.face for c in build_link(P, T, faces, vertex).children] == [edge]


def test_build_link_rejects_regular_face():
    P, T, faces = load("cube")
    with pytest.raises(ValueError, match="singular faces only"):
        build_link(P, T, faces, faces.interior)
    with pytest.raises(ValueError, match="singular faces only"):
        sample_link_points(P, T, faces, faces.interior, 1.0, 5, 0)


def test_link_sampler(fixture_name):
    P, T, faces = load(fixture_name)
    for F in faces.singular_faces():
        L = build_link(P, T, faces, F)
        for eps in (1.0, 0.25):
            for w in sample_link_points(P, T, faces, F, eps, 100, seed=4):
                assert np.max(np.abs(psi_F(L, w))) <= 1e-10
                assert abs(np.linalg.norm(w) - eps) <= 1e-10
                for t in (0.5, 2.0):
                    assert np.max(np.abs(psi_F(L, t * w))) <= 1e-10
                # off the face: every coordinate in I_F is nonzero
                assert np.all(np.abs(w) > 0)


def test_link_sampler_pyramid_pattern():
    P, T, faces = load("pyramid")
    F = faces[{1, 2, 3, 4}]
    for w in sample_link_points(P, T, faces, F, 1.0, 20, seed=1):
        m = np.abs(w) ** 2
        # opposite slants carry equal total weight
        assert abs((m[0] + m[1]) - (m[2] + m[3])) <= 1e-12


def test_link_sampler_edge_cases():
    P, T, faces = load("pyramid")
    F = faces[{1, 2, 3, 4}]
    assert sample_link_points(P, T, faces, F, 1.0, 0, seed=1) == []
    a = sample_link_points(P, T, faces, F, 1.0, 5, seed=1)
    b = sample_link_points(P, T, faces, F, 1.0, 5, seed=1)
    assert all(np.array_equal(x, y) for x, y in zip(a, b))
    with pytest.raises(ValueError):
        build_link(P, T, faces, F, epsilon=0.0)
