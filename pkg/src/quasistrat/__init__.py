"""Symplectic quotients of convex polytopes, possibly nonrational and nonsimple.

Typical use::

    from quasistrat import read_polytope, enumerate_faces, build_torus_data

    P = read_polytope("pyramid.json")
    faces = enumerate_faces(P)
    T = build_torus_data(P)
"""
from .field import Field, FieldError, Matrix, Scalar, exact_kernel, rational_relation_rank, solve_exact
from .moment import (
    DEFAULT_TOL,
    Tolerances,
    check_hamiltonian,
    check_symplectic_rank,
    classify_point,
    fiber_point,
    moment_J,
    moment_Phi,
    moment_Psi,
    rank_dPsi,
)
from .polytope import (
    Face,
    FacePoset,
    HPolytope,
    PolytopeError,
    classify_face,
    enumerate_faces,
    faces_by_subsets,
    load_polytope,
    read_polytope,
)
from .strata import build_link, build_stratification, sample_link_points, stratum_dimension
from .torus import TorusData, build_torus_data, rationality_verdict, stabilizer_data

__version__ = "0.1.0"
