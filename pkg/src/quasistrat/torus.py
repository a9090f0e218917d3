"""The linear algebra of ``pi: R^d -> d, e_j -> X_j`` and its kernel."""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .field import Field, FieldError, Matrix, Scalar, _kernel, rational_relation_rank
from .polytope import Face, HPolytope

__all__ = [
    "TorusError",
    "TorusData",
    "StabilizerData",
    "build_torus_data",
    "rationality_verdict",
    "stabilizer_data",
]


class TorusError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class TorusData:
    """``pi`` (n x d, columns X_j), a basis of its kernel and the quasilattice generators.

    ``iota_star`` sends a covector ``c`` on ``R^d`` to ``(<c, k_1>, ..., <c, k_m>)``
    for the kernel basis ``k_i``; ``pi_star`` is the transpose of ``pi``.
    """

    polytope: HPolytope
    pi: Matrix
    kernel_basis: tuple[tuple[Scalar, ...], ...]
    generators: tuple[tuple[Scalar, ...], ...]

    @property
    def field(self) -> Field:
        return self.pi.field

    @property
    def n(self) -> int:
        return self.pi.nrows

    @property
    def d(self) -> int:
        return self.pi.ncols

    @property
    def dim_n(self) -> int:
        return len(self.kernel_basis)

    @property
    def pi_star(self) -> Matrix:
        return self.pi.T

    @property
    def iota_star(self) -> Matrix:
        return Matrix(self.kernel_basis, self.field, self.d)

    @cached_property
    def kernel_f(self) -> np.ndarray:
        """Kernel basis as the columns of a ``d x (d-n)`` float array."""
        if not self.kernel_basis:
            return np.zeros((self.d, 0))
        return self.iota_star.to_numpy().T

    @cached_property
    def normals_f(self) -> np.ndarray:
        """``d x n`` float array with rows ``X_j`` (the matrix of ``pi_star``)."""
        return self.pi.to_numpy().T

    @cached_property
    def offsets_f(self) -> np.ndarray:
        return self.polytope.float_offsets()

    @cached_property
    def pi_star_pinv(self) -> np.ndarray:
        return np.linalg.pinv(self.normals_f)


def build_torus_data(P: HPolytope) -> TorusData:
    pi = Matrix.from_columns(P.normals, P.field, P.n)
    if pi.rank() < P.n:
        raise TorusError("normals must span the space: rank(pi) < n")
    ker = tuple(_kernel(pi))
    T = TorusData(P, pi, ker, tuple(P.normals) + tuple(P.extra_generators))
    if T.dim_n != P.d - P.n:
        raise TorusError(f"kernel has dimension {T.dim_n}, expected {P.d - P.n}")
    check_exactness(T)
    return T


def check_exactness(T: TorusData) -> None:
    """``0 -> d* -> (R^d)* -> n* -> 0``: composite is zero and ranks add up to ``d``."""
    if T.dim_n and not (T.iota_star @ T.pi_star).is_zero():
        raise TorusError("iota_star o pi_star is not zero")
    r_pi = T.pi_star.rank()
    r_iota = T.iota_star.rank() if T.dim_n else 0
    if r_pi != T.n or r_pi + r_iota != T.d:
        raise TorusError(f"sequence not exact: rank pi* = {r_pi}, rank iota* = {r_iota}, d = {T.d}")


def rationality_verdict(T: TorusData) -> str:
    """``"lattice"`` if the generators span a Q-space of dimension n, else ``"nonrational"``."""
    if not T.field.exact:
        raise FieldError("verdict requires exact field")
    k = rational_relation_rank(T.generators)
    return "lattice" if k == T.n else "nonrational"


@dataclass(frozen=True, eq=False)
class StabilizerData:
    face: Face
    s_basis: tuple[int, ...]
    n_basis: tuple[tuple[Scalar, ...], ...]

    @property
    def dim_s(self) -> int:
        return len(self.s_basis)

    @property
    def dim_n(self) -> int:
        return len(self.n_basis)


def stabilizer_data(T: TorusData, F: Face) -> StabilizerData:
    """Lie algebras of the stabilizers at points with zero pattern ``I_F``.

    ``s^F`` is spanned by ``e_j`` for ``j`` in ``I_F``; ``n^F = n ∩ s^F`` is
    the kernel of ``pi`` restricted to those coordinates.
    """
    idx = F.I
    f = T.field
    basis = []
    if idx:
        for v in _kernel(T.pi.select_columns(idx)):
            full = [f.zero] * T.d
            for j, c in zip(idx, v):
                full[j] = c
            basis.append(tuple(full))
    return StabilizerData(F, idx, tuple(basis))
