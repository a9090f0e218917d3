"""Pieces of the quotient, their order, and the recursive link descriptors.

There is one singular piece per singular face (real dimension ``2p``) and
one regular piece collecting every regular face (dimension ``2n``).  The
link at a singular face ``F`` is described by ``psi_F``, the moment map of
``N^F`` on the coordinates ``I_F``, together with the links of the
singular faces above ``F``.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .field import Scalar
from .moment import rng_for
from .polytope import Face, FacePoset, HPolytope
from .torus import StabilizerData, TorusData, stabilizer_data

__all__ = [
    "Piece",
    "Stratification",
    "LinkDescriptor",
    "build_stratification",
    "stratum_dimension",
    "build_link",
    "psi_F",
    "sample_link_points",
]


@dataclass(frozen=True, eq=False)
class Piece:
    kind: str  # "regular" | "singular"
    dim: int
    faces: tuple[Face, ...]

    @property
    def face(self) -> Face | None:
        """The defining face for a singular piece; None for the regular piece."""
        return self.faces[0] if self.kind == "singular" else None

    @property
    def face_I(self) -> tuple[int, ...]:
        return self.face.I if self.face is not None else ()

    def __repr__(self):
        return f"Piece({self.kind}, dim={self.dim}, I={list(self.face_I)})"


class Stratification:
    """Singular pieces in canonical face order, then the regular piece."""

    def __init__(self, n: int, pieces):
        self.n = n
        self.pieces: tuple[Piece, ...] = tuple(pieces)

    @property
    def regular(self) -> Piece:
        return self.pieces[-1]

    @property
    def singular(self) -> tuple[Piece, ...]:
        return self.pieces[:-1]

    def __len__(self):
        return len(self.pieces)

    def __iter__(self):
        return iter(self.pieces)

    def leq(self, a: Piece, b: Piece) -> bool:
        if b.kind == "regular":
            return True
        if a.kind == "regular":
            return False
        return b.face.active <= a.face.active

    def covers(self) -> list[tuple[Piece, Piece]]:
        out = []
        for a in self.pieces:
            ups = [b for b in self.pieces if b is not a and self.leq(a, b)]
            for b in ups:
                if not any(c is not b and self.leq(c, b) for c in ups):
                    out.append((a, b))
        return out


def build_stratification(P: HPolytope, T: TorusData, faces: FacePoset) -> Stratification:
    singular = [Piece("singular", 2 * F.dim, (F,)) for F in faces if F.singular]
    regular = Piece("regular", 2 * P.n, tuple(F for F in faces if not F.singular))
    return Stratification(P.n, singular + [regular])


def stratum_dimension(piece: Piece) -> int:
    return piece.dim


@dataclass(frozen=True, eq=False)
class LinkDescriptor:
    face: Face
    n: int
    stabilizer: StabilizerData
    children: tuple["LinkDescriptor", ...]
    epsilon: float = 1.0

    @property
    def dim(self) -> int:
        return 2 * self.n - 2 * self.face.dim - 1

    @property
    def psi_coefficients(self) -> dict[int, tuple[Scalar, ...]]:
        """``iota_F^*(e_j)`` for each ``j`` in ``I_F``, in the ``n^F`` basis."""
        return {j: tuple(v[j] for v in self.stabilizer.n_basis) for j in self.face.I}

    @property
    def depth(self) -> int:
        return 1 + max((c.depth for c in self.children), default=0)

    def walk(self):
        yield self
        for c in self.children:
            yield from c.walk()


def build_link(P: HPolytope, T: TorusData, faces: FacePoset, F: Face, epsilon: float = 1.0,
               _memo: dict | None = None) -> LinkDescriptor:
    if not F.singular:
        raise ValueError("links are built at singular faces only")
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    memo = {} if _memo is None else _memo
    if F.active in memo:
        return memo[F.active]
    kids = tuple(build_link(P, T, faces, G, epsilon, memo) for G in faces.above(F) if G.singular)
    link = LinkDescriptor(F, P.n, stabilizer_data(T, F), kids, float(epsilon))
    memo[F.active] = link
    return link


def psi_F(link: LinkDescriptor, w) -> np.ndarray:
    """``sum_j |w_j|^2 iota_F^*(e_j)`` for ``w`` indexed like ``I_F``."""
    w = np.asarray(w, dtype=complex)
    C = np.array([[c.to_float() for c in link.psi_coefficients[j]] for j in link.face.I]).reshape(len(w), -1)
    return (np.abs(w) ** 2) @ C


def sample_link_points(P: HPolytope, T: TorusData, faces: FacePoset, F: Face, epsilon: float,
                       count: int, seed: int) -> list[np.ndarray]:
    """Points of ``psi_F^-1(0)`` on the sphere of radius ``epsilon`` in C^{I_F}.

    The squared moduli are ``<y, X_j>`` (``j`` in ``I_F``) for ``y`` pointing
    from the witness of ``F`` to a random interior point; such vectors are
    exactly the nonnegative solutions of ``psi_F = 0``.  They are rescaled to
    the sphere and given random phases.
    """
    if not F.singular:
        raise ValueError("links are built at singular faces only")
    if count <= 0:
        return []
    f = P.field
    verts = P.vertices
    idx = F.I
    out = []
    for i in range(count):
        rng = rng_for(seed, 2, i)
        wts = rng.integers(1, 1025, size=len(verts))
        tot = Fraction(int(wts.sum()))
        mu = tuple(sum((f(Fraction(int(a))) * v.point[k] for a, v in zip(wts, verts)), f.zero) / f(tot)
                   for k in range(P.n))
        y = tuple(m - w for m, w in zip(mu, F.witness))
        s = np.array([P.pairing(y, j).to_float() for j in idx])
        s *= epsilon ** 2 / s.sum()
        theta = rng.uniform(0.0, 2 * np.pi, len(idx))
        out.append(np.sqrt(s) * np.exp(1j * theta))
    return out
