"""Convex polytopes given by facet inequalities ``<mu, X_j> >= lambda_j``.

Faces are keyed by their active set ``I_F`` (0-based facet indices).  The
face lattice is built from the vertices: every active set of a nonempty
face is an intersection of vertex active sets, and every such
intersection is one.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field as dc_field
from functools import cached_property
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .field import Field, FieldError, Matrix, Scalar, _kernel, _solve

__all__ = [
    "PolytopeError",
    "HPolytope",
    "Vertex",
    "Face",
    "FacePoset",
    "load_polytope",
    "read_polytope",
    "enumerate_faces",
    "classify_face",
    "faces_by_subsets",
]


class PolytopeError(ValueError):
    """Input document does not describe a bounded, full-dimensional, irredundant polytope."""

    def __init__(self, code: str, message: str):
        super().__init__(message)
        self.code = code


@dataclass(frozen=True)
class Vertex:
    point: tuple[Scalar, ...]
    active: frozenset[int]


@dataclass(frozen=True, eq=False)
class HPolytope:
    """The polytope ``{mu : <mu, X_j> >= lambda_j, j = 0..d-1}`` in an ``n``-dimensional space."""

    n: int
    normals: tuple[tuple[Scalar, ...], ...]
    offsets: tuple[Scalar, ...]
    field: Field
    extra_generators: tuple[tuple[Scalar, ...], ...] = ()
    name: str = dc_field(default="", compare=False)

    @property
    def d(self) -> int:
        return len(self.normals)

    def normal_matrix(self, idx: Iterable[int] | None = None) -> Matrix:
        """Rows ``X_j`` for ``j`` in ``idx`` (all facets by default)."""
        idx = range(self.d) if idx is None else sorted(idx)
        return Matrix([self.normals[j] for j in idx], self.field, self.n)

    def pairing(self, mu: Sequence[Scalar], j: int) -> Scalar:
        acc = self.field.zero
        for m, x in zip(mu, self.normals[j]):
            acc = acc + m * x
        return acc

    def slack(self, mu: Sequence[Scalar]) -> tuple[Scalar, ...]:
        """``<mu, X_j> - lambda_j`` for every facet."""
        return tuple(self.pairing(mu, j) - self.offsets[j] for j in range(self.d))

    def active_set(self, mu: Sequence[Scalar]) -> frozenset[int]:
        return frozenset(j for j, s in enumerate(self.slack(mu)) if s.is_zero())

    def contains(self, mu: Sequence[Scalar]) -> bool:
        return all(s.sign() >= 0 for s in self.slack(mu))

    @cached_property
    def vertices(self) -> tuple[Vertex, ...]:
        """All vertices, from every rank-``n`` equality subsystem that is feasible."""
        found: dict[frozenset[int], Vertex] = {}
        for J in itertools.combinations(range(self.d), self.n):
            A = self.normal_matrix(J)
            if A.rank() < self.n:
                continue
            mu = _solve(A, [self.offsets[j] for j in J])
            if mu is None or not self.contains(mu):
                continue
            act = self.active_set(mu)
            if act not in found:
                found[act] = Vertex(mu, act)
        return tuple(sorted(found.values(), key=lambda v: sorted(v.active)))

    def float_normals(self):
        return Matrix(self.normals, self.field, self.n).to_numpy()

    def float_offsets(self):
        import numpy as np
        return np.array([s.to_float() for s in self.offsets], dtype=float)

    def to_json(self) -> dict:
        enc = self.field.encode
        doc = {
            "dimension": self.n,
            "field": self.field.to_json(),
            "facets": [{"normal": [enc(x) for x in X], "offset": enc(l)}
                       for X, l in zip(self.normals, self.offsets)],
        }
        if self.extra_generators:
            doc["extra_generators"] = [[enc(x) for x in g] for g in self.extra_generators]
        return doc


@dataclass(frozen=True, eq=False)
class Face:
    """A nonempty open face, identified by its active set."""

    active: frozenset[int]
    dim: int
    n: int
    witness: tuple[Scalar, ...]
    vertex_ids: tuple[int, ...]

    @property
    def r(self) -> int:
        return len(self.active)

    @property
    def I(self) -> tuple[int, ...]:
        return tuple(sorted(self.active))

    @property
    def singular(self) -> bool:
        return self.r > self.n - self.dim

    @property
    def kind(self) -> str:
        return "singular" if self.singular else "regular"

    @property
    def sort_key(self):
        return (self.dim, self.I)

    def __eq__(self, other):
        if not isinstance(other, Face):
            return NotImplemented
        return self.active == other.active

    def __hash__(self):
        return hash(self.active)

    def __repr__(self):
        return f"Face(I={list(self.I)}, p={self.dim}, r={self.r}, {self.kind})"


class FacePoset:
    """All nonempty faces in canonical order ``(p, I_F)``; ``F <= G`` iff ``I_G`` is a subset of ``I_F``."""

    def __init__(self, polytope: HPolytope, faces: Iterable[Face]):
        self.polytope = polytope
        self.faces: tuple[Face, ...] = tuple(sorted(faces, key=lambda f: f.sort_key))
        self._by_active = {f.active: f for f in self.faces}
        if len(self._by_active) != len(self.faces):
            raise ValueError("duplicate active sets in face list")

    def __len__(self):
        return len(self.faces)

    def __iter__(self):
        return iter(self.faces)

    def __getitem__(self, active) -> Face:
        return self._by_active[frozenset(active)]

    def get(self, active) -> Face | None:
        return self._by_active.get(frozenset(active))

    @property
    def interior(self) -> Face:
        return self._by_active[frozenset()]

    @staticmethod
    def leq(F: Face, G: Face) -> bool:
        return G.active <= F.active

    def above(self, F: Face) -> list[Face]:
        """Faces ``G > F``, i.e. faces whose closure strictly contains ``F``."""
        return [G for G in self.faces if G.active < F.active]

    def covers(self, faces: Sequence[Face] | None = None) -> list[tuple[Face, Face]]:
        """Covering pairs ``(F, G)`` with ``F < G`` and nothing strictly between, within ``faces``."""
        faces = self.faces if faces is None else tuple(faces)
        out = []
        for F in faces:
            ups = [G for G in faces if G.active < F.active]
            for G in ups:
                if not any(G.active < H.active < F.active for H in ups):
                    out.append((F, G))
        return out

    def f_vector(self) -> list[int]:
        counts = [0] * (self.polytope.n + 1)
        for F in self.faces:
            counts[F.dim] += 1
        return counts

    def singular_faces(self) -> list[Face]:
        return [F for F in self.faces if F.singular]


# -- loading -----------------------------------------------------------------


def _vector(obj, n: int, field: Field, what: str) -> tuple[Scalar, ...]:
    if not isinstance(obj, list) or len(obj) != n:
        raise PolytopeError("malformed_input", f"{what} must be a list of {n} scalars")
    try:
        return tuple(field.parse(x) for x in obj)
    except FieldError as e:
        raise PolytopeError("malformed_scalar", str(e)) from None


def load_polytope(doc: Mapping | str, name: str = "") -> HPolytope:
    """Parse and validate an input document (a mapping or a JSON string)."""
    if isinstance(doc, str):
        try:
            doc = json.loads(doc)
        except json.JSONDecodeError as e:
            raise PolytopeError("malformed_json", f"malformed JSON: {e}") from None
    if not isinstance(doc, Mapping):
        raise PolytopeError("malformed_input", "input document must be a JSON object")
    n = doc.get("dimension")
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise PolytopeError("malformed_input", "dimension must be a positive integer")
    try:
        field = Field.from_json(doc.get("field", {"kind": "rational"}))
    except FieldError as e:
        raise PolytopeError("field", str(e)) from None
    facets = doc.get("facets")
    if not isinstance(facets, list) or not facets:
        raise PolytopeError("malformed_input", "facets must be a nonempty list")
    normals, offsets = [], []
    for k, fct in enumerate(facets):
        if not isinstance(fct, Mapping) or "normal" not in fct or "offset" not in fct:
            raise PolytopeError("malformed_input", f"facet {k} needs 'normal' and 'offset'")
        normals.append(_vector(fct["normal"], n, field, f"facet {k} normal"))
        offsets.append(_vector([fct["offset"]], 1, field, f"facet {k} offset")[0])
    extras = tuple(_vector(g, n, field, "extra generator") for g in doc.get("extra_generators", []))
    P = HPolytope(n, tuple(normals), tuple(offsets), field, extras, name=name)
    validate_polytope(P)
    return P


def read_polytope(path: str | Path) -> HPolytope:
    path = Path(path)
    return load_polytope(path.read_text(), name=path.stem)


def _is_bounded(P: HPolytope) -> bool:
    # Recession cone {y : <y, X_j> >= 0} is pointed (normals span); it is {0}
    # iff no extreme ray exists.  Extreme rays solve n-1 independent equalities.
    for J in itertools.combinations(range(P.d), P.n - 1):
        A = P.normal_matrix(J) if J else Matrix([], P.field, P.n)
        ker = _kernel(A)
        if len(ker) != 1:
            continue
        y = ker[0]
        for s in (1, -1):
            ray = [s * c for c in y]
            if all(P.pairing(ray, j).sign() >= 0 for j in range(P.d)):
                return False
    return True


def validate_polytope(P: HPolytope) -> None:
    if P.normal_matrix().rank() < P.n:
        raise PolytopeError("unbounded", "unbounded polytope: facet normals do not span the space")
    if not _is_bounded(P):
        raise PolytopeError("unbounded", "unbounded polytope: normals do not positively span the space")
    verts = P.vertices
    if not verts:
        raise PolytopeError("empty_interior", "empty polytope: no feasible vertex")
    if frozenset.intersection(*(v.active for v in verts)):
        raise PolytopeError("empty_interior", "polytope has empty interior")
    for j in range(P.d):
        incident = [v.active for v in verts if j in v.active]
        if not incident or frozenset.intersection(*incident) != {j}:
            raise PolytopeError("redundant_facet", f"facet inequality {j + 1} does not define a facet")


# -- faces ---------------------------------------------------------------------


def _face_dim(P: HPolytope, active) -> int:
    if not active:
        return P.n
    return P.n - P.normal_matrix(active).rank()


def _barycenter(P: HPolytope, ids: Sequence[int]) -> tuple[Scalar, ...]:
    f = P.field
    pts = [P.vertices[i].point for i in ids]
    inv = f(len(pts)).inverse()
    return tuple(sum((p[k] for p in pts), f.zero) * inv for k in range(P.n))


def enumerate_faces(P: HPolytope) -> FacePoset:
    """Every nonempty face of ``P`` with an exact relative-interior witness."""
    vsets = [v.active for v in P.vertices]
    seen = set(vsets)
    frontier = list(vsets)
    while frontier:
        new = []
        for S in frontier:
            for V in vsets:
                T = S & V
                if T not in seen:
                    seen.add(T)
                    new.append(T)
        frontier = new
    faces = []
    for S in seen:
        ids = tuple(i for i, V in enumerate(vsets) if S <= V)
        w = _barycenter(P, ids)
        if P.active_set(w) != S:
            raise RuntimeError(f"witness for active set {sorted(S)} is not in the relative interior")
        faces.append(Face(S, _face_dim(P, S), P.n, w, ids))
    return FacePoset(P, faces)


def classify_face(P: HPolytope, F: Face) -> str:
    """``"singular"`` when ``r_F > n - p``, else ``"regular"``."""
    if F.r < P.n - F.dim:
        raise ValueError(f"inconsistent face {F!r}: r_F < n - p")
    return "singular" if F.r > P.n - F.dim else "regular"


def faces_by_subsets(P: HPolytope) -> dict[frozenset[int], int]:
    """Brute-force active sets: test every subset ``S`` of facets.

    ``S`` is an active set iff some vertex satisfies all of ``S`` and the
    vertices satisfying ``S`` have common active set exactly ``S``.  Maps
    each active set to its dimension.
    """
    vsets = [v.active for v in P.vertices]
    out = {}
    for k in range(P.d + 1):
        for S in itertools.combinations(range(P.d), k):
            S = frozenset(S)
            inc = [V for V in vsets if S <= V]
            if inc and frozenset.intersection(*inc) == S:
                out[S] = _face_dim(P, S)
    return out
