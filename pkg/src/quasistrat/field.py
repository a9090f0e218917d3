"""Scalars over Q or a real quadratic field Q(sqrt(D)), and dense matrices over them.

Everything polytope-related is stored as :class:`Scalar` so that nonrational
normals such as ``(-1, -sqrt(2))`` stay exact.  Floats only appear through
:meth:`Scalar.to_float` / :meth:`Matrix.to_numpy`, or in the explicit
``float`` field mode where comparisons use an absolute tolerance.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "Field",
    "FieldError",
    "Scalar",
    "Matrix",
    "exact_kernel",
    "solve_exact",
    "rational_relation_rank",
]


class FieldError(ValueError):
    """Raised for malformed scalars, mixed fields or exact-only operations in float mode."""


def _is_squarefree(D: int) -> bool:
    if D < 2:
        return False
    k = 2
    while k * k <= D:
        if D % (k * k) == 0:
            return False
        k += 1
    return True


def _parse_fraction(obj) -> Fraction:
    if isinstance(obj, bool):
        raise FieldError(f"malformed scalar {obj!r}")
    if isinstance(obj, int):
        return Fraction(obj)
    if isinstance(obj, str):
        try:
            return Fraction(obj.strip())
        except (ValueError, ZeroDivisionError):
            raise FieldError(f"malformed scalar {obj!r}") from None
    raise FieldError(f"malformed scalar {obj!r}")


def _sgn(x) -> int:
    return (x > 0) - (x < 0)


@dataclass(frozen=True)
class Field:
    """Field descriptor: ``rational``, ``quadratic`` (with ``D``) or ``float`` (with ``tol``)."""

    kind: str = "rational"
    D: int = 0
    tol: float = 0.0

    def __post_init__(self):
        if self.kind == "rational":
            if self.D or self.tol:
                raise FieldError("rational field takes no parameters")
        elif self.kind == "quadratic":
            if not isinstance(self.D, int) or isinstance(self.D, bool) or not _is_squarefree(self.D):
                raise FieldError(f"quadratic field needs a squarefree integer D >= 2, got {self.D!r}")
        elif self.kind == "float":
            if not self.tol > 0:
                raise FieldError("float field needs a positive tolerance")
        else:
            raise FieldError(f"unknown field kind {self.kind!r}")

    @classmethod
    def rational(cls) -> "Field":
        return cls("rational")

    @classmethod
    def quadratic(cls, D: int) -> "Field":
        return cls("quadratic", D=D)

    @classmethod
    def floating(cls, tol: float = 1e-9) -> "Field":
        return cls("float", tol=float(tol))

    @property
    def exact(self) -> bool:
        return self.kind != "float"

    def __call__(self, a=0, b=0) -> "Scalar":
        """Build ``a + b*sqrt(D)`` in this field."""
        if self.kind == "float":
            if b:
                raise FieldError("float field has no irrational part")
            return Scalar(float(a), 0.0, self)
        a, b = Fraction(a), Fraction(b)
        if b and self.kind == "rational":
            raise FieldError("rational field has no irrational part")
        return Scalar(a, b, self)

    @property
    def zero(self) -> "Scalar":
        return self(0)

    @property
    def one(self) -> "Scalar":
        return self(1)

    def sqrt_d(self) -> "Scalar":
        if self.kind != "quadratic":
            raise FieldError("sqrt(D) only exists in a quadratic field")
        return self(0, 1)

    # JSON encoding: "p/q" for rationals, ["p/q", "r/s"] for p/q + (r/s)sqrt(D).
    def parse(self, obj) -> "Scalar":
        if self.kind == "float":
            if isinstance(obj, bool):
                raise FieldError(f"malformed scalar {obj!r}")
            if isinstance(obj, (int, float)):
                return self(float(obj))
            if isinstance(obj, str):
                try:
                    return self(float(Fraction(obj.strip())))
                except (ValueError, ZeroDivisionError):
                    raise FieldError(f"malformed scalar {obj!r}") from None
            raise FieldError(f"malformed scalar {obj!r}")
        if isinstance(obj, (list, tuple)):
            if self.kind != "quadratic" or len(obj) != 2:
                raise FieldError(f"malformed scalar {obj!r}")
            return self(_parse_fraction(obj[0]), _parse_fraction(obj[1]))
        return self(_parse_fraction(obj))

    def encode(self, s: "Scalar"):
        if self.kind == "float":
            return s.a
        if self.kind == "quadratic":
            return [str(s.a), str(s.b)]
        return str(s.a)

    def to_json(self) -> dict:
        if self.kind == "quadratic":
            return {"kind": "quadratic", "D": self.D}
        if self.kind == "float":
            return {"kind": "float", "tol": self.tol}
        return {"kind": "rational"}

    @classmethod
    def from_json(cls, obj) -> "Field":
        if not isinstance(obj, dict) or "kind" not in obj:
            raise FieldError(f"malformed field descriptor {obj!r}")
        kind = obj["kind"]
        if kind == "rational":
            return cls.rational()
        if kind == "quadratic":
            return cls.quadratic(obj.get("D"))
        if kind == "float":
            return cls.floating(obj.get("tol", 1e-9))
        raise FieldError(f"unknown field kind {kind!r}")


class Scalar:
    """Immutable element ``a + b*sqrt(D)`` of a :class:`Field`."""

    __slots__ = ("a", "b", "field")

    def __init__(self, a, b, field: Field):
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "field", field)

    def __setattr__(self, name, value):
        raise AttributeError("Scalar is immutable")

    def _coerce(self, other) -> "Scalar":
        if isinstance(other, Scalar):
            if other.field != self.field:
                raise FieldError(f"mixed-field arithmetic: {self.field} vs {other.field}")
            return other
        if isinstance(other, (bool,)) or not isinstance(other, Rational):
            if isinstance(other, float) and self.field.kind == "float":
                return self.field(other)
            return NotImplemented
        return self.field(other)

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return Scalar(self.a + o.a, self.b + o.b, self.field)

    __radd__ = __add__

    def __neg__(self):
        return Scalar(-self.a, -self.b, self.field)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return Scalar(self.a - o.a, self.b - o.b, self.field)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o - self

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        D = self.field.D
        return Scalar(
            self.a * o.a + D * self.b * o.b,
            self.a * o.b + self.b * o.a,
            self.field,
        )

    __rmul__ = __mul__

    def inverse(self) -> "Scalar":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero scalar")
        if self.field.kind == "float":
            return Scalar(1.0 / self.a, 0.0, self.field)
        norm = self.a * self.a - self.field.D * self.b * self.b
        return Scalar(self.a / norm, -self.b / norm, self.field)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o * self.inverse()

    def sign(self) -> int:
        if self.field.kind == "float":
            return 0 if abs(self.a) <= self.field.tol else _sgn(self.a)
        sa, sb = _sgn(self.a), _sgn(self.b)
        if sb == 0:
            return sa
        if sa == 0 or sa == sb:
            return sb if sa == 0 else sa
        # opposite signs: |a| vs |b|sqrt(D); equality impossible for squarefree D
        return sa if self.a * self.a > self.field.D * self.b * self.b else sb

    def is_zero(self) -> bool:
        return self.sign() == 0

    def __bool__(self):
        return not self.is_zero()

    def __abs__(self):
        return -self if self.sign() < 0 else self

    def __eq__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        if self.field.kind == "float":
            return abs(self.a - o.a) <= self.field.tol
        return self.a == o.a and self.b == o.b

    def __hash__(self):
        if self.field.kind == "float":
            raise TypeError("float-mode scalars are not hashable")
        if self.b == 0:
            return hash(self.a)
        return hash((self.a, self.b, self.field.D))

    def _cmp(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return (self - o).sign()

    def __lt__(self, other):
        c = self._cmp(other)
        return c if c is NotImplemented else c < 0

    def __le__(self, other):
        c = self._cmp(other)
        return c if c is NotImplemented else c <= 0

    def __gt__(self, other):
        c = self._cmp(other)
        return c if c is NotImplemented else c > 0

    def __ge__(self, other):
        c = self._cmp(other)
        return c if c is NotImplemented else c >= 0

    def to_float(self) -> float:
        if self.field.kind == "float":
            return float(self.a)
        if self.b == 0:
            return float(self.a)
        root = math.sqrt(self.field.D)
        a, b = float(self.a), float(self.b)
        s = a + b * root
        if abs(s) < 0.5 * max(abs(a), abs(b * root)):
            # cancellation: use (a^2 - D b^2) / (a - b sqrt(D))
            norm = float(self.a * self.a - self.field.D * self.b * self.b)
            return norm / (a - b * root)
        return s

    __float__ = to_float

    def __repr__(self):
        if self.field.kind == "float":
            return f"Scalar({self.a!r})"
        if self.b == 0:
            return f"Scalar({self.a})"
        return f"Scalar({self.a} + {self.b}*sqrt({self.field.D}))"

    def __str__(self):
        if self.field.kind == "float" or self.b == 0:
            return str(self.a)
        return f"{self.a}+{self.b}*sqrt({self.field.D})"


class Matrix:
    """Immutable dense matrix of :class:`Scalar` entries.

    Row reduction uses a fixed pivot order (first nonzero entry in the
    current column, scanning rows top-down) so bases are reproducible.  In
    float mode the largest entry is taken instead and zero tests use the
    field tolerance.
    """

    __slots__ = ("rows", "nrows", "ncols", "field")

    def __init__(self, rows: Iterable[Sequence[Scalar]], field: Field, ncols: int | None = None):
        rows = tuple(tuple(r) for r in rows)
        if ncols is None:
            if not rows:
                raise ValueError("ncols is required for a matrix without rows")
            ncols = len(rows[0])
        for r in rows:
            if len(r) != ncols:
                raise ValueError("ragged matrix rows")
            for x in r:
                if not isinstance(x, Scalar) or x.field != field:
                    raise FieldError("matrix entries must be scalars of the matrix field")
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "nrows", len(rows))
        object.__setattr__(self, "ncols", ncols)
        object.__setattr__(self, "field", field)

    def __setattr__(self, name, value):
        raise AttributeError("Matrix is immutable")

    @classmethod
    def parse(cls, rows, field: Field) -> "Matrix":
        """Build from nested lists of numbers / JSON scalars."""
        rows = [[x if isinstance(x, Scalar) else field.parse(x) for x in r] for r in rows]
        return cls(rows, field)

    @classmethod
    def identity(cls, n: int, field: Field) -> "Matrix":
        return cls([[field.one if i == j else field.zero for j in range(n)] for i in range(n)], field, n)

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence[Scalar]], field: Field, nrows: int) -> "Matrix":
        return cls([[c[i] for c in columns] for i in range(nrows)], field, len(columns))

    @property
    def shape(self) -> tuple[int, int]:
        return self.nrows, self.ncols

    @property
    def T(self) -> "Matrix":
        return Matrix([[self.rows[i][j] for i in range(self.nrows)] for j in range(self.ncols)],
                      self.field, self.nrows)

    def column(self, j: int) -> tuple[Scalar, ...]:
        return tuple(r[j] for r in self.rows)

    def select_columns(self, idx: Sequence[int]) -> "Matrix":
        return Matrix([[r[j] for j in idx] for r in self.rows], self.field, len(idx))

    def __matmul__(self, other):
        if isinstance(other, Matrix):
            if self.ncols != other.nrows:
                raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
            cols = [other.column(j) for j in range(other.ncols)]
            return Matrix([[_dot(r, c, self.field) for c in cols] for r in self.rows], self.field, other.ncols)
        v = tuple(other)
        if len(v) != self.ncols:
            raise ValueError(f"shape mismatch {self.shape} @ vector of length {len(v)}")
        return tuple(_dot(r, v, self.field) for r in self.rows)

    def __eq__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        return self.shape == other.shape and self.rows == other.rows

    def __hash__(self):
        return hash((self.shape, self.rows))

    def is_zero(self) -> bool:
        return all(x.is_zero() for r in self.rows for x in r)

    def to_numpy(self) -> np.ndarray:
        return np.array([[x.to_float() for x in r] for r in self.rows], dtype=float).reshape(self.shape)

    def rref(self) -> tuple["Matrix", tuple[int, ...]]:
        """Reduced row echelon form and pivot columns."""
        m = [list(r) for r in self.rows]
        pivots = []
        piv_r = 0
        exact = self.field.exact
        for c in range(self.ncols):
            if piv_r == self.nrows:
                break
            if exact:
                sel = next((i for i in range(piv_r, self.nrows) if not m[i][c].is_zero()), None)
            else:
                cands = [i for i in range(piv_r, self.nrows) if not m[i][c].is_zero()]
                sel = max(cands, key=lambda i: abs(m[i][c].a)) if cands else None
            if sel is None:
                continue
            m[piv_r], m[sel] = m[sel], m[piv_r]
            inv = m[piv_r][c].inverse()
            m[piv_r] = [x * inv for x in m[piv_r]]
            for i in range(self.nrows):
                if i != piv_r and not m[i][c].is_zero():
                    f = m[i][c]
                    m[i] = [x - f * y for x, y in zip(m[i], m[piv_r])]
            pivots.append(c)
            piv_r += 1
        return Matrix(m, self.field, self.ncols), tuple(pivots)

    def rank(self) -> int:
        if self.nrows == 0 or self.ncols == 0:
            return 0
        return len(self.rref()[1])

    def kernel(self) -> list[tuple[Scalar, ...]]:
        """Null-space basis; one vector per free column, with a 1 in that column."""
        return _kernel(self)

    def __repr__(self):
        return f"Matrix({[[str(x) for x in r] for r in self.rows]}, {self.field.kind})"


def _dot(u, v, field: Field) -> Scalar:
    acc = field.zero
    for x, y in zip(u, v):
        acc = acc + x * y
    return acc


def _kernel(A: Matrix) -> list[tuple[Scalar, ...]]:
    f = A.field
    if A.nrows == 0:
        return [tuple(f.one if i == j else f.zero for i in range(A.ncols)) for j in range(A.ncols)]
    R, pivots = A.rref()
    free = [c for c in range(A.ncols) if c not in pivots]
    basis = []
    for fc in free:
        v = [f.zero] * A.ncols
        v[fc] = f.one
        for row, pc in enumerate(pivots):
            v[pc] = -R.rows[row][fc]
        basis.append(tuple(v))
    return basis


def _solve(A: Matrix, b: Sequence[Scalar]) -> tuple[Scalar, ...] | None:
    b = tuple(b)
    if len(b) != A.nrows:
        raise ValueError(f"dimension mismatch: matrix has {A.nrows} rows, rhs has {len(b)} entries")
    f = A.field
    aug = Matrix([list(r) + [bi] for r, bi in zip(A.rows, b)], f, A.ncols + 1)
    R, pivots = aug.rref()
    if pivots and pivots[-1] == A.ncols:
        return None
    x = [f.zero] * A.ncols
    for row, pc in enumerate(pivots):
        x[pc] = R.rows[row][A.ncols]
    return tuple(x)


def _require_exact(field: Field, what: str):
    if not field.exact:
        raise FieldError(f"{what} requires exact field")


def exact_kernel(A: Matrix) -> list[tuple[Scalar, ...]]:
    """Exact null-space basis of ``A``; ``len(result) == A.ncols - A.rank()``."""
    _require_exact(A.field, "exact kernel")
    return _kernel(A)


def solve_exact(A: Matrix, b: Sequence[Scalar]) -> tuple[Scalar, ...] | None:
    """A solution of ``A x = b`` (free variables set to zero), or None if ``b`` is outside the column span."""
    _require_exact(A.field, "exact solve")
    return _solve(A, b)


def rational_relation_rank(vectors: Sequence[Sequence[Scalar]]) -> int:
    """Dimension of the Q-span of ``vectors``.

    Each coordinate ``a + b*sqrt(D)`` is split into its two rational
    coefficients, so ``(1,)`` and ``(sqrt(2),)`` count as independent.
    """
    vectors = [tuple(v) for v in vectors]
    if not vectors:
        return 0
    field = vectors[0][0].field if vectors[0] else Field.rational()
    _require_exact(field, "rational relation rank")
    n = len(vectors[0])
    if any(len(v) != n for v in vectors):
        raise ValueError("vectors must share one ambient dimension")
    Q = Field.rational()
    rows = []
    for v in vectors:
        row = [Q(x.a) for x in v]
        if field.kind == "quadratic":
            row += [Q(x.b) for x in v]
        rows.append(row)
    return Matrix(rows, Q, len(rows[0])).rank()
