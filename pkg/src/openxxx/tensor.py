"""Dense operators on labelled tensor-product spaces.

Every operator carries the ordered list of factors it acts on. Products of
operators on different factor sets are formed on the union of the factors, so
expressions such as ``R_{00'} T_0 T_{0'}`` can be written directly without
tracking positional conventions by hand.

Spin matrices use the weight basis ordered from the highest ``S^3`` eigenvalue
to the lowest, so ``S^+`` is strictly upper triangular and the highest-weight
vector is the first basis vector.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .errors import DimensionError

__all__ = [
    "SpaceLabel",
    "SpinRep",
    "Operator",
    "aux",
    "site",
    "spin_matrices",
    "kron",
    "embed_site",
    "partial_trace",
    "identity",
    "permutation",
    "max_abs",
    "relative_residual",
    "DEFAULT_MAX_DIM",
]

DEFAULT_MAX_DIM = 2**20


@dataclass(frozen=True)
class SpaceLabel:
    """One tensor factor: an auxiliary ``C^2`` or a chain site ``C^{2s+1}``."""

    kind: str
    index: int
    dim: int

    def __post_init__(self):
        if self.kind not in ("aux", "site"):
            raise ValueError(f"unknown space kind {self.kind!r}")
        if self.kind == "aux" and self.dim != 2:
            raise DimensionError("auxiliary spaces are two-dimensional")
        if self.dim < 1:
            raise DimensionError("space dimension must be positive")

    def __repr__(self):
        return f"{self.kind}{self.index}[{self.dim}]"


def aux(index: int = 0) -> SpaceLabel:
    """Auxiliary space ``0``, ``0'``, ... labelled by an integer."""
    return SpaceLabel("aux", index, 2)


def site(index: int, dim: int) -> SpaceLabel:
    return SpaceLabel("site", index, dim)


def _as_spin(s) -> Fraction:
    if isinstance(s, SpinRep):
        return s.s
    if isinstance(s, str):
        value = Fraction(s.strip())
    elif isinstance(s, Fraction):
        value = s
    else:
        value = Fraction(s).limit_denominator(1000)
        if abs(float(value) - float(s)) > 1e-12:
            raise ValueError(f"spin {s!r} is not a half-integer")
    if (2 * value).denominator != 1 or value <= 0:
        raise ValueError(f"spin {s!r} is not a positive half-integer")
    return value


@dataclass(frozen=True)
class SpinRep:
    """Spin-``s`` representation of sl(2); ``s`` is a positive half-integer."""

    s: Fraction

    def __init__(self, s):
        object.__setattr__(self, "s", _as_spin(s))

    @property
    def dimension(self) -> int:
        return int(2 * self.s) + 1


def spin_matrices(rep) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Return ``(S3, S+, S-)`` for the spin-``s`` representation.

    ``rep`` may be a :class:`SpinRep`, a number such as ``0.5`` or a string
    such as ``"1/2"``. The matrices satisfy ``[S3, S±] = ±S±`` and
    ``[S+, S-] = 2 S3``.
    """
    s = float(_as_spin(rep))
    dim = int(round(2 * s)) + 1
    m = s - np.arange(dim)
    S3 = np.diag(m).astype(complex)
    # <m+1| S+ |m> = sqrt(s(s+1) - m(m+1)), basis index decreases as m grows
    up = np.sqrt(s * (s + 1) - m[1:] * (m[1:] + 1))
    Splus = np.diag(up, 1).astype(complex)
    Sminus = Splus.conj().T.copy()
    return S3, Splus, Sminus


def max_abs(x) -> float:
    x = x.matrix if isinstance(x, Operator) else np.asarray(x)
    return float(np.max(np.abs(x))) if x.size else 0.0


def relative_residual(lhs, rhs, scale: float = 0.0) -> float:
    """Max-norm of ``lhs - rhs`` divided by the larger of the two max-norms.

    ``scale`` is an optional floor for the denominator, e.g. the product of
    factor norms when both sides of a product identity nearly cancel.
    """
    if isinstance(lhs, Operator) and isinstance(rhs, Operator):
        rhs = rhs.reorder(lhs.spaces)
    a = lhs.matrix if isinstance(lhs, Operator) else np.asarray(lhs)
    b = rhs.matrix if isinstance(rhs, Operator) else np.asarray(rhs)
    scale = max(max_abs(a), max_abs(b), scale)
    if scale == 0.0:
        return 0.0
    return max_abs(a - b) / scale


class Operator:
    """A dense complex matrix acting on an ordered tuple of labelled spaces."""

    __slots__ = ("matrix", "spaces")

    def __init__(self, matrix, spaces: Sequence[SpaceLabel]):
        matrix = np.asarray(matrix, dtype=complex)
        spaces = tuple(spaces)
        dim = int(np.prod([sp.dim for sp in spaces], dtype=np.int64)) if spaces else 1
        if matrix.shape != (dim, dim):
            raise DimensionError(
                f"matrix shape {matrix.shape} does not match spaces {spaces} (dim {dim})"
            )
        if len(set(spaces)) != len(spaces):
            raise DimensionError(f"repeated space in {spaces}")
        if not np.all(np.isfinite(matrix)):
            raise FloatingPointError("operator has non-finite entries")
        self.matrix = matrix
        self.spaces = spaces

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(sp.dim for sp in self.spaces)

    def __repr__(self):
        return f"Operator(dim={self.dim}, spaces={self.spaces})"

    # -- space bookkeeping -------------------------------------------------

    def reorder(self, spaces: Sequence[SpaceLabel]) -> "Operator":
        """Same operator with its tensor factors listed in ``spaces`` order."""
        spaces = tuple(spaces)
        if spaces == self.spaces:
            return self
        if set(spaces) != set(self.spaces) or len(spaces) != len(self.spaces):
            raise DimensionError(f"cannot reorder {self.spaces} to {spaces}")
        perm = [self.spaces.index(sp) for sp in spaces]
        k = len(perm)
        t = self.matrix.reshape(self.dims * 2)
        t = t.transpose(perm + [k + p for p in perm])
        return Operator(t.reshape(self.dim, self.dim), spaces)

    def expand(self, spaces: Sequence[SpaceLabel], max_dim: int = DEFAULT_MAX_DIM) -> "Operator":
        """Tensor with identities so the operator acts on ``spaces`` (in that order)."""
        spaces = tuple(spaces)
        missing = [sp for sp in self.spaces if sp not in spaces]
        if missing:
            raise DimensionError(f"target spaces lack {missing}")
        extra = [sp for sp in spaces if sp not in self.spaces]
        op = self
        if extra:
            op = kron(self, identity(extra), max_dim=max_dim)
        return op.reorder(spaces)

    def _aligned(self, other: "Operator") -> tuple[np.ndarray, np.ndarray, tuple]:
        if other.spaces == self.spaces:
            return self.matrix, other.matrix, self.spaces
        union = self.spaces + tuple(sp for sp in other.spaces if sp not in self.spaces)
        return self.expand(union).matrix, other.expand(union).matrix, union

    # -- arithmetic --------------------------------------------------------

    def __matmul__(self, other):
        if isinstance(other, Operator):
            a, b, spaces = self._aligned(other)
            return Operator(a @ b, spaces)
        return self.matrix @ np.asarray(other)

    def __add__(self, other):
        if isinstance(other, Operator):
            a, b, spaces = self._aligned(other)
            return Operator(a + b, spaces)
        return NotImplemented

    def __sub__(self, other):
        if isinstance(other, Operator):
            a, b, spaces = self._aligned(other)
            return Operator(a - b, spaces)
        return NotImplemented

    def __neg__(self):
        return Operator(-self.matrix, self.spaces)

    def __mul__(self, scalar):
        if np.isscalar(scalar):
            return Operator(scalar * self.matrix, self.spaces)
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        return Operator(self.matrix / scalar, self.spaces)

    def commutator(self, other: "Operator") -> "Operator":
        return self @ other - other @ self

    def transpose_on(self, space: SpaceLabel) -> "Operator":
        """Partial transpose in one tensor factor."""
        i = self.spaces.index(space)
        k = len(self.spaces)
        t = self.matrix.reshape(self.dims * 2)
        axes = list(range(2 * k))
        axes[i], axes[k + i] = axes[k + i], axes[i]
        return Operator(t.transpose(axes).reshape(self.dim, self.dim), self.spaces)

    def relabel(self, mapping: dict) -> "Operator":
        """Rename factors, e.g. ``{aux(0): aux(1)}``; dimensions must agree."""
        spaces = tuple(mapping.get(sp, sp) for sp in self.spaces)
        return Operator(self.matrix, spaces)

    def blocks(self, space: SpaceLabel) -> np.ndarray:
        """Return an array ``b[i, j]`` of the operator blocks ``<i| op |j>`` in ``space``.

        The result has shape ``(d, d, D, D)`` where ``D`` is the dimension of the
        remaining factors (in their current order).
        """
        rest = tuple(sp for sp in self.spaces if sp != space)
        op = self.reorder((space,) + rest)
        d = space.dim
        D = op.dim // d
        return op.matrix.reshape(d, D, d, D).transpose(0, 2, 1, 3)

    def allclose(self, other: "Operator", rtol: float = 1e-12) -> bool:
        return relative_residual(self, other) <= rtol


def identity(spaces: Iterable[SpaceLabel]) -> Operator:
    spaces = tuple(spaces)
    dim = int(np.prod([sp.dim for sp in spaces], dtype=np.int64)) if spaces else 1
    return Operator(np.eye(dim, dtype=complex), spaces)


def permutation(a: SpaceLabel, b: SpaceLabel) -> Operator:
    """The flip operator on ``a ⊗ b`` (requires equal dimensions)."""
    if a.dim != b.dim:
        raise DimensionError("permutation needs equal dimensions")
    d = a.dim
    P = np.zeros((d * d, d * d), dtype=complex)
    for i in range(d):
        for j in range(d):
            P[j * d + i, i * d + j] = 1.0
    return Operator(P, (a, b))


def kron(a: Operator, b: Operator, max_dim: int = DEFAULT_MAX_DIM) -> Operator:
    """Tensor product; the factor list of the result is ``a.spaces + b.spaces``."""
    if set(a.spaces) & set(b.spaces):
        raise DimensionError(f"kron of overlapping spaces {a.spaces} and {b.spaces}")
    if a.dim * b.dim > max_dim:
        raise DimensionError(f"total dimension {a.dim * b.dim} exceeds cap {max_dim}")
    return Operator(np.kron(a.matrix, b.matrix), a.spaces + b.spaces)


def embed_site(op, m: int, config) -> Operator:
    """Embed a single-site matrix at site ``m`` (0-based) of the chain.

    ``config`` is anything exposing ``site_spaces`` (a chain or Gaudin
    configuration). The result acts on all sites in chain order.
    """
    spaces = config.site_spaces
    if not 0 <= m < len(spaces):
        raise IndexError(f"site index {m} out of range for N={len(spaces)}")
    op = np.asarray(op, dtype=complex)
    if op.shape != (spaces[m].dim, spaces[m].dim):
        raise DimensionError(f"site {m} has dimension {spaces[m].dim}, got {op.shape}")
    left = int(np.prod([sp.dim for sp in spaces[:m]], dtype=np.int64))
    right = int(np.prod([sp.dim for sp in spaces[m + 1:]], dtype=np.int64))
    full = np.kron(np.kron(np.eye(left), op), np.eye(right))
    return Operator(full, spaces)


def partial_trace(op: Operator, over: SpaceLabel) -> Operator:
    """Trace out one factor; the remaining factors keep their order."""
    if over not in op.spaces:
        raise DimensionError(f"{over} not among {op.spaces}")
    i = op.spaces.index(over)
    k = len(op.spaces)
    t = op.matrix.reshape(op.dims * 2)
    t = np.trace(t, axis1=i, axis2=k + i)
    rest = op.spaces[:i] + op.spaces[i + 1:]
    dim = int(np.prod([sp.dim for sp in rest], dtype=np.int64)) if rest else 1
    return Operator(t.reshape(dim, dim), rest)
