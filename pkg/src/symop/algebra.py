"""Finite-dimensional tracial von Neumann algebras.

An algebra here is a finite direct sum of full matrix blocks
``M_{d_1} + ... + M_{d_B}`` carrying the faithful trace

    tau(x) = sum_i  w_i * tr(x_i),

where ``tr`` is the plain (unnormalized) matrix trace and ``w_i > 0``
is the weight of block ``i``.  A minimal (atom) projection inside block
``i`` has trace ``w_i``, so the algebra "has equal atoms" exactly when
all weights agree.

Elements are stored as one complex matrix per block.  Coordinates for
superoperators concatenate the blocks row-major, so an algebra with
dims (2, 3) has a 4 + 9 = 13 dimensional coordinate space.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import DomainError, StructureError


def _as_block_array(data, dim: int) -> np.ndarray:
    arr = np.asarray(data, dtype=complex)
    if arr.shape != (dim, dim):
        raise StructureError(f"block has shape {arr.shape}, expected ({dim}, {dim})")
    arr = arr.copy()
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class TracialAlgebra:
    """Direct sum of matrix blocks with per-block trace weights."""

    blocks: tuple[tuple[int, float], ...]

    def __post_init__(self):
        blocks = tuple((int(d), float(w)) for d, w in self.blocks)
        if not blocks:
            raise StructureError("algebra needs at least one block")
        for d, w in blocks:
            if d < 1:
                raise StructureError(f"block dimension must be >= 1, got {d}")
            if not w > 0:
                raise StructureError(f"block weight must be > 0, got {w}")
        object.__setattr__(self, "blocks", blocks)

    @property
    def num_blocks(self) -> int:
        return len(self.blocks)

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(d for d, _ in self.blocks)

    @property
    def weights(self) -> tuple[float, ...]:
        return tuple(w for _, w in self.blocks)

    @property
    def equal_atoms(self) -> bool:
        """True when every atom has the same trace, i.e. all weights agree."""
        w = self.weights
        return all(abs(x - w[0]) <= 1e-12 * max(1.0, abs(w[0])) for x in w)

    @property
    def normalized_atoms(self) -> bool:
        """True when every atom has trace exactly one."""
        return all(abs(w - 1.0) <= 1e-12 for w in self.weights)

    @property
    def total_trace(self) -> float:
        """tau(1), the trace of the identity."""
        return float(sum(w * d for d, w in self.blocks))

    @property
    def coord_dim(self) -> int:
        """Dimension of the coordinate space, sum of squared block dims."""
        return int(sum(d * d for d in self.dims))

    @property
    def block_offsets(self) -> tuple[int, ...]:
        offs = [0]
        for d in self.dims:
            offs.append(offs[-1] + d * d)
        return tuple(offs)

    # -- element constructors -------------------------------------------------

    def element(self, blocks: Sequence) -> "AlgebraElement":
        if len(blocks) != self.num_blocks:
            raise StructureError(
                f"got {len(blocks)} blocks, algebra has {self.num_blocks}"
            )
        return AlgebraElement(self, tuple(_as_block_array(b, d)
                                          for b, (d, _) in zip(blocks, self.blocks)))

    def zero(self) -> "AlgebraElement":
        return self.element([np.zeros((d, d)) for d in self.dims])

    def identity(self) -> "AlgebraElement":
        return self.element([np.eye(d) for d in self.dims])

    def diagonal(self, entries: Sequence[complex]) -> "AlgebraElement":
        """Element with the given diagonal, entries listed block by block."""
        if len(entries) != sum(self.dims):
            raise StructureError("diagonal length does not match algebra")
        out, k = [], 0
        for d in self.dims:
            out.append(np.diag(np.asarray(entries[k:k + d], dtype=complex)))
            k += d
        return self.element(out)

    def from_vec(self, vec: np.ndarray) -> "AlgebraElement":
        """Inverse of :meth:`AlgebraElement.to_vec`."""
        vec = np.asarray(vec, dtype=complex).reshape(-1)
        if vec.size != self.coord_dim:
            raise StructureError(
                f"coordinate vector has length {vec.size}, expected {self.coord_dim}"
            )
        offs = self.block_offsets
        return self.element([vec[offs[i]:offs[i + 1]].reshape(d, d)
                             for i, d in enumerate(self.dims)])

    def basis(self) -> Iterable["AlgebraElement"]:
        """Matrix-unit basis, in coordinate order."""
        for k in range(self.coord_dim):
            v = np.zeros(self.coord_dim, dtype=complex)
            v[k] = 1.0
            yield self.from_vec(v)

    def self_adjoint_basis(self) -> list["AlgebraElement"]:
        """A real basis of the self-adjoint part, block by block."""
        out = []
        for i, d in enumerate(self.dims):
            for r in range(d):
                m = np.zeros((d, d), dtype=complex)
                m[r, r] = 1.0
                out.append(self.embed_block(i, m))
            for r in range(d):
                for s in range(r + 1, d):
                    m = np.zeros((d, d), dtype=complex)
                    m[r, s] = m[s, r] = 1.0
                    out.append(self.embed_block(i, m))
                    m2 = np.zeros((d, d), dtype=complex)
                    m2[r, s] = -1.0j
                    m2[s, r] = 1.0j
                    out.append(self.embed_block(i, m2))
        return out

    def embed_block(self, block_index: int, mat: np.ndarray) -> "AlgebraElement":
        blocks = [np.zeros((d, d), dtype=complex) for d in self.dims]
        blocks[block_index] = mat
        return self.element(blocks)

    def central_projections(self) -> Iterable["CentralProjection"]:
        """All 2**num_blocks central projections, all-ones first.

        Enumeration is lexicographically decreasing in the bit tuples so
        that deterministic tie-breaks prefer larger left supports.
        """
        import itertools
        for bits in itertools.product((1, 0), repeat=self.num_blocks):
            yield CentralProjection(self, bits)

    def __repr__(self) -> str:
        inner = ", ".join(f"({d}, {w:g})" for d, w in self.blocks)
        return f"TracialAlgebra([{inner}])"


class AlgebraElement:
    """An element of a :class:`TracialAlgebra`, one matrix per block."""

    __slots__ = ("algebra", "blocks")

    def __init__(self, algebra: TracialAlgebra, blocks: tuple[np.ndarray, ...]):
        self.algebra = algebra
        self.blocks = blocks

    # -- ring / vector-space structure ---------------------------------------

    def _check_same(self, other: "AlgebraElement"):
        if self.algebra != other.algebra:
            raise StructureError("elements belong to different algebras")

    def __add__(self, other: "AlgebraElement") -> "AlgebraElement":
        self._check_same(other)
        return self.algebra.element([x + y for x, y in zip(self.blocks, other.blocks)])

    def __sub__(self, other: "AlgebraElement") -> "AlgebraElement":
        self._check_same(other)
        return self.algebra.element([x - y for x, y in zip(self.blocks, other.blocks)])

    def __neg__(self) -> "AlgebraElement":
        return self.algebra.element([-x for x in self.blocks])

    def __mul__(self, scalar) -> "AlgebraElement":
        if isinstance(scalar, AlgebraElement):
            raise TypeError("use @ for the algebra product, * is for scalars")
        return self.algebra.element([scalar * x for x in self.blocks])

    __rmul__ = __mul__

    def __truediv__(self, scalar) -> "AlgebraElement":
        return self * (1.0 / scalar)

    def __matmul__(self, other: "AlgebraElement") -> "AlgebraElement":
        self._check_same(other)
        return self.algebra.element([x @ y for x, y in zip(self.blocks, other.blocks)])

    def adjoint(self) -> "AlgebraElement":
        return self.algebra.element([x.conj().T for x in self.blocks])

    @property
    def H(self) -> "AlgebraElement":
        return self.adjoint()

    def to_vec(self) -> np.ndarray:
        """Row-major coordinates, blocks concatenated."""
        return np.concatenate([b.reshape(-1) for b in self.blocks])

    # -- predicates -----------------------------------------------------------

    def sup_norm(self) -> float:
        """Operator (spectral) norm, the largest singular value."""
        return max(
            (float(np.linalg.norm(b, 2)) if b.size else 0.0) for b in self.blocks
        )

    def is_self_adjoint(self, tol: float = 1e-10) -> bool:
        scale = max(1.0, self.sup_norm())
        return all(np.max(np.abs(b - b.conj().T)) <= tol * scale for b in self.blocks)

    def is_projection(self, tol: float = 1e-10) -> bool:
        if not self.is_self_adjoint(tol):
            return False
        return all(np.max(np.abs(b @ b - b)) <= tol for b in self.blocks)

    def is_partial_isometry(self, tol: float = 1e-10) -> bool:
        """True when x* x is a projection."""
        return (self.H @ self).is_projection(tol)

    def is_central(self, tol: float = 1e-10) -> bool:
        """True when every block is a scalar multiple of its identity."""
        return all(_scalar_defect(b) <= tol * max(1.0, self.sup_norm())
                   for b in self.blocks)

    def central_part(self) -> "AlgebraElement":
        """Per-block trace-average projection onto the center."""
        return self.algebra.element(
            [(np.trace(b) / b.shape[0]) * np.eye(b.shape[0]) for b in self.blocks]
        )

    def approx_equal(self, other: "AlgebraElement", tol: float = 1e-10) -> bool:
        self._check_same(other)
        scale = max(1.0, self.sup_norm(), other.sup_norm())
        return all(np.max(np.abs(x - y)) <= tol * scale
                   for x, y in zip(self.blocks, other.blocks))

    def __repr__(self) -> str:
        return f"AlgebraElement({self.algebra!r}, sup_norm={self.sup_norm():.6g})"


def _scalar_defect(b: np.ndarray) -> float:
    d = b.shape[0]
    lam = np.trace(b) / d
    return float(np.max(np.abs(b - lam * np.eye(d))))


@dataclass(frozen=True)
class CentralProjection:
    """A 0/1 choice per block; the lattice of central projections."""

    algebra: TracialAlgebra
    bits: tuple[int, ...]

    def __post_init__(self):
        bits = tuple(int(b) for b in self.bits)
        if len(bits) != self.algebra.num_blocks:
            raise StructureError("central projection bits do not match block count")
        if any(b not in (0, 1) for b in bits):
            raise StructureError("central projection bits must be 0 or 1")
        object.__setattr__(self, "bits", bits)

    def as_element(self) -> AlgebraElement:
        return self.algebra.element(
            [b * np.eye(d) for b, d in zip(self.bits, self.algebra.dims)]
        )

    def complement(self) -> "CentralProjection":
        return CentralProjection(self.algebra, tuple(1 - b for b in self.bits))

    def meet(self, other: "CentralProjection") -> "CentralProjection":
        return CentralProjection(self.algebra,
                                 tuple(a & b for a, b in zip(self.bits, other.bits)))

    def join(self, other: "CentralProjection") -> "CentralProjection":
        return CentralProjection(self.algebra,
                                 tuple(a | b for a, b in zip(self.bits, other.bits)))

    def __le__(self, other: "CentralProjection") -> bool:
        return all(a <= b for a, b in zip(self.bits, other.bits))

    def is_zero(self) -> bool:
        return not any(self.bits)


# -- trace and decompositions ------------------------------------------------


def trace(x: AlgebraElement) -> complex:
    """The weighted trace tau(x) = sum_i w_i tr(x_i)."""
    val = sum(w * np.trace(b) for b, (_, w) in zip(x.blocks, x.algebra.blocks))
    return complex(val)


def polar_decompose(x: AlgebraElement, tol: float = 1e-12):
    """Polar data of ``x``: partial isometry, modulus and the three supports.

    Returns ``(u, m, left, right, null)`` with ``x = u @ m``,
    ``m = (x* x)^(1/2)`` positive, ``u`` a partial isometry whose initial
    projection ``u* u`` equals the right support of ``x``, plus the left
    support ``u u*`` and the null projection ``1 - u* u``.  Computed per
    block from the singular value decomposition; singular values below
    ``tol`` times the largest are treated as zero.
    """
    us, ms, ls, rs, ns = [], [], [], [], []
    for b in x.blocks:
        d = b.shape[0]
        U, s, Vh = np.linalg.svd(b)
        cutoff = tol * (s[0] if s.size and s[0] > 0 else 1.0)
        rank = int(np.sum(s > cutoff))
        V = Vh.conj().T
        m = (V * s) @ Vh
        m = 0.5 * (m + m.conj().T)
        u = U[:, :rank] @ Vh[:rank, :]
        left = U[:, :rank] @ U[:, :rank].conj().T
        right = V[:, :rank] @ V[:, :rank].conj().T
        us.append(u)
        ms.append(m)
        ls.append(0.5 * (left + left.conj().T))
        rs.append(0.5 * (right + right.conj().T))
        ns.append(np.eye(d) - rs[-1])
    alg = x.algebra
    return (alg.element(us), alg.element(ms), alg.element(ls),
            alg.element(rs), alg.element(ns))


def left_support(x: AlgebraElement) -> AlgebraElement:
    return polar_decompose(x)[2]


def right_support(x: AlgebraElement) -> AlgebraElement:
    return polar_decompose(x)[3]


def spectral_projection(x: AlgebraElement, lo: float, hi: float,
                        tol: float = 1e-10) -> AlgebraElement:
    """Spectral projection of a self-adjoint ``x`` for the interval (lo, hi].

    The interval is half open on the left, so eigenvalues equal to ``lo``
    are excluded and eigenvalues equal to ``hi`` are included.  ``lo`` may
    be ``-inf`` and ``hi`` may be ``+inf``.
    """
    if not x.is_self_adjoint(tol):
        raise DomainError("spectral_projection needs a self-adjoint element")
    out = []
    for b in x.blocks:
        vals, vecs = np.linalg.eigh(0.5 * (b + b.conj().T))
        keep = (vals > lo) & (vals <= hi)
        W = vecs[:, keep]
        p = W @ W.conj().T
        out.append(0.5 * (p + p.conj().T))
    return x.algebra.element(out)


def central_support(p: AlgebraElement, tol: float = 1e-10) -> CentralProjection:
    """Smallest central projection dominating ``p``; per block, 1 iff p_i != 0."""
    if not p.is_projection(tol):
        raise DomainError("central_support needs a projection")
    bits = tuple(1 if np.max(np.abs(b)) > tol else 0 for b in p.blocks)
    return CentralProjection(p.algebra, bits)


def commutator(x: AlgebraElement, y: AlgebraElement) -> AlgebraElement:
    return x @ y - y @ x
