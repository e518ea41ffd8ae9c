"""Surjective isometries of symmetric operator spaces.

For an invertible isometry T of a symmetric space over a direct sum of
matrix blocks (with equal atom traces and a norm that is not a multiple
of the trace L2 norm), conjugation carries left multiplications to
split multiplications: there is a central projection z and a Jordan
*-isomorphism J with

    T L_a T^{-1} = L_{J1(a) z} + R_{J2(a) (1-z)},        a self-adjoint,

and T itself factors as  T(x) = J(x) A z + B J(x) (1-z)  with
A = T(1) z and B = T(1) (1-z).  In finite dimensions every Jordan
*-isomorphism acts blockwise as x -> v x v* or x -> v x^T v* composed
with a dimension-preserving block permutation, which is what
:func:`jordan_classify` recovers.

The extraction searches all central projections, fits each conjugated
multiplication to a pure left (on z) or pure right (off z) form per
block in closed form, and keeps the candidate of least residual.  When
every candidate misses the tolerance the isometry is simply not of this
kind: that happens on algebras with unequal atom traces and on L2-like
norms, and is reported as NotFactorableError rather than as a
precondition failure.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .algebra import AlgebraElement, CentralProjection, TracialAlgebra, trace
from .errors import (ClassificationFailedError, DomainError,
                     FactorizationRejectedError, NotFactorableError,
                     StructureError)
from .hermitian import SuperOperator
from .norms import SymmetricNorm, norm
from .sampling import as_rng, random_unit
from .tolerances import DEFAULT_TOLERANCES, Tolerances


@dataclass(frozen=True)
class IsometryReport:
    defect: float
    holds: bool
    samples: int
    seed: int


def is_isometry(t_op: SuperOperator, n_source: SymmetricNorm,
                n_target: SymmetricNorm | None = None, samples: int = 200,
                seed: int = 0, tol: float = DEFAULT_TOLERANCES.oracle
                ) -> IsometryReport:
    """Sampled isometry defect: max |norm_target(Tx) - 1| over unit x.

    Raises NotSurjectiveError when the dense form is singular, since
    only surjective maps qualify.
    """
    if n_target is None:
        n_target = n_source
    n_source.validate_algebra(t_op.algebra)
    n_target.validate_algebra(t_op.algebra)
    t_op.inverse()  # surjectivity; raises NotSurjectiveError if singular
    rng = as_rng(seed)
    worst = 0.0
    for _ in range(samples):
        x = random_unit(t_op.algebra, n_source, rng)
        worst = max(worst, abs(norm(t_op(x), n_target) - 1.0))
    return IsometryReport(defect=float(worst), holds=worst < tol,
                          samples=samples, seed=seed)


def conjugate_left_mult(t_op: SuperOperator, a: AlgebraElement) -> SuperOperator:
    """T L_a T^{-1}; hermitian whenever T is an isometry and a = a*."""
    return t_op @ SuperOperator.left_mult(a) @ t_op.inverse()


# -- Jordan extraction ----------------------------------------------------------


@dataclass(frozen=True)
class JordanExtraction:
    """Raw output of the central-projection search.

    ``jordan_dense`` is the matrix of the complex-linear extension of
    h -> J(h) in the coordinate basis; ``residual`` is the worst
    Frobenius deviation of any conjugated basis multiplication from its
    fitted split form.
    """

    z: CentralProjection
    jordan_dense: np.ndarray
    residual: float


def _fit_left_mult(sub: np.ndarray, d: int):
    """Closed-form best c with sub ~ kron(c, I); c projected self-adjoint."""
    s4 = sub.reshape(d, d, d, d)
    c = np.einsum("rsks->rk", s4) / d
    c = 0.5 * (c + c.conj().T)
    fit = np.kron(c, np.eye(d))
    return c, float(np.linalg.norm(sub - fit))


def _fit_right_mult(sub: np.ndarray, d: int):
    """Closed-form best c with sub ~ kron(I, c.T); c projected self-adjoint."""
    s4 = sub.reshape(d, d, d, d)
    c = np.einsum("rsrl->ls", s4) / d
    c = 0.5 * (c + c.conj().T)
    fit = np.kron(np.eye(d), c.T)
    return c, float(np.linalg.norm(sub - fit))


def extract_jordan(t_op: SuperOperator, n: SymmetricNorm,
                   tolerances: Tolerances = DEFAULT_TOLERANCES,
                   verify_samples: int = 64, seed: int = 0) -> JordanExtraction:
    """Search central projections and fit T L_h T^{-1} to split form.

    The fit is done per self-adjoint basis element h and per block: on
    blocks inside the candidate z the conjugated operator must be a left
    multiplication, outside a right multiplication, both fit in closed
    form by partial traces.  Mass coupling different blocks counts
    toward the residual.  Candidates are scanned all-ones-first and the
    strictly best one wins, so ambiguous cases resolve deterministically
    toward left multiplications.

    Every surjective isometry admits such a split only when all atoms
    carry equal trace and the norm is not proportional to the trace L2
    norm; outside that regime (and for isometries that simply have no
    such form) every candidate misses the tolerance and
    NotFactorableError is raised.
    """
    algebra = t_op.algebra
    if algebra.num_blocks > 16:
        raise DomainError("central projection search capped at 16 blocks")
    report = is_isometry(t_op, n, samples=verify_samples, seed=seed,
                         tol=tolerances.oracle)
    if not report.holds:
        raise DomainError(
            f"operator is not an isometry (sampled defect {report.defect:.3g})"
        )

    t_inv = t_op.inverse()
    basis = algebra.self_adjoint_basis()
    conjugated = [(t_op @ SuperOperator.left_mult(h) @ t_inv).dense
                  for h in basis]

    offs = algebra.block_offsets
    dims = algebra.dims

    def off_block_mass(m: np.ndarray) -> float:
        total = 0.0
        for i in range(algebra.num_blocks):
            for j in range(algebra.num_blocks):
                if i != j:
                    total += float(np.linalg.norm(
                        m[offs[i]:offs[i + 1], offs[j]:offs[j + 1]]) ** 2)
        return total

    best = None
    for z in algebra.central_projections():
        worst = 0.0
        images = []
        for s_h in conjugated:
            total_sq = off_block_mass(s_h)
            blocks = []
            for i, d in enumerate(dims):
                sub = s_h[offs[i]:offs[i + 1], offs[i]:offs[i + 1]]
                if z.bits[i]:
                    c, res = _fit_left_mult(sub, d)
                else:
                    c, res = _fit_right_mult(sub, d)
                blocks.append(c)
                total_sq += res * res
            images.append(algebra.element(blocks))
            worst = max(worst, math.sqrt(total_sq))
        if best is None or worst < best[0] - 1e-15:
            best = (worst, z, images)

    residual, z, images = best
    scale = max([1.0] + [float(np.linalg.norm(m)) for m in conjugated])
    if residual > tolerances.fitted * scale:
        raise NotFactorableError(
            f"no central projection yields a split multiplication form "
            f"(best residual {residual:.3g})"
        )
    return JordanExtraction(
        z=z, jordan_dense=_assemble_jordan_dense(algebra, images),
        residual=float(residual),
    )


def _assemble_jordan_dense(algebra: TracialAlgebra,
                           images: list[AlgebraElement]) -> np.ndarray:
    """Complex-linear extension of the self-adjoint basis images.

    The basis is ordered per block as the diagonal units followed by the
    symmetric and antisymmetric pair combinations; a matrix unit E_rs is
    (m1 + i m2) / 2 for r < s and (m1 - i m2) / 2 for r > s.
    """
    D = algebra.coord_dim
    out = np.zeros((D, D), dtype=complex)
    offs = algebra.block_offsets
    q = 0
    for i, d in enumerate(algebra.dims):
        diag = images[q:q + d]
        q += d
        pairs = {}
        for r in range(d):
            for s in range(r + 1, d):
                pairs[(r, s)] = (images[q], images[q + 1])
                q += 2
        for r in range(d):
            for s in range(d):
                col = offs[i] + r * d + s
                if r == s:
                    img = diag[r]
                elif r < s:
                    m1, m2 = pairs[(r, s)]
                    img = 0.5 * (m1 + 1j * m2)
                else:
                    m1, m2 = pairs[(s, r)]
                    img = 0.5 * (m1 - 1j * m2)
                out[:, col] = img.to_vec()
    return out


# -- classification --------------------------------------------------------------


@dataclass(frozen=True)
class JordanIsomorphism:
    """Blockwise normal form of a Jordan *-isomorphism.

    Block i of the source maps onto block ``permutation[i]`` of the
    target by x -> v x v* (straight) or x -> v x^T v* (transposed),
    with ``v`` unitary and its phase fixed so the first nonzero entry
    is positive real.
    """

    algebra: TracialAlgebra
    permutation: tuple[int, ...]
    unitaries: tuple[np.ndarray, ...]
    transposed: tuple[bool, ...]

    def apply(self, x: AlgebraElement) -> AlgebraElement:
        if x.algebra != self.algebra:
            raise StructureError("element belongs to a different algebra")
        blocks = [None] * self.algebra.num_blocks
        for i, (v, t) in enumerate(zip(self.unitaries, self.transposed)):
            src = x.blocks[i].T if t else x.blocks[i]
            blocks[self.permutation[i]] = v @ src @ v.conj().T
        return self.algebra.element(blocks)

    @property
    def trace_preserving(self) -> bool:
        w = self.algebra.weights
        return all(abs(w[self.permutation[i]] - w[i]) <= 1e-12 * max(1.0, w[i])
                   for i in range(len(w)))

    @property
    def is_star_isomorphism(self) -> bool:
        """True when no block needs a transpose."""
        return not any(self.transposed)


def _canonical_phase(v: np.ndarray, tol: float = 1e-9) -> np.ndarray:
    for entry in v.reshape(-1):
        if abs(entry) > tol:
            return v * (abs(entry) / entry)
    return v


def _recover_conjugation(apply_block, d: int, tol: float) -> np.ndarray:
    """Unitary v with apply_block(x) = v x v*, from the matrix units."""
    units = [[apply_block(_unit(d, r, s)) for s in range(d)] for r in range(d)]
    f11 = units[0][0]
    vals, vecs = np.linalg.eigh(0.5 * (f11 + f11.conj().T))
    if abs(vals[-1] - 1.0) > 500 * tol:
        raise ClassificationFailedError(
            f"image of a minimal projection is not one (top eigenvalue {vals[-1]:.6g})"
        )
    xi = vecs[:, -1]
    v = np.column_stack([units[r][0] @ xi for r in range(d)])
    return _canonical_phase(v)


def _unit(d: int, r: int, s: int) -> np.ndarray:
    m = np.zeros((d, d), dtype=complex)
    m[r, s] = 1.0
    return m


def jordan_classify(extraction_or_dense, algebra: TracialAlgebra | None = None,
                    tolerances: Tolerances = DEFAULT_TOLERANCES
                    ) -> JordanIsomorphism:
    """Classify a Jordan *-isomorphism into its blockwise normal form.

    Accepts a :class:`JordanExtraction` or a dense matrix plus algebra.
    Finds the block permutation from the images of the block identities,
    decides straight versus transposed per block by testing
    multiplicativity on matrix units, recovers the conjugating unitary,
    and verifies the normal form on the full coordinate basis.
    """
    if isinstance(extraction_or_dense, JordanExtraction):
        dense = extraction_or_dense.jordan_dense
        algebra = extraction_or_dense.z.algebra
    else:
        dense = np.asarray(extraction_or_dense, dtype=complex)
        if algebra is None:
            raise StructureError("dense input needs the algebra")
    offs = algebra.block_offsets
    dims = algebra.dims
    tol = tolerances.fitted

    def image_of(i: int, blk: np.ndarray) -> AlgebraElement:
        return algebra.from_vec(dense @ algebra.embed_block(i, blk).to_vec())

    # block permutation from the central projections J(1_i)
    permutation = []
    for i, d in enumerate(dims):
        img = image_of(i, np.eye(d))
        target = None
        for j, dj in enumerate(dims):
            mass = float(np.linalg.norm(img.blocks[j]))
            if mass > 0.5:
                if target is not None or dj != d:
                    raise ClassificationFailedError(
                        "image of a block identity is not a single block identity"
                    )
                if np.linalg.norm(img.blocks[j] - np.eye(d)) > 100 * tol * d:
                    raise ClassificationFailedError(
                        "image of a block identity is not an identity"
                    )
                target = j
        if target is None:
            raise ClassificationFailedError("a block identity maps to zero")
        permutation.append(target)
    if sorted(permutation) != list(range(len(dims))):
        raise ClassificationFailedError("block map is not a permutation")

    unitaries, transposed = [], []
    rng = np.random.default_rng(7)
    for i, d in enumerate(dims):
        j = permutation[i]

        def restricted(x: np.ndarray) -> np.ndarray:
            return image_of(i, x).blocks[j]

        if d == 1:
            is_transposed = False
        else:
            x = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
            y = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
            lhs = restricted(x @ y)
            straight_defect = float(np.linalg.norm(lhs - restricted(x) @ restricted(y)))
            reverse_defect = float(np.linalg.norm(lhs - restricted(y) @ restricted(x)))
            scale = max(1.0, float(np.linalg.norm(lhs)))
            if straight_defect <= 100 * tol * scale:
                is_transposed = False
            elif reverse_defect <= 100 * tol * scale:
                is_transposed = True
            else:
                raise ClassificationFailedError(
                    "restricted map is neither multiplicative nor "
                    f"anti-multiplicative (defects {straight_defect:.3g}, "
                    f"{reverse_defect:.3g})"
                )
        block_map = (lambda x: restricted(x.T)) if is_transposed else restricted
        v = _recover_conjugation(block_map, d, tol)
        # verify the normal form on all matrix units of this block
        worst = 0.0
        for r in range(d):
            for s in range(d):
                e = _unit(d, r, s)
                src = e.T if is_transposed else e
                worst = max(worst, float(np.linalg.norm(
                    restricted(e) - v @ src @ v.conj().T)))
        if worst > 1000 * tol:
            raise ClassificationFailedError(
                f"normal form verification failed (defect {worst:.3g})"
            )
        unitaries.append(v)
        transposed.append(bool(is_transposed))

    return JordanIsomorphism(
        algebra=algebra,
        permutation=tuple(permutation),
        unitaries=tuple(unitaries),
        transposed=tuple(transposed),
    )


# -- full factorization -----------------------------------------------------------


@dataclass(frozen=True)
class IsometryFactorization:
    """T(x) = J(x) A z + B J(x) (1-z) with A = T(1) z, B = T(1) (1-z)."""

    jordan: JordanIsomorphism
    z: CentralProjection
    left_factor: AlgebraElement   # A, supported on z
    right_factor: AlgebraElement  # B, supported on 1-z
    residual: float

    @property
    def multiplier(self) -> AlgebraElement:
        """T(1) = A + B."""
        return self.left_factor + self.right_factor

    def apply(self, x: AlgebraElement) -> AlgebraElement:
        jx = self.jordan.apply(x)
        return jx @ self.left_factor + self.right_factor @ jx

    def unitary_defect(self) -> float:
        """Sup-norm distance of the multiplier from being unitary."""
        u = self.multiplier
        one = u.algebra.identity()
        return max((u @ u.H - one).sup_norm(), (u.H @ u - one).sup_norm())


def factor_isometry(t_op: SuperOperator, n: SymmetricNorm,
                    tolerances: Tolerances = DEFAULT_TOLERANCES,
                    verify_samples: int = 64, seed: int = 0
                    ) -> IsometryFactorization:
    """Extract, classify and verify the full factorization of an isometry.

    The verification replays T on the whole coordinate basis against the
    factored form; failure raises FactorizationRejectedError (the
    extraction fit something the classified normal form cannot
    reproduce, e.g. borderline numerics).
    """
    extraction = extract_jordan(t_op, n, tolerances=tolerances,
                                verify_samples=verify_samples, seed=seed)
    jordan = jordan_classify(extraction, tolerances=tolerances)
    algebra = t_op.algebra
    one = algebra.identity()
    t_one = t_op(one)
    z_el = extraction.z.as_element()
    zc_el = extraction.z.complement().as_element()
    factorization = IsometryFactorization(
        jordan=jordan,
        z=extraction.z,
        left_factor=t_one @ z_el,
        right_factor=t_one @ zc_el,
        residual=extraction.residual,
    )
    worst = 0.0
    for e in algebra.basis():
        worst = max(worst, (t_op(e) - factorization.apply(e)).sup_norm())
    scale = max(1.0, t_one.sup_norm())
    if worst > 1000 * tolerances.fitted * scale:
        raise FactorizationRejectedError(
            f"factored form does not reproduce T (defect {worst:.3g})"
        )
    return factorization


# -- elementary form on abelian algebras ------------------------------------------


@dataclass(frozen=True)
class ElementaryWitness:
    permutation: tuple[int, ...]
    phases: tuple[complex, ...]


def is_elementary(t_op: SuperOperator, tol: float = 1e-9
                  ) -> ElementaryWitness | None:
    """On an abelian algebra: is T a unimodular diagonal times a
    permutation of the atoms, (Tx)(k) = phase_k * x(sigma(k))?

    Brute force over permutations; returns the witness or None.  The
    atom count is capped to keep the search honest and small.
    """
    algebra = t_op.algebra
    if any(d != 1 for d in algebra.dims):
        raise DomainError("is_elementary applies to abelian algebras only")
    m = t_op.dense
    size = algebra.num_blocks
    if size > 8:
        raise DomainError("permutation search capped at 8 atoms")
    for sigma in itertools.permutations(range(size)):
        ok = True
        phases = []
        for row in range(size):
            entry = m[row, sigma[row]]
            if abs(abs(entry) - 1.0) > tol:
                ok = False
                break
            phases.append(complex(entry))
            if any(abs(m[row, col]) > tol
                   for col in range(size) if col != sigma[row]):
                ok = False
                break
        if ok:
            return ElementaryWitness(permutation=tuple(sigma),
                                     phases=tuple(phases))
    return None
