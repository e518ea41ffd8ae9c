"""Central decompositions for two-sided multiplication identities.

The driving identity is

    e y + y f = a y b      for all y,

with all four coefficients self-adjoint.  Exact solutions force a and b
to commute and [b, [a, y]] = 0 for every y, and there is then a central
projection z such that a(1-z), e(1-z), bz and fz are all central: on
each block one of the two multipliers must act as a scalar, and z marks
the blocks where it is the right one.  These routines verify the
identity, produce the projection deterministically, and check the
centrality conclusions, so they double as oracles for the splitting
used by the hermitian classification.
"""

from __future__ import annotations

import numpy as np

from .algebra import AlgebraElement, CentralProjection, TracialAlgebra, commutator
from .errors import DomainError, HypothesisViolatedError
from .tolerances import DEFAULT_TOLERANCES, Tolerances


def _require_self_adjoint(tag: str, x: AlgebraElement, tol: float):
    if not x.is_self_adjoint(tol):
        raise DomainError(f"{tag} must be self-adjoint")


def _scalar_defect(blk: np.ndarray) -> float:
    d = blk.shape[0]
    lam = np.trace(blk) / d
    return float(np.max(np.abs(blk - lam * np.eye(d))))


def verify_bimodule_identity(a: AlgebraElement, b: AlgebraElement,
                             e: AlgebraElement, f: AlgebraElement,
                             tolerances: Tolerances = DEFAULT_TOLERANCES) -> float:
    """Defect of the identity e y + y f = a y b over the coordinate basis.

    Also folds in the defects of the consequences [a, b] = 0 and
    [b, [a, y]] = 0, which exact solutions satisfy; the returned value is
    the largest sup-norm defect seen.
    """
    algebra = a.algebra
    for tag, x in (("a", a), ("b", b), ("e", e), ("f", f)):
        _require_self_adjoint(tag, x, tolerances.check)
    defect = commutator(a, b).sup_norm()
    for y in algebra.basis():
        defect = max(defect, (e @ y + y @ f - a @ y @ b).sup_norm())
        defect = max(defect, commutator(b, commutator(a, y)).sup_norm())
    return float(defect)


def central_split_pair(a: AlgebraElement, b: AlgebraElement,
                       tolerances: Tolerances = DEFAULT_TOLERANCES
                       ) -> CentralProjection:
    """The central projection separating a commuting multiplier pair.

    Requires [a, b] = 0 and [b, [a, y]] = 0 on the coordinate basis (up
    to the check tolerance).  Those hypotheses force, per block, one of
    a or b to be scalar; z gets a 1 exactly on the blocks where b is
    scalar (so ties where both are scalar also go to 1).  A block where
    neither side is scalar is impossible in exact arithmetic and raises
    HypothesisViolatedError.
    """
    algebra = a.algebra
    _require_self_adjoint("a", a, tolerances.check)
    _require_self_adjoint("b", b, tolerances.check)
    scale = max(1.0, a.sup_norm() * b.sup_norm())
    if commutator(a, b).sup_norm() > tolerances.check * scale:
        raise DomainError("a and b do not commute")
    inner_scale = max(1.0, a.sup_norm() * b.sup_norm())
    for y in algebra.basis():
        if commutator(b, commutator(a, y)).sup_norm() > tolerances.check * inner_scale:
            raise DomainError("[b, [a, y]] does not vanish on the basis")

    size = max(1.0, a.sup_norm(), b.sup_norm())
    bits = []
    for a_blk, b_blk in zip(a.blocks, b.blocks):
        b_scalar = _scalar_defect(b_blk) <= tolerances.check * size
        a_scalar = _scalar_defect(a_blk) <= tolerances.check * size
        if b_scalar:
            bits.append(1)
        elif a_scalar:
            bits.append(0)
        else:
            raise HypothesisViolatedError(
                "neither multiplier is scalar on a block although the "
                "commutation hypotheses hold; numerical breach"
            )
    return CentralProjection(algebra, tuple(bits))


def centrality_defects(a: AlgebraElement, b: AlgebraElement,
                       e: AlgebraElement, f: AlgebraElement,
                       z: CentralProjection) -> dict[str, float]:
    """Sup-norm distances of a(1-z), e(1-z), bz, fz from the center."""

    def off_center(x: AlgebraElement, bits) -> float:
        worst = 0.0
        for blk, bit in zip(x.blocks, bits):
            if bit:
                worst = max(worst, _scalar_defect(blk))
        return worst

    comp = z.complement().bits
    return {
        "a(1-z)": off_center(a, comp),
        "e(1-z)": off_center(e, comp),
        "bz": off_center(b, z.bits),
        "fz": off_center(f, z.bits),
    }


def central_decomposition(a: AlgebraElement, b: AlgebraElement,
                          e: AlgebraElement, f: AlgebraElement,
                          tolerances: Tolerances = DEFAULT_TOLERANCES
                          ) -> CentralProjection:
    """Central projection splitting an exact bimodule identity.

    Verifies e y + y f = a y b on the basis, takes z from the multiplier
    pair, and then checks the conclusions: a(1-z), e(1-z), bz and fz are
    all central, with fz also matching a b z - e z.  Any failed
    conclusion raises HypothesisViolatedError since the identity
    guarantees them in exact arithmetic.
    """
    scale = max(1.0, a.sup_norm() * b.sup_norm(), e.sup_norm(), f.sup_norm())
    defect = verify_bimodule_identity(a, b, e, f, tolerances)
    if defect > tolerances.check * scale:
        raise DomainError(
            f"bimodule identity fails on the basis (defect {defect:.3g})"
        )
    z = central_split_pair(a, b, tolerances)
    defects = centrality_defects(a, b, e, f, z)
    if max(defects.values()) > tolerances.check * scale:
        raise HypothesisViolatedError(
            f"centrality conclusions fail numerically: {defects}"
        )
    ze = z.as_element()
    f_identity = (f @ ze - (a @ b @ ze - e @ ze)).sup_norm()
    if f_identity > tolerances.check * scale:
        raise HypothesisViolatedError(
            f"fz = abz - ez fails numerically (defect {f_identity:.3g})"
        )
    return z


def admissible_splits(a: AlgebraElement, b: AlgebraElement,
                      e: AlgebraElement, f: AlgebraElement,
                      tol: float = 1e-10) -> list[CentralProjection]:
    """Brute force: every central projection whose four centrality
    defects stay below ``tol``, in the all-ones-first candidate order.

    Independent of :func:`central_split_pair`; used as its oracle.
    """
    algebra = a.algebra
    scale = max(1.0, a.sup_norm() * b.sup_norm(), e.sup_norm(), f.sup_norm())
    out = []
    for z in algebra.central_projections():
        if max(centrality_defects(a, b, e, f, z).values()) <= tol * scale:
            out.append(z)
    return out
