"""Worked example: the weighted two-atom space.

Two abelian atoms with traces 1 and 2 carry the norm
sqrt(|a|^2 + 3|b|^2).  The space is symmetric but not fully symmetric,
and it hosts two instructive operators:

* an exact surjective isometry with no elementary (permutation times
  unimodular diagonal) form, and
* a hermitian operator that is not a two-sided multiplication — its
  best fit by multiplications leaves a residual around 1.83.

Both matrices act on the coordinates (a, b).
"""

from __future__ import annotations

import math
import time

import numpy as np

from .algebra import TracialAlgebra
from .hermitian import SuperOperator, certify, decompose_hermitian
from .isometry import is_elementary, is_isometry
from .norms import TwoAtomNorm

TWO_ATOM_BLOCKS = ((1, 1.0), (1, 2.0))


def two_atom_space() -> tuple[TracialAlgebra, TwoAtomNorm]:
    return TracialAlgebra(TWO_ATOM_BLOCKS), TwoAtomNorm(3.0)


def example_isometry() -> SuperOperator:
    """Columns are the images of the coordinate directions."""
    algebra = TracialAlgebra(TWO_ATOM_BLOCKS)
    s2, s3 = math.sqrt(2.0), math.sqrt(3.0)
    mat = np.array([
        [-1j / s2, s3 / s2],
        [1j / (s2 * s3), 1.0 / s2],
    ])
    return SuperOperator.from_dense(algebra, mat)


def example_hermitian() -> SuperOperator:
    algebra = TracialAlgebra(TWO_ATOM_BLOCKS)
    s3 = math.sqrt(3.0)
    mat = np.array([
        [1.0, 1j * s3],
        [-1j / s3, 1.0],
    ])
    return SuperOperator.from_dense(algebra, mat)


def multiplication_fit_residual(t_op: SuperOperator) -> float:
    """Distance of T from the span of two-sided multiplications."""
    return decompose_hermitian(t_op).residual


def run_exam(samples: int = 1000, seed: int = 0) -> dict:
    """Exercise the whole example and report every headline number."""
    algebra, n = two_atom_space()
    t_iso = example_isometry()
    t_herm = example_hermitian()

    started = time.perf_counter()
    iso = is_isometry(t_iso, n, samples=samples, seed=seed)
    witness = is_elementary(t_iso)
    certificate = certify(t_herm, n, seed=seed)
    fit = multiplication_fit_residual(t_herm)
    elapsed = time.perf_counter() - started

    return {
        "space": {
            "blocks": [{"dim": d, "weight": w} for d, w in TWO_ATOM_BLOCKS],
            "norm": n.describe(),
        },
        "isometry": {
            "defect": iso.defect,
            "holds": iso.holds,
            "samples": iso.samples,
            "seed": iso.seed,
            "elementary": witness is not None,
        },
        "hermitian": {
            "verdict": certificate.verdict,
            "exp_defect": certificate.exp_defect,
            "max_imag_numrange": certificate.max_imag_numrange,
            "multiplication_fit_residual": fit,
        },
        "elapsed_seconds": elapsed,
    }
