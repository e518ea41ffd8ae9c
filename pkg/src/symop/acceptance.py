"""Acceptance criteria for the package, runnable as a batch.

Each criterion is a self-contained scenario with pinned tolerances, a
fixed seed and a wall-clock budget; ``run_all`` executes them in order
and reports one pass/fail result apiece.  The test suite and the CLI
``selftest`` command both call into this module so there is exactly one
definition of "done".
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from . import gallery
from .algebra import TracialAlgebra
from .central import admissible_splits, central_decomposition, \
    central_split_pair, centrality_defects
from .hermitian import (SuperOperator, certify, corner_defect,
                        orthogonality_defect, projection_bound_check)
from .isometry import factor_isometry, is_elementary, is_isometry
from .norms import LorentzNorm, LpNorm, norm
from .sampling import (as_rng, random_diagonal_projection, random_element,
                       random_self_adjoint, random_unitary)

_MAX_REPORTED_FAILURES = 5


@dataclass
class CriterionResult:
    index: int
    title: str
    passed: bool
    elapsed_seconds: float
    budget_seconds: float
    details: dict = field(default_factory=dict)
    failures: list = field(default_factory=list)

    @property
    def within_budget(self) -> bool:
        return self.elapsed_seconds <= self.budget_seconds

    def line(self) -> str:
        status = "PASS" if (self.passed and self.within_budget) else "FAIL"
        return (f"{status} criterion {self.index}: {self.title} "
                f"({self.elapsed_seconds:.2f}s / budget {self.budget_seconds:.0f}s)")

    def to_dict(self) -> dict:
        return {
            "index": self.index,
            "title": self.title,
            "passed": bool(self.passed and self.within_budget),
            "elapsed_seconds": self.elapsed_seconds,
            "budget_seconds": self.budget_seconds,
            "details": self.details,
            "failures": self.failures[:_MAX_REPORTED_FAILURES],
        }


class _Recorder:
    """Collect failure messages without aborting the scenario."""

    def __init__(self):
        self.failures = []

    def check(self, ok: bool, message: str) -> bool:
        if not ok:
            self.failures.append(message)
        return ok


def _run(index, title, budget, scenario) -> CriterionResult:
    rec = _Recorder()
    started = time.perf_counter()
    details = scenario(rec) or {}
    elapsed = time.perf_counter() - started
    return CriterionResult(
        index=index, title=title, passed=not rec.failures,
        elapsed_seconds=elapsed, budget_seconds=budget,
        details=details, failures=rec.failures,
    )


# -- criterion 1: the two-atom isometry ------------------------------------------


def criterion_1() -> CriterionResult:
    def scenario(rec):
        _, n = gallery.two_atom_space()
        t = gallery.example_isometry()
        report = is_isometry(t, n, samples=1000, seed=20260101)
        rec.check(report.defect < 1e-10,
                  f"isometry defect {report.defect:.3g} >= 1e-10")
        witness = is_elementary(t)
        rec.check(witness is None,
                  f"unexpected elementary form: {witness}")
        return {"defect": report.defect, "elementary": witness is not None}

    return _run(1, "two-atom example isometry is exact and not elementary",
                1.0, scenario)


# -- criterion 2: the two-atom hermitian operator ---------------------------------


def criterion_2() -> CriterionResult:
    def scenario(rec):
        _, n = gallery.two_atom_space()
        t = gallery.example_hermitian()
        cert = certify(t, n, seed=20260102)
        rec.check(cert.verdict == "hermitian",
                  f"verdict {cert.verdict!r}, expected 'hermitian'")
        fit = gallery.multiplication_fit_residual(t)
        rec.check(fit > 0.1,
                  f"multiplication fit residual {fit:.3g} <= 0.1")
        return {
            "verdict": cert.verdict,
            "exp_defect": cert.exp_defect,
            "max_imag_numrange": cert.max_imag_numrange,
            "multiplication_fit_residual": fit,
        }

    return _run(2, "two-atom example hermitian operator is certified and "
                   "is no multiplication", 1.0, scenario)


# -- criterion 3: structured multiplications are certified and recovered ----------


def _recovery_deviation(orig_a, orig_b, fit_a, fit_b) -> float:
    """Worst block deviation after removing the central gauge shift."""
    worst = 0.0
    for i, d in enumerate(orig_a.algebra.dims):
        da = fit_a.blocks[i] - orig_a.blocks[i]
        db = fit_b.blocks[i] - orig_b.blocks[i]
        lam = np.trace(da) / d
        worst = max(worst,
                    float(np.linalg.norm(da - lam * np.eye(d))),
                    float(np.linalg.norm(db + lam * np.eye(d))))
    return worst


_C3_CASES = (
    (TracialAlgebra(((4, 1.0),)), LpNorm(3.0)),
    (TracialAlgebra(((2, 1.0), (3, 1.0))),
     LorentzNorm((2.0, 1.0), (1.5, 3.5))),
)


def criterion_3() -> CriterionResult:
    def scenario(rec):
        worst_residual = 0.0
        worst_recovery = 0.0
        for case, (algebra, n) in enumerate(_C3_CASES):
            rng = as_rng(20260103 + case)
            for trial in range(100):
                a = random_self_adjoint(algebra, rng)
                b = random_self_adjoint(algebra, rng)
                t = SuperOperator.structured(a, b)
                cert = certify(t, n, seed=int(rng.integers(1 << 31)))
                tag = f"case {case} trial {trial}"
                if not rec.check(cert.verdict == "hermitian",
                                 f"{tag}: verdict {cert.verdict!r}"):
                    continue
                worst_residual = max(worst_residual,
                                     cert.decomposition_residual)
                rec.check(cert.decomposition_residual < 1e-9,
                          f"{tag}: residual {cert.decomposition_residual:.3g}")
                if not rec.check(cert.decomposition is not None,
                                 f"{tag}: decomposition missing"):
                    continue
                dev = _recovery_deviation(a, b, cert.decomposition.left,
                                          cert.decomposition.right)
                worst_recovery = max(worst_recovery, dev)
                rec.check(dev < 1e-8,
                          f"{tag}: recovery deviation {dev:.3g}")
        return {"worst_residual": worst_residual,
                "worst_recovery_deviation": worst_recovery}

    return _run(3, "random two-sided multiplications certify hermitian and "
                   "are recovered up to a central shift", 30.0, scenario)


# -- criterion 4: the transpose map on the L2 space --------------------------------


def criterion_4() -> CriterionResult:
    def scenario(rec):
        algebra = TracialAlgebra(((2, 1.0),))
        n = LpNorm(2.0)
        t = SuperOperator.transpose_map(algebra)
        cert = certify(t, n, seed=20260104)
        rec.check(cert.verdict == "hermitian",
                  f"verdict {cert.verdict!r}, expected 'hermitian'")
        rec.check(cert.decomposition_residual > 0.5,
                  f"residual {cert.decomposition_residual:.3g} <= 0.5")
        rec.check(cert.l2_exception,
                  "l2_exception flag not set")
        return {
            "verdict": cert.verdict,
            "decomposition_residual": cert.decomposition_residual,
            "l2_proportional": cert.l2_proportional,
            "l2_exception": cert.l2_exception,
        }

    return _run(4, "transpose map is hermitian on the trace L2 space but "
                   "is no multiplication", 1.0, scenario)


# -- criterion 5: conjugation isometries factor exactly ----------------------------


def _conjugation_isometry(algebra, u, v, transposed: bool) -> SuperOperator:
    """Dense form of x -> u (v x v*) resp. x -> u (v x^T v*)."""
    D = algebra.coord_dim
    cols = np.zeros((D, D), dtype=complex)
    ub, vb = u.blocks[0], v.blocks[0]
    for idx, e in enumerate(algebra.basis()):
        x = e.blocks[0]
        y = x.T if transposed else x
        img = ub @ vb @ y @ vb.conj().T
        cols[:, idx] = algebra.element([img]).to_vec()
    return SuperOperator.from_dense(algebra, cols)


def criterion_5() -> CriterionResult:
    def scenario(rec):
        algebra = TracialAlgebra(((3, 1.0),))
        n = LpNorm(1.0)
        rng = as_rng(20260105)
        worst_residual = 0.0
        worst_unitary = 0.0
        for trial in range(50):
            u = random_unitary(algebra, rng)
            v = random_unitary(algebra, rng)
            transposed = bool(trial % 2)
            t = _conjugation_isometry(algebra, u, v, transposed)
            tag = f"trial {trial} ({'transpose' if transposed else 'straight'})"
            try:
                fact = factor_isometry(t, n, seed=int(rng.integers(1 << 31)))
            except Exception as exc:  # noqa: BLE001 - report, keep scanning
                rec.check(False, f"{tag}: {type(exc).__name__}: {exc}")
                continue
            worst_residual = max(worst_residual, fact.residual)
            rec.check(fact.residual < 1e-9,
                      f"{tag}: residual {fact.residual:.3g}")
            rec.check(fact.jordan.transposed == (transposed,),
                      f"{tag}: transposed flags {fact.jordan.transposed}")
            expected_bits = (0,) if transposed else (1,)
            rec.check(fact.z.bits == expected_bits,
                      f"{tag}: z bits {fact.z.bits}, expected {expected_bits}")
            defect = fact.unitary_defect()
            worst_unitary = max(worst_unitary, defect)
            rec.check(defect < 1e-10,
                      f"{tag}: multiplier unitarity defect {defect:.3g}")
            rec.check(fact.jordan.trace_preserving,
                      f"{tag}: factored map not trace preserving")
        return {"worst_residual": worst_residual,
                "worst_unitary_defect": worst_unitary}

    return _run(5, "conjugation isometries factor with the right character "
                   "and a unitary multiplier", 60.0, scenario)


# -- criterion 6: central splitting of bimodule pairs ------------------------------


def _rand_sa(d: int, rng) -> np.ndarray:
    m = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    return 0.5 * (m + m.conj().T)


def _bimodule_quadruple(algebra, rng):
    """Per block: one of the two outer factors is scalar; the inner pair
    follows from the identity up to the scalar freedom lam."""
    a_b, b_b, e_b, f_b = [], [], [], []
    expected = []
    for d in algebra.dims:
        scenario = int(rng.integers(0, 3)) if d > 1 else 2
        lam = float(rng.normal())
        eye = np.eye(d)
        if scenario == 0:  # right factor scalar -> left summand
            a = _rand_sa(d, rng)
            beta = float(rng.normal())
            b, e, f = beta * eye, beta * a - lam * eye, lam * eye
            expected.append(1)
        elif scenario == 1:  # left factor scalar -> right summand
            b = _rand_sa(d, rng)
            alpha = float(rng.normal())
            a, e, f = alpha * eye, lam * eye, alpha * b - lam * eye
            expected.append(0)
        else:  # both scalar: tie, resolved toward the left summand
            alpha, beta = float(rng.normal()), float(rng.normal())
            a, b = alpha * eye, beta * eye
            e, f = lam * eye, (alpha * beta - lam) * eye
            expected.append(1)
        a_b.append(a)
        b_b.append(b)
        e_b.append(e)
        f_b.append(f)
    make = algebra.element
    return (make(a_b), make(b_b), make(e_b), make(f_b)), tuple(expected)


def criterion_6() -> CriterionResult:
    def scenario(rec):
        algebra = TracialAlgebra(((2, 1.0), (3, 1.0), (1, 1.0)))
        rng = as_rng(20260106)
        worst_defect = 0.0
        for trial in range(200):
            (a, b, e, f), expected = _bimodule_quadruple(algebra, rng)
            tag = f"trial {trial}"
            try:
                z = central_decomposition(a, b, e, f)
            except Exception as exc:  # noqa: BLE001
                rec.check(False, f"{tag}: {type(exc).__name__}: {exc}")
                continue
            rec.check(z.bits == expected,
                      f"{tag}: bits {z.bits}, expected {expected}")
            defects = centrality_defects(a, b, e, f, z)
            worst = max(defects.values())
            worst_defect = max(worst_defect, worst)
            rec.check(worst < 1e-12,
                      f"{tag}: centrality defect {worst:.3g}")
            splits = admissible_splits(a, b, e, f)
            rec.check(bool(splits) and splits[0] == z,
                      f"{tag}: brute force disagrees "
                      f"({[s.bits for s in splits]})")
            rec.check(central_split_pair(a, b) == z,
                      f"{tag}: pair split disagrees")
        return {"worst_centrality_defect": worst_defect}

    return _run(6, "central splitting agrees with brute force on random "
                   "bimodule quadruples", 10.0, scenario)


# -- criterion 7: structural consequences for hermitian operators ------------------


def _disjoint_pair(algebra, rng):
    """Two partial isometries with orthogonal left and right supports."""
    total = sum(algebra.dims)
    u = random_unitary(algebra, rng)
    v = random_unitary(algebra, rng)
    while True:
        k1 = int(rng.integers(1, total))
        k2 = int(rng.integers(1, total - k1 + 1))
        order = rng.permutation(total)
        bits1 = [0] * total
        bits2 = [0] * total
        for pos in order[:k1]:
            bits1[pos] = 1
        for pos in order[k1:k1 + k2]:
            bits2[pos] = 1
        p1 = algebra.diagonal([complex(bit) for bit in bits1])
        p2 = algebra.diagonal([complex(bit) for bit in bits2])
        return u @ p1 @ v.H, u @ p2 @ v.H


def criterion_7() -> CriterionResult:
    def scenario(rec):
        algebra = TracialAlgebra(((2, 1.0), (3, 1.0)))
        n = LorentzNorm((2.0, 1.0), (1.5, 3.5))
        rng = as_rng(20260107)
        worst_orth = worst_corner = worst_ratio = 0.0
        pair_count = corner_count = 0
        for op_index in range(10):
            a = random_self_adjoint(algebra, rng)
            b = random_self_adjoint(algebra, rng)
            t = SuperOperator.structured(a, b)
            for _ in range(10):
                x1, x2 = _disjoint_pair(algebra, rng)
                d = orthogonality_defect(t, x1, x2)
                worst_orth = max(worst_orth, d)
                pair_count += 1
                rec.check(d < 1e-9,
                          f"op {op_index}: orthogonality defect {d:.3g}")
            for _ in range(10):
                # the two projection patterns can land in disjoint blocks
                # and annihilate the product, so redraw until nonzero
                while True:
                    x = (random_diagonal_projection(algebra, rng)
                         @ random_element(algebra, rng)
                         @ random_diagonal_projection(algebra, rng))
                    if x.sup_norm() > 1e-9:
                        break
                d = corner_defect(t, x)
                worst_corner = max(worst_corner, d)
                corner_count += 1
                rec.check(d < 1e-9,
                          f"op {op_index}: corner defect {d:.3g}")
            report = projection_bound_check(
                t, n, seed=int(rng.integers(1 << 31)))
            worst_ratio = max(worst_ratio, report.ratio)
            rec.check(report.ratio <= 3.0,
                      f"op {op_index}: projection ratio {report.ratio:.3g}")
        rec.check(pair_count == 100, f"only {pair_count} disjoint pairs")
        rec.check(corner_count == 100, f"only {corner_count} corner probes")
        return {"worst_orthogonality": worst_orth,
                "worst_corner": worst_corner,
                "worst_projection_ratio": worst_ratio}

    return _run(7, "hermitian operators respect support orthogonality, "
                   "corners and the projection bound", 60.0, scenario)


# -- criterion 8: perturbations are rejected ---------------------------------------


def criterion_8() -> CriterionResult:
    def scenario(rec):
        algebra = TracialAlgebra(((4, 1.0),))
        n = LpNorm(3.0)
        rng = as_rng(20260108)
        D = algebra.coord_dim
        weakest = np.inf
        for trial in range(100):
            a = random_self_adjoint(algebra, rng)
            b = random_self_adjoint(algebra, rng)
            base = SuperOperator.structured(a, b).dense
            noise = (rng.standard_normal((D, D))
                     + 1j * rng.standard_normal((D, D)))
            noise *= np.linalg.norm(base) / np.linalg.norm(noise)
            t = SuperOperator.from_dense(algebra, base + 1e-2 * noise)
            cert = certify(t, n, seed=int(rng.integers(1 << 31)))
            strongest = max(cert.exp_defect, cert.max_imag_numrange)
            weakest = min(weakest, strongest)
            rec.check(cert.verdict == "not_hermitian",
                      f"trial {trial}: verdict {cert.verdict!r} "
                      f"(defects {cert.exp_defect:.3g}, "
                      f"{cert.max_imag_numrange:.3g})")
        return {"weakest_rejection_signal": float(weakest)}

    return _run(8, "one percent perturbations of multiplications are "
                   "rejected", 30.0, scenario)


ALL_CRITERIA = (criterion_1, criterion_2, criterion_3, criterion_4,
                criterion_5, criterion_6, criterion_7, criterion_8)


def run_all(indices=None) -> list[CriterionResult]:
    chosen = indices or range(1, len(ALL_CRITERIA) + 1)
    return [ALL_CRITERIA[i - 1]() for i in chosen]
