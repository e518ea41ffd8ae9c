import numpy as np
import pytest

from symop import (ClassificationFailedError, DomainError, LpNorm,
                   NotFactorableError, NotSurjectiveError, SuperOperator,
                   TracialAlgebra, conjugate_left_mult, extract_jordan,
                   factor_isometry, is_elementary, is_isometry,
                   jordan_classify, mu)
from symop.acceptance import _conjugation_isometry
from symop.gallery import example_isometry, two_atom_space
from symop.sampling import as_rng, random_element, random_self_adjoint, \
    random_unitary

M3 = TracialAlgebra(((3, 1.0),))
TWO_BLOCK = TracialAlgebra(((2, 1.0), (2, 1.0)))
L1 = LpNorm(1.0)


def test_is_isometry_on_unitary_conjugation():
    rng = as_rng(0)
    u = random_unitary(M3, rng)
    t = _conjugation_isometry(M3, u, random_unitary(M3, rng), False)
    report = is_isometry(t, L1, samples=60, seed=1)
    assert report.holds
    assert report.defect < 1e-12


def test_is_isometry_defect_of_a_doubling():
    t = 2.0 * SuperOperator.identity(M3)
    report = is_isometry(t, L1, samples=30, seed=1)
    assert not report.holds
    assert report.defect == pytest.approx(1.0, abs=1e-9)


def test_is_isometry_requires_surjectivity():
    m = np.eye(M3.coord_dim, dtype=complex)
    m[0, 0] = 0.0
    with pytest.raises(NotSurjectiveError):
        is_isometry(SuperOperator.from_dense(M3, m), L1, samples=4)


def test_conjugate_left_mult_of_unitary_multiplication():
    rng = as_rng(2)
    u = random_unitary(M3, rng)
    a = random_self_adjoint(M3, rng)
    t = SuperOperator.left_mult(u)
    conj = conjugate_left_mult(t, a)
    expected = SuperOperator.left_mult(u @ a @ u.H)
    assert np.allclose(conj.dense, expected.dense, atol=1e-10)


def test_extract_jordan_straight_and_transpose():
    rng = as_rng(3)
    for transposed in (False, True):
        u = random_unitary(M3, rng)
        v = random_unitary(M3, rng)
        t = _conjugation_isometry(M3, u, v, transposed)
        extraction = extract_jordan(t, L1, seed=4)
        assert extraction.residual < 1e-10
        assert extraction.z.bits == ((0,) if transposed else (1,))
        # the dense Jordan map must act as x -> (uv) x (uv)* resp.
        # x -> v x^T v*
        x = random_element(M3, rng)
        jx = M3.from_vec(extraction.jordan_dense @ x.to_vec())
        if transposed:
            expected = v @ M3.element([x.blocks[0].T]) @ v.H
        else:
            w = u @ v
            expected = w @ x @ w.H
        assert jx.approx_equal(expected, tol=1e-9)


def test_extract_jordan_rejects_non_isometries():
    with pytest.raises(DomainError):
        extract_jordan(2.0 * SuperOperator.identity(M3), L1, seed=0)


def test_jordan_classify_recovers_block_swap():
    rng = as_rng(5)
    v0 = random_unitary(TWO_BLOCK, rng)
    perm = (1, 0)
    flags = (False, True)

    D = TWO_BLOCK.coord_dim
    dense = np.zeros((D, D), dtype=complex)
    for idx, e in enumerate(TWO_BLOCK.basis()):
        out = [None, None]
        for i in (0, 1):
            src = e.blocks[i].T if flags[i] else e.blocks[i]
            out[perm[i]] = v0.blocks[i] @ src @ v0.blocks[i].conj().T
        dense[:, idx] = TWO_BLOCK.element(out).to_vec()

    jordan = jordan_classify(dense, TWO_BLOCK)
    assert jordan.permutation == perm
    assert jordan.transposed == flags
    assert jordan.trace_preserving
    assert not jordan.is_star_isomorphism
    x = random_element(TWO_BLOCK, rng)
    expected = TWO_BLOCK.from_vec(dense @ x.to_vec())
    assert jordan.apply(x).approx_equal(expected, tol=1e-9)


def test_jordan_classify_rejects_non_normal_maps():
    # halving one block is not a Jordan isomorphism
    dense = np.eye(TWO_BLOCK.coord_dim, dtype=complex)
    dense[:4, :4] *= 0.5
    with pytest.raises(ClassificationFailedError):
        jordan_classify(dense, TWO_BLOCK)


def test_factor_isometry_round_trip_and_mu_invariance():
    rng = as_rng(6)
    for transposed in (False, True):
        u = random_unitary(M3, rng)
        v = random_unitary(M3, rng)
        t = _conjugation_isometry(M3, u, v, transposed)
        fact = factor_isometry(t, L1, seed=7)
        assert fact.residual < 1e-10
        assert fact.unitary_defect() < 1e-10
        assert fact.jordan.transposed == (transposed,)
        # multiplier is exactly u (modulo nothing: T(1) = u in both forms)
        assert fact.multiplier.approx_equal(u, tol=1e-10)
        for _ in range(5):
            x = random_element(M3, rng)
            assert fact.apply(x).approx_equal(t(x), tol=1e-9)
            assert mu(t(x)).approx_equal(mu(x), tol=1e-9)


def test_factored_isometries_compose():
    """The factored class is closed under composition: a product of two
    conjugation isometries factors again, with the transpose characters
    multiplying."""
    rng = as_rng(8)
    t1 = _conjugation_isometry(M3, random_unitary(M3, rng),
                               random_unitary(M3, rng), True)
    t2 = _conjugation_isometry(M3, random_unitary(M3, rng),
                               random_unitary(M3, rng), True)
    fact = factor_isometry(t1 @ t2, L1, seed=9)
    assert fact.residual < 1e-9
    assert fact.jordan.transposed == (False,)  # transpose twice = straight
    assert fact.unitary_defect() < 1e-9


def test_transpose_map_factors_on_l2():
    """x -> x^T is an L2 isometry of the right-multiplication kind:
    z = 0, identity conjugating unitary, transposed character."""
    alg = TracialAlgebra(((2, 1.0),))
    t = SuperOperator.transpose_map(alg)
    fact = factor_isometry(t, LpNorm(2.0), seed=10)
    assert fact.z.bits == (0,)
    assert fact.jordan.transposed == (True,)
    assert fact.multiplier.approx_equal(alg.identity(), tol=1e-10)


def test_unequal_atoms_do_not_factor():
    """The two-atom example isometry mixes the atoms and admits no
    multiplication form; the search must say so rather than force one."""
    _, n = two_atom_space()
    with pytest.raises(NotFactorableError):
        extract_jordan(example_isometry(), n, seed=11)


def test_is_elementary_finds_permutation_and_phases():
    atoms = TracialAlgebra(((1, 1.0), (1, 1.0), (1, 1.0)))
    dense = np.zeros((3, 3), dtype=complex)
    dense[0, 2] = 1j
    dense[1, 0] = -1.0
    dense[2, 1] = np.exp(0.3j)
    witness = is_elementary(SuperOperator.from_dense(atoms, dense))
    assert witness is not None
    assert witness.permutation == (2, 0, 1)
    assert witness.phases[0] == pytest.approx(1j)


def test_is_elementary_rejections():
    _, n = two_atom_space()
    assert is_elementary(example_isometry()) is None
    with pytest.raises(DomainError):
        is_elementary(SuperOperator.identity(M3))  # not abelian
