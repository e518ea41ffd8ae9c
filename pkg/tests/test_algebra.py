import numpy as np
import pytest

from symop import (DomainError, StructureError, TracialAlgebra,
                   central_support, commutator, left_support, polar_decompose,
                   right_support, spectral_projection, trace)
from symop.sampling import as_rng, random_element, random_self_adjoint, \
    random_unitary

M2 = TracialAlgebra(((2, 1.0),))
MIXED = TracialAlgebra(((2, 1.0), (3, 0.5), (1, 2.0)))


def test_block_validation():
    with pytest.raises(StructureError):
        TracialAlgebra(())
    with pytest.raises(StructureError):
        TracialAlgebra(((0, 1.0),))
    with pytest.raises(StructureError):
        TracialAlgebra(((2, -1.0),))


def test_basic_properties():
    assert MIXED.num_blocks == 3
    assert MIXED.dims == (2, 3, 1)
    assert MIXED.weights == (1.0, 0.5, 2.0)
    assert MIXED.coord_dim == 4 + 9 + 1
    assert MIXED.total_trace == pytest.approx(2 * 1.0 + 3 * 0.5 + 1 * 2.0)
    assert not MIXED.equal_atoms
    assert TracialAlgebra(((2, 1.0), (5, 1.0))).equal_atoms


def test_trace_against_plain_sum():
    rng = as_rng(0)
    for _ in range(20):
        x = random_element(MIXED, rng)
        expected = sum(w * np.trace(blk)
                       for w, blk in zip(MIXED.weights, x.blocks))
        assert trace(x) == pytest.approx(expected)


def test_vec_round_trip():
    rng = as_rng(1)
    x = random_element(MIXED, rng)
    assert MIXED.from_vec(x.to_vec()).approx_equal(x)
    assert len(x.to_vec()) == MIXED.coord_dim


def test_basis_is_coordinate_aligned():
    for idx, e in enumerate(MIXED.basis()):
        v = e.to_vec()
        assert v[idx] == 1.0
        assert np.count_nonzero(v) == 1


def test_self_adjoint_basis_spans_and_is_self_adjoint():
    elems = MIXED.self_adjoint_basis()
    assert len(elems) == sum(d * d for d in MIXED.dims)
    mat = np.column_stack([e.to_vec() for e in elems])
    # real span must hit every self-adjoint element
    rng = as_rng(2)
    x = random_self_adjoint(MIXED, rng)
    target = x.to_vec()
    design = np.concatenate([np.column_stack([mat.real, -mat.imag]),
                             np.column_stack([mat.imag, mat.real])])
    sol, *_ = np.linalg.lstsq(
        design[:, :mat.shape[1]],
        np.concatenate([target.real, target.imag]), rcond=None)
    recon = mat @ sol
    assert np.allclose(recon, target, atol=1e-10)
    for e in elems:
        assert e.is_self_adjoint()


def test_element_arithmetic():
    rng = as_rng(3)
    x = random_element(M2, rng)
    y = random_element(M2, rng)
    assert (x + y - y).approx_equal(x)
    assert (2.0 * x - x).approx_equal(x)
    assert (x / 2.0 + x / 2.0).approx_equal(x)
    with pytest.raises(TypeError):
        x * y  # element products go through @
    assert (x @ y).blocks[0] == pytest.approx(x.blocks[0] @ y.blocks[0])
    assert x.H.H.approx_equal(x)


def test_adjoint_reverses_products():
    rng = as_rng(4)
    x = random_element(MIXED, rng)
    y = random_element(MIXED, rng)
    assert (x @ y).H.approx_equal(y.H @ x.H)


def test_mismatched_algebras_refuse_to_combine():
    a = M2.identity()
    b = MIXED.identity()
    with pytest.raises(StructureError):
        a + b


def test_identity_and_diagonal():
    one = MIXED.identity()
    assert one.is_projection()
    assert one.is_central()
    diag = MIXED.diagonal([1, 0, 1, 1, 0, 1])
    assert diag.is_projection()
    assert trace(diag) == pytest.approx(1 * 1.0 + 2 * 0.5 + 1 * 2.0)
    with pytest.raises(StructureError):
        MIXED.diagonal([1, 0])  # wrong length


def test_polar_decomposition_reconstructs():
    rng = as_rng(5)
    for _ in range(10):
        x = random_element(MIXED, rng)
        u, m, left, right, null = polar_decompose(x)
        assert (u @ m).approx_equal(x, tol=1e-10)
        assert m.is_self_adjoint()
        assert left.is_projection()
        assert right.is_projection()
        # supports reproduce x from both sides
        assert (left @ x @ right).approx_equal(x, tol=1e-10)


def test_partial_isometry_from_polar():
    rng = as_rng(6)
    x = random_element(MIXED, rng)
    u, *_ = polar_decompose(x)
    assert u.is_partial_isometry()
    assert not x.is_partial_isometry()


def test_supports_of_rank_deficient_element():
    blk = np.zeros((2, 2), dtype=complex)
    blk[0, 1] = 3.0
    x = M2.element([blk])
    l = left_support(x)
    r = right_support(x)
    assert np.allclose(l.blocks[0], np.diag([1.0, 0.0]))
    assert np.allclose(r.blocks[0], np.diag([0.0, 1.0]))


def test_spectral_projection_counts_eigenvalues():
    x = M2.element([np.diag([2.0, -1.0]).astype(complex)])
    p = spectral_projection(x, 0.0, np.inf)
    assert np.allclose(p.blocks[0], np.diag([1.0, 0.0]))
    p_all = spectral_projection(x, -2.0, 3.0)
    assert p_all.approx_equal(M2.identity())
    with pytest.raises(DomainError):
        spectral_projection(M2.element([np.array([[0, 1], [0, 0]],
                                                 dtype=complex)]), 0, 1)


def test_central_support_and_projections():
    x = MIXED.zero()
    blocks = [b.copy() for b in x.blocks]
    blocks[1][0, 0] = 1.0
    x = MIXED.element(blocks)
    z = central_support(x)
    assert z.bits == (0, 1, 0)
    assert z.complement().bits == (1, 0, 1)
    assert (z.as_element() @ x).approx_equal(x)
    everything = list(MIXED.central_projections())
    assert len(everything) == 8
    assert everything[0].bits == (1, 1, 1)  # all-ones scanned first
    assert everything[-1].bits == (0, 0, 0)


def test_central_part_is_blockwise_trace_average():
    rng = as_rng(7)
    x = random_element(MIXED, rng)
    c = x.central_part()
    assert c.is_central()
    for blk, cblk in zip(x.blocks, c.blocks):
        d = blk.shape[0]
        assert cblk == pytest.approx(np.trace(blk) / d * np.eye(d))


def test_commutator_vanishes_for_central_elements():
    rng = as_rng(8)
    x = random_element(MIXED, rng)
    z = MIXED.diagonal([1.0] * sum(MIXED.dims))
    assert commutator(z, x).sup_norm() < 1e-12


def test_unitaries_are_unitary():
    rng = as_rng(9)
    u = random_unitary(MIXED, rng)
    assert (u @ u.H).approx_equal(MIXED.identity(), tol=1e-10)
    assert (u.H @ u).approx_equal(MIXED.identity(), tol=1e-10)


def test_sup_norm_is_largest_singular_value():
    rng = as_rng(10)
    x = random_element(MIXED, rng)
    expected = max(np.linalg.svd(blk, compute_uv=False).max()
                   for blk in x.blocks)
    assert x.sup_norm() == pytest.approx(expected)


def test_embed_block_places_and_pads():
    blk = np.array([[0.0, 1.0], [2.0, 3.0]], dtype=complex)
    x = MIXED.embed_block(0, blk)
    assert np.allclose(x.blocks[0], blk)
    assert all(np.allclose(b, 0) for b in x.blocks[1:])
    with pytest.raises(StructureError):
        MIXED.embed_block(1, blk)  # wrong shape for block 1
