"""Seeded random generators for algebra elements.

All sampling in the package funnels through these helpers so that every
oracle is reproducible from an explicit seed.
"""

from __future__ import annotations

import numpy as np

from .algebra import AlgebraElement, TracialAlgebra
from .errors import DomainError


def as_rng(seed_or_rng) -> np.random.Generator:
    if isinstance(seed_or_rng, np.random.Generator):
        return seed_or_rng
    return np.random.default_rng(seed_or_rng)


def random_element(algebra: TracialAlgebra, rng) -> AlgebraElement:
    """Standard complex Gaussian entries in every block."""
    rng = as_rng(rng)
    return algebra.element([
        rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
        for d in algebra.dims
    ])


def random_self_adjoint(algebra: TracialAlgebra, rng) -> AlgebraElement:
    rng = as_rng(rng)
    x = random_element(algebra, rng)
    return 0.5 * (x + x.H)


def random_unitary(algebra: TracialAlgebra, rng) -> AlgebraElement:
    """Haar-ish unitary per block via QR with phase normalization."""
    rng = as_rng(rng)
    out = []
    for d in algebra.dims:
        z = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
        q, r = np.linalg.qr(z)
        q = q * (np.diagonal(r) / np.abs(np.diagonal(r)))
        out.append(q)
    return algebra.element(out)


def random_unit(algebra: TracialAlgebra, n, rng) -> AlgebraElement:
    """Random element scaled to norm one under the gauge ``n``."""
    from .norms import norm

    rng = as_rng(rng)
    for _ in range(16):
        x = random_element(algebra, rng)
        nx = norm(x, n)
        if nx > 1e-8:
            return x / nx
    raise DomainError("could not draw a nonzero element")


def random_diagonal_projection(algebra: TracialAlgebra, rng) -> AlgebraElement:
    """Random 0/1 diagonal pattern, never the zero projection."""
    rng = as_rng(rng)
    total = sum(algebra.dims)
    while True:
        bits = rng.integers(0, 2, size=total)
        if bits.any():
            return algebra.diagonal(bits.astype(complex))
