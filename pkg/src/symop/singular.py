"""Generalized singular value functions.

For an element ``x`` of a tracial algebra the singular value function

    mu(t; x) = inf{ s >= 0 : tau(e_{|x|}(s, inf)) <= t },   t > 0,

is the decreasing rearrangement of the singular values of all blocks,
where a singular value of block ``i`` occupies an interval of length
``w_i`` (the block weight).  These functions are the decreasing step
functions handled by :class:`StepFunction`.

Canonical form merges adjacent steps whose values agree to 1e-12 and
drops zero steps, so that elements with equal singular value data yield
step functions that compare equal piece by piece.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebra import AlgebraElement
from .errors import DomainError, StructureError

_MERGE_TOL = 1e-12


@dataclass(frozen=True)
class StepFunction:
    """A nonnegative decreasing step function on (0, total_length].

    ``values`` are strictly decreasing and positive after canonical
    merging; each value holds on an interval of the matching length.
    Beyond the last breakpoint the function is zero.
    """

    values: tuple[float, ...]
    lengths: tuple[float, ...]

    def __post_init__(self):
        vals = [float(v) for v in self.values]
        lens = [float(l) for l in self.lengths]
        if len(vals) != len(lens):
            raise StructureError("values and lengths differ in count")
        if any(l <= 0 for l in lens):
            raise StructureError("step lengths must be positive")
        if any(v < 0 for v in vals):
            raise DomainError("step values must be nonnegative")
        merged_v, merged_l = [], []
        for v, l in zip(vals, lens):
            if merged_v and v > merged_v[-1] + _MERGE_TOL * max(1.0, merged_v[-1]):
                raise DomainError("step values must be decreasing")
            if merged_v and abs(v - merged_v[-1]) <= _MERGE_TOL * max(1.0, merged_v[-1]):
                w = merged_l[-1] + l
                merged_v[-1] = (merged_v[-1] * merged_l[-1] + v * l) / w
                merged_l[-1] = w
            else:
                merged_v.append(v)
                merged_l.append(l)
        keep = [(v, l) for v, l in zip(merged_v, merged_l)
                if v > _MERGE_TOL]
        object.__setattr__(self, "values", tuple(v for v, _ in keep))
        object.__setattr__(self, "lengths", tuple(l for _, l in keep))

    @classmethod
    def indicator(cls, length: float, height: float = 1.0) -> "StepFunction":
        """height * chi_(0, length]."""
        return cls((height,), (length,))

    @classmethod
    def zero(cls) -> "StepFunction":
        return cls((), ())

    @property
    def num_pieces(self) -> int:
        return len(self.values)

    @property
    def total_length(self) -> float:
        return float(sum(self.lengths))

    @property
    def breakpoints(self) -> tuple[float, ...]:
        """Right endpoints of the pieces, cumulative lengths."""
        return tuple(np.cumsum(self.lengths)) if self.lengths else ()

    def __call__(self, t: float) -> float:
        """Evaluate at t >= 0 (right-continuous, zero beyond the support)."""
        if t < 0:
            raise DomainError("step functions live on (0, inf)")
        acc = 0.0
        for v, l in zip(self.values, self.lengths):
            acc += l
            if t < acc:
                return v
        return 0.0

    def integral(self, upto: float | None = None) -> float:
        """Integral over (0, upto]; full integral when upto is None."""
        if upto is None:
            return float(np.dot(self.values, self.lengths))
        if upto < 0:
            raise DomainError("integration bound must be nonnegative")
        acc, out = 0.0, 0.0
        for v, l in zip(self.values, self.lengths):
            if upto <= acc:
                break
            out += v * min(l, upto - acc)
            acc += l
        return out

    def scale(self, factor: float) -> "StepFunction":
        if factor < 0:
            raise DomainError("scale factor must be nonnegative")
        return StepFunction(tuple(factor * v for v in self.values), self.lengths)

    def approx_equal(self, other: "StepFunction", tol: float = 1e-10) -> bool:
        if self.num_pieces != other.num_pieces:
            return False
        scale = max([1.0, *self.values, *other.values])
        return all(
            abs(v - w) <= tol * scale and abs(l - m) <= tol * max(1.0, l)
            for v, w, l, m in zip(self.values, other.values,
                                  self.lengths, other.lengths)
        )

    def __repr__(self) -> str:
        pieces = ", ".join(f"{v:.6g}x{l:g}" for v, l in zip(self.values, self.lengths))
        return f"StepFunction[{pieces}]"


def product_integral(f: StepFunction, g: StepFunction) -> float:
    """Integral of f * g over (0, inf), on the common grid refinement."""
    out, acc = 0.0, 0.0
    cuts = sorted(set(f.breakpoints) | set(g.breakpoints))
    for c in cuts:
        mid = 0.5 * (acc + c)
        out += f(mid) * g(mid) * (c - acc)
        acc = c
    return out


def _singular_data(x: AlgebraElement) -> list[tuple[float, float, int, int]]:
    """All singular values as (value, length, block, index), sorted decreasing."""
    data = []
    for i, (b, (_, w)) in enumerate(zip(x.blocks, x.algebra.blocks)):
        s = np.linalg.svd(b, compute_uv=False)
        for j, v in enumerate(s):
            data.append((float(v), float(w), i, j))
    data.sort(key=lambda item: (-item[0], item[2], item[3]))
    return data


def mu(x: AlgebraElement) -> StepFunction:
    """Singular value function of ``x`` as a canonical step function."""
    data = _singular_data(x)
    return StepFunction(tuple(v for v, *_ in data), tuple(l for _, l, *_ in data))


def mu_with_assignment(x: AlgebraElement):
    """``mu(x)`` plus, per block, the merged piece index of each singular value.

    The assignment lets gauge subgradients be transported back onto the
    spectral data of ``x``: singular values that merged into one piece
    (ties) share a piece index and therefore receive equal subgradient
    weight.
    """
    data = _singular_data(x)
    sf = StepFunction(tuple(v for v, *_ in data), tuple(l for _, l, *_ in data))
    assignment = [np.full(d, -1, dtype=int) for d in x.algebra.dims]
    acc = 0.0
    k = 0
    ends = sf.breakpoints
    for v, l, i, j in data:
        while k < len(ends) and acc >= ends[k] - 1e-9 * max(1.0, ends[k]):
            k += 1
        piece = min(k, sf.num_pieces - 1) if sf.num_pieces else -1
        if v <= _MERGE_TOL:
            piece = -1  # dropped zero piece
        assignment[i][j] = piece
        acc += l
    return sf, assignment


def distribution(x: AlgebraElement, t: float, tol: float = 1e-10) -> float:
    """Distribution function d_x(t) = tau(e_x(t, inf)) of a self-adjoint x.

    Right-continuous and decreasing in t; counts eigenvalues above t
    with multiplicity weighted by the block weights.
    """
    if not x.is_self_adjoint(tol):
        raise DomainError("distribution needs a self-adjoint element")
    out = 0.0
    for b, (_, w) in zip(x.blocks, x.algebra.blocks):
        vals = np.linalg.eigvalsh(0.5 * (b + b.conj().T))
        out += w * int(np.sum(vals > t))
    return float(out)


def mu_from_distribution(x: AlgebraElement, t: float) -> float:
    """mu(t; x) recovered as inf{ s >= 0 : d_|x|(s) <= t }.

    Exists for cross-checking :func:`mu`; scans the singular values
    directly rather than reusing the step function.
    """
    if t < 0:
        raise DomainError("t must be nonnegative")
    levels = sorted({0.0} | {v for v, *_ in _singular_data(x)})
    absx = _abs_element(x)
    for s in levels:
        # |x| is diagonalized independently of the svd that produced the
        # levels, so probe a hair above s to keep ulp noise from
        # miscounting values equal to the level itself
        probe = s + 1e-12 * max(1.0, s)
        if distribution(absx, probe) <= t:
            return s
    return levels[-1]


def _abs_element(x: AlgebraElement) -> AlgebraElement:
    out = []
    for b in x.blocks:
        U, s, Vh = np.linalg.svd(b)
        V = Vh.conj().T
        m = (V * s) @ Vh
        out.append(0.5 * (m + m.conj().T))
    return x.algebra.element(out)


def submajorizes(x, y, tol: float = 1e-10) -> bool:
    """True when y is submajorized by x:  for all t,
    integral_0^t mu(y) <= integral_0^t mu(x) (up to ``tol`` slack).

    Arguments may be algebra elements or step functions.
    """
    fx = x if isinstance(x, StepFunction) else mu(x)
    fy = y if isinstance(y, StepFunction) else mu(y)
    cuts = sorted(set(fx.breakpoints) | set(fy.breakpoints))
    scale = max([1.0, fx.integral(), fy.integral()])
    return all(fy.integral(c) <= fx.integral(c) + tol * scale for c in cuts)
