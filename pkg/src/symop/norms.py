"""Symmetric norms on tracial algebras.

A symmetric norm is induced by a gauge on decreasing step functions:
``norm(x) = gauge(mu(x))``.  Gauges are normalized at construction so
that the indicator of (0, 1] has gauge one; the two-atom gauge below is
the single exception, since its defining formula is already anchored to
a concrete two-atom algebra.

Available gauges:

* ``LpNorm(p)`` for p in [1, inf],
* ``KyFanNorm(k)``, the integral of mu over (0, k],
* ``LorentzNorm(profile)``, integral of mu against a decreasing weight,
* ``L1CapLinfNorm``, max of the L1 and sup norms,
* ``L1PlusLinfNorm``, integral of mu over (0, 1],
* ``TwoAtomNorm(c)``, sqrt(|a|^2 + c |b|^2) on the algebra with two
  one-dimensional blocks of weights 1 and 2.

The Koethe dual norm is evaluated either by closed form (Lp, two-atom)
or by the commutative reduction: maximize the pairing against decreasing
step functions of gauge at most one, a finite convex program over the
breakpoint grid.  Support functionals are built from exact gauge
subgradients transported onto the singular value decomposition, with
tied singular values sharing their subgradient weight.
"""

from __future__ import annotations

import math
import warnings

import numpy as np

from .algebra import AlgebraElement, TracialAlgebra, trace
from .errors import DomainError, StructureError
from .singular import StepFunction, mu, mu_with_assignment


class SymmetricNorm:
    """Base class: a normalized gauge on decreasing step functions."""

    def __init__(self):
        raw = self._raw_gauge(StepFunction.indicator(1.0))
        if not raw > 0:
            raise DomainError("gauge must be positive on the unit indicator")
        self._scale = 1.0 / raw

    # subclasses implement the un-normalized gauge
    def _raw_gauge(self, f: StepFunction) -> float:
        raise NotImplementedError

    def gauge(self, f: StepFunction) -> float:
        return self._scale * self._raw_gauge(f)

    def validate_algebra(self, algebra: TracialAlgebra) -> None:
        """Hook for gauges tied to a specific algebra shape."""

    # -- dual program hooks ----------------------------------------------------

    def extra_breakpoints(self) -> tuple[float, ...]:
        """Grid points the gauge formula depends on, besides the mu grid."""
        return ()

    def program_constraints(self, g, lengths: np.ndarray) -> list:
        """cvxpy constraints encoding gauge(g) <= 1 for decreasing g >= 0."""
        raise NotImplementedError

    def dual_gauge_closed(self, f: StepFunction) -> float | None:
        """Closed-form dual gauge where available, else None."""
        return None

    # -- subgradient -----------------------------------------------------------

    def subgradient_values(self, f: StepFunction) -> np.ndarray:
        """Per-piece values h with  integral(h * f) = gauge(f)  and dual
        gauge of h equal to one.  ``f`` must be nonzero."""
        raise NotImplementedError

    def describe(self) -> str:
        raise NotImplementedError

    def __repr__(self) -> str:
        return f"<{type(self).__name__} {self.describe()}>"


class LpNorm(SymmetricNorm):
    """Weighted p-integral gauge; p = inf gives the sup of the step values."""

    def __init__(self, p: float):
        p = float(p)
        if not (p >= 1.0):
            raise DomainError(f"p must be in [1, inf], got {p}")
        self.p = p
        super().__init__()

    def _raw_gauge(self, f: StepFunction) -> float:
        if not f.values:
            return 0.0
        v = np.asarray(f.values)
        l = np.asarray(f.lengths)
        if math.isinf(self.p):
            return float(v[0])
        return float(np.sum(l * v ** self.p) ** (1.0 / self.p))

    def extra_breakpoints(self):
        return ()

    def program_constraints(self, g, lengths):
        import cvxpy as cp
        bound = 1.0 / self._scale
        if math.isinf(self.p):
            return [g[0] <= bound]
        if self.p == 1.0:
            return [lengths @ g <= bound]
        return [cp.pnorm(cp.multiply(lengths ** (1.0 / self.p), g), self.p) <= bound]

    def dual_gauge_closed(self, f: StepFunction) -> float:
        if not f.values:
            return 0.0
        v = np.asarray(f.values)
        l = np.asarray(f.lengths)
        if math.isinf(self.p):
            q_val = float(np.sum(l * v))
        elif self.p == 1.0:
            q_val = float(v[0])
        else:
            q = self.p / (self.p - 1.0)
            q_val = float(np.sum(l * v ** q) ** (1.0 / q))
        return q_val / self._scale

    def subgradient_values(self, f: StepFunction) -> np.ndarray:
        v = np.asarray(f.values)
        if v.size == 0:
            raise DomainError("subgradient of the zero function")
        if math.isinf(self.p):
            h = np.zeros_like(v)
            h[0] = 1.0 / f.lengths[0]
        elif self.p == 1.0:
            h = np.ones_like(v)
        else:
            h = (v / self._raw_gauge(f)) ** (self.p - 1.0)
        return self._scale * h

    def describe(self) -> str:
        return f"lp(p={self.p:g})"


class KyFanNorm(SymmetricNorm):
    """Integral of the decreasing rearrangement over (0, k]."""

    def __init__(self, k: float):
        k = float(k)
        if not k > 0:
            raise DomainError(f"Ky Fan parameter must be positive, got {k}")
        self.k = k
        super().__init__()

    def _raw_gauge(self, f: StepFunction) -> float:
        return f.integral(self.k)

    def extra_breakpoints(self):
        return (self.k,)

    def program_constraints(self, g, lengths):
        coeffs = _overlap_coefficients(lengths, self.k)
        return [coeffs @ g <= 1.0 / self._scale]

    def subgradient_values(self, f: StepFunction) -> np.ndarray:
        lengths = np.asarray(f.lengths)
        if lengths.size == 0:
            raise DomainError("subgradient of the zero function")
        return self._scale * _overlap_coefficients(lengths, self.k) / lengths

    def describe(self) -> str:
        return f"ky_fan(k={self.k:g})"


class LorentzNorm(SymmetricNorm):
    """Integral of mu against a decreasing positive weight profile.

    The profile is itself a decreasing step function; beyond its last
    breakpoint it continues at its final value, which keeps the gauge a
    norm on algebras of arbitrary total trace.
    """

    def __init__(self, profile_values, profile_lengths):
        values = tuple(float(v) for v in profile_values)
        lengths = tuple(float(l) for l in profile_lengths)
        if not values or len(values) != len(lengths):
            raise DomainError("profile needs matching nonempty values and lengths")
        if any(l <= 0 for l in lengths):
            raise DomainError("profile lengths must be positive")
        if any(v <= 0 for v in values):
            raise DomainError("profile values must be positive")
        if any(values[i] < values[i + 1] for i in range(len(values) - 1)):
            raise DomainError("profile values must be decreasing")
        self.profile_values = values
        self.profile_lengths = lengths
        super().__init__()

    def _profile_integral(self, a: float, b: float) -> float:
        """Integral of the (extended) profile over (a, b]."""
        out, acc = 0.0, 0.0
        for v, l in zip(self.profile_values, self.profile_lengths):
            lo, hi = max(a, acc), min(b, acc + l)
            if hi > lo:
                out += v * (hi - lo)
            acc += l
        if b > acc:
            out += self.profile_values[-1] * (b - max(a, acc))
        return out

    def _raw_gauge(self, f: StepFunction) -> float:
        out, acc = 0.0, 0.0
        for v, l in zip(f.values, f.lengths):
            out += v * self._profile_integral(acc, acc + l)
            acc += l
        return out

    def extra_breakpoints(self):
        return tuple(np.cumsum(self.profile_lengths))

    def program_constraints(self, g, lengths):
        coeffs = self._piece_weights(lengths)
        return [coeffs @ g <= 1.0 / self._scale]

    def _piece_weights(self, lengths: np.ndarray) -> np.ndarray:
        ends = np.cumsum(lengths)
        starts = ends - lengths
        return np.array([self._profile_integral(a, b)
                         for a, b in zip(starts, ends)])

    def subgradient_values(self, f: StepFunction) -> np.ndarray:
        lengths = np.asarray(f.lengths)
        if lengths.size == 0:
            raise DomainError("subgradient of the zero function")
        return self._scale * self._piece_weights(lengths) / lengths

    def describe(self) -> str:
        vals = ",".join(f"{v:g}" for v in self.profile_values)
        lens = ",".join(f"{l:g}" for l in self.profile_lengths)
        return f"lorentz(values=[{vals}], lengths=[{lens}])"


class L1CapLinfNorm(SymmetricNorm):
    """max(L1, sup); the classical intersection norm."""

    def _raw_gauge(self, f: StepFunction) -> float:
        if not f.values:
            return 0.0
        return max(f.integral(), f.values[0])

    def program_constraints(self, g, lengths):
        return [lengths @ g <= 1.0 / self._scale, g[0] <= 1.0 / self._scale]

    def subgradient_values(self, f: StepFunction) -> np.ndarray:
        v = np.asarray(f.values)
        if v.size == 0:
            raise DomainError("subgradient of the zero function")
        h = np.zeros_like(v)
        if f.integral() >= v[0] * (1.0 - 1e-12):
            h[:] = 1.0
        else:
            h[0] = 1.0 / f.lengths[0]
        return self._scale * h

    def describe(self) -> str:
        return "l1_cap_linf"


class L1PlusLinfNorm(SymmetricNorm):
    """Integral of the decreasing rearrangement over (0, 1]."""

    def _raw_gauge(self, f: StepFunction) -> float:
        return f.integral(1.0)

    def extra_breakpoints(self):
        return (1.0,)

    def program_constraints(self, g, lengths):
        coeffs = _overlap_coefficients(lengths, 1.0)
        return [coeffs @ g <= 1.0 / self._scale]

    def subgradient_values(self, f: StepFunction) -> np.ndarray:
        lengths = np.asarray(f.lengths)
        if lengths.size == 0:
            raise DomainError("subgradient of the zero function")
        return self._scale * _overlap_coefficients(lengths, 1.0) / lengths

    def describe(self) -> str:
        return "l1_plus_linf"


_TWO_ATOM_BLOCKS = ((1, 1.0), (1, 2.0))


class TwoAtomNorm(SymmetricNorm):
    """sqrt(|a|^2 + c |b|^2) on two one-dimensional blocks of weights 1, 2.

    This is an L2 norm over a measure space whose two atoms have measures
    1 and sqrt(c); it is symmetric (monotone under the singular value
    ordering) yet not fully symmetric, which is what makes the space a
    source of counterexamples.  Exempt from the unit-indicator
    normalization since the formula is pinned to these atoms.
    """

    def __init__(self, c: float = 3.0):
        c = float(c)
        if not c > 0:
            raise DomainError(f"two-atom coefficient must be positive, got {c}")
        self.c = c
        self._scale = 1.0

    def validate_algebra(self, algebra: TracialAlgebra) -> None:
        if algebra.blocks != _TWO_ATOM_BLOCKS:
            raise DomainError(
                "two-atom norm is defined on blocks ((1, 1.0), (1, 2.0)), "
                f"got {algebra.blocks}"
            )

    def atom_values(self, f: StepFunction) -> tuple[float, float]:
        """Recover (|a|, |b|) from a singular value function of the
        two-atom algebra, using the piece lengths 1 and 2."""
        pieces = list(zip(f.values, f.lengths))
        close = lambda l, target: abs(l - target) <= 1e-9
        if not pieces:
            return 0.0, 0.0
        if len(pieces) == 1:
            v, l = pieces[0]
            if close(l, 3.0):
                return v, v
            if close(l, 1.0):
                return v, 0.0
            if close(l, 2.0):
                return 0.0, v
        elif len(pieces) == 2:
            (v1, l1), (v2, l2) = pieces
            if close(l1, 1.0) and close(l2, 2.0):
                return v1, v2
            if close(l1, 2.0) and close(l2, 1.0):
                return v2, v1
        raise DomainError("step function does not match the two-atom layout")

    def _raw_gauge(self, f: StepFunction) -> float:
        a, b = self.atom_values(f)
        return math.sqrt(a * a + self.c * b * b)

    def dual_gauge_closed(self, f: StepFunction) -> float:
        a, b = self.atom_values(f)
        return math.sqrt(a * a + (4.0 / self.c) * b * b)

    def describe(self) -> str:
        return f"custom_two_atom(c={self.c:g})"


def _overlap_coefficients(lengths: np.ndarray, cut: float) -> np.ndarray:
    """Length of each piece's overlap with (0, cut]."""
    lengths = np.asarray(lengths, dtype=float)
    ends = np.cumsum(lengths)
    starts = ends - lengths
    return np.clip(np.minimum(ends, cut) - starts, 0.0, None)


# -- public operations ---------------------------------------------------------


def norm(x: AlgebraElement, n: SymmetricNorm) -> float:
    """The symmetric norm of ``x``: the gauge of its singular value function."""
    n.validate_algebra(x.algebra)
    return n.gauge(mu(x))


def l2_norm(x: AlgebraElement) -> float:
    """Trace L2 norm sqrt(tau(x* x))."""
    return math.sqrt(sum(w * float(np.sum(np.abs(b) ** 2))
                         for b, (_, w) in zip(x.blocks, x.algebra.blocks)))


def dual_norm(y: AlgebraElement, n: SymmetricNorm, method: str = "auto") -> float:
    """Koethe dual norm of ``y``: sup of |tau(x y)| over the unit ball of n.

    ``method`` selects the evaluation route: "closed" uses the
    closed-form conjugate (Lp and the two-atom gauge), "program" solves
    the commutative reduction as a convex program over decreasing step
    functions on the breakpoint grid, and "auto" prefers the closed form
    when one exists.
    """
    n.validate_algebra(y.algebra)
    f = mu(y)
    if not f.values:
        return 0.0
    closed = n.dual_gauge_closed(f)
    if method == "closed":
        if closed is None:
            raise DomainError(f"no closed-form dual for {n.describe()}")
        return closed
    if method == "auto" and closed is not None:
        return closed
    if method not in ("auto", "program"):
        raise DomainError(f"unknown dual_norm method {method!r}")
    if isinstance(n, TwoAtomNorm):
        # The two-atom gauge is anchored to its algebra rather than to a
        # function space; its dual is the closed form above.
        return n.dual_gauge_closed(f)
    return _dual_norm_program(f, n)


def _dual_norm_program(f: StepFunction, n: SymmetricNorm) -> float:
    """Maximize integral(g * f) over decreasing g >= 0 with gauge(g) <= 1."""
    import cvxpy as cp

    cuts = set(f.breakpoints)
    total = f.total_length
    for b in n.extra_breakpoints():
        if 0.0 < b < total:
            cuts.add(float(b))
    grid = np.array(sorted(cuts))
    lengths = np.diff(np.concatenate(([0.0], grid)))
    mids = grid - 0.5 * lengths
    fvals = np.array([f(t) for t in mids])

    g = cp.Variable(lengths.size, nonneg=True)
    constraints = [g[:-1] >= g[1:]] if lengths.size > 1 else []
    constraints += n.program_constraints(g, lengths)
    problem = cp.Problem(cp.Maximize((fvals * lengths) @ g), constraints)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        value = problem.solve(
            solver=cp.CLARABEL,
            tol_gap_abs=1e-12, tol_gap_rel=1e-12, tol_feas=1e-12,
            max_iter=500,
        )
    if problem.status not in ("optimal", "optimal_inaccurate"):
        raise DomainError(f"dual norm program ended with status {problem.status}")
    return float(value)


def support_functional(x: AlgebraElement, n: SymmetricNorm) -> AlgebraElement:
    """A norming functional for ``x``, represented as an algebra element y:

        tau(x y) = norm(x)^2      and      dual_norm(y) = norm(x).

    Built from an exact subgradient of the gauge at mu(x), transported
    onto the singular vectors of ``x``; tied singular values share their
    subgradient weight, so the construction is invariant under the
    symmetries that permute them.
    """
    n.validate_algebra(x.algebra)
    if all(np.max(np.abs(b)) == 0.0 for b in x.blocks):
        raise DomainError("support functional of the zero element")

    if isinstance(n, TwoAtomNorm):
        a = x.blocks[0][0, 0]
        b = x.blocks[1][0, 0]
        return x.algebra.element([[[np.conj(a)]], [[(n.c / 2.0) * np.conj(b)]]])

    sf, assignment = mu_with_assignment(x)
    h = n.subgradient_values(sf)
    nx = n.gauge(sf)
    out = []
    for b, assign in zip(x.blocks, assignment):
        U, s, Vh = np.linalg.svd(b)
        hvals = np.array([h[k] if k >= 0 else 0.0 for k in assign])
        out.append(Vh.conj().T @ np.diag(hvals) @ U.conj().T)
    return nx * x.algebra.element(out)


def sip(x: AlgebraElement, y: AlgebraElement, n: SymmetricNorm) -> complex:
    """Semi-inner product compatible with ``n``: tau(x * f_y) with f_y a
    support functional of y.  Linear in x, and <x, x> = norm(x)^2."""
    return trace(x @ support_functional(y, n))


def proportional_to_l2(n: SymmetricNorm, algebra: TracialAlgebra,
                       samples: int = 64, seed: int = 0,
                       rtol: float = 1e-8) -> bool:
    """Whether ``n`` is a constant multiple of the trace L2 norm on this
    algebra, decided by fitting the constant on random elements."""
    n.validate_algebra(algebra)
    rng = np.random.default_rng(seed)
    ratios = []
    for _ in range(samples):
        x = algebra.element([
            rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
            for d in algebra.dims
        ])
        ratios.append(norm(x, n) / l2_norm(x))
    lam = float(np.mean(ratios))
    return bool(np.max(np.abs(np.asarray(ratios) - lam)) <= rtol * lam)


def norm_from_config(cfg: dict) -> SymmetricNorm:
    """Build a gauge from its configuration dictionary (see the README)."""
    if not isinstance(cfg, dict) or "kind" not in cfg:
        raise StructureError("norm config must be a dict with a 'kind' key")
    kind = cfg["kind"]
    if kind == "lp":
        p = cfg.get("p", 2)
        return LpNorm(float("inf") if p in ("inf", "infinity") else float(p))
    if kind == "ky_fan":
        return KyFanNorm(cfg["k"])
    if kind == "lorentz":
        return LorentzNorm(cfg["values"], cfg["lengths"])
    if kind == "l1_cap_linf":
        return L1CapLinfNorm()
    if kind == "l1_plus_linf":
        return L1PlusLinfNorm()
    if kind == "custom_two_atom":
        return TwoAtomNorm(cfg.get("c", 3.0))
    raise StructureError(f"unknown norm kind {kind!r}")
