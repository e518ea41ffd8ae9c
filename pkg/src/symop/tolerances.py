"""Tolerance ladder used throughout the package.

Distinct numerical regimes get distinct tolerances:

* ``structural``: identities that hold to rounding error (1e-12),
* ``check``: self-adjointness / projection / commutation input checks (1e-10),
* ``fitted``: residuals of least-squares fits (1e-9),
* ``oracle``: sampled oracle defects such as exponential isometry defects (1e-8),
* ``reject``: level at which an oracle defect is taken as a firm rejection (1e-3).

All checks use these relative to the size of the data involved unless
noted otherwise.  Reports embed the ladder actually used so that runs
are auditable.
"""

from __future__ import annotations

from dataclasses import dataclass, asdict


@dataclass(frozen=True)
class Tolerances:
    structural: float = 1e-12
    check: float = 1e-10
    fitted: float = 1e-9
    oracle: float = 1e-8
    reject: float = 1e-3

    def to_dict(self) -> dict:
        return asdict(self)


DEFAULT_TOLERANCES = Tolerances()
