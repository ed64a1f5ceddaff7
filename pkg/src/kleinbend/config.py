"""Tolerance defaults and kernel-backend selection."""

from __future__ import annotations

import os
from dataclasses import dataclass, field, replace

#: Environment variable that forces the pure-numpy kernel path.
NO_NUMBA_ENV = "KLEINBEND_NO_NUMBA"

#: Environment variable overriding the CLI output directory.
OUT_DIR_ENV = "KLEINBEND_OUT"


def numba_enabled() -> bool:
    """True when the numba kernel path should be used."""
    if os.environ.get(NO_NUMBA_ENV, "").strip() not in ("", "0"):
        return False
    try:
        import numba  # noqa: F401
    except ImportError:
        return False
    return True


@dataclass(frozen=True)
class Tolerances:
    """Numeric tolerances; all overridable via scene files or CLI flags."""

    lorentz: float = 1e-9           # ||M^T J M - J||_inf after renormalization
    null: float = 1e-10             # <v, v> for point lifts
    norm: float = 1e-9              # |<s, s> - 1| for sphere vectors
    identity: float = 1e-10         # ||M - Id||_inf for the identity verdict
    eig: float = 1e-8               # eigenvalue cluster-mean modulus vs 1
    parabolic: float = 1e-7         # smallest certifiable translation length
    fixed_point_merge: float = 1e-6  # chordal distance merging fixed points
    cluster_radius: float = 1e-4    # eigenvalue clustering radius
    dedup_quantum: float = 1e-7     # matrix rounding quantum for ball dedup
    spatial_quantum: float = 1e-6   # chordal quantum for orbit dedup
    stabilizer: float = 1e-9        # sphere-vector residual for stabilizers
    tangency: float = 1e-8          # |1 - |<a,b>|| for tangency detection
    infinity: float = 1e-9          # scale-relative test for g(inf) = inf
    renorm_every: int = 16          # compositions between re-projections
    ball_cap: int = 5_000_000       # element cap for ball enumeration
    bisection: float = 1e-12        # scalar bisection target
    bisection_iters: int = 200

    def override(self, **kwargs) -> "Tolerances":
        unknown = set(kwargs) - {f for f in self.__dataclass_fields__}
        if unknown:
            raise KeyError(f"unknown tolerance keys: {sorted(unknown)}")
        return replace(self, **kwargs)


DEFAULT_TOL = Tolerances()


@dataclass
class RunParams:
    """Pipeline stage parameters with documented defaults."""

    word_length: int = 6
    t_grid: int = 256
    refine_factor: int = 4
    horosphere_size: float = 0.5
    n_max: int = 12
    elliptic_n: int = 3
    render_depth: int = 5
    resolution: int = 256
    threads: int = 1
    tol: Tolerances = field(default_factory=Tolerances)
