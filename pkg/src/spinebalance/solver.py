"""Balancing flexion: root of the signed distance in R with strides held fixed."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .balance import ComPosition, balance_state
from .errors import DomainError, NoRootError
from .gait import GaitParams, stride_at
from .kinematics import R_MAX, R_MIN, RobotGeometry, StrideState

DEFAULT_TOLERANCE = 1e-9
DEFAULT_MAX_ITER = 200


class MonotonicityWarning(UserWarning):
    """The sampled distance profile is not strictly monotone in R."""


@dataclass(frozen=True)
class BalanceProblem:
    """Find R in ``search_range`` with ``dis(R) = 0`` for the LF+RH diagonal."""

    geom: RobotGeometry
    stride_at_tb: StrideState
    com: ComPosition = field(default_factory=ComPosition)
    search_range: tuple = (R_MIN, R_MAX)
    tolerance: float = DEFAULT_TOLERANCE

    def __post_init__(self):
        lo, hi = (float(x) for x in self.search_range)
        if not (math.isfinite(lo) and math.isfinite(hi)) or lo >= hi:
            raise DomainError(f"search range must be an increasing finite pair, got {self.search_range!r}")
        if lo < R_MIN or hi > R_MAX:
            raise DomainError("search range must lie within [-pi/2, pi/2]")
        if not (math.isfinite(self.tolerance) and self.tolerance > 0):
            raise DomainError("tolerance must be positive")
        object.__setattr__(self, "search_range", (lo, hi))

    @classmethod
    def at_balance_instant(cls, geom, gait: GaitParams, com=None, n=0, **kwargs) -> "BalanceProblem":
        """Problem with strides frozen at ``t_b = (2n+1) T / 4``."""
        t_b = (2 * n + 1) * gait.period / 4.0
        return cls(geom, stride_at(gait, t_b), com if com is not None else ComPosition(), **kwargs)

    def distance(self, R):
        """Signed distance as a function of flexion; vectorised over ``R``."""
        st = balance_state(self.geom, self.stride_at_tb.fore, self.stride_at_tb.hind, R, self.com, 0)
        return st.dis if np.ndim(st.dis) else float(st.dis)


@dataclass(frozen=True)
class MonotonicityReport:
    n_samples: int
    strictly_monotone: bool
    derivative_sign: int  # +1, -1, or 0 when mixed or flat
    sign_changes: int
    flat: bool  # every sample equal within tolerance

    def to_dict(self):
        return {
            "n_samples": self.n_samples,
            "strictly_monotone": self.strictly_monotone,
            "derivative_sign": self.derivative_sign,
            "sign_changes": self.sign_changes,
            "flat": self.flat,
        }


@dataclass(frozen=True)
class SolveResult:
    root: float
    residual: float
    iterations: int
    bracket: tuple
    monotonicity: MonotonicityReport | None = None
    warning: str | None = None

    @property
    def R_prime(self) -> float:
        """Unsigned balancing flexion fed to the controller."""
        return abs(self.root)

    def to_dict(self):
        return {
            "R_prime": self.R_prime,
            "root": self.root,
            "residual": self.residual,
            "iterations": self.iterations,
            "bracket": list(self.bracket),
            "monotone": None if self.monotonicity is None else self.monotonicity.strictly_monotone,
            "monotonicity": None if self.monotonicity is None else self.monotonicity.to_dict(),
            "warning": self.warning,
        }


def count_sign_changes(values) -> int:
    """Number of strict sign changes in a sequence; exact zeros are skipped."""
    s = np.sign(np.asarray(values, dtype=float))
    s = s[s != 0]
    return int(np.count_nonzero(s[1:] != s[:-1]))


def monotonicity_probe(problem: BalanceProblem, n_samples: int = 1001) -> MonotonicityReport:
    """Sample the distance over the search range and classify its shape."""
    n = int(n_samples)
    if n < 3:
        raise DomainError("monotonicity probe needs at least 3 samples")
    lo, hi = problem.search_range
    d = problem.distance(np.linspace(lo, hi, n))
    diff = np.diff(d)
    flat = bool(np.all(np.abs(d - d[0]) < problem.tolerance))
    if np.all(diff > 0):
        sign, mono = 1, True
    elif np.all(diff < 0):
        sign, mono = -1, True
    else:
        sign, mono = 0, False
    return MonotonicityReport(n, mono, sign, count_sign_changes(d), flat)


def solve_balance_flexion(
    problem: BalanceProblem,
    max_iter: int = DEFAULT_MAX_ITER,
    probe_samples: int | None = 1001,
) -> SolveResult:
    """Bracketed bisection for the flexion that zeroes the distance.

    Stops once the midpoint residual is below the tolerance and the bracket
    has shrunk to 1e-12 rad, on an exact zero, or when the midpoint can no
    longer move. Raises :class:`NoRootError` if the endpoints share a sign.
    """
    f = problem.distance
    lo, hi = problem.search_range
    f_lo, f_hi = f(lo), f(hi)
    report = monotonicity_probe(problem, probe_samples) if probe_samples else None
    note = None
    if report is not None and not report.strictly_monotone:
        note = "distance is not strictly monotone over the search range; the root may not be unique"
        warnings.warn(note, MonotonicityWarning, stacklevel=2)

    if f_lo == 0.0:
        return SolveResult(lo, 0.0, 0, (lo, hi), report, note)
    if f_hi == 0.0:
        return SolveResult(hi, 0.0, 0, (lo, hi), report, note)
    if np.sign(f_lo) == np.sign(f_hi):
        raise NoRootError(
            f"no sign change of the balance distance on [{lo:.6g}, {hi:.6g}]: "
            f"dis(lo)={f_lo:.6g} m, dis(hi)={f_hi:.6g} m",
            lo,
            hi,
            f_lo,
            f_hi,
        )

    a, b, fa = lo, hi, f_lo
    mid, fm = a, fa
    it = 0
    for it in range(1, max_iter + 1):
        mid = a + 0.5 * (b - a)
        fm = f(mid)
        if fm == 0.0 or mid in (a, b):
            break
        if abs(fm) < problem.tolerance and (b - a) < 1e-12:
            break
        if np.sign(fm) == np.sign(fa):
            a, fa = mid, fm
        else:
            b = mid
    # re-evaluate through the full pipeline rather than reuse the cached value
    residual = float(balance_state(problem.geom, problem.stride_at_tb.fore, problem.stride_at_tb.hind, mid, problem.com).dis)
    return SolveResult(float(mid), residual, it, (lo, hi), report, note)
