"""Foothold kinematics of a trotting quadruped with a laterally flexing spine.

Frame: origin at the centre of the shoulders, x along the body (forward
positive), y parallel to the shoulder line. The stance diagonal LF+RH puts
the fore foot at y = -l_FH and the hind foot near y = +l_HH.

The spine is a circular arc of constant length ``l_S`` whose central angle
is twice the flexion angle, ``theta_s = 2 R``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, FlexionRangeError

#: |theta_s| below this uses the Taylor branch for the arc terms.
SERIES_THRESHOLD = 1e-4

R_MIN = -math.pi / 2
R_MAX = math.pi / 2


@dataclass(frozen=True)
class RobotGeometry:
    """Constant link lengths in metres.

    The defaults are small-quadruped placeholders, not measured values. They
    keep the balance distance monotone in the flexion over the whole range,
    which with symmetric hips of half-width ``w`` and zero strides needs
    roughly ``l_S > l_B + pi * w``.
    """

    spine_length: float = 0.17
    body_length: float = 0.04
    hind_hip_halfwidth: float = 0.035
    fore_hip_halfwidth: float = 0.035

    def __post_init__(self):
        for name in ("spine_length", "body_length", "hind_hip_halfwidth", "fore_hip_halfwidth"):
            value = getattr(self, name)
            if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
                raise DomainError(f"{name} must be a finite positive length, got {value!r}")

    @property
    def trunk_length(self) -> float:
        """Shoulder-to-hip distance at zero flexion (l_B + l_S)."""
        return self.body_length + self.spine_length

    def to_dict(self) -> dict:
        return {
            "spine_length": self.spine_length,
            "body_length": self.body_length,
            "hind_hip_halfwidth": self.hind_hip_halfwidth,
            "fore_hip_halfwidth": self.fore_hip_halfwidth,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "RobotGeometry":
        return cls(**{k: float(v) for k, v in data.items()})


DEFAULT_GEOMETRY = RobotGeometry()


@dataclass(frozen=True)
class StrideState:
    """Signed stride lengths of the stance fore and hind feet at time ``t``."""

    fore: float
    hind: float
    t: float = 0.0


@dataclass(frozen=True)
class FlexionState:
    """Spinal flexion angle; the arc's central angle is derived, never set."""

    angle: float

    def __post_init__(self):
        check_flexion(self.angle)

    @property
    def central_angle(self) -> float:
        return 2.0 * self.angle


@dataclass(frozen=True)
class Footholds:
    fore: tuple
    hind: tuple


def check_flexion(R):
    """Validate flexion angle(s); returns the input as float or ndarray."""
    arr = np.asarray(R, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise DomainError("flexion angle must be finite")
    if np.any(arr < R_MIN) or np.any(arr > R_MAX):
        raise FlexionRangeError(f"flexion angle must lie in [-pi/2, pi/2], got {R!r}")
    return float(arr) if arr.ndim == 0 else arr


def _check_finite(name, value):
    arr = np.asarray(value, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"{name} must be finite")
    return float(arr) if arr.ndim == 0 else arr


def arc_terms(theta, method="auto"):
    """Return ``(sin(theta)/theta, (1 - cos(theta))/theta)``.

    ``method`` is ``"auto"`` (series below :data:`SERIES_THRESHOLD`),
    ``"series"`` or ``"direct"``. The direct branch at exactly zero is
    undefined and returns nan.
    """
    theta = np.asarray(theta, dtype=float)
    t2 = theta * theta
    series_sinc = 1.0 - t2 / 6.0 + t2 * t2 / 120.0
    series_vers = theta / 2.0 - theta * t2 / 24.0
    if method == "series":
        sinc, vers = series_sinc, series_vers
    else:
        with np.errstate(divide="ignore", invalid="ignore"):
            direct_sinc = np.sin(theta) / theta
            direct_vers = (1.0 - np.cos(theta)) / theta
        if method == "direct":
            sinc, vers = direct_sinc, direct_vers
        elif method == "auto":
            small = np.abs(theta) < SERIES_THRESHOLD
            sinc = np.where(small, series_sinc, direct_sinc)
            vers = np.where(small, series_vers, direct_vers)
        else:
            raise ValueError(f"unknown method {method!r}")
    if sinc.ndim == 0:
        return float(sinc), float(vers)
    return sinc, vers


def _hind_xy(spine_length, hip_halfwidth, l_h, R, method="auto"):
    # No validation; hip_halfwidth may be negative for the mirrored diagonal.
    theta = 2.0 * np.asarray(R, dtype=float)
    sinc, vers = arc_terms(theta, method)
    c, s = np.cos(theta), np.sin(theta)
    l_hx = l_h * c + hip_halfwidth * s + (spine_length - spine_length * sinc)
    l_hy = spine_length * vers + hip_halfwidth * c - l_h * s
    return l_hx, l_hy


def hind_displacement(geom: RobotGeometry, l_h, R, method="auto"):
    """Hind-foot displacement ``(l_hx, l_hy)`` caused by flexion ``R``.

    Accepts scalars or broadcastable arrays for ``l_h`` and ``R``. At R = 0
    the result is exactly ``(l_h, l_HH)``.
    """
    l_h = _check_finite("hind stride", l_h)
    R = check_flexion(R)
    l_hx, l_hy = _hind_xy(geom.spine_length, geom.hind_hip_halfwidth, l_h, R, method)
    if np.ndim(l_hx) == 0:
        return float(l_hx), float(l_hy)
    return l_hx, l_hy


def footholds(geom: RobotGeometry, stride: StrideState, R) -> Footholds:
    """Fore and hind stance footholds of the LF+RH diagonal."""
    fore = _check_finite("fore stride", stride.fore)
    l_hx, l_hy = hind_displacement(geom, stride.hind, R)
    fy = -geom.fore_hip_halfwidth + 0.0 * np.asarray(fore)
    if np.ndim(fy) == 0:
        fy = float(fy)
    return Footholds(fore=(fore, fy), hind=(l_hx - geom.trunk_length, l_hy))
