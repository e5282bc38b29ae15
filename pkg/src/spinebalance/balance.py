"""Support line through the stance diagonal and the CoM's signed distance to it.

Sign convention: a positive distance means the CoM lies to the left of the
directed line hind foot -> fore foot in the local frame, i.e. on the +y side,
which is the robot's right. Both diagonals share this meaning, so a trot that
is mirror symmetric gives ``dis(t + T/2) == -dis(t)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import DegenerateSupportError, DomainError
from .gait import GaitParams, stride_arrays
from .kinematics import RobotGeometry, StrideState, _hind_xy, arc_terms, check_flexion

FIXED = "fixed"
FLEXION_COUPLED = "flexion_coupled"


@dataclass(frozen=True)
class SupportLine:
    """Line ``a*x + b*y + c = 0`` (unnormalised)."""

    a: float
    b: float
    c: float

    def __post_init__(self):
        if not (self.a * self.a + self.b * self.b > 0):
            raise DegenerateSupportError("support line needs two distinct footholds")

    def residual(self, x, y):
        return self.a * x + self.b * y + self.c


@dataclass(frozen=True)
class ComPosition:
    """Centre of mass in the shoulder frame.

    In ``flexion_coupled`` mode a fraction ``mass_fraction`` of the mass sits
    at the centroid of the spine arc and the rest at ``(cx, cy)``.
    """

    cx: float = -0.115
    cy: float = 0.0
    mode: str = FIXED
    mass_fraction: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.cx) and math.isfinite(self.cy)):
            raise DomainError("CoM coordinates must be finite")
        if self.mode not in (FIXED, FLEXION_COUPLED):
            raise DomainError(f"unknown CoM mode {self.mode!r}")
        if not 0.0 <= self.mass_fraction <= 1.0:
            raise DomainError("mass_fraction must lie in [0, 1]")

    def resolve(self, geom: RobotGeometry, R=0.0):
        """CoM coordinates at flexion ``R`` (scalar or array)."""
        if self.mode == FIXED:
            return self.cx, self.cy
        ax, ay = arc_centroid(geom, R)
        mu = self.mass_fraction
        return (1.0 - mu) * self.cx + mu * ax, (1.0 - mu) * self.cy + mu * ay

    def to_dict(self):
        return {"cx": self.cx, "cy": self.cy, "mode": self.mode, "mass_fraction": self.mass_fraction}

    @classmethod
    def from_dict(cls, data):
        return cls(
            float(data.get("cx", -0.115)),
            float(data.get("cy", 0.0)),
            data.get("mode", FIXED),
            float(data.get("mass_fraction", 0.0)),
        )


def arc_centroid(geom: RobotGeometry, R):
    """Centroid of the spine arc (uniform density) at flexion ``R``."""
    theta = 2.0 * np.asarray(R, dtype=float)
    t2 = theta * theta
    small = np.abs(theta) < 1e-3
    with np.errstate(divide="ignore", invalid="ignore"):
        # (1 - cos t) / t^2 and (1 - sin t / t) / t
        q_direct = (1.0 - np.cos(theta)) / t2
        sinc, _ = arc_terms(theta, "direct")
        p_direct = (1.0 - np.asarray(sinc)) / theta
    q = np.where(small, 0.5 - t2 / 24.0 + t2 * t2 / 720.0, q_direct)
    p = np.where(small, theta / 6.0 - theta * t2 / 120.0, p_direct)
    x = -geom.body_length - geom.spine_length * q
    y = geom.spine_length * p
    if x.ndim == 0:
        return float(x), float(y)
    return x, y


def _coefficients(geom, fore_halfwidth, hind_halfwidth, l_f, l_h, R):
    l_hx, l_hy = _hind_xy(geom.spine_length, hind_halfwidth, l_h, R)
    reach = geom.trunk_length - l_hx
    a = l_hy + fore_halfwidth
    b = l_f + reach
    c = reach * fore_halfwidth - l_f * l_hy
    return a, b, c, l_hx, l_hy


def support_line(geom: RobotGeometry, stride: StrideState, R) -> SupportLine:
    """Support line of the LF+RH diagonal."""
    R = check_flexion(R)
    if not (math.isfinite(stride.fore) and math.isfinite(stride.hind)):
        raise DomainError("strides must be finite")
    a, b, c, _, _ = _coefficients(
        geom, geom.fore_hip_halfwidth, geom.hind_hip_halfwidth, stride.fore, stride.hind, R
    )
    return SupportLine(float(a), float(b), float(c))


def signed_distance(line: SupportLine, com) -> float:
    """Signed distance from ``com`` (ComPosition or (x, y)) to ``line``."""
    if isinstance(com, ComPosition):
        x, y = com.cx, com.cy
    else:
        x, y = com
    norm = math.hypot(line.a, line.b)
    if norm == 0:
        raise DegenerateSupportError("support line needs two distinct footholds")
    return (line.a * x + line.b * y + line.c) / norm


class BalanceState(NamedTuple):
    """Vectorised per-sample quantities in the original (unmirrored) frame."""

    fx: np.ndarray
    fy: np.ndarray
    hx: np.ndarray
    hy: np.ndarray
    a: np.ndarray
    b: np.ndarray
    c: np.ndarray
    dis: np.ndarray
    offset_x: np.ndarray  # x component of (CoM - closest point on the line)


def balance_state(geom: RobotGeometry, l_f, l_h, R, com: ComPosition, diagonal=0) -> BalanceState:
    """Footholds, support line and signed distance for either diagonal.

    ``diagonal`` (scalar or array) is 0 for LF+RH and 1 for RF+LH. The RF+LH
    diagonal is evaluated as the mirror image (y -> -y) of LF+RH: flexion
    changes sign in the mirrored frame, and the distance changes sign when
    the frame is restored. The returned line coefficients are in the
    original frame.
    """
    R = check_flexion(R)
    l_f, l_h, R, diagonal = np.broadcast_arrays(
        np.asarray(l_f, float), np.asarray(l_h, float), np.asarray(R, float), np.asarray(diagonal)
    )
    if not (np.all(np.isfinite(l_f)) and np.all(np.isfinite(l_h))):
        raise DomainError("strides must be finite")
    mirror = diagonal.astype(bool)
    flip = np.where(mirror, -1.0, 1.0)
    cx, cy = com.resolve(geom, R)
    cy = flip * cy
    Rm = flip * R
    a, b, c, l_hx, l_hy = _coefficients(
        geom, geom.fore_hip_halfwidth, geom.hind_hip_halfwidth, l_f, l_h, Rm
    )
    norm = np.hypot(a, b)
    if np.any(norm == 0):
        raise DegenerateSupportError("support line needs two distinct footholds")
    dis_m = (a * cx + b * cy + c) / norm
    # Restoring y -> -y reverses orientation; (a, b, c) keep the hind -> fore
    # two-point convention of the original frame.
    return BalanceState(
        fx=l_f + 0.0,
        fy=flip * -geom.fore_hip_halfwidth,
        hx=l_hx - geom.trunk_length,
        hy=flip * l_hy,
        a=flip * a,
        b=b,
        c=flip * c,
        dis=flip * dis_m,
        offset_x=dis_m * a / norm,
    )


def balance_distance(geom, stride: StrideState, R, com: ComPosition, diagonal=0):
    """Scalar signed distance for one stride state and flexion."""
    st = balance_state(geom, stride.fore, stride.hind, R, com, diagonal)
    return float(st.dis)


def dis_trace(geom: RobotGeometry, gait: GaitParams, controller, com: ComPosition, samples_per_period=256):
    """Signed distance over one stride period at ``t_j = j T / N``.

    ``controller`` is a :class:`~spinebalance.spine_controller.SpineControllerParams`.
    Returns ``(t, dis)``. ``N`` must be a multiple of 4 and at least 8 so that
    the quarter and half periods fall on samples.
    """
    from .spine_controller import flexion_trajectory

    n = int(samples_per_period)
    if n < 8 or n % 4:
        raise DomainError("samples_per_period must be a multiple of 4 and >= 8")
    j = np.arange(n)
    t = j * (gait.period / n)
    diag = (j >= n // 2).astype(int)
    l_f, l_h = stride_arrays(gait, t, diagonal=diag)
    R, _, _ = flexion_trajectory(controller, t)
    st = balance_state(geom, l_f, l_h, R, com, diag)
    return t, st.dis
