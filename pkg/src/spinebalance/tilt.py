"""Linear tilt proxy driven by the balance distance.

Roll obeys ``theta'' = roll_gain * dis - damping * theta'`` and pitch the same
law driven by the x component of the CoM offset from its foot of
perpendicular on the support line. Positive ``dis`` (CoM on the robot's right)
produces a positive roll rate.

The default gain ``g / h**2`` treats the body as an inverted pendulum of
height ``h = 0.06 m`` whose lateral lever arm is ``dis``. With heavy damping
and a reset of the tilt state at every diagonal switch, the proxy mostly
accumulates the tipping moment over one stance phase.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields

import numpy as np

from .errors import DomainError

GRAVITY = 9.81
PROXY_HEIGHT = 0.06
DEFAULT_GAIN = GRAVITY / PROXY_HEIGHT**2


@dataclass(frozen=True)
class TiltParams:
    roll_gain: float = DEFAULT_GAIN
    pitch_gain: float = DEFAULT_GAIN
    damping: float = 100.0
    reset_on_switch: bool = True
    max_step: float | None = 1e-4

    def __post_init__(self):
        for name in ("roll_gain", "pitch_gain", "damping"):
            v = getattr(self, name)
            if not (isinstance(v, (int, float)) and math.isfinite(v) and v >= 0):
                raise DomainError(f"{name} must be finite and >= 0, got {v!r}")
        if self.max_step is not None and not (math.isfinite(self.max_step) and self.max_step > 0):
            raise DomainError(f"max_step must be positive or None, got {self.max_step!r}")

    def substeps(self, dt: float) -> int:
        """Integrator steps per trace sample (1 when ``max_step`` is None)."""
        if self.max_step is None:
            return 1
        return max(1, math.ceil(dt / self.max_step - 1e-9))

    def to_dict(self):
        return {f.name: getattr(self, f.name) for f in fields(self)}

    @classmethod
    def from_dict(cls, data):
        d = dict(data)
        if "reset_on_switch" in d:
            d["reset_on_switch"] = bool(d["reset_on_switch"])
        return cls(**d)


@dataclass(frozen=True)
class BalanceMetrics:
    """Half-stride balance indicators of one run."""

    mean_abs_roll: float = 0.0
    mean_abs_pitch: float = 0.0
    half_stride_signed_area: float = 0.0
    roll_at_switch: float = 0.0

    def to_dict(self):
        return {f.name: getattr(self, f.name) for f in fields(self)}

    @classmethod
    def from_dict(cls, data):
        return cls(**{f.name: float(data[f.name]) for f in fields(cls)})


def _propagator(h, s, g, c):
    """Coefficients of ``s`` semi-implicit Euler steps of size ``h``.

    One step maps ``(theta, rate)`` to ``M @ (theta, rate) + b * d`` with
    ``M = [[1, h(1 - h c)], [0, 1 - h c]]`` and ``b = (h^2 g, h g)``. Returns
    ``M**s`` and ``(I + M + ... + M**(s-1)) @ b`` for a forcing held constant
    over the ``s`` steps.
    """
    M = np.array([[1.0, h * (1.0 - h * c)], [0.0, 1.0 - h * c]])
    b = np.array([h * h * g, h * g])
    P = np.eye(2)
    acc = np.zeros(2)
    for _ in range(s):
        acc = M @ acc + b
        P = M @ P
    return P, acc


def simulate_tilt(forcing, dt, params: TiltParams, gain=None, samples_per_half_stride=None, first_sample=0):
    """Integrate the proxy with fixed-step semi-implicit Euler.

    ``forcing`` is sampled once per cell of width ``dt`` and held over the
    cell, which is integrated in ``params.substeps(dt)`` equal steps; the
    returned angle is the state at the end of each cell. When
    ``params.reset_on_switch`` is set and ``samples_per_half_stride`` is
    given, angle and rate are zeroed before every sample whose global index
    ``first_sample + i`` is a multiple of it. ``gain`` defaults to the roll gain.
    """
    d = np.asarray(forcing, dtype=float)
    if d.ndim != 1 or d.size == 0:
        raise DomainError("tilt forcing must be a non-empty 1-D trace")
    if not np.all(np.isfinite(d)):
        raise DomainError("tilt forcing must be finite")
    if not (math.isfinite(dt) and dt > 0):
        raise DomainError("dt must be positive")
    g = params.roll_gain if gain is None else float(gain)
    c = params.damping
    m = int(samples_per_half_stride) if (params.reset_on_switch and samples_per_half_stride) else 0
    s = params.substeps(dt)
    P, acc = _propagator(dt / s, s, g, c)
    (p00, p01), (p10, p11) = P.tolist()
    b0, b1 = acc.tolist()
    out = np.empty_like(d)
    theta = rate = 0.0
    idx = int(first_sample)
    for i, di in enumerate(d.tolist()):
        if m and (idx + i) % m == 0:
            theta = rate = 0.0
        theta, rate = p00 * theta + p01 * rate + b0 * di, p10 * theta + p11 * rate + b1 * di
        out[i] = theta
    return out


def half_stride_metrics(roll, dis, dt, samples_per_half_stride, pitch=None, half_stride_signs=None) -> BalanceMetrics:
    """Aggregate traces covering a whole number of half strides.

    The signed area of each half stride uses the midpoint rule on the cell
    samples and is multiplied by ``half_stride_signs`` (default +1) so that
    mirrored half strides can be folded onto one orientation.
    """
    roll = np.asarray(roll, dtype=float)
    dis = np.asarray(dis, dtype=float)
    m = int(samples_per_half_stride)
    if m <= 0:
        raise DomainError("samples_per_half_stride must be positive")
    if roll.shape != dis.shape or roll.ndim != 1:
        raise DomainError("roll and dis traces must be 1-D and of equal length")
    if roll.size == 0 or roll.size % m:
        raise DomainError(f"trace length {roll.size} is not a positive multiple of {m}")
    n_half = roll.size // m
    pitch = np.zeros_like(roll) if pitch is None else np.asarray(pitch, dtype=float)
    if pitch.shape != roll.shape:
        raise DomainError("pitch trace length differs from roll trace")
    signs = np.ones(n_half) if half_stride_signs is None else np.asarray(half_stride_signs, dtype=float)
    if signs.shape != (n_half,):
        raise DomainError("need one sign per half stride")
    areas = dt * dis.reshape(n_half, m).sum(axis=1) * signs
    return BalanceMetrics(
        mean_abs_roll=float(np.mean(np.abs(roll))),
        mean_abs_pitch=float(np.mean(np.abs(pitch))),
        half_stride_signed_area=float(np.mean(areas)),
        roll_at_switch=float(np.mean(np.abs(roll.reshape(n_half, m)[:, -1]))),
    )
