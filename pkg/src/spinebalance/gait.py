"""Ideal trot: stance schedule and cosine stride generators."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError
from .kinematics import StrideState

LEGS = ("LF", "RF", "LH", "RH")


class Diagonal(enum.IntEnum):
    """Stance diagonal. LF_RH holds on [nT, nT + T/2), RF_LH on the rest."""

    LF_RH = 0
    RF_LH = 1

    @property
    def legs(self):
        return ("LF", "RH") if self is Diagonal.LF_RH else ("RF", "LH")

    @property
    def fore_leg(self):
        return self.legs[0]

    @property
    def hind_leg(self):
        return self.legs[1]


def _default_offsets():
    return {"LF": 0.0, "RH": 0.0, "RF": 0.5, "LH": 0.5}


@dataclass(frozen=True)
class GaitParams:
    """Trot gait.

    ``phase_offsets`` are per-leg fractions of the period; they shift the
    stride waveform of each leg. ``hind_phase`` (radians) is an extra phase
    of the hind stride relative to the fore stride of the same diagonal.
    Only the ideal trot (duty 0.5) is modelled.
    """

    period: float = 1.0
    stride_amplitude: float = 0.05
    duty: float = 0.5
    hind_phase: float = 0.0
    phase_offsets: dict = field(default_factory=_default_offsets)

    def __post_init__(self):
        if not (math.isfinite(self.period) and self.period > 0):
            raise DomainError(f"period must be positive, got {self.period!r}")
        if not (math.isfinite(self.stride_amplitude) and self.stride_amplitude > 0):
            raise DomainError(f"stride_amplitude must be positive, got {self.stride_amplitude!r}")
        if self.duty != 0.5:
            raise DomainError("only the ideal trot (duty = 0.5) is modelled")
        if not math.isfinite(self.hind_phase):
            raise DomainError("hind_phase must be finite")
        offs = self.phase_offsets
        if set(offs) != set(LEGS):
            raise DomainError(f"phase_offsets needs exactly the legs {LEGS}")
        if not (_same_phase(offs["LF"], offs["RH"]) and _same_phase(offs["RF"], offs["LH"])):
            raise DomainError("trot requires diagonal pairs (LF, RH) and (RF, LH) to share phase")
        if not _same_phase(offs["RF"] - offs["LF"], 0.5):
            raise DomainError("trot requires the two diagonal pairs to be offset by half a period")

    @property
    def angular_frequency(self) -> float:
        return 2.0 * math.pi / self.period

    @property
    def frequency(self) -> float:
        return 1.0 / self.period

    def with_period(self, period: float) -> "GaitParams":
        return GaitParams(period, self.stride_amplitude, self.duty, self.hind_phase, dict(self.phase_offsets))


def _same_phase(a, b, tol=1e-12):
    d = (a - b) % 1.0
    return d < tol or 1.0 - d < tol


def diagonal_at(gait: GaitParams, t):
    """Index of the stance diagonal (0 = LF_RH, 1 = RF_LH) at time(s) ``t``."""
    t = np.asarray(t, dtype=float)
    frac = np.mod(t / gait.period - gait.phase_offsets["LF"], 1.0)
    out = (frac >= 0.5).astype(int)
    return int(out) if out.ndim == 0 else out


def _leg_stride(gait, leg, t, extra=0.0):
    phase = gait.angular_frequency * (t - gait.phase_offsets[leg] * gait.period)
    return gait.stride_amplitude * np.cos(phase + extra)


def stride_arrays(gait: GaitParams, t, diagonal=None):
    """Vectorised ``(l_f, l_h)`` of the stancing diagonal at times ``t``.

    ``diagonal`` overrides the schedule lookup; samplers that know the
    half-stride index pass it to avoid rounding at the switch instants.
    """
    t = np.asarray(t, dtype=float)
    diag = diagonal_at(gait, t) if diagonal is None else np.asarray(diagonal)
    lf = np.where(diag == 0, _leg_stride(gait, "LF", t), _leg_stride(gait, "RF", t))
    lh = np.where(
        diag == 0,
        _leg_stride(gait, "RH", t, gait.hind_phase),
        _leg_stride(gait, "LH", t, gait.hind_phase),
    )
    return lf, lh


def stride_at(gait: GaitParams, t: float) -> StrideState:
    """Strides of the currently stancing diagonal.

    Continuous within each half period; at the diagonal switch the stance
    foot changes, so the returned strides jump.
    """
    if not math.isfinite(t) or t < 0:
        raise DomainError(f"time must be finite and non-negative, got {t!r}")
    lf, lh = stride_arrays(gait, t)
    return StrideState(float(lf), float(lh), float(t))


@dataclass(frozen=True)
class LegPhase:
    leg: str
    phase: str  # "stance" or "swing"
    progress: float


def stance_schedule(gait: GaitParams, t: float):
    """Stance/swing labels for LF, RF, LH, RH at time ``t``."""
    if not math.isfinite(t) or t < 0:
        raise DomainError(f"time must be finite and non-negative, got {t!r}")
    half = 0.5
    out = []
    for leg in LEGS:
        frac = (t / gait.period - gait.phase_offsets[leg]) % 1.0
        if frac < half:
            out.append(LegPhase(leg, "stance", frac / half))
        else:
            out.append(LegPhase(leg, "swing", (frac - half) / half))
    return tuple(out)
