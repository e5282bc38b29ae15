"""Open-loop spinal flexion controllers.

Three kinds share one parameter set:

* ``non_spine``: the spine stays straight, ``R = 0``.
* ``spine``: plain cosine, ``R = alpha * cos(2 pi t / T + phi)``.
* ``balance_spine``: the cosine phase ``f_T`` advances at a piecewise
  constant rate ``k * 2 pi / T``. Within each half period the first quarter
  uses ``k1 = 2 arccos(R'/alpha) / pi`` and the second ``k2 = 2 - k1``, so
  that ``|R|`` equals ``R'`` exactly at the quarter instants while the
  period is preserved.

Segment switches happen on wall-clock multiples of ``T/4``.
"""

from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import ControllerParameterError, SteppingError

log = logging.getLogger(__name__)

#: Relative slack when deciding which quarter period a time falls in.
_GRID_EPS = 1e-9


class ControllerKind(str, enum.Enum):
    NON_SPINE = "non_spine"
    SPINE = "spine"
    BALANCE_SPINE = "balance_spine"

    @classmethod
    def parse(cls, value) -> "ControllerKind":
        """Accept ``"balance-spine"``, ``"balance_spine"`` or an enum member."""
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower().replace("-", "_")
        try:
            return cls(key)
        except ValueError:
            names = ", ".join(k.value for k in cls)
            raise ControllerParameterError(f"unknown controller kind {value!r} (expected one of {names})") from None

    @property
    def cli_name(self) -> str:
        return self.value.replace("_", "-")


class Segment(enum.IntEnum):
    FIRST_QUARTER = 0
    SECOND_QUARTER = 1


def warp_factor(R_prime: float, alpha: float, segment: Segment) -> float:
    """Phase-rate multiplier ``k`` for one quarter-period segment."""
    if not (math.isfinite(alpha) and alpha > 0):
        raise ControllerParameterError(f"warp needs a positive amplitude, got alpha={alpha!r}")
    if not (math.isfinite(R_prime) and 0 <= R_prime <= alpha):
        raise ControllerParameterError(
            f"balance target R'={R_prime!r} must lie in [0, alpha={alpha!r}]; raise alpha to at least R'"
        )
    k1 = 2.0 * math.acos(R_prime / alpha) / math.pi
    return k1 if Segment(segment) is Segment.FIRST_QUARTER else 2.0 - k1


@dataclass(frozen=True)
class SpineControllerParams:
    """Controller configuration.

    ``time_step`` defaults to ``period / 1000``. ``balance_target`` is the
    unsigned flexion ``R'`` and is only used by ``balance_spine``.
    """

    kind: ControllerKind = ControllerKind.NON_SPINE
    amplitude: float = 0.1
    period: float = 1.0
    initial_phase: float = 0.0
    time_step: float | None = None
    balance_target: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "kind", ControllerKind.parse(self.kind))
        if not (math.isfinite(self.period) and self.period > 0):
            raise ControllerParameterError(f"period must be positive, got {self.period!r}")
        if not (math.isfinite(self.amplitude) and self.amplitude >= 0):
            raise ControllerParameterError(f"amplitude must be >= 0, got {self.amplitude!r}")
        if not math.isfinite(self.initial_phase):
            raise ControllerParameterError("initial_phase must be finite")
        if self.time_step is None:
            object.__setattr__(self, "time_step", self.period / 1000.0)
        ts = self.time_step
        if not (math.isfinite(ts) and ts > 0):
            raise ControllerParameterError(f"time_step must be positive, got {ts!r}")
        if ts > self.period / 100.0 * (1 + 1e-12):
            raise ControllerParameterError(f"time_step {ts!r} exceeds period/100 = {self.period / 100.0!r}")
        if self.kind is ControllerKind.BALANCE_SPINE:
            rp = self.balance_target
            if not (math.isfinite(rp) and rp >= 0):
                raise ControllerParameterError(f"balance target must be finite and >= 0, got {rp!r}")
            if self.amplitude == 0:
                log.warning("balance_spine with zero amplitude: the spine stays straight")
            elif rp > self.amplitude:
                raise ControllerParameterError(
                    f"balance target R'={rp:.6g} rad exceeds amplitude alpha={self.amplitude:.6g} rad; "
                    f"raise alpha to at least {rp:.6g}"
                )

    @property
    def angular_frequency(self) -> float:
        return 2.0 * math.pi / self.period

    @property
    def warped(self) -> bool:
        return self.kind is ControllerKind.BALANCE_SPINE and self.amplitude > 0

    @property
    def k_first(self) -> float:
        if not self.warped:
            return 1.0
        return warp_factor(self.balance_target, self.amplitude, Segment.FIRST_QUARTER)

    @property
    def k_second(self) -> float:
        if not self.warped:
            return 1.0
        return warp_factor(self.balance_target, self.amplitude, Segment.SECOND_QUARTER)

    @property
    def k_max(self) -> float:
        return max(self.k_first, self.k_second)

    def with_period(self, period: float) -> "SpineControllerParams":
        """Same controller at another period; the step keeps its ratio to T."""
        ratio = self.time_step / self.period
        return replace(self, period=period, time_step=period * ratio)

    def to_dict(self) -> dict:
        return {
            "kind": self.kind.value,
            "amplitude": self.amplitude,
            "period": self.period,
            "initial_phase": self.initial_phase,
            "time_step": self.time_step,
            "balance_target": self.balance_target,
        }


def segment_at(params: SpineControllerParams, t):
    """Quarter-period segment (0 first, 1 second) containing ``t``."""
    q = np.floor(4.0 * np.asarray(t, dtype=float) / params.period + _GRID_EPS)
    out = (q.astype(np.int64) % 2).astype(int)
    return int(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class WarpState:
    """Stepping state: the last evaluated instant and its warped phase."""

    step: int = 0
    f_T: float = 0.0
    k: float = 1.0
    segment: Segment = Segment.FIRST_QUARTER

    def time(self, params: SpineControllerParams) -> float:
        return self.step * params.time_step


def initial_state(params: SpineControllerParams) -> WarpState:
    """State at t = 0 with the accumulator at zero."""
    return WarpState(0, 0.0, params.k_first, Segment.FIRST_QUARTER)


def _flexion_from_phase(params, t, f_T):
    if params.kind is ControllerKind.NON_SPINE or params.amplitude == 0:
        return 0.0 * np.asarray(f_T, dtype=float)
    if params.kind is ControllerKind.SPINE:
        return params.amplitude * np.cos(params.angular_frequency * np.asarray(t, dtype=float) + params.initial_phase)
    return params.amplitude * np.cos(np.asarray(f_T, dtype=float) + params.initial_phase)


def flexion_at(params: SpineControllerParams, state: WarpState, t: float):
    """Advance the controller to ``t`` and return ``(R, new_state)``.

    ``t`` must equal the state's time (no advance) or exactly one time step
    after it. The phase advances with the rate of the segment that contains
    the previous instant.
    """
    ts = params.time_step
    now = state.step * ts
    if abs(t - now) <= _GRID_EPS * max(ts, abs(t)):
        new = state
    elif abs(t - (now + ts)) <= _GRID_EPS * max(ts, abs(t)):
        f_T = state.f_T + state.k * params.angular_frequency * ts
        step = state.step + 1
        seg = Segment(segment_at(params, step * ts))
        k = params.k_first if seg is Segment.FIRST_QUARTER else params.k_second
        new = WarpState(step, f_T, k, seg)
    else:
        raise SteppingError(f"t={t!r} is not on the controller grid after t={now!r} (step {ts!r})")
    R = float(_flexion_from_phase(params, t, new.f_T))
    return R, new


def run_controller(params: SpineControllerParams, n_steps: int):
    """Step from t = 0 for ``n_steps`` steps.

    Returns arrays ``(t, R, f_T, k)`` of length ``n_steps + 1``. The phase
    recurrence ``f_T[n] = f_T[n-1] + k[n-1] * 2 pi t_s / T`` is evaluated as a
    cumulative sum.
    """
    n_steps = int(n_steps)
    if n_steps < 0:
        raise SteppingError("n_steps must be >= 0")
    ts = params.time_step
    idx = np.arange(n_steps + 1)
    t = idx * ts
    seg = segment_at(params, t)
    k = np.where(seg == 0, params.k_first, params.k_second)
    f_T = np.zeros(n_steps + 1)
    f_T[1:] = np.cumsum(k[:-1]) * (params.angular_frequency * ts)
    R = _flexion_from_phase(params, t, f_T)
    return t, R, f_T, k


def flexion_trajectory(params: SpineControllerParams, t):
    """Continuous-time controller output at arbitrary times ``t >= 0``.

    Returns ``(R, f_T, k)``. For ``balance_spine`` the warped phase is the
    exact integral of the piecewise-constant rate, which is what the stepped
    recurrence produces on any grid that contains the quarter instants.
    """
    t = np.asarray(t, dtype=float)
    omega = params.angular_frequency
    if not params.warped:
        f_T = omega * t
        k = np.ones_like(t)
    else:
        k1, k2 = params.k_first, params.k_second
        u = 4.0 * t / params.period
        q = np.floor(u + _GRID_EPS)
        odd = (q.astype(np.int64) % 2) == 1
        k = np.where(odd, k2, k1)
        f_T = (q // 2) * math.pi + np.where(odd, k1 * math.pi / 2, 0.0) + k * (math.pi / 2) * (u - q)
    R = _flexion_from_phase(params, t, f_T)
    if t.ndim == 0:
        return float(R), float(f_T), float(k)
    return R, f_T, k
