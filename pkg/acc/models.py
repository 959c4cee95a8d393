# acc/models.py
import math
from dataclasses import dataclass, field, replace
from typing import Dict, List, Literal, Optional, Tuple

import numpy as np

from .errors import DimensionError, DomainError

Saturation = Literal["none", "full-on", "full-off"]
StabilityClass = Literal["stable", "period_doubling", "neimark", "real_unstable"]
HbVerdict = Literal["unstable_range_exists", "pole_insensitive"]
TransferKind = Literal["control_to_output", "audio", "control_to_current"]


@dataclass(frozen=True)
class ConverterParams:
    """
    One ACC buck converter configuration, strict SI units.
    omega_z / omega_p are rad/s, f_s is Hz. v_set only seeds the duty guess.
    """
    v_s: float
    v_r: float
    f_s: float
    L: float
    C: float
    R_c: float
    R: float
    R_s: float
    V_l: float
    V_h: float
    K_c: float
    omega_z: float
    omega_p: float
    v_set: Optional[float] = None

    def __post_init__(self):
        for name in ("v_s", "v_r", "f_s", "L", "C", "R_c", "R", "R_s",
                     "V_l", "V_h", "K_c", "omega_z", "omega_p"):
            if not math.isfinite(getattr(self, name)):
                raise DomainError(f"ConverterParams.{name} must be finite")
        for name in ("f_s", "L", "C", "R", "R_s", "omega_z", "omega_p"):
            if getattr(self, name) <= 0:
                raise DomainError(f"ConverterParams.{name} must be > 0, got {getattr(self, name)!r}")
        if self.V_h <= self.V_l:
            raise DomainError(f"ramp needs V_h > V_l, got V_l={self.V_l!r}, V_h={self.V_h!r}")
        if self.R_c < 0:
            raise DomainError(f"R_c must be >= 0, got {self.R_c!r}")

    @property
    def T(self) -> float:
        return 1.0 / self.f_s

    @property
    def omega_s(self) -> float:
        return 2.0 * math.pi * self.f_s

    @property
    def k(self) -> float:
        return self.omega_p / self.omega_s

    @property
    def u(self) -> np.ndarray:
        return np.array([self.v_s, self.v_r])

    def with_omega_p(self, omega_p: float) -> "ConverterParams":
        return replace(self, omega_p=omega_p)


@dataclass(frozen=True)
class RampSignal:
    V_l: float
    V_h: float
    T: float

    def __post_init__(self):
        if not self.T > 0:
            raise DomainError(f"ramp period must be > 0, got {self.T!r}")
        if self.V_h <= self.V_l:
            raise DomainError(f"ramp needs V_h > V_l, got V_l={self.V_l!r}, V_h={self.V_h!r}")

    @property
    def slope(self) -> float:
        return (self.V_h - self.V_l) / self.T

    @property
    def amplitude(self) -> float:
        return self.V_h - self.V_l


@dataclass(frozen=True, eq=False)
class SwitchedModel:
    """
    Two-stage switched affine model:
        S1: x' = A1 x + B1 u,   S2: x' = A2 x + B2 u,
        y = C_row x + D_row u,  v_o = E_i x.
    """
    A1: np.ndarray
    A2: np.ndarray
    B1: np.ndarray
    B2: np.ndarray
    C_row: np.ndarray
    D_row: np.ndarray
    E1: np.ndarray
    E2: np.ndarray
    ramp: RampSignal
    state_labels: Tuple[str, ...] = ()
    state_scales: Optional[np.ndarray] = None
    duty_hint: Optional[float] = None

    def __post_init__(self):
        a1 = np.atleast_2d(np.asarray(self.A1, dtype=float))
        n = a1.shape[0]
        if n < 1 or a1.shape != (n, n):
            raise DimensionError(f"A1 must be N x N with N >= 1, got {a1.shape}")
        shapes = {
            "A1": (n, n), "A2": (n, n), "B1": (n, 2), "B2": (n, 2),
            "C_row": (n,), "D_row": (2,), "E1": (n,), "E2": (n,),
        }
        for name, shape in shapes.items():
            arr = np.asarray(getattr(self, name), dtype=float)
            if len(shape) == 1:
                arr = arr.reshape(-1)
            if arr.shape != shape:
                raise DimensionError(f"{name} has shape {arr.shape}, expected {shape}")
            object.__setattr__(self, name, arr)

        labels = tuple(self.state_labels) or tuple(f"x{i}" for i in range(n))
        if len(labels) != n:
            raise DimensionError(f"{len(labels)} state labels for N={n}")
        object.__setattr__(self, "state_labels", labels)

        scales = np.ones(n) if self.state_scales is None else np.asarray(self.state_scales, dtype=float)
        if scales.shape != (n,) or np.any(scales <= 0):
            raise DimensionError("state_scales must be N positive numbers")
        object.__setattr__(self, "state_scales", scales)

    @property
    def n(self) -> int:
        return self.A1.shape[0]

    @property
    def E(self) -> np.ndarray:
        return 0.5 * (self.E1 + self.E2)

    def output(self, x: np.ndarray, u: np.ndarray) -> float:
        return float(self.C_row @ x + self.D_row @ u)


@dataclass
class CycleResult:
    x_end: np.ndarray
    d: float
    saturated: Saturation
    crossing_count: int
    x_switch: Optional[np.ndarray] = None


@dataclass
class CycleSamples:
    t: np.ndarray  # local time within the cycle
    x: np.ndarray
    y: np.ndarray
    h: np.ndarray


@dataclass
class Trajectory:
    """
    Dense samples for plotting plus the exact stroboscopic states x(nT).
    cycle_boundaries[n] is the sample index at t = nT.
    """
    t: np.ndarray
    x: np.ndarray
    y: np.ndarray
    h: np.ndarray
    cycle_boundaries: List[int]
    duties: List[float]
    saturation: List[str]
    strobe: np.ndarray
    T: float
    state_labels: Tuple[str, ...]
    state_scales: np.ndarray

    @property
    def n_cycles(self) -> int:
        return len(self.duties)

    @classmethod
    def empty(cls, model: SwitchedModel) -> "Trajectory":
        n = model.n
        return cls(
            t=np.zeros(0), x=np.zeros((0, n)), y=np.zeros(0), h=np.zeros(0),
            cycle_boundaries=[], duties=[], saturation=[],
            strobe=np.zeros((0, n)), T=model.ramp.T,
            state_labels=model.state_labels, state_scales=model.state_scales,
        )


@dataclass
class PeriodDetection:
    kind: Literal["periodic", "aperiodic", "diverging"]
    period: Optional[int] = None

    @property
    def label(self) -> str:
        if self.kind == "periodic":
            return f"period-{self.period}"
        return self.kind


@dataclass
class PeriodicOrbit:
    m: int
    x_start: np.ndarray
    duties: Tuple[float, ...]
    u: np.ndarray
    residual: float
    deriv_minus: np.ndarray  # (m, N), x'(d_i^-)
    deriv_plus: np.ndarray  # (m, N), x'(d_i^+)
    x_switch: np.ndarray  # (m, N), x(d_i)
    x_cycle_start: np.ndarray  # (m, N), state at the start of each cycle
    T: float
    iterations: int = 0

    @property
    def duty_cycles(self) -> Tuple[float, ...]:
        return tuple(d / self.T for d in self.duties)

    @property
    def mean_duty_cycle(self) -> float:
        return float(np.mean(self.duty_cycles))


@dataclass
class Linearization:
    phi: np.ndarray
    gamma1: np.ndarray
    gamma2: np.ndarray
    orbit_ref: PeriodicOrbit
    eigs: np.ndarray

    @property
    def gamma(self) -> np.ndarray:
        return np.column_stack([self.gamma1, self.gamma2])


@dataclass
class StabilityVerdict:
    kind: StabilityClass
    max_magnitude: float
    critical_eigs: np.ndarray
    tolerance: float
    marginal: bool = False
    dominant: complex = 0j

    @property
    def is_stable(self) -> bool:
        return self.kind == "stable"


@dataclass
class AveragedJacobian:
    a_avg: np.ndarray
    poles: np.ndarray

    @property
    def max_real_part(self) -> float:
        return float(np.max(self.poles.real))


@dataclass
class HbPrediction:
    vs_star_exact: Optional[float]
    vs_star_simplified: float
    vs_min: float
    k: float
    phi_value: float
    verdict: HbVerdict
    unstable_k_interval: Optional[Tuple[float, float]] = None


@dataclass
class FrequencyResponse:
    omegas: np.ndarray
    responses: Dict[str, np.ndarray]  # keyed by transfer kind


@dataclass
class SweepRecord:
    omega_p: float
    k: float
    duty: Optional[float] = None
    eigs: Optional[np.ndarray] = None
    max_magnitude: Optional[float] = None
    verdict: Optional[str] = None
    avg_max_re: Optional[float] = None
    error: Optional[str] = None

    @property
    def is_gap(self) -> bool:
        return self.verdict is None


@dataclass
class SweepBoundary:
    k_lo: float
    k_hi: float
    omega_s: float
    kind: Literal["loss", "gain"]  # loss: stable below, unstable above
    dominant: complex
    verdict: str

    @property
    def k(self) -> float:
        return 0.5 * (self.k_lo + self.k_hi)

    @property
    def width(self) -> float:
        return self.k_hi - self.k_lo

    @property
    def omega_p(self) -> float:
        return self.k * self.omega_s


@dataclass
class SweepReport:
    records: List[SweepRecord] = field(default_factory=list)
    boundaries: List[SweepBoundary] = field(default_factory=list)

    @property
    def gaps(self) -> List[SweepRecord]:
        return [r for r in self.records if r.is_gap]
