# acc/run_config.py
import json
import logging
import math
from pathlib import Path
from typing import Any, Dict, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from .errors import ConfigError
from .models import ConverterParams

logger = logging.getLogger(__name__)


class _Frozen(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class ConverterConfig(_Frozen):
    """
    ACC buck converter parameters in SI units. The compensator pole is given
    either absolutely or as a fraction of the angular switching frequency.
    """
    v_s_v: float = Field(..., description="Source voltage v_s, V.")
    v_r_v: float = Field(..., description="Current reference v_r, V.")
    f_s_hz: float = Field(..., gt=0, description="Switching frequency f_s, Hz.")
    L_h: float = Field(..., gt=0, description="Inductance L, H.")
    C_f: float = Field(..., gt=0, description="Output capacitance C, F.")
    R_c_ohm: float = Field(0.0, ge=0, description="Capacitor ESR R_c, ohm.")
    R_ohm: float = Field(..., gt=0, description="Load resistance R, ohm.")
    R_s_ohm: float = Field(..., gt=0, description="Current-sense resistance R_s, ohm.")
    V_l_v: float = Field(0.0, description="Ramp valley V_l, V.")
    V_h_v: float = Field(..., description="Ramp peak V_h, V.")
    K_c: float = Field(..., description="Compensator gain K_c.")
    omega_z_rad_s: float = Field(..., gt=0, description="Compensator zero, rad/s.")
    omega_p_rad_s: Optional[float] = Field(None, gt=0, description="Compensator pole, rad/s.")
    omega_p_over_omega_s: Optional[float] = Field(
        None, gt=0, description="Compensator pole as a fraction of 2*pi*f_s.",
    )
    v_set_v: Optional[float] = Field(
        None, description="Nominal output voltage; only used for the initial duty guess.",
    )

    @model_validator(mode="after")
    def _check(self) -> "ConverterConfig":
        if (self.omega_p_rad_s is None) == (self.omega_p_over_omega_s is None):
            raise ValueError("exactly one of omega_p_rad_s / omega_p_over_omega_s is required")
        if self.V_h_v <= self.V_l_v:
            raise ValueError("V_h_v must be greater than V_l_v")
        return self

    @property
    def omega_s(self) -> float:
        return 2.0 * math.pi * self.f_s_hz

    @property
    def omega_p(self) -> float:
        if self.omega_p_rad_s is not None:
            return self.omega_p_rad_s
        return self.omega_p_over_omega_s * self.omega_s

    def to_params(self) -> ConverterParams:
        return ConverterParams(
            v_s=self.v_s_v,
            v_r=self.v_r_v,
            f_s=self.f_s_hz,
            L=self.L_h,
            C=self.C_f,
            R_c=self.R_c_ohm,
            R=self.R_ohm,
            R_s=self.R_s_ohm,
            V_l=self.V_l_v,
            V_h=self.V_h_v,
            K_c=self.K_c,
            omega_z=self.omega_z_rad_s,
            omega_p=self.omega_p,
            v_set=self.v_set_v,
        )


class SimulateOptions(_Frozen):
    n_cycles: int = Field(200, ge=1)
    samples_per_cycle: int = Field(64, ge=2)
    grid_points: int = Field(64, ge=2, description="Crossing scan grid per cycle.")
    perturbation: float = Field(0.01, ge=0, description="Additive perturbation of x0(0), fraction of state scale.")
    seed: int = Field(0, description="Seed for the perturbation direction.")
    period_tol: float = Field(1e-6, gt=0)
    start_from_orbit: bool = Field(True, description="Start at the T-periodic fixed point (plus perturbation).")


class OrbitOptions(_Frozen):
    period_multiple: int = Field(1, ge=1, le=2)
    newton_tol: float = Field(1e-10, gt=0)
    max_iter: int = Field(50, ge=1)
    waveform_samples: int = Field(128, ge=2)


class StabilityOptions(_Frozen):
    eig_tol: float = Field(1e-6, gt=0)


class SweepOptions(_Frozen):
    k_min: float = Field(0.14, gt=0, description="Lower end of omega_p / omega_s.")
    k_max: float = Field(0.81, gt=0, description="Upper end of omega_p / omega_s.")
    n_points: int = Field(68, ge=2)
    boundary_tol: float = Field(0.002, gt=0, description="Boundary bracket width, units of omega_s.")

    @model_validator(mode="after")
    def _check(self) -> "SweepOptions":
        if self.k_max <= self.k_min:
            raise ValueError("sweep range is empty: k_max must exceed k_min")
        return self


class TfOptions(_Frozen):
    n_points: int = Field(200, ge=2)
    omega_min_over_omega_s: float = Field(1e-3, gt=0)
    omega_max_over_omega_s: float = Field(0.49, gt=0, lt=0.5)

    @model_validator(mode="after")
    def _check(self) -> "TfOptions":
        if self.omega_max_over_omega_s <= self.omega_min_over_omega_s:
            raise ValueError("frequency range is empty")
        return self


class RunConfig(_Frozen):
    converter: ConverterConfig
    simulate: SimulateOptions = Field(default_factory=SimulateOptions)
    orbit: OrbitOptions = Field(default_factory=OrbitOptions)
    stability: StabilityOptions = Field(default_factory=StabilityOptions)
    sweep: SweepOptions = Field(default_factory=SweepOptions)
    tf: TfOptions = Field(default_factory=TfOptions)
    out_dir: Optional[str] = None

    def echo(self) -> Dict[str, Any]:
        return self.model_dump(mode="json")


def parse_run_config(data: Dict[str, Any]) -> RunConfig:
    try:
        return RunConfig.model_validate(data)
    except ValidationError as e:
        raise ConfigError(f"invalid run config: {e}") from e


def load_run_config(path: Union[str, Path]) -> RunConfig:
    path = Path(path)
    try:
        with open(path, "r", encoding="utf-8") as f:
            data = json.load(f)
    except OSError as e:
        raise ConfigError(f"cannot read config {path}: {e}") from e
    except json.JSONDecodeError as e:
        raise ConfigError(f"config {path} is not valid JSON: {e}") from e
    logger.debug("load_run_config: %s", path)
    return parse_run_config(data)
