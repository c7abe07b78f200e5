"""Campaign configuration: one JSON file drives simulate/fit/series/kb.

Validation is strict: unknown keys anywhere are rejected so a typo cannot
silently fall back to a default.  ``snr: null`` means noiseless.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

from . import constants
from .errors import DataError
from .fitter import FitModel
from .lineshape import Transition
from .simulator import (
    DEFAULT_ABSORPTION_DEPTH_PA,
    DEFAULT_CELL_LENGTH_M,
    DEFAULT_PRESSURE_BROADENING_MHZ_PA,
    GasConditions,
    ScanConfig,
)

_TRANSITION_KEYS = {"label", "nu0_mhz", "mass_u"}
_SCAN_KEYS = {"span_mhz", "step_mhz", "time_constant_ms"}
_TOP_KEYS = {
    "transition", "scan", "pressures_pa", "replicas", "snr", "seed",
    "temperature_k", "temperature_sigma_k",
    "pressure_broadening_mhz_per_pa", "absorption_depth_per_pa",
    "cell_length_m", "kb_true", "model", "slope_threshold_per_mhz",
    "mass_sigma_rel", "nu_sigma_rel", "hyperfine_file",
}


@dataclass(frozen=True)
class CampaignConfig:
    pressures_pa: tuple = (0.2, 0.6, 1.2, 2.0, 3.2, 5.0, 7.5, 10.0)
    replicas: int = 1
    snr: float = 1000.0  # math.inf = noiseless
    seed: int = 20061215
    temperature_k: float = constants.CELL_TEMPERATURE_K
    temperature_sigma_k: float = constants.CELL_TEMPERATURE_SIGMA_K
    pressure_broadening_mhz_per_pa: float = DEFAULT_PRESSURE_BROADENING_MHZ_PA
    absorption_depth_per_pa: float = DEFAULT_ABSORPTION_DEPTH_PA
    cell_length_m: float = DEFAULT_CELL_LENGTH_M
    kb_true: float = constants.KB_CODATA_2002
    model: str = FitModel.EXP_GAUSSIAN.value
    slope_threshold_per_mhz: float | None = None  # None = 3x median slope sigma
    mass_sigma_rel: float = constants.MASS_SIGMA_REL_DEFAULT
    nu_sigma_rel: float = constants.FREQUENCY_SIGMA_REL_DEFAULT
    hyperfine_file: str | None = None
    transition_label: str = constants.NH3_LINE_LABEL
    transition_nu0_mhz: float = constants.NH3_LINE_FREQ_MHZ
    transition_mass_u: float = constants.NH3_MASS_U
    scan_span_mhz: float = 250.0
    scan_step_mhz: float = 0.5
    scan_time_constant_ms: float = 20.0

    def __post_init__(self):
        if len(self.pressures_pa) == 0:
            raise DataError("config: pressures_pa must not be empty")
        if self.replicas < 1:
            raise DataError("config: replicas must be >= 1")
        if not (self.snr > 0):
            raise DataError("config: snr must be positive or null for noiseless")
        FitModel.from_name(self.model)
        if self.slope_threshold_per_mhz is not None and self.slope_threshold_per_mhz <= 0:
            raise DataError("config: slope_threshold_per_mhz must be positive or null")

    def transition(self) -> Transition:
        return Transition.from_mass_u(
            self.transition_nu0_mhz, self.transition_mass_u, self.transition_label
        )

    def scan(self) -> ScanConfig:
        return ScanConfig(
            center_mhz=self.transition_nu0_mhz,
            span_mhz=self.scan_span_mhz,
            step_mhz=self.scan_step_mhz,
            time_constant_ms=self.scan_time_constant_ms,
            snr=self.snr,
        )

    def conditions(self, pressure_pa: float) -> GasConditions:
        return GasConditions(
            pressure_pa=pressure_pa,
            temperature_k=self.temperature_k,
            pressure_broadening_mhz_per_pa=self.pressure_broadening_mhz_per_pa,
            absorption_depth_per_pa=self.absorption_depth_per_pa,
        )

    def fit_model(self) -> FitModel:
        return FitModel.from_name(self.model)

    def to_dict(self) -> dict:
        """JSON-ready dict (None stands in for an infinite snr)."""
        return {
            "transition": {
                "label": self.transition_label,
                "nu0_mhz": self.transition_nu0_mhz,
                "mass_u": self.transition_mass_u,
            },
            "scan": {
                "span_mhz": self.scan_span_mhz,
                "step_mhz": self.scan_step_mhz,
                "time_constant_ms": self.scan_time_constant_ms,
            },
            "pressures_pa": list(self.pressures_pa),
            "replicas": self.replicas,
            "snr": None if math.isinf(self.snr) else self.snr,
            "seed": self.seed,
            "temperature_k": self.temperature_k,
            "temperature_sigma_k": self.temperature_sigma_k,
            "pressure_broadening_mhz_per_pa": self.pressure_broadening_mhz_per_pa,
            "absorption_depth_per_pa": self.absorption_depth_per_pa,
            "cell_length_m": self.cell_length_m,
            "kb_true": self.kb_true,
            "model": self.model,
            "slope_threshold_per_mhz": self.slope_threshold_per_mhz,
            "mass_sigma_rel": self.mass_sigma_rel,
            "nu_sigma_rel": self.nu_sigma_rel,
            "hyperfine_file": self.hyperfine_file,
        }


def _reject_unknown(given: dict, allowed: set, where: str) -> None:
    unknown = set(given) - allowed
    if unknown:
        raise DataError(f"config: unknown key(s) in {where}: {', '.join(sorted(unknown))}")


def config_from_dict(raw: dict) -> CampaignConfig:
    if not isinstance(raw, dict):
        raise DataError("config: top level must be a JSON object")
    _reject_unknown(raw, _TOP_KEYS, "top level")

    kwargs: dict = {}
    transition = raw.get("transition", {})
    if transition:
        _reject_unknown(transition, _TRANSITION_KEYS, "'transition'")
        if "label" in transition:
            kwargs["transition_label"] = str(transition["label"])
        if "nu0_mhz" in transition:
            kwargs["transition_nu0_mhz"] = float(transition["nu0_mhz"])
        if "mass_u" in transition:
            kwargs["transition_mass_u"] = float(transition["mass_u"])
    scan = raw.get("scan", {})
    if scan:
        _reject_unknown(scan, _SCAN_KEYS, "'scan'")
        if "span_mhz" in scan:
            kwargs["scan_span_mhz"] = float(scan["span_mhz"])
        if "step_mhz" in scan:
            kwargs["scan_step_mhz"] = float(scan["step_mhz"])
        if "time_constant_ms" in scan:
            kwargs["scan_time_constant_ms"] = float(scan["time_constant_ms"])

    simple = {
        "pressures_pa": lambda v: tuple(float(p) for p in v),
        "replicas": int,
        "seed": int,
        "temperature_k": float,
        "temperature_sigma_k": float,
        "pressure_broadening_mhz_per_pa": float,
        "absorption_depth_per_pa": float,
        "cell_length_m": float,
        "kb_true": float,
        "model": str,
        "mass_sigma_rel": float,
        "nu_sigma_rel": float,
    }
    for key, convert in simple.items():
        if key in raw:
            try:
                kwargs[key] = convert(raw[key])
            except (TypeError, ValueError):
                raise DataError(f"config: bad value for {key!r}: {raw[key]!r}") from None
    if "snr" in raw:
        kwargs["snr"] = math.inf if raw["snr"] is None else float(raw["snr"])
    if "slope_threshold_per_mhz" in raw:
        v = raw["slope_threshold_per_mhz"]
        kwargs["slope_threshold_per_mhz"] = None if v is None else float(v)
    if "hyperfine_file" in raw:
        v = raw["hyperfine_file"]
        kwargs["hyperfine_file"] = None if v is None else str(v)

    try:
        return CampaignConfig(**kwargs)
    except (ValueError, TypeError) as exc:
        raise DataError(f"config: {exc}") from None


def load_config(path) -> CampaignConfig:
    try:
        raw = json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise DataError(f"config file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise DataError(f"{path}: invalid JSON ({exc})") from None
    return config_from_dict(raw)
