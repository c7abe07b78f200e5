"""Spectrum data containers shared by the simulator, the fitter and file IO."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

SCHEMA_VERSION = 1


@dataclass(frozen=True)
class SpectrumMeta:
    """Acquisition metadata carried with every spectrum."""

    transition_label: str
    nu0_mhz: float
    temperature_k: float
    temperature_sigma_k: float
    pressure_pa: float
    cell_length_m: float
    span_mhz: float
    step_mhz: float
    time_constant_ms: float
    snr: float  # math.inf for noiseless data
    seed: int
    schema_version: int = SCHEMA_VERSION

    def __post_init__(self):
        if not (self.nu0_mhz > 0):
            raise ValueError("nu0 must be positive")
        if not (self.temperature_k > 0):
            raise ValueError("temperature must be positive")
        if self.temperature_sigma_k < 0:
            raise ValueError("temperature sigma must be >= 0")


@dataclass(frozen=True)
class Spectrum:
    """A frequency grid (offsets from nu0, MHz) plus transmission samples."""

    freq_offset_mhz: np.ndarray
    transmission: np.ndarray
    meta: SpectrumMeta

    def __post_init__(self):
        f = np.asarray(self.freq_offset_mhz, dtype=float)
        t = np.asarray(self.transmission, dtype=float)
        if f.ndim != 1 or f.shape != t.shape:
            raise ValueError("frequency and transmission arrays must be 1-d and equal length")
        if f.size < 2:
            raise ValueError("a spectrum needs at least 2 samples")
        if not np.all(np.diff(f) > 0):
            raise ValueError("frequency grid must be strictly increasing")
        if not (np.all(np.isfinite(f)) and np.all(np.isfinite(t))):
            raise ValueError("spectrum samples must be finite")
        object.__setattr__(self, "freq_offset_mhz", f)
        object.__setattr__(self, "transmission", t)

    @property
    def n_points(self) -> int:
        return int(self.freq_offset_mhz.size)

    def with_transmission(self, t: np.ndarray) -> "Spectrum":
        return replace(self, transmission=np.asarray(t, dtype=float))

    def noise_sigma_estimate(self) -> float:
        """Nominal per-point noise from the recorded S/N (inf S/N gives 0)."""
        if math.isinf(self.meta.snr):
            return 0.0
        return 1.0 / self.meta.snr
