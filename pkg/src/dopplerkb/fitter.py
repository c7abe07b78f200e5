"""Nonlinear least-squares estimation of line-shape parameters.

The fit model is the measured transmission

    level * exp(-depth * P(nu - nu0)) + slope * (nu - nu0)

with ``P`` a unit-peak Gaussian (paper analysis) or a Voigt profile
(cross-check).  Minimization is a damped Gauss-Newton iteration with an
analytic Jacobian: the damping factor grows tenfold whenever a step raises
the cost and shrinks tenfold on success, starting from 1e-3.  Parameters are
scaled internally (frequencies by the scan span, the slope by its inverse)
to keep the normal matrix well conditioned.

In the Gaussian variant the homogeneous width is fixed at zero: pressure
broadening is deliberately absorbed into the fitted width and removed later
by the zero-pressure extrapolation.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import wofz

from .errors import DataError, FitError
from .spectra import Spectrum

COST_TOL = 1e-12       # relative cost decrease at convergence
GRAD_TOL = 1e-10       # max-norm of the scaled gradient at convergence
MAX_ITER_DEFAULT = 200
DAMPING_START = 1e-3
DAMPING_UP = 10.0
DAMPING_DOWN = 0.1
_COND_LIMIT = 1e14

_TWO_OVER_SQRT_PI = 2.0 / math.sqrt(math.pi)


class FitModel(enum.Enum):
    """Which profile sits inside the Beer-Lambert exponential."""

    EXP_GAUSSIAN = "exp-gaussian"
    EXP_VOIGT = "exp-voigt"

    @classmethod
    def from_name(cls, name: str) -> "FitModel":
        for member in cls:
            if member.value == name:
                return member
        raise DataError(f"unknown fit model {name!r} (choose from "
                        f"{', '.join(m.value for m in cls)})")

    @property
    def param_names(self) -> tuple:
        base = ("nu0_mhz", "delta_mhz", "peak_depth", "baseline_level", "baseline_slope")
        if self is FitModel.EXP_VOIGT:
            return base + ("gamma_mhz",)
        return base


@dataclass(frozen=True)
class FitResult:
    """Best-fit parameters with covariance and residual diagnostics."""

    model: FitModel
    params: dict
    sigmas: dict
    covariance: np.ndarray
    param_names: tuple
    chi2_reduced: float
    n_iter: int
    converged: bool
    n_points: int
    source_id: str = ""
    convergence_spec: dict = field(default_factory=dict)

    @property
    def width_mhz(self) -> float:
        return self.params["delta_mhz"]

    @property
    def width_sigma_mhz(self) -> float:
        return self.sigmas["delta_mhz"]


def _profile_and_derivs(u: np.ndarray, delta: float, gamma: float, model: FitModel):
    """Profile P(u) plus dP/du, dP/ddelta and (Voigt only) dP/dgamma."""
    if model is FitModel.EXP_GAUSSIAN:
        p = np.exp(-((u / delta) ** 2))
        dp_du = p * (-2.0 * u / delta**2)
        dp_ddelta = p * (2.0 * u**2 / delta**3)
        return p, dp_du, dp_ddelta, None
    z = (u + 1j * abs(gamma)) / delta
    w = wofz(z)
    wprime = -2.0 * z * w + 1j * _TWO_OVER_SQRT_PI
    p = w.real
    dp_du = wprime.real / delta
    dp_ddelta = (-(z * wprime).real) / delta
    dp_dgamma = (1j * wprime).real / delta
    if gamma < 0:
        dp_dgamma = -dp_dgamma
    return p, dp_du, dp_ddelta, dp_dgamma


def model_transmission(offsets_mhz: np.ndarray, params: dict, model: FitModel) -> np.ndarray:
    """Evaluate the fit model on a grid of offsets from the nominal center."""
    u = np.asarray(offsets_mhz, dtype=float) - params["nu0_mhz"]
    prof, _, _, _ = _profile_and_derivs(
        u, params["delta_mhz"], params.get("gamma_mhz", 0.0), model
    )
    return (params["baseline_level"] * np.exp(-params["peak_depth"] * prof)
            + params["baseline_slope"] * u)


def jacobian(offsets_mhz: np.ndarray, params: dict, model: FitModel) -> np.ndarray:
    """Analytic partial derivatives of the model, one column per parameter
    in ``model.param_names`` order."""
    x = np.asarray(offsets_mhz, dtype=float)
    u = x - params["nu0_mhz"]
    delta = params["delta_mhz"]
    depth = params["peak_depth"]
    level = params["baseline_level"]
    slope = params["baseline_slope"]
    gamma = params.get("gamma_mhz", 0.0)

    prof, dp_du, dp_ddelta, dp_dgamma = _profile_and_derivs(u, delta, gamma, model)
    atten = np.exp(-depth * prof)

    cols = [
        level * depth * dp_du * atten - slope,   # d/d nu0 (du/dnu0 = -1)
        -level * depth * dp_ddelta * atten,      # d/d delta
        -level * prof * atten,                   # d/d depth
        atten,                                   # d/d level
        u,                                       # d/d slope
    ]
    if model is FitModel.EXP_VOIGT:
        cols.append(-level * depth * dp_dgamma * atten)  # d/d gamma
    return np.column_stack(cols)


def initial_guess(spectrum: Spectrum) -> dict:
    """Direct parameter estimates from the raw samples.

    Center from the grid position of minimum transmission (which must lie
    strictly inside the scan), baseline from the outer 10% of samples on each
    side, depth from the log of the baseline-to-minimum ratio, width from the
    half-width of the region where the optical depth exceeds 1/e of its peak,
    slope from the difference of the two edge means.
    """
    x = spectrum.freq_offset_mhz
    t = spectrum.transmission
    n = x.size
    if n < 16:
        raise DataError(f"spectrum too short for a fit ({n} points, need >= 16)")

    i_min = int(np.argmin(t))
    if i_min == 0 or i_min == n - 1:
        raise DataError("line not in scan window")

    k = max(2, n // 10)
    left = float(np.mean(t[:k]))
    right = float(np.mean(t[-k:]))
    level = 0.5 * (left + right)
    t_min = float(t[i_min])
    if not (t_min > 0.0) or t_min >= level:
        raise DataError("line not in scan window")
    depth = math.log(level / t_min)

    # Region where transmission < level * exp(-depth/e), i.e. optical depth
    # above 1/e of its peak; its half-width estimates the 1/e half-width.
    threshold = level * math.exp(-depth / math.e)
    lo = i_min
    while lo > 0 and t[lo - 1] < threshold:
        lo -= 1
    hi = i_min
    while hi < n - 1 and t[hi + 1] < threshold:
        hi += 1
    if lo == 0 or hi == n - 1:
        raise DataError("line not in scan window")
    delta = 0.5 * (x[hi] - x[lo])
    if delta <= 0:
        delta = spectrum.meta.step_mhz

    x_left = float(np.mean(x[:k]))
    x_right = float(np.mean(x[-k:]))
    slope = (right - left) / (x_right - x_left)

    return {
        "nu0_mhz": float(x[i_min]),
        "delta_mhz": float(delta),
        "peak_depth": depth,
        "baseline_level": level,
        "baseline_slope": slope,
    }


def _scales(names: tuple, span: float) -> np.ndarray:
    per_name = {
        "nu0_mhz": span,
        "delta_mhz": span,
        "peak_depth": 1.0,
        "baseline_level": 1.0,
        "baseline_slope": 1.0 / span,
        "gamma_mhz": span,
    }
    return np.array([per_name[n] for n in names])


def fit_spectrum(
    spectrum: Spectrum,
    model: FitModel = FitModel.EXP_GAUSSIAN,
    init: dict | None = None,
    *,
    max_iter: int = MAX_ITER_DEFAULT,
    source_id: str = "",
) -> FitResult:
    """Least-squares fit of one spectrum.

    Returns a flagged (``converged=False``) result rather than raising when
    the iteration runs out; raises ``FitError`` on a degenerate problem
    (singular normal matrix, e.g. vanishing depth).
    """
    names = model.param_names
    x = spectrum.freq_offset_mhz
    y = spectrum.transmission
    if x.size <= len(names):
        raise DataError("spectrum has fewer points than fit parameters")

    params = dict(init) if init is not None else initial_guess(spectrum)
    if model is FitModel.EXP_VOIGT and "gamma_mhz" not in params:
        params["gamma_mhz"] = params["delta_mhz"] / 100.0
    missing = [n for n in names if n not in params]
    if missing:
        raise DataError(f"initial guess missing parameters: {missing}")
    if not all(math.isfinite(params[n]) for n in names):
        raise DataError("initial guess contains non-finite parameters")
    if params["delta_mhz"] <= 0 or params["baseline_level"] <= 0:
        raise DataError("initial guess needs positive width and baseline level")

    theta = np.array([params[n] for n in names], dtype=float)
    scale = _scales(names, float(x[-1] - x[0]))

    def to_dict(vec):
        return dict(zip(names, (float(v) for v in vec)))

    def cost_of(vec):
        r = y - model_transmission(x, to_dict(vec), model)
        return float(r @ r), r

    cost, resid = cost_of(theta)
    lam = DAMPING_START
    converged = False
    n_iter = 0
    i_delta = names.index("delta_mhz")
    i_level = names.index("baseline_level")
    i_gamma = names.index("gamma_mhz") if "gamma_mhz" in names else None

    while n_iter < max_iter:
        n_iter += 1
        js = jacobian(x, to_dict(theta), model) * scale[None, :]
        grad = js.T @ resid
        if np.max(np.abs(grad)) < GRAD_TOL:
            converged = True
            break
        hess = js.T @ js
        if not np.all(np.isfinite(hess)) or np.linalg.cond(hess) > _COND_LIMIT:
            raise FitError("degenerate fit: singular normal matrix")
        damped = hess + lam * np.diag(np.maximum(np.diag(hess), 1e-300))
        try:
            step = np.linalg.solve(damped, grad)
        except np.linalg.LinAlgError:
            raise FitError("degenerate fit: singular normal matrix") from None
        candidate = theta + step * scale
        if i_gamma is not None:
            candidate[i_gamma] = abs(candidate[i_gamma])
        if candidate[i_delta] <= 0 or candidate[i_level] <= 0:
            lam *= DAMPING_UP
            continue
        new_cost, new_resid = cost_of(candidate)
        if new_cost <= cost:
            drop = cost - new_cost
            theta, cost, resid = candidate, new_cost, new_resid
            lam = max(lam * DAMPING_DOWN, 1e-15)
            if cost == 0.0 or drop < COST_TOL * cost:
                converged = True
                break
        else:
            lam *= DAMPING_UP

    dof = x.size - len(names)
    final = to_dict(theta)
    js = jacobian(x, final, model) * scale[None, :]
    hess = js.T @ js
    if not np.all(np.isfinite(hess)) or np.linalg.cond(hess) > _COND_LIMIT:
        raise FitError("degenerate fit: singular normal matrix")
    resid_var = cost / dof
    cov_scaled = resid_var * np.linalg.inv(hess)
    cov = cov_scaled * np.outer(scale, scale)
    sigmas = {n: float(math.sqrt(max(cov[i, i], 0.0))) for i, n in enumerate(names)}

    noise = spectrum.noise_sigma_estimate() * final["baseline_level"]
    chi2_reduced = resid_var / noise**2 if noise > 0 else resid_var

    return FitResult(
        model=model,
        params=final,
        sigmas=sigmas,
        covariance=cov,
        param_names=names,
        chi2_reduced=float(chi2_reduced),
        n_iter=n_iter,
        converged=converged,
        n_points=int(x.size),
        source_id=source_id,
        convergence_spec={
            "cost_tol": COST_TOL,
            "grad_tol": GRAD_TOL,
            "max_iter": max_iter,
            "damping_start": DAMPING_START,
            "weighting": "uniform",
        },
    )


def fit_series(spectra, model: FitModel = FitModel.EXP_GAUSSIAN, *,
               max_iter: int = MAX_ITER_DEFAULT, source_ids=None) -> list:
    """Fit a batch of spectra; results are independent per spectrum."""
    ids = source_ids if source_ids is not None else ["" for _ in spectra]
    return [
        fit_spectrum(s, model, max_iter=max_iter, source_id=sid)
        for s, sid in zip(spectra, ids)
    ]
