"""Command-line pipeline: simulate -> fit -> series -> kb, plus a standalone
budget calculator and a reproduction of the published determination.

Stages talk to each other through files only.  Every file-writing run also
writes a manifest (config hash, seed, package and library versions, constants
snapshot) sufficient to reproduce it bit-identically.

Exit codes: 0 success, 1 usage error, 2 data error, 3 non-convergence.
"""

from __future__ import annotations

import dataclasses
import math
import sys
from pathlib import Path

import click

from . import constants
from .absorption import HyperfineStructure
from .boltzmann import (
    BoltzmannResult,
    TemperatureReading,
    format_budget_table,
    kb_from_width,
    uncertainty_budget,
)
from .config import CampaignConfig, load_config
from .errors import DataError, FitError
from .extrapolation import (
    default_slope_threshold,
    filter_by_slope,
    points_from_fit_results,
    zero_pressure_width,
)
from .fileio import (
    read_fit_records,
    read_regression_summary,
    read_spectrum,
    write_boltzmann_record,
    write_fit_records,
    write_manifest,
    write_regression_summary,
    write_spectrum,
    write_width_table,
)
from .fitter import FitModel, fit_spectrum
from .lineshape import Transition
from .simulator import spawn_seeds, synth_spectrum

# Published values this pipeline is benchmarked against.
PAPER_DELTA_D_MHZ = 49.8831
PAPER_DELTA_D_SIGMA_MHZ = 0.0047
PAPER_DELTA_D_REL = 9.5e-5
PAPER_KB = 1.38065e-23
PAPER_KB_SIGMA = 2.6e-27
PAPER_KB_REL = 1.9e-4
PAPER_TEMPERATURE_REL = 7e-5


@click.group()
def cli():
    """Doppler-broadening thermometry toolkit."""


def _model_option():
    return click.option(
        "--model", type=click.Choice([m.value for m in FitModel]),
        default=None, help="Fit model (default: from config, else exp-gaussian)."
    )


@cli.command()
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False),
              required=True, help="Campaign configuration (JSON).")
@click.option("--out", "out_dir", type=click.Path(file_okay=False), required=True,
              help="Output directory for spectrum files.")
@click.option("--seed", type=int, default=None, help="Override the config seed.")
@click.option("--no-noise", is_flag=True, help="Disable detection noise.")
def simulate(config_path, out_dir, seed, no_noise):
    """Write a synthetic spectrum series (one file per pressure and replica)."""
    cfg = load_config(config_path)
    if seed is not None:
        cfg = dataclasses.replace(cfg, seed=seed)
    if no_noise:
        cfg = dataclasses.replace(cfg, snr=math.inf)

    transition = cfg.transition()
    scan = cfg.scan()
    hyperfine = None
    if cfg.hyperfine_file is not None:
        hyperfine = HyperfineStructure.from_file(cfg.hyperfine_file)

    out = Path(out_dir)
    jobs = [(pi, p, r) for pi, p in enumerate(cfg.pressures_pa) for r in range(cfg.replicas)]
    seeds = spawn_seeds(cfg.seed, len(jobs))
    for (pi, pressure, replica), child_seed in zip(jobs, seeds):
        spectrum, _ = synth_spectrum(
            transition, cfg.conditions(pressure), scan, cfg.kb_true, child_seed,
            hyperfine=hyperfine,
            temperature_sigma_k=cfg.temperature_sigma_k,
            cell_length_m=cfg.cell_length_m,
        )
        write_spectrum(spectrum, out / f"spectrum_p{pi:02d}_r{replica:03d}.txt")
    write_manifest(out / "manifest.json", "simulate", cfg.to_dict(), cfg.seed)
    click.echo(f"simulate: wrote {len(jobs)} spectra to {out}")


@cli.command("fit")
@click.argument("spectra", nargs=-1, type=click.Path(exists=True), required=True)
@click.option("--out", "out_path", type=click.Path(dir_okay=False), required=True,
              help="Output fit-record stream (JSON lines).")
@_model_option()
@click.option("--max-iter", type=int, default=200, show_default=True,
              help="Iteration budget per spectrum.")
def fit_command(spectra, out_path, model, max_iter):
    """Fit every spectrum file and write one record per spectrum."""
    paths = _collect_spectrum_paths(spectra)
    fit_model = FitModel.from_name(model) if model else FitModel.EXP_GAUSSIAN
    results = []
    for path in paths:
        spectrum = read_spectrum(path)
        results.append(
            fit_spectrum(spectrum, fit_model, max_iter=max_iter, source_id=path.name)
        )
    write_fit_records(results, out_path)
    write_manifest(Path(out_path).with_suffix(".manifest.json"), "fit",
                   {"spectra": [p.name for p in paths], "model": fit_model.value,
                    "max_iter": max_iter}, None)
    n_bad = sum(1 for r in results if not r.converged)
    click.echo(f"fit: {len(results)} spectra -> {out_path} ({n_bad} unconverged)")
    if n_bad:
        raise FitError(f"{n_bad} of {len(results)} fits did not converge")


@cli.command()
@click.option("--fits", "fits_path", type=click.Path(exists=True, dir_okay=False),
              required=True, help="Fit-record stream from the fit stage.")
@click.option("--out-summary", type=click.Path(dir_okay=False), required=True)
@click.option("--out-table", type=click.Path(dir_okay=False), required=True,
              help="Plot-ready (amplitude, width, sigma) table.")
@click.option("--threshold-slope", type=float, default=None,
              help="Slope filter threshold per MHz (default: 3x median slope sigma).")
def series(fits_path, out_summary, out_table, threshold_slope):
    """Filter fitted spectra by baseline slope and extrapolate to zero pressure."""
    results = read_fit_records(fits_path)
    threshold = threshold_slope if threshold_slope is not None \
        else default_slope_threshold(results)
    points = points_from_fit_results(results)
    if not points:
        raise DataError("no converged fits to extrapolate")
    kept, rejected = filter_by_slope(points, threshold)
    outcome = zero_pressure_width(kept, n_rejected=len(rejected))
    write_regression_summary(outcome, threshold, out_summary)
    write_width_table(kept, rejected, out_table)
    write_manifest(Path(out_summary).with_suffix(".manifest.json"), "series",
                   {"fits": str(fits_path), "threshold_slope_per_mhz": threshold}, None)
    click.echo(
        f"series: delta_d = {outcome.delta_d_mhz:.6f} +/- {outcome.delta_d_sigma_mhz:.6f} MHz "
        f"(chi2_red {outcome.chi2_reduced:.3f}, used {outcome.n_used}, "
        f"rejected {outcome.n_rejected})"
    )


@cli.command()
@click.option("--summary", "summary_path", type=click.Path(exists=True, dir_okay=False),
              required=True, help="Regression summary from the series stage.")
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False),
              default=None, help="Campaign config for temperature/transition inputs.")
@click.option("--out", "out_path", type=click.Path(dir_okay=False), default=None)
def kb(summary_path, config_path, out_path):
    """Convert an extrapolated width into k_B with its uncertainty budget."""
    summary = read_regression_summary(summary_path)
    cfg = load_config(config_path) if config_path else CampaignConfig()
    result = uncertainty_budget(
        summary["delta_d_mhz"], summary["delta_d_sigma_mhz"],
        cfg.transition(),
        TemperatureReading(cfg.temperature_k, cfg.temperature_sigma_k),
        mass_sigma_rel=cfg.mass_sigma_rel,
        nu_sigma_rel=cfg.nu_sigma_rel,
    )
    click.echo(format_budget_table(result))
    if out_path:
        write_boltzmann_record(result, out_path)
        write_manifest(Path(out_path).with_suffix(".manifest.json"), "kb",
                       {"summary": str(summary_path), "config": cfg.to_dict()}, None)


@cli.command()
@click.option("--delta-d-mhz", type=float, required=True)
@click.option("--delta-d-sigma-mhz", type=float, required=True)
@click.option("--temperature-k", type=float, default=constants.CELL_TEMPERATURE_K,
              show_default=True)
@click.option("--temperature-sigma-k", type=float,
              default=constants.CELL_TEMPERATURE_SIGMA_K, show_default=True)
@click.option("--mass-sigma-rel", type=float, default=constants.MASS_SIGMA_REL_DEFAULT)
@click.option("--nu-sigma-rel", type=float, default=constants.FREQUENCY_SIGMA_REL_DEFAULT)
@click.option("--out", "out_path", type=click.Path(dir_okay=False), default=None)
def budget(delta_d_mhz, delta_d_sigma_mhz, temperature_k, temperature_sigma_k,
           mass_sigma_rel, nu_sigma_rel, out_path):
    """Uncertainty budget for explicit width/temperature inputs (NH3 line)."""
    result = uncertainty_budget(
        delta_d_mhz, delta_d_sigma_mhz, Transition.nh3(),
        TemperatureReading(temperature_k, temperature_sigma_k),
        mass_sigma_rel=mass_sigma_rel, nu_sigma_rel=nu_sigma_rel,
    )
    click.echo(format_budget_table(result))
    if out_path:
        write_boltzmann_record(result, out_path)
        write_manifest(Path(out_path).with_suffix(".manifest.json"), "budget",
                       {"delta_d_mhz": delta_d_mhz,
                        "delta_d_sigma_mhz": delta_d_sigma_mhz}, None)


@cli.command("reproduce-paper")
def reproduce_paper():
    """Recompute k_B from the published width and compare with the published value."""
    transition = Transition.nh3()
    temperature = TemperatureReading(constants.CELL_TEMPERATURE_K,
                                     PAPER_TEMPERATURE_REL * constants.CELL_TEMPERATURE_K)
    result = uncertainty_budget(
        PAPER_DELTA_D_MHZ, PAPER_DELTA_D_REL * PAPER_DELTA_D_MHZ,
        transition, temperature,
    )
    kb_value = result.kb
    rel_diff = kb_value / PAPER_KB - 1.0
    click.echo(f"inputs: delta_D = {PAPER_DELTA_D_MHZ} MHz ({PAPER_DELTA_D_REL:.1e}), "
               f"nu = {transition.nu0_mhz:.0f} MHz, T = {temperature.value_k} K "
               f"({PAPER_TEMPERATURE_REL:.0e}), m = {transition.mass_u:.7f} u")
    click.echo(format_budget_table(result))
    click.echo(f"published: k_B = {PAPER_KB:.5e} +/- {PAPER_KB_SIGMA:.1e} J/K, "
               f"relative {PAPER_KB_REL:.1e}")
    click.echo(f"agreement: computed/published - 1 = {rel_diff:+.2e} "
               f"({abs(kb_value - PAPER_KB) / PAPER_KB_SIGMA:.2f} published sigma)")


def _collect_spectrum_paths(args) -> list:
    paths = []
    for arg in args:
        p = Path(arg)
        if p.is_dir():
            paths.extend(sorted(p.glob("spectrum_*.txt")))
        else:
            paths.append(p)
    if not paths:
        raise DataError("no spectrum files found")
    return paths


def main(argv=None) -> int:
    """Entry point with the documented exit-code contract."""
    try:
        cli.main(args=argv, standalone_mode=False)
        return 0
    except click.exceptions.Exit as exc:  # --help and friends
        return int(exc.exit_code)
    except click.UsageError as exc:
        print(f"error: usage: {exc.format_message()}", file=sys.stderr)
        return 1
    except click.ClickException as exc:
        print(f"error: usage: {exc.format_message()}", file=sys.stderr)
        return 1
    except DataError as exc:
        print(f"error: data: {exc}", file=sys.stderr)
        return 2
    except FitError as exc:
        print(f"error: fit: {exc}", file=sys.stderr)
        return 3
    except Exception as exc:  # keep failures one-line and machine-parsable
        print(f"error: internal: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
