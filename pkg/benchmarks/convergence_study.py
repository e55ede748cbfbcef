"""Convergence study for the pinned scheme; writes tests/fixtures/convergence_study.json.

    python benchmarks/convergence_study.py [--output PATH]

Plane-wave errors are max-over-cells differences against the exact solution
(continuous dispersion) and against the exact solution of the spatially
discretized system (stencil wavenumber), which isolates the time error.
"""
import argparse
import json
import pathlib
from dataclasses import replace

import numpy as np

from diracmaxwell.wave import PlaneWave, SimConfig, analytic_plane_wave, dispersion_omega, run

DEFAULT_OUT = pathlib.Path(__file__).resolve().parents[1] / "tests" / "fixtures" / "convergence_study.json"


def plane_wave_error(n_cells, mass_omega, k_mode=2, periods=4.0):
    """(error vs exact solution, error vs semi-discrete solution), each run from its own data."""
    base = SimConfig(n_cells=n_cells, mass_omega=mass_omega, initial=PlaneWave(k_mode))
    omega = dispersion_omega(base.wavenumber(), mass_omega)
    t_end = periods * 2 * np.pi / omega
    steps = int(np.ceil(t_end / base.dt))
    cfg = replace(base, dt=t_end / steps, n_steps=steps)
    out = []
    for semi in (False, True):
        start = analytic_plane_wave(cfg, 0.0, semi_discrete=semi).grid
        final, _ = run(replace(cfg, initial=start))
        ref = analytic_plane_wave(cfg, final.t, semi_discrete=semi).grid
        out.append(float(np.max(np.abs(final.grid - ref))))
    return tuple(out)


def dt_refinement(n_cells=64, mass_omega=1.0, k_mode=3, t_end=2.0, factors=(1, 2, 4)):
    """Time-step halving against the semi-discrete solution, started from it."""
    base = SimConfig(n_cells=n_cells, mass_omega=mass_omega, initial=PlaneWave(k_mode))
    start = analytic_plane_wave(base, 0.0, semi_discrete=True).grid
    errors = []
    for f in factors:
        steps = int(np.ceil(t_end / (base.dt / f)))
        cfg = replace(base, dt=t_end / steps, n_steps=steps, initial=start)
        final, _ = run(cfg)
        ref = analytic_plane_wave(replace(cfg, initial=base.initial), final.t, semi_discrete=True).grid
        errors.append(float(np.max(np.abs(final.grid - ref))))
    return errors


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--output", type=pathlib.Path, default=DEFAULT_OUT)
    args = p.parse_args(argv)
    study = {"scheme": {"time": "rk4", "space": "centered-4th-order-periodic", "cfl": 0.5}}
    rows = []
    for mass in (0.0, 1.0):
        for n in (64, 128, 256, 512):
            full, semi = plane_wave_error(n, mass)
            rows.append({"n_cells": n, "mass_omega": mass, "error_exact": full, "error_semi_discrete": semi})
    study["plane_wave_4_periods_k2"] = rows
    errs = dt_refinement()
    study["dt_halving"] = {"n_cells": 64, "mass_omega": 1.0, "k_mode": 3, "t_end": 2.0,
                           "errors": errs, "ratios": [errs[i] / errs[i + 1] for i in range(len(errs) - 1)]}
    study["pinned"] = {
        "plane_wave_n256_bound": 5e-6,
        "plane_wave_semi_discrete_bound": 1e-6,
        "dt_ratio_min": 12.0,
        "dt_ratio_max": 20.0,
    }
    args.output.parent.mkdir(parents=True, exist_ok=True)
    args.output.write_text(json.dumps(study, indent=2) + "\n")
    for r in rows:
        print("n=%4d  w_m=%.1f  exact %.3e  semi-discrete %.3e" % (
            r["n_cells"], r["mass_omega"], r["error_exact"], r["error_semi_discrete"]))
    print("dt halving errors", ["%.3e" % e for e in errs], "ratios", ["%.2f" % r for r in study["dt_halving"]["ratios"]])


if __name__ == "__main__":
    main()
