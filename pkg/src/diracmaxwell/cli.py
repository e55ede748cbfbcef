"""Command-line entry point: ``diracmaxwell <subcommand> [options]``.

Exit codes: 0 success, 1 a verification failed, 2 usage error.
"""
from __future__ import annotations

import argparse
import datetime
import json
import sys
from dataclasses import replace

import numpy as np

from . import __version__
from . import checks as ck
from . import expander as ex
from .bilinears import invariant_report
from .errors import DiracMaxwellError, InsufficientSamples, NoConvergence, NumericalBlowup
from .expander import EnergySign, EquationSpec, Side, TimeSign
from .lagrangian import (SelfActionParams, fierz_both_sides, lagrangian_report,
                         nonlinear_fixed_point)
from .matrices import Axis, Orientation, Representation
from .spinors import FieldFrame, WaveKind, field_to_bispinor, from_pairs, random_frames, pack_fields, to_pairs

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError("%s: error: %s" % (self.prog, message))


def _add_common(p, formats=("text", "json")):
    p.add_argument("--format", choices=formats, default=formats[0])
    p.add_argument("--output", metavar="PATH", help="write to PATH instead of stdout")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--no-timestamp", action="store_true", help="omit the generation timestamp")


def _add_spec(p, mass_default=1.0):
    p.add_argument("--energy-sign", choices=[e.value for e in EnergySign], default="minus")
    p.add_argument("--side", choices=[s.value for s in Side], default="column")
    p.add_argument("--axis", choices=[a.value for a in Axis], default="y")
    p.add_argument("--orientation", choices=[o.value for o in Orientation], default="negative")
    p.add_argument("--kind", choices=[k.value for k in WaveKind], default="advanced")
    p.add_argument("--mass-omega", type=float, default=mass_default)
    p.add_argument("--time-sign", choices=[t.value for t in TimeSign], default="plus_i")


def _add_self_action(p):
    p.add_argument("--zeta", type=float, default=1.0)
    p.add_argument("--r-s", type=float, default=1.0)
    p.add_argument("--hbar", type=float, default=1.0)
    p.add_argument("--c", type=float, default=1.0)
    p.add_argument("--energy-scale", type=float, default=1.0)


def _spec(a, **over) -> EquationSpec:
    kw = dict(energy_sign=a.energy_sign, side=a.side, axis=a.axis, orientation=a.orientation,
              kind=a.kind, mass_omega=a.mass_omega, time_sign=a.time_sign)
    kw.update(over)
    return EquationSpec(**kw)


def _params(a, omega_s=0.0) -> SelfActionParams:
    return SelfActionParams(zeta=a.zeta, r_s=a.r_s, omega_s=omega_s, hbar=a.hbar, c=a.c,
                            energy_scale=a.energy_scale)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="diracmaxwell", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("expand", help="expand a matrix equation into component PDEs")
    _add_spec(p)
    p.add_argument("--representation", choices=[r.value for r in Representation], default="standard",
                   help="primed expands in the primed set and maps back through S")
    _add_common(p)

    p = sub.add_parser("verify", help="compare expansions against the reference systems")
    p.add_argument("--all", action="store_true", help="run the full verification matrix")
    p.add_argument("--reference", choices=ex.REFERENCE_NAMES,
                   help="compare the system selected by the flags with one reference")
    _add_spec(p)
    p.add_argument("--golden", metavar="PATH", help="reference-system file to use")
    _add_common(p)

    p = sub.add_parser("report", help="bilinear invariants of one field frame")
    p.add_argument("--E", nargs=3, type=float, default=[3.0, 0.0, 4.0], metavar=("EX", "EY", "EZ"))
    p.add_argument("--H", nargs=3, type=float, default=[1.0, 0.0, 2.0], metavar=("HX", "HY", "HZ"))
    p.add_argument("--frame", metavar="PATH", help="JSON FieldFrame; overrides --E/--H")
    p.add_argument("--axis", choices=[a.value for a in Axis], default="y")
    p.add_argument("--orientation", choices=[o.value for o in Orientation], default="negative")
    p.add_argument("--kind", choices=[k.value for k in WaveKind], default="advanced")
    p.add_argument("--c", type=float, default=1.0)
    _add_common(p)

    p = sub.add_parser("simulate", help="integrate the 1D system and monitor conservation")
    p.add_argument("--config", metavar="PATH", help="JSON file with SimConfig fields")
    p.add_argument("--n-cells", type=int, default=256)
    p.add_argument("--k-mode", type=int, default=2)
    p.add_argument("--amplitude", type=float, default=1.0)
    p.add_argument("--polarization", type=int, choices=(0, 1), default=0)
    p.add_argument("--steps", type=int, default=None, help="default: 10 periods")
    p.add_argument("--dt", type=float, default=None)
    p.add_argument("--domain-length", type=float, default=2 * np.pi)
    p.add_argument("--c", type=float, default=1.0)
    p.add_argument("--probe-cell", type=int, default=0)
    _add_spec(p, mass_default=0.0)
    _add_common(p, formats=("text", "json", "csv"))

    p = sub.add_parser("lagrangian", help="Lagrangian densities on a plane wave")
    p.add_argument("--k", type=float, default=1.0)
    p.add_argument("--t", type=float, default=0.0)
    p.add_argument("--position", type=float, default=0.0)
    p.add_argument("--polarization", type=int, choices=(0, 1), default=0)
    _add_spec(p)
    _add_self_action(p)
    _add_common(p, formats=("json", "text"))

    p = sub.add_parser("fierz", help="Fierz identity over random frames")
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--tol", type=float, default=ck.TOL_FIERZ)
    _add_common(p)

    p = sub.add_parser("nonlinear", help="solve the self-action amplitude condition")
    p.add_argument("--k", type=float, default=0.5)
    p.add_argument("--omega", type=float, default=2.0)
    p.add_argument("--initial", metavar="JSON", help="bispinor as [[re, im], ...]; default random")
    p.add_argument("--tol", type=float, default=1e-12)
    p.add_argument("--max-iter", type=int, default=500)
    p.add_argument("--damping", type=float, default=0.5)
    _add_self_action(p)
    _add_common(p, formats=("csv", "json", "text"))

    p = sub.add_parser("selftest", help="run the whole invariant suite at reduced size")
    p.add_argument("--golden", metavar="PATH", help="reference-system file to use")
    _add_common(p)
    return parser


# --- subcommands -----------------------------------------------------------

def _cmd_expand(a):
    spec = _spec(a, representation="standard")
    if a.representation == "primed":
        system = ex.primed_back_to_standard(spec)
    else:
        system = ex.expand(spec)
    payload = {"spec": spec.to_json(), "representation": a.representation,
               "system": system.to_json(), "text": system.to_text().splitlines()}
    return EXIT_OK, payload, system.to_text()


def _cmd_verify(a):
    golden = ex.load_golden(a.golden)
    if a.all:
        results = ck.verification_matrix(golden, TimeSign(a.time_sign))
    else:
        spec = _spec(a)
        if a.reference:
            ref = golden[a.reference]
        elif spec.side is Side.COLUMN and spec.kind is WaveKind.ADVANCED:
            ref = ck.expected_reference(spec, golden)
        else:
            raise UsageError("verify: give --reference for row-side or retarded specs, or use --all")
        rep = ex.systems_match(ex.expand(spec), ref, allow_current_sign_flip=True)
        results = [ck.Check("expand", ex.spec_name(spec), rep.status == "exact",
                            "vs %s: %s" % (ref.name, rep.status), rep.diagnostics)]
    ok = all(c.passed for c in results)
    payload = {"passed": ok, "checks": [c.to_json() for c in results]}
    return (EXIT_OK if ok else EXIT_FAIL), payload, ck.format_checks(results)


def _cmd_report(a):
    if a.frame:
        with open(a.frame, encoding="utf-8") as fh:
            f = FieldFrame.from_json(json.load(fh))
    else:
        f = FieldFrame(a.E, a.H, a.axis)
    psi = field_to_bispinor(f, a.orientation, a.kind)
    rep = invariant_report(f, a.orientation, a.kind, a.c)
    payload = {"frame": f.to_json(), "orientation": a.orientation, "kind": a.kind,
               "bispinor": to_pairs(psi), "invariants": rep.to_json()}
    lines = ["bispinor      " + "  ".join("%.6g%+.6gi" % (z.real, z.imag) for z in psi),
             "I1 = E^2-H^2  %.12g" % rep.scalar_I1.real,
             "2 E.H         %.12g" % rep.pseudoscalar_EH.real,
             "8 pi U        %.12g" % rep.energy_density_8piU.real,
             "momentum row  " + "  ".join("%.12g" % (v.real + 0.0) for v in rep.momentum_row),
             "Poynting      " + "  ".join("%.12g" % (v.real + 0.0) for v in rep.poynting)]
    return EXIT_OK, payload, "\n".join(lines)


def _sim_config(a):
    from .wave import PlaneWave, SimConfig, dispersion_omega
    fields = {"n_cells": a.n_cells, "domain_length": a.domain_length, "c": a.c,
              "mass_omega": a.mass_omega, "dt": a.dt, "k_mode": a.k_mode,
              "amplitude": a.amplitude, "polarization": a.polarization,
              "n_steps": a.steps, "probe_cell": a.probe_cell}
    spec_over = {}
    if a.config:
        with open(a.config, encoding="utf-8") as fh:
            data = json.load(fh)
        spec_over = data.pop("spec", {})
        unknown = set(data) - set(fields)
        if unknown:
            raise UsageError("simulate: unknown config keys %s" % sorted(unknown))
        fields.update(data)
    spec = _spec(a, mass_omega=float(fields["mass_omega"]))
    if spec_over:
        spec = EquationSpec(**{**spec.to_json(), **spec_over})
    pw = PlaneWave(int(fields["k_mode"]), complex(fields["amplitude"]), int(fields["polarization"]))
    cfg = SimConfig(n_cells=int(fields["n_cells"]), domain_length=float(fields["domain_length"]),
                    c=float(fields["c"]), mass_omega=float(fields["mass_omega"]), dt=fields["dt"],
                    n_steps=1, spec=spec, initial=pw, probe_cell=int(fields["probe_cell"]))
    omega = dispersion_omega(cfg.wavenumber(), cfg.mass_omega, cfg.c)
    steps = fields["n_steps"]
    if steps is None:
        steps = int(np.ceil(10 * 2 * np.pi / omega / cfg.dt))
    return replace(cfg, n_steps=int(steps)), omega


def _cmd_simulate(a):
    from .wave import integrated_balance_defect, measure_dispersion, run
    cfg, expected = _sim_config(a)
    _, trace = run(cfg)
    try:
        measured = measure_dispersion(trace.probe, cfg.dt)
        rel = abs(measured - expected) / expected
        note = ""
    except InsufficientSamples as exc:
        measured, rel, note = None, None, str(exc)
    e0 = trace.total_energy[0]
    summary = {
        "config": {"n_cells": cfg.n_cells, "domain_length": cfg.domain_length, "c": cfg.c,
                   "mass_omega": cfg.mass_omega, "dt": cfg.dt, "n_steps": cfg.n_steps,
                   "k_mode": cfg.initial.k_mode, "spec": cfg.spec.to_json()},
        "expected_omega": expected,
        "measured_omega": measured,
        "relative_error": rel,
        "energy_drift": float(np.max(np.abs(trace.total_energy - e0)) / e0) if e0 else 0.0,
        "max_balance_residual": float(np.max(trace.balance_residual)),
        "integrated_balance_defect": integrated_balance_defect(trace),
        "note": note,
    }
    if a.format == "csv":
        return EXIT_OK, None, trace.to_csv().rstrip("\n")
    text = "\n".join("%-26s %s" % (k, v) for k, v in summary.items() if k != "config")
    return EXIT_OK, summary, text


def _cmd_lagrangian(a):
    from .wave import PlaneWave, SimConfig, plane_wave_amplitudes
    spec = _spec(a)
    params = _params(a, omega_s=2 * a.mass_omega)
    cfg = SimConfig(n_cells=8, c=a.c, mass_omega=a.mass_omega, spec=spec, initial=PlaneWave(1))
    basis, omega = plane_wave_amplitudes(cfg, a.k)
    phase = np.exp(1j * (omega * a.t - a.k * a.position))
    psi = basis[a.polarization] * phase
    report = lagrangian_report(psi, 1j * omega * psi, -1j * a.k * psi, params, a.mass_omega, spec)
    payload = {"spec": spec.to_json(), "params": params.to_json(), "k": a.k, "omega": omega,
               "psi": to_pairs(psi), "report": report.to_json()}
    lines = ["%-18s %s" % (k, v) for k, v in report.to_json().items()]
    return EXIT_OK, payload, "\n".join(lines)


def _cmd_fierz(a):
    if a.trials < 1:
        raise UsageError("fierz: --trials must be >= 1")
    rng = np.random.default_rng(a.seed)
    E, H = random_frames(rng, a.trials)
    lhs, rhs = fierz_both_sides(pack_fields(E, H))
    rel = np.abs(np.atleast_1d(lhs) - np.atleast_1d(rhs)) / np.maximum(np.abs(np.atleast_1d(lhs)), 1e-300)
    worst = float(np.max(rel))
    ok = worst <= a.tol
    payload = {"passed": ok, "trials": a.trials, "tolerance": a.tol, "worst_relative_error": worst,
               "worst_trial": int(np.argmax(rel))}
    text = "%s  Fierz identity, %d trials, worst relative error %.3e (tol %.1e)" % (
        "PASS" if ok else "FAIL", a.trials, worst, a.tol)
    return (EXIT_OK if ok else EXIT_FAIL), payload, text


def _cmd_nonlinear(a):
    params = _params(a)
    if a.initial:
        init = from_pairs(json.loads(a.initial))
        if init.shape != (4,):
            raise UsageError("nonlinear: --initial needs 4 [re, im] pairs")
    else:
        rng = np.random.default_rng(a.seed)
        init = rng.normal(size=4) + 1j * rng.normal(size=4)
    try:
        res = nonlinear_fixed_point(init, a.k, a.omega, params, a.tol, a.max_iter, a.damping)
        trace, code, result, message = res.trace, EXIT_OK, res.to_json(), "converged"
        result["self_energy"] = params.kappa * res.amplitude_sq
    except NoConvergence as exc:
        trace, code, result, message = exc.trace, EXIT_FAIL, None, str(exc)
    if a.format == "csv":
        rows = ["iter,amplitude_sq,residual_norm"]
        rows += ["%d,%r,%r" % (i, float(amp), float(r)) for i, amp, r in trace]
        return code, None, "\n".join(rows)
    payload = {"converged": code == EXIT_OK, "message": message, "k": a.k, "omega": a.omega,
               "params": params.to_json(), "initial": to_pairs(init), "result": result,
               "trace": [{"iter": i, "amplitude_sq": amp, "residual_norm": _finite(r)}
                         for i, amp, r in trace]}
    text = "%s after %d iterations" % (message, trace[-1][0])
    if result:
        text += "\namplitude_sq %.15g\nself_energy %.15g\ndegenerate %s" % (
            result["amplitude_sq"], result["self_energy"], result["degenerate"])
    return code, payload, text


def _finite(x):
    return float(x) if np.isfinite(x) else None


def _cmd_selftest(a):
    golden = ex.load_golden(a.golden) if a.golden else None
    results = ck.selftest(a.seed, golden)
    ok = all(c.passed for c in results)
    payload = {"passed": ok, "checks": [c.to_json() for c in results]}
    return (EXIT_OK if ok else EXIT_FAIL), payload, ck.format_checks(results)


COMMANDS = {"expand": _cmd_expand, "verify": _cmd_verify, "report": _cmd_report,
            "simulate": _cmd_simulate, "lagrangian": _cmd_lagrangian, "fierz": _cmd_fierz,
            "nonlinear": _cmd_nonlinear, "selftest": _cmd_selftest}


def _render(a, payload, text) -> str:
    stamp = None if a.no_timestamp else datetime.datetime.now(datetime.timezone.utc).isoformat(timespec="seconds")
    if a.format == "json":
        doc = {"command": a.command, "version": __version__, "seed": a.seed}
        if stamp:
            doc["timestamp"] = stamp
        doc.update(payload)
        return json.dumps(doc, indent=2, sort_keys=True, allow_nan=False)
    if a.format == "text" and stamp:
        return "# generated %s\n%s" % (stamp, text)
    return text


def run_cli(argv=None) -> int:
    parser = build_parser()
    try:
        a = parser.parse_args(argv)
        code, payload, text = COMMANDS[a.command](a)
        out = _render(a, payload, text) + "\n"
    except UsageError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_USAGE
    except NumericalBlowup as exc:
        print("diracmaxwell: %s" % exc, file=sys.stderr)
        return EXIT_FAIL
    except (DiracMaxwellError, ValueError, OSError) as exc:
        print("diracmaxwell: error: %s" % exc, file=sys.stderr)
        return EXIT_USAGE
    if a.output:
        with open(a.output, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(out)
    else:
        sys.stdout.write(out)
    return code


def main():
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
