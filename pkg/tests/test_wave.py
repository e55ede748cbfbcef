import csv
import io
from dataclasses import replace

import numpy as np
import pytest

from diracmaxwell import expander as ex
from diracmaxwell.errors import CflViolation, InsufficientSamples, InvalidSpec, NoEigenvector, NumericalBlowup
from diracmaxwell.expander import EnergySign, EquationSpec, Side
from diracmaxwell.matrices import Axis, Orientation
from diracmaxwell.spinors import WaveKind, charge_conjugate, unpack_fields
from diracmaxwell.wave import (
    CFL_MAX, PlaneWave, SimConfig, SimState, analytic_plane_wave, conjugate_spec, current_sign,
    dispersion_omega, gaussian_pulse, generator, integrated_balance_defect, measure_dispersion,
    plane_wave_amplitudes, run, stencil_wavenumber, step)


def test_dispersion_omega():
    assert dispersion_omega(1, 0, 1) == 1
    assert dispersion_omega(4, 3, 1) == 5
    assert dispersion_omega(0, 2) == 2


def test_default_dt_is_at_cfl_limit():
    cfg = SimConfig(n_cells=64)
    assert cfg.cfl == pytest.approx(CFL_MAX)


def test_cfl_violation():
    cfg = SimConfig(n_cells=64, dt=0.2)
    with pytest.raises(CflViolation):
        step(SimState(0.0, np.zeros((64, 4), complex), cfg.dx), cfg)


def test_config_validation():
    with pytest.raises(InvalidSpec):
        SimConfig(n_cells=4)
    with pytest.raises(InvalidSpec):
        SimConfig(mass_omega=-1)
    with pytest.raises(InvalidSpec):
        run(SimConfig(n_cells=16, initial=np.zeros((8, 4))))


def test_zero_grid_stays_zero():
    cfg = SimConfig(n_cells=32, mass_omega=1.0)
    out = step(SimState(0.0, np.zeros((32, 4), complex), cfg.dx), cfg)
    assert not np.any(out.grid)
    assert out.t == pytest.approx(cfg.dt)


def test_generator_matches_expanded_system():
    # Row r of d/dt psi = A d/dy psi + B psi must reproduce the printed column system.
    cfg = SimConfig(mass_omega=1.0)
    A, B = generator(cfg)
    system = ex.expand(cfg.spec)
    # d/dt E_x = dy H_z + i w E_x  (from  (1/c)dt E_x - dy H_z - i(w/c) E_x = 0)
    first = {(t.field, t.deriv): complex(t.coeff) for t in system.equations[0]}
    assert first == {("E_x", "dt"): 1, ("H_z", "dy"): -1, ("E_x", "none"): -1j}
    # psi = (E_x, E_z, iH_x, iH_z): dt psi_0 = dy H_z + i w E_x = -i dy psi_3 + i w psi_0
    assert A[0, 3] == pytest.approx(-1j) and B[0, 0] == pytest.approx(1j)


@pytest.mark.parametrize("mass", [0.0, 1.5])
def test_two_polarizations(mass):
    cfg = SimConfig(n_cells=32, mass_omega=mass, initial=PlaneWave(2))
    basis, omega = plane_wave_amplitudes(cfg)
    assert basis.shape == (2, 4)
    assert np.allclose(basis @ basis.conj().T, np.eye(2), atol=1e-12)


def test_no_eigenvector_off_shell():
    cfg = SimConfig(n_cells=32, mass_omega=1.0, initial=PlaneWave(2))
    with pytest.raises(NoEigenvector):
        plane_wave_amplitudes(cfg, omega=1.234)


def test_massless_plane_wave_is_null_field():
    cfg = SimConfig(n_cells=32, mass_omega=0.0, initial=PlaneWave(1))
    for pol in (0, 1):
        psi0 = plane_wave_amplitudes(cfg)[0][pol]
        E, H = unpack_fields(psi0)
        assert np.linalg.norm(E) == pytest.approx(np.linalg.norm(H))


@pytest.mark.parametrize("spec", [EquationSpec(), EquationSpec(EnergySign.PLUS),
                                  EquationSpec(axis=Axis.Z, orientation=Orientation.POSITIVE),
                                  EquationSpec(side=Side.ROW, kind=WaveKind.RETARDED)],
                         ids=ex.spec_name)
def test_analytic_plane_wave_satisfies_continuous_system(spec, rng):
    cfg = SimConfig(n_cells=64, mass_omega=1.3, spec=spec, initial=PlaneWave(3))
    A, B = generator(cfg)
    k = cfg.wavenumber()
    for t in rng.uniform(0, 10, size=3):
        g = analytic_plane_wave(cfg, float(t)).grid
        omega = dispersion_omega(k, 1.3)
        res = 1j * omega * g - (-1j * k) * g @ A.T - g @ B.T
        assert np.max(np.abs(res)) < 1e-10


def test_stencil_wavenumber_limit():
    assert stencil_wavenumber(1.0, 1e-3) == pytest.approx(1.0, rel=1e-12)
    assert stencil_wavenumber(2.0, 0.1) < 2.0


def test_plane_wave_error_bound_n256(convergence_study):
    bound = convergence_study["pinned"]["plane_wave_n256_bound"]
    base = SimConfig(n_cells=256, mass_omega=0.0, initial=PlaneWave(2))
    omega = dispersion_omega(base.wavenumber(), 0.0)
    t_end = 4 * 2 * np.pi / omega
    steps = int(np.ceil(t_end / base.dt))
    cfg = replace(base, dt=t_end / steps, n_steps=steps)
    final, _ = run(cfg)
    err = np.max(np.abs(final.grid - analytic_plane_wave(cfg, final.t).grid))
    assert err < bound


@pytest.mark.xfail(strict=True, reason="spatial truncation error is 3.5e-6 at n=256; the scheme "
                                        "reaches 1e-6 against the exact solution only from n~350")
def test_plane_wave_error_below_1e6_against_exact_solution():
    base = SimConfig(n_cells=256, mass_omega=0.0, initial=PlaneWave(2))
    omega = dispersion_omega(base.wavenumber(), 0.0)
    t_end = 4 * 2 * np.pi / omega
    steps = int(np.ceil(t_end / base.dt))
    cfg = replace(base, dt=t_end / steps, n_steps=steps)
    final, _ = run(cfg)
    assert np.max(np.abs(final.grid - analytic_plane_wave(cfg, final.t).grid)) < 1e-6


@pytest.mark.parametrize("mass", [0.0, 1.0])
def test_plane_wave_time_error_below_1e6(convergence_study, mass):
    bound = convergence_study["pinned"]["plane_wave_semi_discrete_bound"]
    base = SimConfig(n_cells=256, mass_omega=mass, initial=PlaneWave(2))
    omega = dispersion_omega(base.wavenumber(), mass)
    t_end = 4 * 2 * np.pi / omega
    steps = int(np.ceil(t_end / base.dt))
    cfg = replace(base, dt=t_end / steps, n_steps=steps,
                  initial=analytic_plane_wave(base, 0.0, semi_discrete=True).grid)
    final, _ = run(cfg)
    ref = analytic_plane_wave(replace(cfg, initial=base.initial), final.t, semi_discrete=True).grid
    assert np.max(np.abs(final.grid - ref)) < bound


def test_fourth_order_in_dt(convergence_study):
    pinned = convergence_study["pinned"]
    base = SimConfig(n_cells=64, mass_omega=1.0, initial=PlaneWave(3))
    start = analytic_plane_wave(base, 0.0, semi_discrete=True).grid
    errors = []
    for f in (1, 2, 4):
        steps = int(np.ceil(2.0 / (base.dt / f)))
        cfg = replace(base, dt=2.0 / steps, n_steps=steps, initial=start)
        final, _ = run(cfg)
        ref = analytic_plane_wave(base, final.t, semi_discrete=True).grid
        errors.append(np.max(np.abs(final.grid - ref)))
    ratios = [errors[0] / errors[1], errors[1] / errors[2]]
    for r in ratios:
        assert pinned["dt_ratio_min"] < r < pinned["dt_ratio_max"]


def test_fixture_shows_fourth_order_in_space(convergence_study):
    rows = [r for r in convergence_study["plane_wave_4_periods_k2"] if r["mass_omega"] == 0.0]
    errs = [r["error_exact"] for r in sorted(rows, key=lambda r: r["n_cells"])]
    for a, b in zip(errs, errs[1:]):
        assert 12 < a / b < 20


def test_massless_energy_conserved_over_four_crossings():
    cfg = SimConfig(n_cells=256, mass_omega=0.0, initial=PlaneWave(2))
    cfg = replace(cfg, n_steps=int(round(4 * cfg.domain_length / cfg.c / cfg.dt)))
    _, tr = run(cfg)
    assert np.max(np.abs(tr.total_energy / tr.total_energy[0] - 1)) < 1e-8
    assert np.max(tr.total_poynting_flux_divergence) < 1e-12


def _pulse_cfg(spec=None, n=256, steps=400, mass=2.0):
    base = SimConfig(n_cells=n, mass_omega=mass, n_steps=steps, spec=spec or EquationSpec())
    pulse = gaussian_pulse(base, [1.0, 0.0, 0.3], [0.2, 0.0, -0.5])
    return replace(base, initial=pulse)


@pytest.mark.parametrize("spec", [EquationSpec(), EquationSpec(EnergySign.PLUS),
                                  EquationSpec(side=Side.ROW),
                                  EquationSpec(axis=Axis.X, orientation=Orientation.POSITIVE)],
                         ids=ex.spec_name)
def test_massive_balance_with_currents(spec):
    cfg = _pulse_cfg(spec)
    if spec.axis is Axis.X:
        base = replace(cfg, initial=PlaneWave())
        cfg = replace(cfg, initial=gaussian_pulse(base, [0.0, 1.0, 0.3], [0.0, 0.2, -0.5]))
    _, tr = run(cfg)
    assert np.max(tr.balance_residual) < 1e-6
    assert integrated_balance_defect(tr) < 1e-6
    # The field-wise energy changes: the balance needs the current term.
    w = np.abs(tr.field_energy)
    assert (w.max() - w.min()) / w.max() > 1e-2


def test_hermitian_energy_is_conserved_even_with_mass():
    _, tr = run(_pulse_cfg())
    assert np.max(np.abs(tr.total_energy / tr.total_energy[0] - 1)) < 1e-7


def test_current_sign():
    assert current_sign(EquationSpec()) == 1
    assert current_sign(EquationSpec(side=Side.ROW)) == -1


@pytest.mark.parametrize("spec", [EquationSpec(), EquationSpec(axis=Axis.Z, kind=WaveKind.RETARDED)],
                         ids=ex.spec_name)
def test_charge_conjugation_commutes_with_evolution(spec):
    cfg = _pulse_cfg(spec, n=128, steps=150)
    if spec.axis is Axis.Z:
        base = replace(cfg, initial=PlaneWave())
        cfg = replace(cfg, initial=gaussian_pulse(base, [1.0, 0.3, 0.0], [0.2, -0.5, 0.0]))
    conj = replace(cfg, spec=conjugate_spec(cfg.spec), initial=charge_conjugate(cfg.initial))
    a, _ = run(cfg)
    b, _ = run(conj)
    assert np.max(np.abs(charge_conjugate(a.grid) - b.grid)) < 1e-8


def test_blowup_detected():
    cfg = SimConfig(n_cells=16, initial=np.full((16, 4), 1e13, dtype=complex), n_steps=2)
    with pytest.raises(NumericalBlowup):
        run(cfg)


def test_trace_lengths_and_csv():
    cfg = SimConfig(n_cells=32, n_steps=5, mass_omega=1.0)
    _, tr = run(cfg)
    for arr in (tr.t, tr.total_energy, tr.balance_residual, tr.probe):
        assert len(arr) == 6
    rows = list(csv.reader(io.StringIO(tr.to_csv())))
    assert rows[0] == ["step", "t", "total_energy", "balance_residual", "probe_re", "probe_im"]
    assert len(rows) == 7 and rows[-1][0] == "5"


def test_run_is_deterministic():
    cfg = _pulse_cfg(n=64, steps=50)
    a = run(cfg)[1].to_csv()
    b = run(cfg)[1].to_csv()
    assert a == b


class TestMeasureDispersion:
    def test_pure_tone(self):
        t = np.arange(2000) * 0.01
        assert measure_dispersion(np.exp(5j * t), 0.01) == pytest.approx(5.0, rel=0.005)

    def test_too_few_samples(self):
        with pytest.raises(InsufficientSamples):
            measure_dispersion(np.ones(8), 0.1)

    def test_too_few_periods(self):
        t = np.arange(200) * 0.01
        with pytest.raises(InsufficientSamples):
            measure_dispersion(np.exp(5j * t), 0.01)

    @pytest.mark.parametrize("k_mode,mass", [(1, 0.0), (4, 3.0)])
    def test_simulated(self, k_mode, mass):
        cfg = SimConfig(n_cells=128, mass_omega=mass, initial=PlaneWave(k_mode))
        omega = dispersion_omega(cfg.wavenumber(), mass)
        cfg = replace(cfg, n_steps=int(np.ceil(10 * 2 * np.pi / omega / cfg.dt)))
        _, tr = run(cfg)
        assert measure_dispersion(tr.probe, cfg.dt) == pytest.approx(omega, rel=0.01)
