"""Verification matrix and invariant suite shared by ``verify`` and ``selftest``."""
from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from . import expander as ex
from .bilinears import bilinear, direction_sign, momentum_bilinears
from .errors import DiracMaxwellError, NoConvergence
from .expander import EnergySign, EquationSpec, Side, TimeSign
from .lagrangian import (SelfActionParams, currents, fierz_both_sides, lagrangian_dirac,
                         lagrangian_em, lagrangian_s_terms, nonlinear_fixed_point,
                         nonlinear_lagrangian, nonlinear_residual)
from .matrices import (EPS_ALG, Axis, Index, MatrixLabel, Orientation, Representation,
                       conjugate_by, dirac_matrix, exact_anticommutator, exact_dagger,
                       exact_matrix, exact_product, is_unitary, matrix_family,
                       printed_primed_matrix, unitary_S)
from .spinors import FieldFrame, WaveKind, pack_fields, primed_bispinor, random_frames, unpack_fields

TOL_BILINEAR = 1e-10
TOL_FIERZ = 1e-9
TOL_NULLITY = 1e-10
TOL_SELF_CONSISTENCY = 1e-8


@dataclass
class Check:
    group: str
    name: str
    passed: bool
    detail: str = ""
    diagnostics: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {"group": self.group, "name": self.name, "passed": bool(self.passed),
                "detail": self.detail, "diagnostics": list(self.diagnostics)}


def format_checks(checks) -> str:
    width = max((len(c.group) + len(c.name) + 1 for c in checks), default=10)
    lines = []
    for c in checks:
        label = "%s/%s" % (c.group, c.name)
        lines.append("%-4s  %-*s  %s" % ("PASS" if c.passed else "FAIL", width, label, c.detail))
        for d in c.diagnostics if not c.passed else ():
            lines.append("      " + d)
    n_fail = sum(not c.passed for c in checks)
    lines.append("%d checks, %d failed" % (len(checks), n_fail))
    return "\n".join(lines)


# --- verification matrix ------------------------------------------------------

def completeness_specs(time_sign=TimeSign.PLUS_I):
    """The 12 column specs: 3 axes x 2 orientations x 2 energy signs."""
    return [EquationSpec(e, Side.COLUMN, a, o, time_sign=time_sign)
            for a in (Axis.Y, Axis.X, Axis.Z)
            for o in (Orientation.NEGATIVE, Orientation.POSITIVE)
            for e in (EnergySign.MINUS, EnergySign.PLUS)]


def expected_reference(spec: EquationSpec, golden: dict) -> ex.PdeSystem:
    """Reference for a column advanced spec.

    Printed systems where they exist; otherwise derived from them by the
    cyclic coordinate relabeling or by the energy mirror (spatial and mass
    signs both flipped).
    """
    axis = spec.axis.value
    if spec.orientation is Orientation.NEGATIVE:
        base = "eq2_9" if spec.energy_sign is EnergySign.MINUS else "eq2_12"
        if spec.axis is Axis.Y:
            return golden[base]
        return ex.relabel(golden[base], ex.Y_TO[axis], "%s@%s" % (base, axis))
    base = golden["eq3_7_" + axis]
    if spec.energy_sign is EnergySign.PLUS:
        return base
    return ex.flip_signs(base, spatial=True, mass=True, name="mirror(%s)" % base.name)


def _match_check(group, name, a, b, allow_flip=False, expect="exact"):
    rep = ex.systems_match(a, b, allow_current_sign_flip=allow_flip)
    ok = rep.status == expect
    detail = "%s vs %s: %s" % (a.name, b.name, rep.status)
    return Check(group, name, ok, detail, [] if ok else (rep.diagnostics or [rep.status]))


def verification_matrix(golden=None, time_sign=TimeSign.PLUS_I):
    """All symbolic expansion checks; ``golden`` is a dict of reference systems."""
    golden = ex.load_golden() if golden is None else golden
    checks = []
    for spec in completeness_specs(time_sign):
        checks.append(_match_check("expand", ex.spec_name(spec), ex.expand(spec),
                                   expected_reference(spec, golden)))

    y = EquationSpec(time_sign=time_sign)
    row_minus = replace(y, side=Side.ROW)
    checks.append(_match_check("expand", ex.spec_name(row_minus), ex.expand(row_minus), golden["eq2_8"]))

    dual_bad = []
    for spec in completeness_specs(time_sign):
        row = ex.expand(replace(spec, side=Side.ROW))
        col = ex.flip_signs(ex.expand(spec), mass=True)
        if ex.systems_match(row, col).status != "exact":
            dual_bad.append(ex.spec_name(spec))
    checks.append(Check("duality", "row equals column with mass signs flipped", not dual_bad,
                        "%d/12 specs" % (12 - len(dual_bad)), dual_bad))

    ret_row = replace(y, energy_sign=EnergySign.PLUS, side=Side.ROW, kind=WaveKind.RETARDED)
    ret_col = replace(ret_row, side=Side.COLUMN)
    checks.append(_match_check("charge-conjugation", ex.spec_name(ret_row),
                               ex.expand(ret_row), golden["eq2_9"]))
    checks.append(_match_check("charge-conjugation", ex.spec_name(ret_col), ex.expand(ret_col),
                               golden["eq2_9"], allow_flip=True, expect="current_sign"))

    for energy in EnergySign:
        for side in Side:
            spec = replace(y, energy_sign=energy, side=side)
            checks.append(_match_check("primed", ex.spec_name(spec),
                                       ex.primed_back_to_standard(spec), ex.expand(spec)))

    checks.append(_match_check("golden", "eq2_8 vs eq2_9", golden["eq2_8"], golden["eq2_9"],
                               allow_flip=True, expect="current_sign"))
    for axis in ("x", "z"):
        checks.append(_match_check("golden", "relabel eq3_7_y -> %s" % axis,
                                   ex.relabel(golden["eq3_7_y"], ex.Y_TO[axis]),
                                   golden["eq3_7_" + axis]))

    row_f, col_f = ex.factor_wave_equation(time_sign)
    counts_ok = all(n == 2 for n in row_f.term_counts() + col_f.term_counts())
    checks.append(Check("wave-factor", "two-term equations", counts_ok,
                        "row %s, column %s" % (row_f.term_counts(), col_f.term_counts())))
    massless = replace(y, mass_omega=0.0)
    checks.append(_match_check("wave-factor", "column factor is massless minus-energy",
                               col_f, ex.expand(massless)))

    mass_bad = []
    for spec in completeness_specs(time_sign):
        for n, eq in enumerate(ex.expand(spec).equations, 1):
            m = [t.coeff for t in eq if t.deriv == "none"]
            if len(m) != 1 or abs(complex(m[0])) != 1.0 or complex(m[0]).real != 0:
                mass_bad.append("%s eq %d" % (ex.spec_name(spec), n))
    checks.append(Check("expand", "mass coefficient is +-i(omega/c)", not mass_bad, "", mass_bad))
    return checks


def mutations(data: dict):
    """Yield (label, mutated raw golden data), one per corrupted coefficient."""
    import copy
    for name in ex.REFERENCE_NAMES:
        for n, eq in enumerate(data["systems"][name]["equations"]):
            for j, term in enumerate(eq):
                for factor, tag in ((-1, "negated"), (1j, "times-i")):
                    mutated = copy.deepcopy(data)
                    t = mutated["systems"][name]["equations"][n][j]
                    z = complex(*t["coeff"]) * factor
                    t["coeff"] = [int(z.real), int(z.imag)]
                    label = "%s eq %d term %s %s %s" % (name, n + 1, term["deriv"], term["field"], tag)
                    yield (name, n + 1, label), mutated


# --- invariant suite -----------------------------------------------------------

def _label(i, rep):
    return exact_matrix(MatrixLabel(i, rep))


def _eq(a, b) -> bool:
    return bool(np.array_equal(a[0], b[0]) and np.array_equal(a[1], b[1]))


def algebra_checks():
    checks = []
    eye = (np.eye(4, dtype=np.int64), np.zeros((4, 4), dtype=np.int64))
    zero = (np.zeros((4, 4), dtype=np.int64),) * 2
    two_eye = (2 * eye[0], eye[1])
    gens = (Index.ALPHA1, Index.ALPHA2, Index.ALPHA3, Index.ALPHA4)
    for rep in Representation:
        bad = []
        for i in gens + (Index.ALPHA5,):
            m = _label(i, rep)
            if not _eq(exact_dagger(m), m):
                bad.append("%s not Hermitian" % i.value)
            if not _eq(exact_product(m, m), eye):
                bad.append("%s^2 != 1" % i.value)
        for a in range(4):
            for b in range(a + 1, 4):
                if not _eq(exact_anticommutator(_label(gens[a], rep), _label(gens[b], rep)), zero):
                    bad.append("{%s,%s} != 0" % (gens[a].value, gens[b].value))
            if not _eq(exact_anticommutator(_label(gens[a], rep), _label(Index.ALPHA5, rep)), zero):
                bad.append("{%s,alpha5} != 0" % gens[a].value)
            if not _eq(exact_anticommutator(_label(gens[a], rep), _label(gens[a], rep)), two_eye):
                bad.append("{%s,%s} != 2" % (gens[a].value, gens[a].value))
        if not _eq(_label(Index.ALPHA0, rep), eye):
            bad.append("alpha0 is not the identity")
        checks.append(Check("algebra", rep.value, not bad, "exact integer arithmetic", bad))
    printed5 = printed_primed_matrix(Index.ALPHA5)
    derived5 = dirac_matrix(Index.ALPHA5, Representation.PRIMED)
    checks.append(Check("algebra", "printed primed alpha5 equals the product",
                        bool(np.array_equal(printed5, derived5))))
    p2 = printed_primed_matrix(Index.ALPHA2)
    checks.append(Check("algebra", "printed primed alpha2 flagged non-Hermitian",
                        not np.array_equal(p2, p2.conj().T),
                        "working set uses the Hermitian correction"))
    return checks


def transform_checks(rng: np.random.Generator, n: int = 100):
    s = unitary_S()
    err = float(np.max(np.abs(s @ s.conj().T - np.eye(4))))
    checks = [Check("transform", "S unitary", is_unitary(s, EPS_ALG), "max |SS+ - 1| = %.1e" % err)]
    worst = 0.0
    for i in Index:
        std = dirac_matrix(i)
        worst = max(worst, float(np.max(np.abs(conjugate_by(s, dirac_matrix(i, Representation.PRIMED)) - std))))
    checks.append(Check("transform", "S a' S+ = a for all six", worst <= EPS_ALG, "max error %.1e" % worst))
    E, H = random_frames(rng, n, Axis.Y)
    worst = 0.0
    for e, h in zip(E, H):
        f = FieldFrame(e, h, Axis.Y)
        worst = max(worst, float(np.max(np.abs(s @ primed_bispinor(f) - pack_fields(e, h)))))
    checks.append(Check("transform", "S psi' = psi", worst <= EPS_ALG, "max error %.1e" % worst))
    return checks


def _rel(err, scale):
    return float(np.max(np.abs(err) / np.maximum(scale, 1e-300)))


def bilinear_checks(rng: np.random.Generator, n: int = 1000):
    """Field readings of the bilinears over random real frames, every packing.

    Errors are relative to the frame's energy scale E^2 + H^2.
    """
    checks = []
    worst = {"beta": 0.0, "alpha0": 0.0, "alpha5": 0.0, "poynting": 0.0}
    for axis in Axis:
        E, H = random_frames(rng, n, axis)
        scale = np.sum(E * E + H * H, axis=1)
        cross = np.cross(E, H)
        for orient in Orientation:
            fam = matrix_family(axis, orient)
            for kind in WaveKind:
                psi = pack_fields(E, H, axis, orient, kind)
                worst["beta"] = max(worst["beta"], _rel(
                    bilinear(psi, dirac_matrix(Index.ALPHA4)) - np.sum(E * E - H * H, axis=1), scale))
                worst["alpha0"] = max(worst["alpha0"], _rel(
                    bilinear(psi, dirac_matrix(Index.ALPHA0)) - scale, scale))
                worst["alpha5"] = max(worst["alpha5"], _rel(
                    bilinear(psi, dirac_matrix(Index.ALPHA5)) - 2 * np.sum(E * H, axis=1), scale))
                mom = momentum_bilinears(psi, fam)
                d = direction_sign(orient, kind)
                expect = np.zeros_like(mom)
                expect[:, axis.slot] = 2 * d * cross[:, axis.slot]
                worst["poynting"] = max(worst["poynting"], _rel(
                    np.max(np.abs(mom - expect), axis=1), scale))
    for key, what in (("beta", "psi+ beta psi = E^2 - H^2"), ("alpha0", "psi+ psi = E^2 + H^2"),
                      ("alpha5", "psi+ a5 psi = 2 E.H"),
                      ("poynting", "one momentum bilinear = 2d [E x H], two vanish")):
        checks.append(Check("bilinear", what, worst[key] <= TOL_BILINEAR,
                            "max rel error %.1e over %d frames x 12 packings" % (worst[key], n)))
    return checks


def fierz_checks(rng: np.random.Generator, n: int = 1000):
    E, H = random_frames(rng, n, Axis.Y)
    psi = pack_fields(E, H)
    lhs, rhs = fierz_both_sides(psi)
    rel = float(np.max(np.abs(lhs - rhs) / np.maximum(np.abs(lhs), 1e-300)))
    checks = [Check("fierz", "real frames", rel <= TOL_FIERZ, "max rel error %.1e" % rel)]
    params = SelfActionParams(zeta=1.5, r_s=0.7)
    nl = nonlinear_lagrangian(psi, psi, psi, params)
    q_rel = float(np.max(np.abs(nl["quartic_vector"] - nl["quartic_scalar"])
                         / np.maximum(np.abs(nl["quartic_vector"]), 1e-300)))
    checks.append(Check("fierz", "quartic Lagrangian forms agree", q_rel <= TOL_FIERZ,
                        "max rel error %.1e" % q_rel))
    em_rel = float(np.max(np.abs(nl["quartic_vector"] / (8 * np.pi * params.energy_scale) - nl["quartic_em"])
                          / np.maximum(np.abs(nl["quartic_em"]), 1e-300)))
    checks.append(Check("fierz", "field form of the quartic term", em_rel <= TOL_FIERZ,
                        "max rel error %.1e" % em_rel))
    g = rng.normal(size=(n, 4)) + 1j * rng.normal(size=(n, 4))
    gl, gr = fierz_both_sides(g)
    g_rel = float(np.max(np.abs(gl - gr) / np.maximum(np.abs(gl), 1e-300)))
    checks.append(Check("fierz", "generic complex bispinors (reported only)", True,
                        "max rel deviation %.2e" % g_rel))
    return checks


def lagrangian_checks(rng: np.random.Generator, n: int = 200):
    from .wave import PlaneWave, SimConfig, analytic_plane_wave, dispersion_omega
    checks = []
    worst = 0.0
    for spec in completeness_specs():
        for mass in (0.0, 1.0, 2.5):
            cfg = SimConfig(n_cells=16, mass_omega=mass, spec=spec, initial=PlaneWave(2))
            k = cfg.wavenumber()
            omega = dispersion_omega(k, mass, cfg.c)
            if spec.energy_sign is EnergySign.PLUS:
                omega = -omega if spec.time_sign is TimeSign.PLUS_I else omega
            g = analytic_plane_wave(cfg, float(rng.uniform(0, 3)), omega).grid
            ld = lagrangian_dirac(g, 1j * omega * g, -1j * k * g, mass, spec, cfg.c)
            worst = max(worst, float(np.max(np.abs(ld))))
    checks.append(Check("lagrangian", "L_D vanishes on plane waves", worst < TOL_NULLITY,
                        "max |L_D| = %.1e" % worst))
    E, H = random_frames(rng, n, Axis.Y)
    em = np.array([lagrangian_em(FieldFrame(e, h)) for e, h in zip(E, H)])
    b = bilinear(pack_fields(E, H), dirac_matrix(Index.ALPHA4)) / (8 * np.pi)
    err = float(np.max(np.abs(em - b)))
    checks.append(Check("lagrangian", "L_M = psi+ beta psi / 8pi", err < 1e-12, "max error %.1e" % err))
    omega_s = 2.0
    worst = 0.0
    for e, h in zip(E, H):
        cur = currents(FieldFrame(e, h), omega_s)
        lhs = 0.5 * (np.dot(cur.j_e, e) - np.dot(cur.j_m, h))
        rhs = 1j * omega_s / (8 * np.pi) * (np.dot(e, e) - np.dot(h, h))
        worst = max(worst, abs(lhs - rhs))
    checks.append(Check("lagrangian", "current power equals the invariant term", worst < 1e-12,
                        "max error %.1e" % worst))
    ps, pt, pd = (rng.normal(size=(n, 4)) + 1j * rng.normal(size=(n, 4)) for _ in range(3))
    spec = EquationSpec(mass_omega=1.0)
    parts = [unpack_fields(p) for p in (ps, pt, pd)]
    ls = lagrangian_s_terms(parts[0][0], parts[0][1], parts[1][0], parts[1][1],
                            parts[2][0], parts[2][1], omega_s)
    ld = lagrangian_dirac(ps, pt, pd, 1.0, spec, row="fieldwise")
    err = float(np.max(np.abs(ls.total - ld / (4 * np.pi))))
    checks.append(Check("lagrangian", "L_s = (c/4pi) L_D with the field-wise row", err < 1e-12,
                        "max error %.1e" % err))
    return checks


def nonlinear_checks(rng: np.random.Generator):
    params = SelfActionParams(zeta=2.0, r_s=0.8)
    k, omega = 0.5, 2.0
    init = rng.normal(size=4) + 1j * rng.normal(size=4)
    checks = []
    try:
        res = nonlinear_fixed_point(init, k, omega, params)
        eps = params.kappa * float(np.real(np.vdot(res.psi, res.psi)))
        rel = abs(eps - params.hbar * omega) / (params.hbar * omega)
        checks.append(Check("nonlinear", "fixed point with omega > ck", rel <= TOL_SELF_CONSISTENCY,
                            "%d iterations, |eps_s - hbar w|/hbar w = %.1e" % (res.iterations, rel)))
    except NoConvergence as exc:
        checks.append(Check("nonlinear", "fixed point with omega > ck", False, str(exc)))
    psi = rng.normal(size=4) + 1j * rng.normal(size=4)
    s = 1.7
    lin = (params.hbar * omega) * psi - params.c * params.hbar * k * (dirac_matrix(Index.ALPHA2) @ psi)
    self_1 = nonlinear_residual(psi, k, omega, params) - lin
    self_s = nonlinear_residual(s * psi, k, omega, params) - s * lin
    err = float(np.max(np.abs(self_s - s ** 3 * self_1)) / np.max(np.abs(self_s)))
    checks.append(Check("nonlinear", "self-action part is cubic", err < 1e-12, "rel error %.1e" % err))
    try:
        nonlinear_fixed_point(np.zeros(4), k, omega, params, max_iter=20)
        checks.append(Check("nonlinear", "zero start does not converge", False))
    except NoConvergence as exc:
        checks.append(Check("nonlinear", "zero start does not converge", True,
                            "%d trace rows" % len(exc.trace)))
    return checks


def wave_checks(quick: bool = True):
    from .spinors import charge_conjugate
    from .wave import (PlaneWave, SimConfig, conjugate_spec, dispersion_omega, gaussian_pulse,
                       measure_dispersion, run)
    checks = []
    n = 128 if quick else 512
    for ratio in (0.0, 1.0):
        k_mode = 2
        mass = ratio * k_mode
        cfg = SimConfig(n_cells=n, mass_omega=mass, initial=PlaneWave(k_mode), n_steps=0)
        omega = dispersion_omega(cfg.wavenumber(), mass)
        steps = int(np.ceil(10 * 2 * np.pi / omega / cfg.dt))
        cfg = replace(cfg, n_steps=steps)
        _, tr = run(cfg)
        meas = measure_dispersion(tr.probe, cfg.dt)
        rel = abs(meas - omega) / omega
        checks.append(Check("wave", "dispersion at w_m/ck = %g" % ratio, rel < 0.01,
                            "rel error %.1e" % rel))
    cfg = SimConfig(n_cells=n, mass_omega=0.0, initial=PlaneWave(1))
    cfg = replace(cfg, n_steps=int(round(cfg.domain_length / cfg.c / cfg.dt)))
    _, tr = run(cfg)
    drift = float(np.max(np.abs(tr.total_energy - tr.total_energy[0])) / tr.total_energy[0])
    checks.append(Check("wave", "massless energy drift over one crossing", drift < 1e-8,
                        "rel drift %.1e" % drift))
    base = SimConfig(n_cells=n, mass_omega=2.0, n_steps=200)
    pulse = gaussian_pulse(base, [1.0, 0.0, 0.3], [0.2, 0.0, -0.5])
    cfg = replace(base, initial=pulse)
    _, tr = run(cfg)
    bal = float(np.max(tr.balance_residual))
    checks.append(Check("wave", "massive balance with currents", bal < 1e-6, "max rel residual %.1e" % bal))
    conj = replace(base, spec=conjugate_spec(base.spec), initial=charge_conjugate(pulse))
    st1, _ = run(cfg)
    st2, _ = run(conj)
    err = float(np.max(np.abs(charge_conjugate(st1.grid) - st2.grid)))
    checks.append(Check("wave", "charge conjugation commutes with evolution", err < 1e-8,
                        "max error %.1e" % err))
    return checks


def invariant_suite(seed: int = 0, quick: bool = True):
    rng = np.random.default_rng(seed)
    n = 200 if quick else 1000
    checks = []
    checks += algebra_checks()
    checks += transform_checks(rng)
    checks += bilinear_checks(rng, n)
    checks += fierz_checks(rng, n)
    checks += lagrangian_checks(rng, 50 if quick else 200)
    checks += nonlinear_checks(rng)
    checks += wave_checks(quick)
    return checks


def selftest(seed: int = 0, golden=None):
    """Verification matrix plus the reduced-size invariant suite."""
    try:
        matrix = verification_matrix(golden)
    except DiracMaxwellError as exc:
        matrix = [Check("expand", "load references", False, str(exc))]
    return matrix + invariant_suite(seed, quick=True)
