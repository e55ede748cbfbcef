"""Lagrangian densities, complex currents, the Fierz identity and self-action.

Units: everything is expressed through c, the mass frequency omega_m, the
source frequency omega_s = 2 omega_m, an action unit ``hbar`` and an energy
scale. Densities returned here are plain complex numbers (or arrays when the
inputs carry leading grid axes).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .bilinears import bilinear
from .errors import EmptyRegion, NoConvergence
from .expander import EquationSpec
from .matrices import Axis, Index, Orientation, dirac_matrix, matrix_family
from .spinors import FieldFrame, WaveKind, fieldwise_row, hermitian_row, to_pairs, unpack_fields
from .wave import generator_matrices

EIGHT_PI = 8.0 * np.pi
DELTA_TAU_TOL = 1e-12


def _c(z) -> complex:
    return complex(np.asarray(z).item()) if np.ndim(z) == 0 else z


def _json_complex(z):
    if np.ndim(z) == 0:
        return to_pairs([z])[0]
    return to_pairs(z)


@dataclass(frozen=True)
class SelfActionParams:
    """Self-action constants. ``delta_tau`` defaults to ``zeta * r_s**3``."""

    zeta: float
    r_s: float
    delta_tau: float | None = None
    omega_s: float = 0.0
    hbar: float = 1.0
    c: float = 1.0
    energy_scale: float = 1.0

    def __post_init__(self):
        if self.zeta <= 0 or self.r_s <= 0:
            raise ValueError("zeta and r_s must be positive")
        if self.hbar <= 0 or self.c <= 0 or self.energy_scale <= 0:
            raise ValueError("hbar, c and energy_scale must be positive")
        expected = self.zeta * self.r_s ** 3
        if self.delta_tau is None:
            object.__setattr__(self, "delta_tau", expected)
        elif abs(self.delta_tau - expected) > DELTA_TAU_TOL * max(1.0, abs(expected)):
            raise ValueError("delta_tau=%r differs from zeta*r_s^3=%r" % (self.delta_tau, expected))

    @property
    def kappa(self) -> float:
        """Prefactor Delta_tau / 8pi of the self-energy and quartic terms."""
        return self.delta_tau / EIGHT_PI

    @property
    def coupling(self) -> float:
        """Collapsed coefficient of the cubic term once divided by hbar; readout only."""
        return self.delta_tau / (EIGHT_PI * self.hbar)

    def to_json(self) -> dict:
        return {"zeta": self.zeta, "r_s": self.r_s, "delta_tau": self.delta_tau,
                "omega_s": self.omega_s, "hbar": self.hbar, "c": self.c,
                "energy_scale": self.energy_scale, "coupling": self.coupling}


@dataclass(frozen=True)
class CurrentPair:
    j_e: np.ndarray
    j_m: np.ndarray

    def to_json(self) -> dict:
        return {"j_e": to_pairs(self.j_e), "j_m": to_pairs(self.j_m)}


def currents(f: FieldFrame, omega_s: float) -> CurrentPair:
    """Electric and magnetic currents i(omega_s/4pi)E and i(omega_s/4pi)H."""
    scale = 1j * omega_s / (4 * np.pi)
    return CurrentPair(scale * f.E, scale * f.H)


def lagrangian_em(f: FieldFrame) -> complex:
    """Free-field density (E.E - H.H)/8pi, without complex conjugation."""
    return complex(np.dot(f.E, f.E) - np.dot(f.H, f.H)) / EIGHT_PI


_DEFAULT_SPEC = EquationSpec()


def lagrangian_dirac_terms(psi, dpsi_dt, dpsi_ds, mass_omega: float | None = None,
                           spec: EquationSpec = _DEFAULT_SPEC, c: float = 1.0,
                           row: str = "hermitian"):
    """The three summands (time, spatial, mass) of the first-order Lagrangian.

    The operator is the one the simulator steps, ``(1/c)(d/dt - A d/ds - B)``,
    sandwiched between ``row(psi)`` and the column. ``row`` is ``"hermitian"``
    (complex conjugate) or ``"fieldwise"`` (conjugates only explicit i's).
    """
    A, B = generator_matrices(spec, c, mass_omega)
    psi = np.asarray(psi, dtype=np.complex128)
    if row == "hermitian":
        r = hermitian_row(psi)
    elif row == "fieldwise":
        r = fieldwise_row(psi)
    else:
        raise ValueError("row must be 'hermitian' or 'fieldwise'")
    dt_part = np.einsum("...i,...i->...", r, np.asarray(dpsi_dt, dtype=np.complex128)) / c
    sp_part = -np.einsum("...i,ij,...j->...", r, A, np.asarray(dpsi_ds, dtype=np.complex128)) / c
    m_part = -np.einsum("...i,ij,...j->...", r, B, psi) / c
    return _c(dt_part), _c(sp_part), _c(m_part)


def lagrangian_dirac(psi, dpsi_dt, dpsi_ds, mass_omega: float | None = None,
                     spec: EquationSpec = _DEFAULT_SPEC, c: float = 1.0,
                     row: str = "hermitian"):
    """First-order Lagrangian density; zero on exact solutions of ``spec``."""
    t, s, m = lagrangian_dirac_terms(psi, dpsi_dt, dpsi_ds, mass_omega, spec, c, row)
    return t + s + m


@dataclass(frozen=True)
class LsTerms:
    dU_dt: complex
    div_S: complex
    invariant_term: complex

    @property
    def total(self):
        return self.dU_dt + self.div_S + self.invariant_term

    def to_json(self) -> dict:
        return {"dU_dt": _json_complex(self.dU_dt), "div_S": _json_complex(self.div_S),
                "invariant_term": _json_complex(self.invariant_term)}


def _dot(a, b):
    return np.sum(np.asarray(a) * np.asarray(b), axis=-1)


def lagrangian_s_terms(E, H, dE_dt, dH_dt, dE_ds, dH_ds, omega_s: float,
                       axis=Axis.Y, c: float = 1.0) -> LsTerms:
    """Energy-balance summands with unconjugated complex fields.

    ``dU/dt + div S - i(omega_s/8pi)(E.E - H.H)``, where the divergence only
    sees the derivative along ``axis``.
    """
    k = Axis(axis).slot
    E, H = np.asarray(E, dtype=np.complex128), np.asarray(H, dtype=np.complex128)
    du = (_dot(E, dE_dt) + _dot(H, dH_dt)) / (4 * np.pi)
    dcross = np.cross(np.asarray(dE_ds), H) + np.cross(E, np.asarray(dH_ds))
    div = c / (4 * np.pi) * dcross[..., k]
    inv = -1j * omega_s / EIGHT_PI * (_dot(E, E) - _dot(H, H))
    return LsTerms(_c(du), _c(div), _c(inv))


def fierz_both_sides(psi):
    """Both sides of the quadratic bilinear identity.

    lhs = (psi+ a0 psi)^2 - sum_k (psi+ a_k psi)^2,
    rhs = (psi+ beta psi)^2 + (psi+ a5 psi)^2.
    """
    psi = np.asarray(psi, dtype=np.complex128)
    vec = sum(bilinear(psi, dirac_matrix(i)) ** 2
              for i in (Index.ALPHA1, Index.ALPHA2, Index.ALPHA3))
    lhs = bilinear(psi, dirac_matrix(Index.ALPHA0)) ** 2 - vec
    rhs = bilinear(psi, dirac_matrix(Index.ALPHA4)) ** 2 + bilinear(psi, dirac_matrix(Index.ALPHA5)) ** 2
    return _c(lhs), _c(rhs)


def _region(states) -> np.ndarray:
    s = np.asarray(states, dtype=np.complex128)
    if s.size == 0:
        raise EmptyRegion("no bispinor samples in region")
    return s.reshape(-1, 4)


def self_energy(states, delta_tau: float, mode: str = "exact") -> float:
    """Field energy of a region of volume ``delta_tau``.

    ``exact`` treats ``states`` as equal-volume samples and sums U dtau;
    ``approx`` uses the first sample as the representative value.
    """
    s = _region(states)
    density = np.real(bilinear(s, dirac_matrix(Index.ALPHA0))) / EIGHT_PI
    if mode == "exact":
        return float(np.sum(density) * delta_tau / len(s))
    if mode == "approx":
        return float(density[0] * delta_tau)
    raise ValueError("mode must be 'exact' or 'approx'")


def self_momentum(states, delta_tau: float, c: float = 1.0, axis=Axis.Y,
                  orientation=Orientation.NEGATIVE, mode: str = "exact") -> np.ndarray:
    """Momentum (Delta_tau/8pi c) psi+ alpha psi in (x, y, z) order."""
    s = _region(states)
    fam = matrix_family(axis, orientation)
    dens = np.stack([np.real(bilinear(s, m)) for m in fam.matrices()], axis=-1) / (EIGHT_PI * c)
    if mode == "exact":
        return np.sum(dens, axis=0) * delta_tau / len(s)
    if mode == "approx":
        return dens[0] * delta_tau
    raise ValueError("mode must be 'exact' or 'approx'")


def _alpha2():
    return dirac_matrix(Index.ALPHA2)


def nonlinear_residual(psi0, k: float, omega: float, params: SelfActionParams) -> np.ndarray:
    """``[a0 (hbar w - eps_s) - c a2 (hbar k - p_s)] psi0`` for a plane-wave amplitude."""
    psi0 = np.asarray(psi0, dtype=np.complex128).reshape(4)
    eps = params.kappa * float(np.real(bilinear(psi0, dirac_matrix(Index.ALPHA0))))
    p = params.kappa / params.c * float(np.real(bilinear(psi0, _alpha2())))
    return (params.hbar * omega - eps) * psi0 - params.c * (params.hbar * k - p) * (_alpha2() @ psi0)


def _relative_residual(psi, k, omega, params) -> float:
    scale = params.hbar * max(abs(omega), params.c * abs(k))
    norm = float(np.linalg.norm(psi))
    r = float(np.linalg.norm(nonlinear_residual(psi, k, omega, params)))
    if scale == 0.0:
        return r
    if norm == 0.0:
        return math.inf
    return r / (scale * norm)


@dataclass
class FixedPointResult:
    psi: np.ndarray
    amplitude_sq: float
    iterations: int
    degenerate: bool
    trace: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {"psi": to_pairs(self.psi), "amplitude_sq": self.amplitude_sq,
                "iterations": self.iterations, "degenerate": self.degenerate}


def nonlinear_fixed_point(initial, k: float, omega: float, params: SelfActionParams,
                          tol: float = 1e-12, max_iter: int = 500,
                          damping: float = 0.5) -> FixedPointResult:
    """Solve the self-consistency condition for a plane-wave amplitude.

    The amplitude is split into eigencomponents of alpha2 (eigenvalues +-1).
    On each component the residual is a scalar multiple of it, and that
    scalar depends only on the squared norm of the other component. Each step
    moves both squared norms a fraction ``damping`` of the way along their
    residual scalars and rescales the components, keeping their directions.
    Trace rows are ``(iter, amplitude_sq, residual_norm)`` with the residual
    measured relative to ``hbar max(|w|, c|k|) |psi|``.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    if not 0 < damping <= 1:
        raise ValueError("damping must be in (0, 1]")
    psi = np.asarray(initial, dtype=np.complex128).reshape(4).copy()
    a2 = _alpha2()
    proj_p = 0.5 * (np.eye(4) + a2)
    proj_m = 0.5 * (np.eye(4) - a2)
    kap2 = 2.0 * params.kappa
    trace = []
    for it in range(max_iter + 1):
        res = _relative_residual(psi, k, omega, params)
        amp = float(np.real(np.vdot(psi, psi)))
        trace.append((it, amp, res))
        if res <= tol:
            degenerate = _relative_residual(2.0 * psi, k, omega, params) <= tol
            return FixedPointResult(psi, amp, it, degenerate, trace)
        if it == max_iter:
            break
        up, um = proj_p @ psi, proj_m @ psi
        n_p = float(np.real(np.vdot(up, up)))
        n_m = float(np.real(np.vdot(um, um)))
        eps = params.kappa * (n_p + n_m)
        cp = params.kappa * (n_p - n_m)
        r_p = params.hbar * omega - eps - (params.c * params.hbar * k - cp)
        r_m = params.hbar * omega - eps + (params.c * params.hbar * k - cp)
        # r_p is governed by n_m and r_m by n_p (each with slope -2 kappa).
        new_m = max(n_m + damping * r_p / kap2, 0.0)
        new_p = max(n_p + damping * r_m / kap2, 0.0)
        psi = (up * math.sqrt(new_p / n_p) if n_p > 0 else up) + \
              (um * math.sqrt(new_m / n_m) if n_m > 0 else um)
        if not np.all(np.isfinite(psi)):
            break
    raise NoConvergence("fixed point not reached in %d iterations (last residual %.3e)"
                        % (max_iter, trace[-1][2]), trace)


def solution_amplitude_sq(k: float, omega: float, params: SelfActionParams) -> float:
    """Closed-form |psi0|^2 of the two-component solution (needs omega >= c|k|)."""
    if omega < params.c * abs(k):
        raise ValueError("no two-component solution for omega < c|k|")
    return params.hbar * omega / params.kappa


@dataclass(frozen=True)
class LagrangianReport:
    L_M: complex
    L_D: complex
    L_s_terms: LsTerms
    L_N: complex
    L_N_fierz_form: complex
    L_N_printed_sign: complex = 0j
    L_N_em_form: complex = 0j
    kinetic: complex = 0j

    def to_json(self) -> dict:
        return {
            "L_M": _json_complex(self.L_M),
            "L_D": _json_complex(self.L_D),
            "L_s_terms": self.L_s_terms.to_json(),
            "L_N": _json_complex(self.L_N),
            "L_N_fierz_form": _json_complex(self.L_N_fierz_form),
            "L_N_printed_sign": _json_complex(self.L_N_printed_sign),
            "L_N_em_form": _json_complex(self.L_N_em_form),
            "kinetic": _json_complex(self.kinetic),
        }


def nonlinear_lagrangian(psi, dpsi_dt, dpsi_ds, params: SelfActionParams,
                         axis=Axis.Y, orientation=Orientation.NEGATIVE,
                         kind=WaveKind.ADVANCED) -> dict:
    """Kinetic plus quartic self-action densities in their three forms.

    ``quartic_vector``: kappa[(psi+ psi)^2 - (psi+ alpha psi)^2].
    ``quartic_scalar``: kappa[(psi+ beta psi)^2 + (psi+ a5 psi)^2].
    ``quartic_printed``: the same with a minus between the two squares.
    ``quartic_em``: Delta_tau/((8pi)^2 energy_scale)[(E^2-H^2)^2 + 4(E.H)^2]
    for the fields unpacked from psi; it equals
    ``quartic_vector / (8 pi energy_scale)`` on field-mapped bispinors.
    """
    psi = np.asarray(psi, dtype=np.complex128)
    c = params.c
    fam = matrix_family(axis, orientation)
    a_axis = fam.matrices()[Axis(axis).slot]
    r = hermitian_row(psi)
    kinetic = (np.einsum("...i,...i->...", r, np.asarray(dpsi_dt)) / c
               + np.einsum("...i,ij,...j->...", r, a_axis, np.asarray(dpsi_ds)))
    lhs, _ = fierz_both_sides(psi)
    b4 = bilinear(psi, dirac_matrix(Index.ALPHA4))
    b5 = bilinear(psi, dirac_matrix(Index.ALPHA5))
    kap = params.kappa
    E, H = unpack_fields(psi, axis, orientation, kind)
    e2, h2, eh = _dot(E, E), _dot(H, H), _dot(E, H)
    quartic_em = params.delta_tau / (EIGHT_PI ** 2 * params.energy_scale) * ((e2 - h2) ** 2 + 4 * eh ** 2)
    return {
        "kinetic": _c(kinetic),
        "quartic_vector": _c(kap * lhs),
        "quartic_scalar": _c(kap * (b4 ** 2 + b5 ** 2)),
        "quartic_printed": _c(kap * (b4 ** 2 - b5 ** 2)),
        "L_M": _c((e2 - h2) / EIGHT_PI),
        "quartic_em": _c(quartic_em),
    }


def lagrangian_report(psi, dpsi_dt, dpsi_ds, params: SelfActionParams,
                      mass_omega: float = 0.0, spec: EquationSpec = _DEFAULT_SPEC) -> LagrangianReport:
    """Evaluate every density on one bispinor and its derivatives."""
    psi = np.asarray(psi, dtype=np.complex128)
    axis, orient, kind = spec.axis, spec.orientation, spec.kind
    E, H = unpack_fields(psi, axis, orient, kind)
    dE_dt, dH_dt = unpack_fields(dpsi_dt, axis, orient, kind)
    dE_ds, dH_ds = unpack_fields(dpsi_ds, axis, orient, kind)
    ls = lagrangian_s_terms(E, H, dE_dt, dH_dt, dE_ds, dH_ds, params.omega_s, axis, params.c)
    nl = nonlinear_lagrangian(psi, dpsi_dt, dpsi_ds, params, axis, orient, kind)
    return LagrangianReport(
        L_M=lagrangian_em(FieldFrame(E, H, axis)),
        L_D=lagrangian_dirac(psi, dpsi_dt, dpsi_ds, mass_omega, spec, params.c),
        L_s_terms=ls,
        L_N=nl["kinetic"] + nl["quartic_vector"],
        L_N_fierz_form=nl["kinetic"] + nl["quartic_scalar"],
        L_N_printed_sign=nl["kinetic"] + nl["quartic_printed"],
        L_N_em_form=nl["L_M"] + nl["quartic_em"],
        kinetic=nl["kinetic"],
    )
