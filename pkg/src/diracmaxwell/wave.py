"""1D time-domain integration of the expanded first-order system.

The evolved variable is the bispinor on a periodic grid. The generator is read
off the same operator blocks the symbolic expander uses, so the integrator
advances exactly the component system that ``expand(spec)`` prints:

    d/dt psi = A d/ds psi + B psi

with s the propagation coordinate. Time stepping is classical RK4, the
spatial derivative a 4th-order centered stencil.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field, replace

import numpy as np

from . import _kernels
from .errors import CflViolation, InsufficientSamples, InvalidSpec, NoEigenvector, NumericalBlowup
from .expander import EquationSpec, Side, expand, operator_blocks
from .matrices import Representation
from .spinors import unpack_fields

CFL_MAX = 0.5
BLOWUP = 1e12


@dataclass(frozen=True)
class PlaneWave:
    k_mode: int = 1
    amplitude: complex = 1.0
    polarization: int = 0


@dataclass
class SimConfig:
    n_cells: int = 256
    domain_length: float = 2 * np.pi
    c: float = 1.0
    mass_omega: float = 0.0
    dt: float | None = None
    n_steps: int = 100
    spec: EquationSpec = field(default_factory=EquationSpec)
    initial: object = field(default_factory=PlaneWave)
    probe_cell: int = 0
    probe_component: int | None = None

    def __post_init__(self):
        if int(self.n_cells) < 8:
            raise InvalidSpec("n_cells must be >= 8")
        if not self.domain_length > 0 or not self.c > 0 or not self.mass_omega >= 0:
            raise InvalidSpec("domain_length and c must be > 0, mass_omega >= 0")
        if self.spec.representation is not Representation.STANDARD:
            raise InvalidSpec("the integrator runs in the standard representation")
        self.spec = replace(self.spec, mass_omega=float(self.mass_omega))
        if self.dt is None:
            self.dt = CFL_MAX * self.dx / self.c
        if not self.dt > 0:
            raise InvalidSpec("dt must be > 0")

    @property
    def dx(self) -> float:
        return self.domain_length / self.n_cells

    @property
    def cfl(self) -> float:
        return self.c * self.dt / self.dx

    @property
    def grid(self) -> np.ndarray:
        return np.arange(self.n_cells) * self.dx

    def wavenumber(self) -> float:
        return 2 * np.pi * self.initial.k_mode / self.domain_length


@dataclass
class SimState:
    t: float
    grid: np.ndarray
    dx: float


@dataclass
class ConservationTrace:
    """Per-step diagnostics; every array has n_steps + 1 entries.

    ``total_energy`` is the Hermitian sum of (|E|^2 + |H|^2)/8pi dx.
    ``field_energy`` uses unconjugated complex fields, (E.E + H.H)/8pi, which
    is the energy the complex-current balance law is written for;
    ``current_power`` is the matching source term and ``balance_residual``
    the relative size of the integrated balance defect.
    """

    t: np.ndarray
    total_energy: np.ndarray
    total_poynting_flux_divergence: np.ndarray
    balance_residual: np.ndarray
    field_energy: np.ndarray
    field_energy_rate: np.ndarray
    current_power: np.ndarray
    probe: np.ndarray

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["step", "t", "total_energy", "balance_residual", "probe_re", "probe_im"])
        for n in range(len(self.t)):
            w.writerow([n, repr(float(self.t[n])), repr(float(self.total_energy[n])),
                        repr(float(self.balance_residual[n])),
                        repr(float(self.probe[n].real)), repr(float(self.probe[n].imag))])
        return buf.getvalue()


def dispersion_omega(k: float, mass_omega: float, c: float = 1.0) -> float:
    """Positive branch of omega(k) = sqrt(c^2 k^2 + omega_m^2)."""
    return float(np.sqrt((c * k) ** 2 + mass_omega ** 2))


def generator_matrices(spec: EquationSpec, c: float = 1.0, mass_omega: float | None = None):
    """(A, B) with d/dt psi = A d/ds psi + B psi, s the propagation coordinate."""
    if mass_omega is None:
        mass_omega = spec.mass_omega
    unit = replace(spec, mass_omega=1.0)
    blocks = {d: np.array([[complex(x) for x in row] for row in m])
              for d, m in operator_blocks(unit).items()}
    tinv = np.linalg.inv(blocks["dt"])
    A = -c * tinv @ blocks["d" + spec.axis.value]
    B = -mass_omega * tinv @ blocks["none"]
    return np.ascontiguousarray(A), np.ascontiguousarray(B)


def generator(cfg: SimConfig):
    return generator_matrices(cfg.spec, cfg.c, cfg.mass_omega)


def current_sign(spec: EquationSpec) -> int:
    """+1 when d/dt U + div S = +(1/2)(j_e.E - j_m.H) for this system, else -1.

    Read from the expanded system: an E equation carrying ``+i(omega/c) E``
    drives the field energy down.
    """
    system = expand(replace(spec, mass_omega=1.0))
    for eq in system.equations:
        for t in eq:
            if t.deriv == "none" and t.field.startswith("E"):
                return -1 if t.coeff.im > 0 else 1
    raise InvalidSpec("system has no current term")


def stencil_wavenumber(k: float, dx: float) -> float:
    """Wavenumber seen by the 4th-order centered stencil."""
    return (8 * np.sin(k * dx) - np.sin(2 * k * dx)) / (6 * dx)


def plane_wave_amplitudes(cfg: SimConfig, k: float | None = None, omega: float | None = None):
    """Orthonormal basis of amplitudes psi0 with psi0 exp(i(omega t - k s)) a solution.

    Raises NoEigenvector when ``omega`` is not an eigenfrequency at ``k``.
    """
    if k is None:
        k = cfg.wavenumber()
    A, B = generator(cfg)
    K = -k * A - 1j * B
    if omega is None:
        omega = dispersion_omega(k, cfg.mass_omega, cfg.c)
    M = omega * np.eye(4) - K
    _, s, vh = np.linalg.svd(M)
    scale = max(1.0, abs(omega), float(np.max(np.abs(K))))
    null = vh[s <= 1e-10 * scale].conj()
    if len(null) == 0:
        raise NoEigenvector("no nonzero amplitude solves the plane-wave system at k=%g, omega=%g" % (k, omega))
    # Fix a reproducible basis: project unit vectors onto the null space.
    P = null.T @ null.conj()
    basis = []
    for j in np.argsort(-np.linalg.norm(P, axis=0), kind="stable"):
        v = P[:, j].copy()
        for b in basis:
            v -= (b.conj() @ v) * b
        nv = np.linalg.norm(v)
        if nv > 1e-8:
            basis.append(v / nv)
        if len(basis) == len(null):
            break
    return np.array(basis), omega


def analytic_plane_wave(cfg: SimConfig, t: float, omega: float | None = None,
                        semi_discrete: bool = False) -> SimState:
    """Exact plane-wave solution sampled on the grid.

    With ``semi_discrete`` the wavenumber is replaced by the stencil's
    effective one, giving the exact solution of the spatially discretized
    system (isolates time-stepping error).
    """
    pw = cfg.initial
    if not isinstance(pw, PlaneWave):
        raise InvalidSpec("analytic plane wave needs a PlaneWave initial condition")
    k = cfg.wavenumber()
    k_solve = stencil_wavenumber(k, cfg.dx) if semi_discrete else k
    basis, omega = plane_wave_amplitudes(cfg, k_solve, omega)
    psi0 = complex(pw.amplitude) * basis[pw.polarization]
    phase = np.exp(1j * (omega * t - k * cfg.grid))
    return SimState(t, phase[:, None] * psi0[None, :], cfg.dx)


def gaussian_pulse(cfg: SimConfig, E, H, center=None, width=None) -> np.ndarray:
    """Custom initial grid: a Gaussian envelope times fixed E, H vectors."""
    from .spinors import pack_fields
    spec = cfg.spec
    center = cfg.domain_length / 2 if center is None else center
    width = cfg.domain_length / 16 if width is None else width
    env = np.exp(-0.5 * ((cfg.grid - center) / width) ** 2)
    psi0 = pack_fields(E, H, spec.axis, spec.orientation, spec.kind)
    return env[:, None] * psi0[None, :]


def initial_state(cfg: SimConfig) -> SimState:
    if isinstance(cfg.initial, PlaneWave):
        return analytic_plane_wave(cfg, 0.0)
    grid = np.array(cfg.initial, dtype=np.complex128)
    if grid.shape != (cfg.n_cells, 4):
        raise InvalidSpec("custom grid must have shape (n_cells, 4), got %s" % (grid.shape,))
    return SimState(0.0, grid, cfg.dx)


def _check_cfl(cfg: SimConfig):
    if cfg.cfl > CFL_MAX * (1 + 1e-12):
        raise CflViolation("c dt / dx = %.4g exceeds %.2g" % (cfg.cfl, CFL_MAX))


def step(state: SimState, cfg: SimConfig, _gen=None) -> SimState:
    _check_cfl(cfg)
    A, B = _gen if _gen is not None else generator(cfg)
    new, _ = _kernels.rk4_step(np.ascontiguousarray(state.grid), A, B, cfg.dt, 1.0 / cfg.dx)
    return SimState(state.t + cfg.dt, new, state.dx)


def _diagnostics(psi, dpsi, cfg: SimConfig, sigma: int):
    """Energies and the balance defect of one snapshot.

    ``dpsi`` is the scheme's right-hand side at ``psi``.
    """
    spec = cfg.spec
    dx = cfg.dx
    eight_pi = 8 * np.pi
    total = float(np.sum(np.abs(psi) ** 2) * dx / eight_pi)
    E, H = unpack_fields(psi, spec.axis, spec.orientation, spec.kind)
    dE, dH = unpack_fields(dpsi, spec.axis, spec.orientation, spec.kind)
    W = np.sum(np.sum(E * E, axis=1) + np.sum(H * H, axis=1)) * dx / eight_pi
    u_rate = 2 * (np.sum(E * dE, axis=1) + np.sum(H * dH, axis=1)) / eight_pi
    S = cfg.c / (4 * np.pi) * np.cross(E, H)[:, spec.axis.slot]
    div_s = _kernels.central_diff_numpy(S, 1.0 / dx)
    omega_s = 2 * cfg.mass_omega
    # (1/2)(j_e.E - j_m.H) with j = i omega_s/(4 pi) * field
    q = sigma * 0.5 * (1j * omega_s / (4 * np.pi)) * (np.sum(E * E, axis=1) - np.sum(H * H, axis=1))
    defect = np.sum(u_rate + div_s - q) * dx
    scale = np.sum(np.abs(u_rate) + np.abs(div_s) + np.abs(q)) * dx
    rel = float(abs(defect) / scale) if scale > 0 else 0.0
    return total, float(abs(np.sum(div_s) * dx)), rel, W, np.sum(u_rate) * dx, np.sum(q) * dx


def run(cfg: SimConfig):
    """Integrate ``cfg.n_steps`` steps; returns (final SimState, ConservationTrace)."""
    _check_cfl(cfg)
    gen = generator(cfg)
    A, B = gen
    inv_dx = 1.0 / cfg.dx
    sigma = current_sign(cfg.spec) if cfg.mass_omega > 0 else 1
    state = initial_state(cfg)
    psi = np.ascontiguousarray(state.grid)
    comp = cfg.probe_component
    if comp is None:
        comp = int(np.argmax(np.abs(psi[cfg.probe_cell])))
    n = int(cfg.n_steps)
    rows = np.zeros((n + 1, 4))
    cplx = np.zeros((n + 1, 4), dtype=np.complex128)
    t = state.t
    for i in range(n + 1):
        if i < n:
            new, k1 = _kernels.rk4_step(psi, A, B, cfg.dt, inv_dx)
        else:
            k1 = _kernels.rhs(psi, A, B, inv_dx)
        total, div_s, rel, W, rate, power = _diagnostics(psi, k1, cfg, sigma)
        rows[i] = (t, total, div_s, rel)
        cplx[i] = (W, rate, power, psi[cfg.probe_cell, comp])
        if i < n:
            psi = new
            t = state.t + (i + 1) * cfg.dt
            if not np.all(np.isfinite(psi)) or np.max(np.abs(psi)) > BLOWUP:
                raise NumericalBlowup("|psi| exceeded %g at step %d" % (BLOWUP, i + 1))
    trace = ConservationTrace(
        t=rows[:, 0], total_energy=rows[:, 1], total_poynting_flux_divergence=rows[:, 2],
        balance_residual=rows[:, 3], field_energy=cplx[:, 0], field_energy_rate=cplx[:, 1],
        current_power=cplx[:, 2], probe=cplx[:, 3])
    return SimState(t, psi, cfg.dx), trace


def measure_dispersion(samples, dt: float, min_periods: float = 8.0) -> float:
    """Dominant angular frequency of a complex time series.

    Hann-windowed, zero-padded DFT with a parabolic fit to the log-magnitude
    peak. The sign of the frequency is dropped.
    """
    x = np.asarray(samples, dtype=np.complex128)
    n = len(x)
    if n < 16:
        raise InsufficientSamples("need at least 16 samples, got %d" % n)
    nfft = 8 * (1 << int(np.ceil(np.log2(n))))
    spec = np.abs(np.fft.fft(x * np.hanning(n), nfft))
    j = int(np.argmax(spec))
    if spec[j] == 0:
        raise InsufficientSamples("signal has no spectral content")
    lm, l0, lp = (np.log(max(spec[(j + o) % nfft], 1e-300)) for o in (-1, 0, 1))
    den = lm - 2 * l0 + lp
    shift = 0.5 * (lm - lp) / den if den != 0 else 0.0
    freq = np.fft.fftfreq(nfft, dt)[j] + shift / (nfft * dt)
    omega = abs(2 * np.pi * freq)
    if omega * n * dt / (2 * np.pi) < min_periods:
        raise InsufficientSamples("series spans %.2f periods, need %g"
                                  % (omega * n * dt / (2 * np.pi), min_periods))
    return float(omega)


def conjugate_spec(spec: EquationSpec) -> EquationSpec:
    """System under which charge-conjugated data evolves as the conjugate of the original."""
    from .expander import EnergySign
    energy = EnergySign.PLUS if spec.energy_sign is EnergySign.MINUS else EnergySign.MINUS
    side = Side.ROW if spec.side is Side.COLUMN else Side.COLUMN
    return replace(spec, energy_sign=energy, side=side)


def integrated_balance_defect(trace: ConservationTrace) -> float:
    """Relative defect of W(T) - W(0) = int (current power) dt over a whole run.

    The flux term integrates to zero on the periodic domain, so the change in
    the field-wise energy must equal the time integral of the source term.
    """
    from scipy.integrate import simpson
    gained = simpson(trace.current_power, x=trace.t)
    change = trace.field_energy[-1] - trace.field_energy[0]
    # W of a travelling wave can integrate to ~0; the Hermitian energy bounds |W|.
    scale = max(float(np.max(trace.total_energy)), 1e-300)
    return float(abs(change - gained) / scale)
