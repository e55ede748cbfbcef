"""Mapping between transverse field frames and bispinors.

A bispinor packs two transverse electric components and ``i`` times the two
matching magnetic components, ``(E_a, E_b, iH_a, iH_b)``. Which transverse pair
``(a, b)`` is used depends on the propagation axis and orientation. Bispinors
are plain complex arrays whose last axis has length 4, so every function here
also accepts stacked ensembles.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import NotTransverse
from .matrices import EPS_ALG, Axis, Orientation, Representation, beta

SQRT2 = np.sqrt(2.0)


class WaveKind(str, enum.Enum):
    ADVANCED = "advanced"
    RETARDED = "retarded"

    def toggled(self) -> "WaveKind":
        return WaveKind.RETARDED if self is WaveKind.ADVANCED else WaveKind.ADVANCED


# (axis, orientation) -> indices of the transverse pair (a, b).
COMPONENT_PAIRS = {
    (Axis.Y, Orientation.NEGATIVE): (0, 2),
    (Axis.X, Orientation.NEGATIVE): (2, 1),
    (Axis.Z, Orientation.NEGATIVE): (1, 0),
    (Axis.Y, Orientation.POSITIVE): (2, 0),
    (Axis.X, Orientation.POSITIVE): (1, 2),
    (Axis.Z, Orientation.POSITIVE): (0, 1),
}

_CHARGE_SIGNS = np.array([1.0, -1.0, 1.0, -1.0])


@dataclass(frozen=True)
class FieldFrame:
    """Complex E and H 3-vectors (Gaussian units) and their propagation axis."""

    E: np.ndarray
    H: np.ndarray
    axis: Axis = Axis.Y

    def __post_init__(self):
        E = np.array(self.E, dtype=np.complex128).reshape(3)
        H = np.array(self.H, dtype=np.complex128).reshape(3)
        E.setflags(write=False)
        H.setflags(write=False)
        object.__setattr__(self, "E", E)
        object.__setattr__(self, "H", H)
        object.__setattr__(self, "axis", Axis(self.axis))

    def is_transverse(self, tol: float = EPS_ALG) -> bool:
        k = self.axis.slot
        return abs(self.E[k]) <= tol and abs(self.H[k]) <= tol

    def check_transverse(self):
        if not self.is_transverse():
            k = self.axis.slot
            raise NotTransverse(
                "field has E_%s=%r, H_%s=%r along its propagation axis"
                % (self.axis.value, self.E[k], self.axis.value, self.H[k]))
        return self

    def to_json(self) -> dict:
        return {"E": to_pairs(self.E), "H": to_pairs(self.H), "axis": self.axis.value}

    @classmethod
    def from_json(cls, data: dict) -> "FieldFrame":
        return cls(from_pairs(data["E"]), from_pairs(data["H"]), data.get("axis", "y"))


def to_pairs(values) -> list:
    """Serialize complex values as a list of ``[re, im]`` pairs."""
    return [[float(z.real), float(z.imag)] for z in np.asarray(values, dtype=np.complex128).ravel()]


def from_pairs(pairs) -> np.ndarray:
    arr = np.asarray(pairs, dtype=float).reshape(-1, 2)
    return arr[:, 0] + 1j * arr[:, 1]


def charge_conjugate(psi) -> np.ndarray:
    """Flip the sign of components 2 and 4 (advanced <-> retarded pattern)."""
    return np.asarray(psi, dtype=np.complex128) * _CHARGE_SIGNS


def pack_fields(E, H, axis=Axis.Y, orientation=Orientation.NEGATIVE,
                kind=WaveKind.ADVANCED) -> np.ndarray:
    """Vectorized field -> bispinor map for arrays of shape (..., 3).

    No transversality check; use :func:`field_to_bispinor` for single frames.
    """
    a, b = COMPONENT_PAIRS[Axis(axis), Orientation(orientation)]
    E = np.asarray(E, dtype=np.complex128)
    H = np.asarray(H, dtype=np.complex128)
    psi = np.stack([E[..., a], E[..., b], 1j * H[..., a], 1j * H[..., b]], axis=-1)
    if WaveKind(kind) is WaveKind.RETARDED:
        psi = psi * _CHARGE_SIGNS
    return psi


def unpack_fields(psi, axis=Axis.Y, orientation=Orientation.NEGATIVE,
                  kind=WaveKind.ADVANCED):
    """Inverse of :func:`pack_fields`; returns (E, H) with shape (..., 3)."""
    psi = np.asarray(psi, dtype=np.complex128)
    if WaveKind(kind) is WaveKind.RETARDED:
        psi = psi * _CHARGE_SIGNS
    a, b = COMPONENT_PAIRS[Axis(axis), Orientation(orientation)]
    shape = psi.shape[:-1] + (3,)
    E = np.zeros(shape, dtype=np.complex128)
    H = np.zeros(shape, dtype=np.complex128)
    E[..., a] = psi[..., 0]
    E[..., b] = psi[..., 1]
    H[..., a] = -1j * psi[..., 2]
    H[..., b] = -1j * psi[..., 3]
    return E, H


def field_to_bispinor(f: FieldFrame, orientation=Orientation.NEGATIVE,
                      kind=WaveKind.ADVANCED) -> np.ndarray:
    f.check_transverse()
    return pack_fields(f.E, f.H, f.axis, orientation, kind)


def bispinor_to_field(psi, axis=Axis.Y, orientation=Orientation.NEGATIVE,
                      kind=WaveKind.ADVANCED) -> FieldFrame:
    E, H = unpack_fields(psi, axis, orientation, kind)
    return FieldFrame(E, H, axis)


def hermitian_row(psi) -> np.ndarray:
    """Componentwise complex conjugate, read as a row."""
    return np.conj(np.asarray(psi, dtype=np.complex128))


def fieldwise_row(psi) -> np.ndarray:
    """Row that conjugates only the explicit factors of i, not the field values.

    For every (E, iH) packing this is ``beta @ psi``. With it, ``row @ psi``
    gives E.E + H.H built from unconjugated complex fields, which is the
    convention the complex-current energy balance is written in.
    """
    return np.asarray(psi, dtype=np.complex128) @ beta(Representation.STANDARD).T


def primed_bispinor(f: FieldFrame) -> np.ndarray:
    """Riemann-Silberstein form (E +- iH combinations) of the y-axis packing.

    Satisfies ``unitary_S() @ primed_bispinor(f) == field_to_bispinor(f)`` for
    the y-negative advanced packing.
    """
    if abs(f.E[1]) > EPS_ALG or abs(f.H[1]) > EPS_ALG:
        raise NotTransverse("primed bispinor needs a frame transverse to y")
    Ex, Ez = f.E[0], f.E[2]
    Hx, Hz = f.H[0], f.H[2]
    return np.array([Ex + 1j * Hx, Ez + 1j * Hz, Ez - 1j * Hz, -(Ex - 1j * Hx)]) / SQRT2


def random_frames(rng: np.random.Generator, n: int, axis=Axis.Y, complex_valued=False):
    """Draw ``n`` random transverse frames as (E, H) arrays of shape (n, 3)."""
    E = rng.normal(size=(n, 3))
    H = rng.normal(size=(n, 3))
    if complex_valued:
        E = E + 1j * rng.normal(size=(n, 3))
        H = H + 1j * rng.normal(size=(n, 3))
    k = Axis(axis).slot
    E[:, k] = 0.0
    H[:, k] = 0.0
    return E, H
