"""Bilinear forms psi^+ M psi and their field-theoretic readings."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .matrices import Index, MatrixFamily, Orientation, dirac_matrix, matrix_family
from .spinors import FieldFrame, WaveKind, field_to_bispinor, to_pairs


def bilinear(psi, m) -> complex:
    """Hermitian form ``conj(psi) @ m @ psi``; broadcasts over leading axes of psi."""
    psi = np.asarray(psi, dtype=np.complex128)
    out = np.einsum("...i,ij,...j->...", np.conj(psi), m, psi)
    return out[()] if out.ndim == 0 else out


def direction_sign(orientation, kind=WaveKind.ADVANCED) -> int:
    """Sign d with ``psi^+ alpha_axis psi = 2 d [E x H]_axis`` for real frames."""
    d = 1 if Orientation(orientation) is Orientation.POSITIVE else -1
    return d if WaveKind(kind) is WaveKind.ADVANCED else -d


def momentum_bilinears(psi, family: MatrixFamily) -> np.ndarray:
    """The three bilinears of the family matrices, in (x, y, z) slot order."""
    return np.stack([bilinear(psi, m) for m in family.matrices()], axis=-1)


def poynting_bilinears(f: FieldFrame, family: MatrixFamily, kind=WaveKind.ADVANCED) -> np.ndarray:
    if f.axis is not family.axis:
        raise ValueError("frame axis %s does not match family axis %s" % (f.axis.value, family.axis.value))
    psi = field_to_bispinor(f, family.orientation, kind)
    return momentum_bilinears(psi, family)


@dataclass(frozen=True)
class InvariantReport:
    scalar_I1: complex
    pseudoscalar_EH: complex
    energy_density_8piU: complex
    momentum_row: np.ndarray
    poynting: np.ndarray

    def to_json(self) -> dict:
        return {
            "scalar_I1": to_pairs([self.scalar_I1])[0],
            "pseudoscalar_EH": to_pairs([self.pseudoscalar_EH])[0],
            "energy_density_8piU": to_pairs([self.energy_density_8piU])[0],
            "momentum_row": to_pairs(self.momentum_row),
            "poynting": to_pairs(self.poynting),
        }


def invariant_report(f: FieldFrame, orientation=Orientation.NEGATIVE,
                     kind=WaveKind.ADVANCED, c: float = 1.0) -> InvariantReport:
    """All bilinears of one frame.

    For complex frames the Hermitian form turns E^2 into |E|^2 and so on.
    The Poynting vector is ``(c/8pi) d * momentum_row`` with d from
    :func:`direction_sign`; for the y-negative advanced packing that is the
    familiar ``-(c/8pi) psi^+ alpha psi``, and for real frames it always
    equals ``(c/4pi) E x H``.
    """
    psi = field_to_bispinor(f, orientation, kind)
    family = matrix_family(f.axis, orientation)
    momentum = momentum_bilinears(psi, family)
    d = direction_sign(orientation, kind)
    return InvariantReport(
        scalar_I1=complex(bilinear(psi, dirac_matrix(Index.ALPHA4))),
        pseudoscalar_EH=complex(bilinear(psi, dirac_matrix(Index.ALPHA5))),
        energy_density_8piU=complex(bilinear(psi, dirac_matrix(Index.ALPHA0))),
        momentum_row=momentum,
        poynting=c / (8 * np.pi) * d * momentum,
    )
