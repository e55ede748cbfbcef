"""Dirac matrices, the unitary change of representation, and direction families.

All matrices in scope have entries in {0, +-1, +-i} (or +-1/sqrt(2) for the
unitary transform), so they are kept as read-only complex128 arrays. The
Clifford-algebra checks additionally run in exact Gaussian-integer arithmetic
through :func:`exact_product`.
"""
from __future__ import annotations

import enum
import functools
from dataclasses import dataclass

import numpy as np

from .errors import NotUnitary

EPS_ALG = 1e-12


class Index(str, enum.Enum):
    ALPHA0 = "alpha0"
    ALPHA1 = "alpha1"
    ALPHA2 = "alpha2"
    ALPHA3 = "alpha3"
    ALPHA4 = "alpha4_beta"
    ALPHA5 = "alpha5"


class Representation(str, enum.Enum):
    STANDARD = "standard"
    PRIMED = "primed"


class Axis(str, enum.Enum):
    X = "x"
    Y = "y"
    Z = "z"

    @property
    def slot(self) -> int:
        return "xyz".index(self.value)


class Orientation(str, enum.Enum):
    POSITIVE = "positive"
    NEGATIVE = "negative"


@dataclass(frozen=True)
class MatrixLabel:
    index: Index
    representation: Representation = Representation.STANDARD

    def __post_init__(self):
        object.__setattr__(self, "index", Index(self.index))
        object.__setattr__(self, "representation", Representation(self.representation))


# Gaussian-integer tables: (real part, imaginary part).
_I = (0, 1)
_MI = (0, -1)
_ONE = (1, 0)
_MONE = (-1, 0)


def _table(entries):
    re = np.zeros((4, 4), dtype=np.int64)
    im = np.zeros((4, 4), dtype=np.int64)
    for (r, c), (a, b) in entries.items():
        re[r, c] = a
        im[r, c] = b
    return re, im


_STANDARD_TABLES = {
    Index.ALPHA0: _table({(i, i): _ONE for i in range(4)}),
    Index.ALPHA1: _table({(0, 3): _ONE, (1, 2): _ONE, (2, 1): _ONE, (3, 0): _ONE}),
    Index.ALPHA2: _table({(0, 3): _MI, (1, 2): _I, (2, 1): _MI, (3, 0): _I}),
    Index.ALPHA3: _table({(0, 2): _ONE, (1, 3): _MONE, (2, 0): _ONE, (3, 1): _MONE}),
    Index.ALPHA4: _table({(0, 0): _ONE, (1, 1): _ONE, (2, 2): _MONE, (3, 3): _MONE}),
}

# Primed set exactly as printed, kept as golden data. The printed alpha2'
# carries +i at (row 4, col 3); that matrix is not Hermitian. The working set
# below uses -i there, which is the unique value making S alpha2' S^+ = alpha2
# and which reproduces the printed alpha5' as the product alpha1'alpha2'alpha3'alpha4'.
PRINTED_PRIMED_TABLES = {
    Index.ALPHA0: _STANDARD_TABLES[Index.ALPHA0],
    Index.ALPHA1: _table({(0, 1): _ONE, (1, 0): _ONE, (2, 3): _ONE, (3, 2): _ONE}),
    Index.ALPHA2: _table({(0, 1): _MI, (1, 0): _I, (2, 3): _I, (3, 2): _I}),
    Index.ALPHA3: _table({(0, 0): _ONE, (1, 1): _MONE, (2, 2): _ONE, (3, 3): _MONE}),
    Index.ALPHA4: _table({(0, 3): _MONE, (1, 2): _ONE, (2, 1): _ONE, (3, 0): _MONE}),
    Index.ALPHA5: _table({(0, 3): _MI, (1, 2): _I, (2, 1): _MI, (3, 0): _I}),
}

_PRIMED_TABLES = dict(PRINTED_PRIMED_TABLES)
_PRIMED_TABLES[Index.ALPHA2] = _table({(0, 1): _MI, (1, 0): _I, (2, 3): _I, (3, 2): _MI})
del _PRIMED_TABLES[Index.ALPHA5]


def _freeze(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


def _to_complex(table) -> np.ndarray:
    re, im = table
    return _freeze(re.astype(np.complex128) + 1j * im)


def exact_product(a, b):
    """Multiply two Gaussian-integer matrices given as (re, im) int pairs."""
    ar, ai = a
    br, bi = b
    return ar @ br - ai @ bi, ar @ bi + ai @ br


def exact_sum(a, b):
    return a[0] + b[0], a[1] + b[1]


def exact_anticommutator(a, b):
    return exact_sum(exact_product(a, b), exact_product(b, a))


def exact_dagger(a):
    return a[0].T.copy(), -a[1].T


@functools.cache
def exact_matrix(label: MatrixLabel):
    """Gaussian-integer (re, im) form of a Dirac matrix; alpha5 is the product."""
    tables = _STANDARD_TABLES if label.representation is Representation.STANDARD else _PRIMED_TABLES
    if label.index is Index.ALPHA5:
        rep = label.representation
        m = exact_matrix(MatrixLabel(Index.ALPHA1, rep))
        for idx in (Index.ALPHA2, Index.ALPHA3, Index.ALPHA4):
            m = exact_product(m, exact_matrix(MatrixLabel(idx, rep)))
        return m
    return tables[label.index]


@functools.cache
def _dirac_matrix(label: MatrixLabel) -> np.ndarray:
    return _to_complex(exact_matrix(label))


def dirac_matrix(index, representation=Representation.STANDARD) -> np.ndarray:
    """Return a Dirac matrix as a read-only 4x4 complex array.

    ``index`` may be an :class:`Index`, its string value, or a :class:`MatrixLabel`.
    """
    label = index if isinstance(index, MatrixLabel) else MatrixLabel(index, representation)
    return _dirac_matrix(label)


def printed_primed_matrix(index) -> np.ndarray:
    return _to_complex(PRINTED_PRIMED_TABLES[Index(index)])


def beta(representation=Representation.STANDARD) -> np.ndarray:
    return dirac_matrix(Index.ALPHA4, representation)


def anticommutator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a @ b + b @ a


@functools.cache
def unitary_S() -> np.ndarray:
    s = np.array([[1, 0, 0, -1],
                  [0, 1, 1, 0],
                  [1, 0, 0, 1],
                  [0, 1, -1, 0]], dtype=np.complex128) / np.sqrt(2.0)
    return _freeze(s)


def is_unitary(s: np.ndarray, tol: float = EPS_ALG) -> bool:
    return float(np.max(np.abs(s @ s.conj().T - np.eye(4)))) <= tol


def conjugate_by(s: np.ndarray, m: np.ndarray) -> np.ndarray:
    """Return ``s @ m @ s^+``.

    With ``s = unitary_S()`` this maps the primed set onto the standard set;
    the opposite orientation ``s^+ m s`` does not.
    """
    if not is_unitary(s):
        raise NotUnitary("transform is not unitary within %g" % EPS_ALG)
    return s @ m @ s.conj().T


@dataclass(frozen=True)
class MatrixFamily:
    """Assignment of Dirac matrices to the spatial derivatives d/dx, d/dy, d/dz.

    ``triple[k]`` is the label paired with spatial slot k (x, y, z). The
    matrix on the propagation axis is always alpha2.
    """

    axis: Axis
    orientation: Orientation
    triple: tuple

    @property
    def working_label(self) -> MatrixLabel:
        return self.triple[self.axis.slot]

    def matrices(self, representation=Representation.STANDARD):
        return tuple(dirac_matrix(lbl.index, representation) for lbl in self.triple)


# Slot order (x, y, z). The same triple serves both orientations; orientation
# only changes which transverse components fill the bispinor.
_FAMILY_TRIPLES = {
    Axis.Y: (Index.ALPHA1, Index.ALPHA2, Index.ALPHA3),
    Axis.X: (Index.ALPHA2, Index.ALPHA3, Index.ALPHA1),
    Axis.Z: (Index.ALPHA3, Index.ALPHA1, Index.ALPHA2),
}


def matrix_family(axis, orientation) -> MatrixFamily:
    axis = Axis(axis)
    orientation = Orientation(orientation)
    triple = tuple(MatrixLabel(i) for i in _FAMILY_TRIPLES[axis])
    return MatrixFamily(axis, orientation, triple)


def _format_entry(z: complex) -> str:
    r = 1.0 / np.sqrt(2.0)
    for value, text in ((0, "0"), (1, "1"), (-1, "-1"), (1j, "i"), (-1j, "-i"),
                        (r, "1/√2"), (-r, "-1/√2"), (1j * r, "i/√2"), (-1j * r, "-i/√2")):
        if abs(z - value) <= EPS_ALG:
            return text
    return "%.4g%+.4gi" % (z.real, z.imag)


def format_matrix(m: np.ndarray) -> str:
    """Render a 4x4 matrix as an aligned text grid."""
    cells = [[_format_entry(complex(z)) for z in row] for row in np.asarray(m)]
    width = max(len(c) for row in cells for c in row)
    return "\n".join("[ " + "  ".join(c.rjust(width) for c in row) + " ]" for row in cells)
