"""Symbolic expansion of the matrix operator equations into component PDEs.

Each equation is a sum of terms ``coeff * D(field)`` where D is one of
``(1/c) d/dt``, ``d/dx``, ``d/dy``, ``d/dz`` or the mass factor ``omega/c``.
The symbol attached to a term is implied by its derivative slot, so
coefficients are exact Gaussian rationals and two systems compare by plain
list equality after canonical ordering.

Conventions (fixed, see :func:`expand`):

* energy operator ``time_sign * i hbar d/dt``, momentum ``-i hbar grad``;
* fields depend on t and on the propagation coordinate only, so the two
  transverse spatial derivatives annihilate every component;
* the row (psi^+) equation is Hermitian-conjugated back into an equation
  for psi, i.e. the column machinery runs on the adjoint operator.

With ``time_sign='plus_i'`` the column-side minus-energy equation gives the
printed system labelled ``eq2_9``, its row side gives ``eq2_8``, and the
column-side plus-energy equation gives ``eq2_12`` and the three ``eq3_7``
groups.
"""
from __future__ import annotations

import enum
import functools
import json
from dataclasses import dataclass, field, replace
from fractions import Fraction
from importlib import resources


from .errors import InvalidSpec
from .matrices import (Axis, Index, MatrixLabel, Orientation, Representation,
                       exact_matrix, matrix_family)
from .spinors import COMPONENT_PAIRS, WaveKind

FIELDS = ("E_x", "E_y", "E_z", "H_x", "H_y", "H_z")
DERIVS = ("dt", "dx", "dy", "dz", "none")
SPATIAL = ("dx", "dy", "dz")


@dataclass(frozen=True)
class GaussianRational:
    """Exact a + bi with rational a, b."""

    re: Fraction = Fraction(0)
    im: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "re", Fraction(self.re))
        object.__setattr__(self, "im", Fraction(self.im))

    @classmethod
    def of(cls, value) -> "GaussianRational":
        if isinstance(value, GaussianRational):
            return value
        if isinstance(value, (list, tuple)):
            return cls(Fraction(value[0]), Fraction(value[1]))
        if isinstance(value, complex):
            return cls(Fraction(value.real), Fraction(value.imag))
        return cls(Fraction(value), Fraction(0))

    def __add__(self, other):
        other = GaussianRational.of(other)
        return GaussianRational(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __sub__(self, other):
        return self + (-GaussianRational.of(other))

    def __mul__(self, other):
        o = GaussianRational.of(other)
        return GaussianRational(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = GaussianRational.of(other)
        den = o.re * o.re + o.im * o.im
        if den == 0:
            raise ZeroDivisionError("division by zero coefficient")
        num = self * o.conjugate()
        return GaussianRational(num.re / den, num.im / den)

    def conjugate(self):
        return GaussianRational(self.re, -self.im)

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def to_json(self):
        def enc(q):
            return q.numerator if q.denominator == 1 else str(q)
        return [enc(self.re), enc(self.im)]

    def __str__(self):
        def num(q):
            return str(q.numerator) if q.denominator == 1 else "%d/%d" % (q.numerator, q.denominator)
        if not self.im:
            return num(self.re)
        if not self.re:
            if self.im == 1:
                return "i"
            if self.im == -1:
                return "-i"
            return num(self.im) + "i"
        return "(%s%+gi)" % (num(self.re), float(self.im))


ONE = GaussianRational(1)
I = GaussianRational(0, 1)


@dataclass(frozen=True)
class PdeTerm:
    coeff: GaussianRational
    field: str
    deriv: str

    def __post_init__(self):
        if self.field not in FIELDS:
            raise InvalidSpec("unknown field %r" % self.field)
        if self.deriv not in DERIVS:
            raise InvalidSpec("unknown derivative %r" % self.deriv)
        object.__setattr__(self, "coeff", GaussianRational.of(self.coeff))

    @property
    def key(self):
        return FIELDS.index(self.field), DERIVS.index(self.deriv)

    def to_json(self):
        return {"coeff": self.coeff.to_json(), "field": self.field, "deriv": self.deriv}

    @classmethod
    def from_json(cls, data):
        return cls(GaussianRational.of(data["coeff"]), data["field"], data["deriv"])


@dataclass(frozen=True)
class PdeSystem:
    equations: tuple
    name: str = ""

    def to_json(self):
        return {"name": self.name,
                "equations": [[t.to_json() for t in eq] for eq in self.equations]}

    @classmethod
    def from_json(cls, data, name=None):
        eqs = [[PdeTerm.from_json(t) for t in eq] for eq in data["equations"]]
        return canonical_system(eqs, name if name is not None else data.get("name", ""))

    def to_text(self) -> str:
        return "\n".join(format_equation(eq) for eq in self.equations)

    def term_counts(self):
        return [len(eq) for eq in self.equations]


def _sym(term: PdeTerm) -> str:
    if term.deriv == "dt":
        return "(1/c)·∂t %s" % term.field
    if term.deriv == "none":
        return "(ω/c)·%s" % term.field
    return "∂%s %s" % (term.deriv[1], term.field)


def format_equation(eq) -> str:
    """Render an equation as UTF-8 text, e.g. ``(1/c)·∂t E_x − ∂y H_z + i(ω/c)·E_x = 0``."""
    parts = []
    order = sorted(eq, key=lambda t: (0 if t.deriv == "dt" else 2 if t.deriv == "none" else 1, t.key))
    for n, term in enumerate(order):
        c = term.coeff
        if not c.im and c.re < 0:
            sign, mag = "−", GaussianRational(-c.re)
        elif not c.re and c.im < 0:
            sign, mag = "−", GaussianRational(0, -c.im)
        else:
            sign, mag = "+", c
        body = _sym(term)
        if mag == ONE:
            text = body
        elif mag == I and term.deriv == "none":
            text = "i" + body
        else:
            text = "%s·%s" % (mag, body)
        if n == 0:
            parts.append(text if sign == "+" else "−" + text)
        else:
            parts.append("%s %s" % (sign, text))
    return " ".join(parts) + " = 0"


def canonical_equation(terms, normalize=True):
    """Merge like terms, drop zeros, sort, and scale so the first dt term is 1."""
    acc = {}
    for t in terms:
        k = (t.field, t.deriv)
        acc[k] = acc.get(k, GaussianRational()) + t.coeff
    merged = sorted((PdeTerm(c, f, d) for (f, d), c in acc.items() if c),
                    key=lambda t: t.key)
    if normalize:
        lead = next((t.coeff for t in merged if t.deriv == "dt"), None)
        if lead is not None:
            merged = [replace(t, coeff=t.coeff / lead) for t in merged]
    return tuple(merged)


def canonical_system(equations, name="", normalize=True) -> PdeSystem:
    return PdeSystem(tuple(canonical_equation(eq, normalize) for eq in equations), name)


class EnergySign(str, enum.Enum):
    MINUS = "minus"
    PLUS = "plus"


class Side(str, enum.Enum):
    COLUMN = "column"
    ROW = "row"


class TimeSign(str, enum.Enum):
    PLUS_I = "plus_i"
    MINUS_I = "minus_i"


@dataclass(frozen=True)
class EquationSpec:
    energy_sign: EnergySign = EnergySign.MINUS
    side: Side = Side.COLUMN
    axis: Axis = Axis.Y
    orientation: Orientation = Orientation.NEGATIVE
    kind: WaveKind = WaveKind.ADVANCED
    mass_omega: float = 1.0
    time_sign: TimeSign = TimeSign.PLUS_I
    representation: Representation = Representation.STANDARD

    def __post_init__(self):
        try:
            for name, typ in (("energy_sign", EnergySign), ("side", Side), ("axis", Axis),
                              ("orientation", Orientation), ("kind", WaveKind),
                              ("time_sign", TimeSign), ("representation", Representation)):
                object.__setattr__(self, name, typ(getattr(self, name)))
        except ValueError as exc:
            raise InvalidSpec(str(exc)) from None
        if not self.mass_omega >= 0:
            raise InvalidSpec("mass_omega must be >= 0, got %r" % self.mass_omega)
        if self.representation is Representation.PRIMED and (
                self.axis is not Axis.Y or self.orientation is not Orientation.NEGATIVE
                or self.kind is not WaveKind.ADVANCED):
            raise InvalidSpec("the primed packing exists only for the y-negative advanced wave")

    @property
    def massive(self) -> bool:
        return self.mass_omega > 0

    def operator_signs(self):
        """(s_t, s_p, s_m): signs of the dt, spatial and mass parts of the operator.

        Column operator, divided by hbar*c:
        ``s_t i (1/c)d/dt  - i s_p alpha.grad + s_m (omega/c) beta``.
        """
        s_t = 1 if self.time_sign is TimeSign.PLUS_I else -1
        s = 1 if self.energy_sign is EnergySign.MINUS else -1
        return s_t, s, s

    def to_json(self):
        return {"energy_sign": self.energy_sign.value, "side": self.side.value,
                "axis": self.axis.value, "orientation": self.orientation.value,
                "kind": self.kind.value, "mass_omega": self.mass_omega,
                "time_sign": self.time_sign.value, "representation": self.representation.value}


def _gauss_matrix(label: MatrixLabel):
    re, im = exact_matrix(label)
    return [[GaussianRational(int(re[r, c]), int(im[r, c])) for c in range(4)] for r in range(4)]


def spinor_pattern(spec: EquationSpec):
    """Symbolic bispinor: for each component, a list of (coeff, field) pairs.

    The primed packing drops its overall 1/sqrt(2); a common scalar factor
    cannot change a linear homogeneous system.
    """
    if spec.representation is Representation.PRIMED:
        return [[(ONE, "E_x"), (I, "H_x")],
                [(ONE, "E_z"), (I, "H_z")],
                [(ONE, "E_z"), (-I, "H_z")],
                [(-ONE, "E_x"), (I, "H_x")]]
    a, b = COMPONENT_PAIRS[spec.axis, spec.orientation]
    xyz = "xyz"
    pattern = [[(ONE, "E_" + xyz[a])], [(ONE, "E_" + xyz[b])],
               [(I, "H_" + xyz[a])], [(I, "H_" + xyz[b])]]
    if spec.kind is WaveKind.RETARDED:
        pattern[1] = [(-c, f) for c, f in pattern[1]]
        pattern[3] = [(-c, f) for c, f in pattern[3]]
    return pattern


def operator_blocks(spec: EquationSpec):
    """Coefficient matrices {deriv: 4x4 GaussianRational} of the operator acting on psi."""
    s_t, s_p, s_m = spec.operator_signs()
    rep = spec.representation
    family = matrix_family(spec.axis, spec.orientation)
    zero = GaussianRational()
    blocks = {"dt": [[I * s_t if r == c else zero for c in range(4)] for r in range(4)]}
    for slot, label in enumerate(family.triple):
        alpha = _gauss_matrix(MatrixLabel(label.index, rep))
        blocks[SPATIAL[slot]] = [[-I * s_p * alpha[r][c] for c in range(4)] for r in range(4)]
    if spec.massive:
        beta = _gauss_matrix(MatrixLabel(Index.ALPHA4, rep))
        blocks["none"] = [[beta[r][c] * s_m for c in range(4)] for r in range(4)]
    if spec.side is Side.ROW:
        blocks = {d: [[m[c][r].conjugate() for c in range(4)] for r in range(4)]
                  for d, m in blocks.items()}
    return blocks


def expand_raw(spec: EquationSpec):
    """Unnormalized term lists, one per operator row."""
    pattern = spinor_pattern(spec)
    live = {"dt", "none", "d" + spec.axis.value}
    rows = []
    for r in range(4):
        terms = []
        for deriv, m in operator_blocks(spec).items():
            if deriv not in live:
                continue
            for c in range(4):
                if not m[r][c]:
                    continue
                for coeff, fld in pattern[c]:
                    terms.append(PdeTerm(m[r][c] * coeff, fld, deriv))
        rows.append(canonical_equation(terms, normalize=False))
    return rows


def expand(spec: EquationSpec, name: str = "") -> PdeSystem:
    """Expand the operator equation selected by ``spec`` into a canonical PdeSystem."""
    system = _expand_cached(spec)
    return replace(system, name=name) if name else system


@functools.lru_cache(maxsize=512)
def _expand_cached(spec: EquationSpec) -> PdeSystem:
    return canonical_system(expand_raw(spec), spec_name(spec))


def spec_name(spec: EquationSpec) -> str:
    return "%s/%s/%s-%s/%s/%s" % (spec.energy_sign.value, spec.side.value, spec.axis.value,
                                   spec.orientation.value, spec.kind.value, spec.time_sign.value)


def combine_rows(raw_rows, weights) -> PdeSystem:
    """Form rows ``sum_q weights[r][q] * raw_rows[q]`` and canonicalize."""
    out = []
    for wrow in weights:
        terms = []
        for w, row in zip(wrow, raw_rows):
            w = GaussianRational.of(w)
            if w:
                terms.extend(PdeTerm(w * t.coeff, t.field, t.deriv) for t in row)
        out.append(terms)
    return canonical_system(out)


# sqrt(2) * S, exact.
SQRT2_S = ((1, 0, 0, -1), (0, 1, 1, 0), (1, 0, 0, 1), (0, 1, -1, 0))


def primed_back_to_standard(spec: EquationSpec) -> PdeSystem:
    """Expand in the primed representation, then recombine rows through S.

    Because ``O = S O' S^+`` and ``psi = S psi'``, ``O psi = S (O' psi')``.
    """
    primed = replace(spec, representation=Representation.PRIMED)
    system = combine_rows(expand_raw(primed), SQRT2_S)
    return replace(system, name=spec_name(spec) + "/via-primed")


def factor_wave_equation(time_sign=TimeSign.PLUS_I):
    """The two massless first-order factors of the second-order wave operator.

    Returns (row factor acting on psi^+, column factor acting on psi) for the
    y-axis packing.
    """
    row = expand(EquationSpec(EnergySign.PLUS, Side.ROW, mass_omega=0.0, time_sign=time_sign),
                 "wave-factor/row")
    col = expand(EquationSpec(EnergySign.MINUS, Side.COLUMN, mass_omega=0.0, time_sign=time_sign),
                 "wave-factor/column")
    return row, col


# --- reference systems -------------------------------------------------------

REFERENCE_NAMES = ("eq2_8", "eq2_9", "eq2_12", "eq3_7_x", "eq3_7_y", "eq3_7_z")


def golden_data(path=None) -> dict:
    """Raw JSON of the reference systems; ``path`` overrides the packaged file."""
    if path is None:
        text = resources.files("diracmaxwell").joinpath("data/reference_systems.json").read_text("utf-8")
    else:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    return json.loads(text)


def load_golden(source=None) -> dict:
    """Parse reference systems from a path, a raw JSON mapping, or the packaged file."""
    data = source if isinstance(source, dict) else golden_data(source)
    try:
        return {name: PdeSystem.from_json(data["systems"][name], name) for name in REFERENCE_NAMES}
    except (KeyError, TypeError) as exc:
        raise InvalidSpec("malformed reference file: missing %s" % exc) from None


_GOLDEN_CACHE = {}


def reference_system(name: str, golden=None) -> PdeSystem:
    if golden is None:
        if not _GOLDEN_CACHE:
            _GOLDEN_CACHE.update(load_golden())
        golden = _GOLDEN_CACHE
    if name not in golden:
        raise InvalidSpec("unknown reference system %r" % name)
    return golden[name]


def relabel(system: PdeSystem, mapping: dict, name: str = "") -> PdeSystem:
    """Rename coordinate letters in fields and derivatives, e.g. {'x':'z','y':'x','z':'y'}."""
    eqs = []
    for eq in system.equations:
        terms = []
        for t in eq:
            fld = t.field[:2] + mapping[t.field[2]]
            der = t.deriv if t.deriv in ("dt", "none") else "d" + mapping[t.deriv[1]]
            terms.append(PdeTerm(t.coeff, fld, der))
        eqs.append(terms)
    return PdeSystem(tuple(canonical_equation(eq) for eq in eqs), name or system.name)


# Cyclic relabelings carrying the y-axis packings onto the x and z packings.
Y_TO = {"x": {"x": "z", "y": "x", "z": "y"},
        "y": {"x": "x", "y": "y", "z": "z"},
        "z": {"x": "y", "y": "z", "z": "x"}}


def flip_signs(system: PdeSystem, spatial=False, mass=False, name="") -> PdeSystem:
    eqs = []
    for eq in system.equations:
        terms = []
        for t in eq:
            c = t.coeff
            if (spatial and t.deriv in SPATIAL) or (mass and t.deriv == "none"):
                c = -c
            terms.append(PdeTerm(c, t.field, t.deriv))
        eqs.append(terms)
    return PdeSystem(tuple(canonical_equation(eq) for eq in eqs), name or system.name)


# --- comparison ----------------------------------------------------------------

@dataclass
class MatchReport:
    status: str                    # "exact", "current_sign" or "mismatch"
    left: str = ""
    right: str = ""
    diagnostics: list = field(default_factory=list)

    @property
    def matched(self) -> bool:
        return self.status != "mismatch"

    def to_json(self):
        return {"status": self.status, "left": self.left, "right": self.right,
                "diagnostics": list(self.diagnostics)}


def _diff(a: PdeSystem, b: PdeSystem):
    out = []
    if len(a.equations) != len(b.equations):
        return ["equation count %d vs %d" % (len(a.equations), len(b.equations))]
    for n, (ea, eb) in enumerate(zip(a.equations, b.equations), 1):
        ta = {(t.field, t.deriv): t.coeff for t in ea}
        tb = {(t.field, t.deriv): t.coeff for t in eb}
        for key in sorted(set(ta) | set(tb), key=lambda k: (FIELDS.index(k[0]), DERIVS.index(k[1]))):
            ca, cb = ta.get(key), tb.get(key)
            if ca != cb:
                out.append("%s eq %d term %s %s: %s vs %s (%s)" % (
                    b.name, n, key[1], key[0], ca, cb, format_equation(eb)))
    return out


def systems_match(a: PdeSystem, b: PdeSystem, allow_current_sign_flip=False) -> MatchReport:
    """Per-equation, per-term comparison; diagnostics name the failing equation of ``b``."""
    diffs = _diff(a, b)
    if not diffs:
        return MatchReport("exact", a.name, b.name)
    if allow_current_sign_flip and not _diff(flip_signs(a, mass=True), b):
        return MatchReport("current_sign", a.name, b.name,
                           ["matched up to current sign"])
    return MatchReport("mismatch", a.name, b.name, diffs)
