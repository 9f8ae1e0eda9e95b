"""Bracket degenerations along explicit curves and curvature transfer.

A degeneration curve is a parametrized family t -> h_t of basis changes
applied to a fixed source bracket.  The limit of act(h_t, source) as
t grows, when it exists, is again a Lie bracket; curvature properties
holding strictly at the limit transfer back to the source group at a
finite parameter, each h_t being a linear isomorphism.

Diagonal power curves h_t = diag(t^w_1, ..., t^w_n) are the workhorse:
each structure constant c_ij^k is rescaled by t to the power
w_k - w_i - w_j, so the limit keeps the exponent-zero constants, kills
the negative ones, and fails to exist when a positive one is present.
"""

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import _exactlp
from .brackets import (FLOAT, RATIONAL, BasisChange, Bracket, act, is_lie,
                       validate_jacobi)
from .curvature import extension_bracket, koszul_oracle
from .derivations import Derivation, is_derivation, leibniz_residual
from .errors import NumericalError, PreconditionError
from .moment import weight_polytope, weight_vector

SCHEDULE = tuple(2 ** k for k in range(21))
CAUCHY_TOL = 1e-10

RICCI_NEGATIVE = "RicciNegative"
SCALAR_NEGATIVE = "ScalarNegative"
PREDICATES = (RICCI_NEGATIVE, SCALAR_NEGATIVE)

_STRICT = -1e-9


@dataclass(frozen=True)
class DegenerationCurve:
    """Family t -> h_t of basis changes acting on a source bracket.

    Exactly one of `exponents` (diagonal power curve) and `family`
    (a callable t -> BasisChange for user-supplied matrices) is set.
    """

    source: Bracket
    exponents: tuple | None = None
    family: object = None
    label: str = "curve"

    def __post_init__(self):
        if (self.exponents is None) == (self.family is None):
            raise PreconditionError(
                "provide exactly one of exponents and family")
        if self.exponents is not None and len(self.exponents) != self.source.dim:
            raise PreconditionError(
                f"expected {self.source.dim} exponents, got {len(self.exponents)}")

    @property
    def is_rational(self) -> bool:
        return (self.exponents is not None and self.source.is_rational
                and all(isinstance(w, int) for w in self.exponents))

    def element(self, t) -> BasisChange:
        """The basis change h_t; exact for integer t on integer exponents."""
        if self.family is not None:
            h = self.family(t)
            return h if isinstance(h, BasisChange) else BasisChange(h)
        if t <= 0:
            raise PreconditionError("curve parameter must be positive")
        if self.is_rational and isinstance(t, (int, Fraction)):
            entries = [Fraction(t) ** w if w >= 0 else Fraction(1) / Fraction(t) ** -w
                       for w in self.exponents]
            return BasisChange.diagonal(entries)
        return BasisChange.diagonal([float(t) ** float(w) for w in self.exponents])

    def at(self, t) -> Bracket:
        """The curve point act(h_t, source)."""
        return act(self.element(t), self.source)


def diagonal_power_curve(source: Bracket, exponents,
                         label: str = "diagonal-power") -> DegenerationCurve:
    return DegenerationCurve(source, tuple(exponents), None, label)


def face_steering_curve(source: Bracket, face) -> DegenerationCurve:
    """Diagonal curve whose limit keeps exactly the constants on `face`.

    `face` must be a face of the weight hull of the source (a tuple of
    index triples); the steering exponents come from an exact LP for a
    supporting functional, so the off-face constants decay strictly.
    """
    face = tuple(sorted(tuple(t) for t in face))
    poly = weight_polytope(source)
    if face not in poly.hull_faces:
        raise PreconditionError(
            f"{face} does not span a face of the weight hull; "
            f"faces: {poly.hull_faces}")
    n = source.dim
    off = [t for t in poly.triples if t not in face]
    a_eq = [list(weight_vector(t, n)) for t in face]
    a_ub = [list(weight_vector(t, n)) for t in off]
    res = _exactlp.solve_lp([Fraction(0)] * n, a_ub=a_ub,
                            b_ub=[Fraction(-1)] * len(off),
                            a_eq=a_eq, b_eq=[Fraction(0)] * len(face))
    if res.status != "optimal":
        raise NumericalError(f"no supporting functional found: {res.status}")
    denom = 1
    for v in res.x:
        denom = denom * v.denominator // np.gcd(denom, v.denominator)
    exponents = tuple(int(v * denom) for v in res.x)
    return diagonal_power_curve(source, exponents, label="face-steering")


def heintze_curve(D, b: Bracket, t=1.0) -> Bracket:
    """Rank-one extension with the generator acting as t*D.

    Restricted to the original coordinates the bracket is b itself; the
    generator sits at index 0.  At t = 1 this is the standard extension.
    """
    M = D.matrix if isinstance(D, Derivation) else np.asarray(D, float)
    if not is_derivation(M, b):
        raise PreconditionError(
            f"not a derivation, Leibniz residual {leibniz_residual(M, b):.3e}")
    return extension_bracket(D, b, t)


def heintze_degeneration(D, b: Bracket) -> DegenerationCurve:
    """Normalized extension family, rescaled to converge as t grows.

    The curve point at t is 1/t times the extension with generator
    action t*D, a global scaling that preserves every curvature sign.
    The limit is the extension of the abelian algebra by D.
    """
    source = heintze_curve(D, b, 1)
    return diagonal_power_curve(source, (0,) + (1,) * b.dim, label="heintze")


def _schedule(t_max):
    ts = [t for t in SCHEDULE if t <= t_max]
    if len(ts) < 2:
        raise PreconditionError("t_max must allow at least two samples")
    return ts


def limit_bracket(curve: DegenerationCurve, t_max=2 ** 20,
                  tol: float = CAUCHY_TOL) -> Bracket:
    """Entrywise limit of the curve, validated as a Lie bracket.

    Diagonal power curves on exact sources are resolved in closed form
    from the constant-rescaling exponents; any positively-rescaled
    constant means divergence.  Other curves are sampled on a geometric
    schedule and must be Cauchy below `tol` at t_max.
    """
    if curve.exponents is not None:
        w = curve.exponents
        kept = {}
        for (i, j, k), c in curve.source.constants.items():
            e = w[k] - w[i] - w[j]
            if abs(e) < 1e-12:
                kept[(i, j, k)] = c
            elif e > 0:
                raise NumericalError(
                    f"constant at {(i, j, k)} grows like t^{e}; "
                    "the curve does not converge")
        kind = RATIONAL if curve.source.is_rational and all(
            isinstance(x, int) for x in w) else FLOAT
        if kind == FLOAT:
            kept = {t: float(c) for t, c in kept.items()}
        limit = Bracket(curve.source.dim, kept, kind)
    else:
        ts = _schedule(t_max)
        prev, last = curve.at(ts[-2]), curve.at(ts[-1])
        keys = set(prev.constants) | set(last.constants)
        gap = max((abs(float(last.constants.get(t, 0))
                       - float(prev.constants.get(t, 0))) for t in keys),
                  default=0.0)
        if gap >= tol:
            raise NumericalError(
                f"curve is not Cauchy at t_max={t_max}: gap {gap:.3e} >= {tol}")
        kept = {t: float(c) for t, c in last.constants.items()
                if abs(float(c)) >= tol}
        limit = Bracket(curve.source.dim, kept, FLOAT)
    if not is_lie(limit):
        raise NumericalError(
            f"limit violates the Jacobi identity: residual {validate_jacobi(limit)}")
    return limit


def _predicate_value(b: Bracket, predicate: str) -> float:
    rep = koszul_oracle(b.to_float() if b.is_rational else b)
    if predicate == RICCI_NEGATIVE:
        sym = 0.5 * (rep.ricci + rep.ricci.T)
        return float(np.linalg.eigvalsh(sym).max())
    return rep.scalar


@dataclass(frozen=True)
class TrajectoryPoint:
    t: float
    norm: float
    lambda_max: float
    scalar: float


def trajectory(curve: DegenerationCurve, t_max=2 ** 12):
    """Curvature log along the schedule: (t, |bracket|, max Ricci eigenvalue,
    scalar curvature) per sample."""
    rows = []
    for t in _schedule(t_max):
        nu = curve.at(t)
        nuf = nu.to_float() if nu.is_rational else nu
        rep = koszul_oracle(nuf)
        lam = float(np.linalg.eigvalsh(0.5 * (rep.ricci + rep.ricci.T)).max())
        rows.append(TrajectoryPoint(float(t), float(np.sqrt(float(nu.norm_sq()))),
                                    lam, rep.scalar))
    return tuple(rows)


@dataclass(frozen=True)
class PinchingResult:
    """Curvature transfer witness: at h_{t}, the transformed bracket has
    the requested property, so the pullback metric (gram h_t^T h_t)
    realizes it on the source group."""

    index: int
    t: float
    value: float
    bracket: Bracket
    metric: np.ndarray


@dataclass(frozen=True)
class PinchingFailure:
    """No sampled parameter reached the property; not a refutation."""

    t_max: float
    best_value: float
    reason: str


def pinching_transfer(curve: DegenerationCurve, predicate: str,
                      t_max=2 ** 20):
    """Smallest scheduled k with the predicate strict at act(h_{2^k}, source).

    The predicate must hold strictly at the curve limit; continuity then
    makes a finite parameter sufficient, and the scan returns the first
    one together with the pullback metric on the source.
    """
    if predicate not in PREDICATES:
        raise PreconditionError(f"predicate must be one of {PREDICATES}")
    lim = limit_bracket(curve, t_max=t_max)
    v_lim = _predicate_value(lim, predicate)
    if not v_lim < _STRICT:
        raise PreconditionError(
            f"{predicate} fails at the limit (value {v_lim:.6g}); "
            "nothing to transfer")
    best = np.inf
    for k, t in enumerate(_schedule(t_max)):
        nu = curve.at(t)
        v = _predicate_value(nu, predicate)
        if v < best:
            best = v
        if v < _STRICT:
            H = curve.element(t).as_array()
            return PinchingResult(k, float(t), v, nu, H.T @ H)
    return PinchingFailure(float(t_max), float(best),
                           "predicate not reached on the schedule; "
                           "not a refutation")
