"""Certificates of Ricci negativity for rank-one solvable extensions.

Two routes are implemented.  The linear-programming route expresses a
diagonal derivation as a positive combination of diagonal moment
values plus a strictly positive diagonal remainder; any such
expression is a sound certificate.  The search route looks for a
metric directly, by derivative-free descent over the metric
parameters, and its failures are always inconclusive rather than
refutations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from ._exactlp import solve_lp
from .brackets import Bracket, center
from .curvature import MetricParams, is_ricci_negative
from .derivations import Derivation, diagonal_torus, is_derivation
from .errors import NumericalError, PreconditionError
from .moment import (DERIVATION_CENTRALIZER, TORUS_CENTRALIZER, OrbitSample,
                     nice_basis_check, weight_vector)
from .rng import default_seed, generator

MARGIN_THRESHOLD = Fraction(1, 10_000_000)  # 1e-7
SAMPLING_SLACK = Fraction(1, 10**9)
NEGATIVITY_THRESHOLD = -1e-6
DEFAULT_BUDGET = 10_000


@dataclass(frozen=True, eq=False)
class SrnCertificate:
    """Nonnegative coefficients writing D as margin-positive over the
    certificate's moment points.

    `coefficients` maps a weight triple (NiceLP, Constructive) or a
    sample index (SampledLP) to its coefficient; subtracting the
    weighted moment points from D leaves every diagonal entry at least
    `margin`, which is strictly positive.
    """

    coefficients: dict
    margin: object
    method: str

    def __post_init__(self):
        if self.margin <= 0:
            raise PreconditionError("a certificate needs a positive margin")
        if any(v < 0 for v in self.coefficients.values()):
            raise PreconditionError("certificate coefficients must be >= 0")


@dataclass(frozen=True, eq=False)
class Infeasible:
    """The margin test came out nonpositive; `dual` certifies the bound.

    Refutes this particular sufficient test only.  For tori that are
    not multiplicity-free the diagonal image can be strictly larger
    than the polytope the test uses, so srn-ness is not ruled out.
    """

    margin: object
    dual: tuple
    method: str


@dataclass(frozen=True, eq=False)
class Unknown:
    """Sampled test inconclusive: the sample may simply miss the part
    of the image a certificate would need."""

    margin: object
    reason: str


@dataclass(frozen=True, eq=False)
class RnWitness:
    params: MetricParams
    lambda_max: float


@dataclass(frozen=True, eq=False)
class SearchFailure:
    """Budget exhausted without a witness; never a refutation."""

    lambda_best: float
    params: MetricParams
    evaluations: int


def _diag_of(D, n=None):
    if isinstance(D, Derivation):
        M = D.matrix
    else:
        M = np.asarray(D, dtype=float)
    if M.ndim == 1:
        M = np.diag(M)
    if n is not None and M.shape != (n, n):
        raise PreconditionError(f"derivation shape {M.shape} does not match")
    off = M - np.diag(np.diag(M))
    scale = max(1.0, float(np.abs(M).max()))
    if off.size and np.abs(off).max() > 1e-9 * scale:
        raise PreconditionError("this certifier needs a diagonal derivation")
    return np.diag(M).copy()


def _margin_lp(d_entries, points, cap=None, mass_penalty=Fraction(0)):
    """Maximize eps - penalty*sum(coeffs) with coeffs >= 0 and
    D - sum coeff*point >= eps entrywise.

    `points` is a list of exact diagonal vectors.  The penalty keeps a
    solve over measured points honest: a combination that only works by
    scaling measurement noise up with enormous coefficients scores
    below zero instead of above the margin threshold.  Returns the
    LpResult of the exact solve; variables are (eps, coeff_0, ..).
    """
    n = len(d_entries)
    a_ub, b_ub = [], []
    for r in range(n):
        row = [Fraction(1)] + [Fraction(p[r]) for p in points]
        a_ub.append(row)
        b_ub.append(Fraction(d_entries[r]))
    if cap is not None:
        a_ub.append([Fraction(1)] + [Fraction(0)] * len(points))
        b_ub.append(Fraction(cap))
    nonneg = [False] + [True] * len(points)
    return solve_lp([Fraction(1)] + [-Fraction(mass_penalty)] * len(points),
                    a_ub=a_ub, b_ub=b_ub, nonneg=nonneg)


def certify_srn_nice(D, b: Bracket):
    """Margin test over the weight matrices of a nice basis.

    Maximizes eps subject to coeff_a >= 0 and D - sum coeff_a F_a >= eps
    entrywise, exactly.  A margin above 1e-7 certifies that some metric
    makes the extension Ricci negative with D symmetric; the
    Infeasible branch only refutes this sufficient test (it is exact
    for multiplicity-free tori, an under-approximation otherwise).
    """
    report = nice_basis_check(b)
    if not report.ok:
        raise PreconditionError(
            "the margin test over weight matrices needs a nice basis; "
            f"violations: {report.multiple_targets + report.overlapping_pairs}")
    torus = diagonal_torus(b)
    diag = _diag_of(D, b.dim)
    if torus.coords_of([float(v) for v in diag.tolist()]) is None:
        raise PreconditionError("D must lie in the diagonal derivation torus")
    if float(diag.sum()) <= 1e-10:
        raise PreconditionError("certification needs trace(D) > 0")
    d_exact = [Fraction(v) for v in diag.tolist()]
    triples = tuple(sorted(b.constants))
    points = [weight_vector(t, b.dim) for t in triples]
    res = _margin_lp(d_exact, points)
    if res.status != "optimal":
        raise NumericalError(f"margin program ended {res.status}")
    eps = res.objective
    if eps > MARGIN_THRESHOLD:
        coeffs = {t: res.x[1 + i] for i, t in enumerate(triples)}
        return SrnCertificate(coeffs, eps, "NiceLP")
    return Infeasible(eps, tuple(res.dual_ub or ()), "NiceLP")


def certify_srn_sampled(D, b: Bracket, sample: OrbitSample):
    """Margin test over sampled diagonal moment values.

    Success is sound.  Every sampled group element must commute with D
    and every sampled moment value must lie on the diagonal slice of
    the orbit.  Each diagonal is then moved into a fixed fundamental
    domain by sorting its entries within blocks of equal D-eigenvalue;
    the permutations doing so commute with D, so the sorted vector is
    again a genuine point of the slice.  The sort is load-bearing: the
    attainable diagonal set is convex within one domain but its union
    over domains need not be, and conic combinations that mix domains
    can overshoot it (for paired directions the unsorted test can
    certify derivations that only sit on the boundary).  Failure is
    only Unknown, since the finite sample can miss the region a
    certificate would use.  The margin variable is capped so the
    program stays bounded even when combinations of sampled points are
    entrywise negative.
    """
    if not isinstance(sample, OrbitSample) or not sample.points:
        raise PreconditionError("need a nonempty orbit sample")
    if sample.group_tag not in (DERIVATION_CENTRALIZER, TORUS_CENTRALIZER):
        raise PreconditionError(
            "sampled certification wants a centralizer orbit sample")
    diag = _diag_of(D, b.dim)
    if float(diag.sum()) <= 1e-10:
        raise PreconditionError("certification needs trace(D) > 0")
    Dm = np.diag(diag)
    dscale = max(1.0, float(np.abs(Dm).max()))
    for g, _ in sample.points:
        if np.abs(g @ Dm - Dm @ g).max() > 1e-6 * dscale:
            raise PreconditionError(
                "sample does not commute with this derivation")
    for _, mv in sample.points:
        M = np.asarray(mv.matrix, dtype=float)
        off = M - np.diag(np.diag(M))
        if off.size and np.abs(off).max() > 1e-8 * max(1.0, np.abs(M).max()):
            raise PreconditionError(
                "sample moment values must lie on the diagonal slice")
    blocks = _centralizer_blocks(diag)
    d_exact = [Fraction(v) for v in diag.tolist()]
    points = []
    for _, mv in sample.points:
        p = [Fraction(float(x)) for x in np.diag(mv.matrix)]
        for blk in blocks:
            for i, v in zip(blk, sorted(p[i] for i in blk)):
                p[i] = v
        points.append(p)
    cap = 1 + 2 * max(abs(v) for v in d_exact)
    res = _margin_lp(d_exact, points, cap=cap, mass_penalty=SAMPLING_SLACK)
    if res.status != "optimal":
        raise NumericalError(f"margin program ended {res.status}")
    # the objective already discounts the coefficient mass by the sample
    # tolerance, so it is the margin the measured points can support
    margin = res.objective
    if margin > MARGIN_THRESHOLD:
        coeffs = {i: res.x[1 + i] for i in range(len(points))}
        return SrnCertificate(coeffs, margin, "SampledLP")
    return Unknown(margin, "no certificate over this sample; enlarge or reseed")


def necessary_condition(D, b: Bracket) -> bool:
    """The one general obstruction: positive trace, and positive real
    spectrum for the restriction of D to the center."""
    M = D.matrix if isinstance(D, Derivation) else np.asarray(D, dtype=float)
    if M.ndim == 1:
        M = np.diag(M)
    if float(np.trace(M)) <= 1e-10:
        return False
    Z = center(b)
    if Z.shape[1] == 0:
        return True
    restricted = Z.T @ M @ Z
    return float(np.linalg.eigvals(restricted).real.min()) > 1e-10


def constructive_nonneg(D, b: Bracket):
    """Certificate for a nonnegative diagonal derivation that is
    positive on the center of a nice-basis algebra.

    Each kernel index contributes one weight matrix through a bracket
    pairing it with two strictly positive directions; the margin over
    the summed weight matrices is then maximized exactly in one
    variable.
    """
    report = nice_basis_check(b)
    if not report.ok:
        raise PreconditionError("constructive certification needs a nice basis")
    diag = _diag_of(D, b.dim)
    if diag.min() < -1e-12:
        raise PreconditionError("entries must be nonnegative")
    if not is_derivation(np.diag(diag), b):
        raise PreconditionError("not a derivation of the bracket")
    Z = center(b)
    if Z.shape[1]:
        zmin = float(np.linalg.eigvals(Z.T @ np.diag(diag) @ Z).real.min())
        if zmin <= 1e-10:
            raise PreconditionError("must be strictly positive on the center")
    n = b.dim
    positive = {i for i in range(n) if diag[i] > 1e-12}
    kernel = [i for i in range(n) if i not in positive]
    chosen = {}
    for i in kernel:
        pick = None
        for (p, q, k), c in sorted(b.constants.items()):
            if c == 0:
                continue
            if p == i:
                j = q
            elif q == i:
                j = p
            else:
                continue
            if j in positive and k in positive:
                pick = (p, q, k)
                break
        if pick is None:
            raise NumericalError(
                f"no bracket pairs kernel index {i} with two positive "
                "directions; the center is not inside the positive part")
        chosen[pick] = chosen.get(pick, 0) + 1
    m_diag = [Fraction(0)] * n
    for (p, q, k), mult in chosen.items():
        m_diag[p] -= mult
        m_diag[q] -= mult
        m_diag[k] += mult
    d_exact = [Fraction(v) for v in diag.tolist()]
    # one-variable margin program: maximize t with t <= D_r - eps*M_r, eps >= 0
    a_ub = [[Fraction(1), Fraction(m_diag[r])] for r in range(n)]
    b_ub = [d_exact[r] for r in range(n)]
    res = solve_lp([Fraction(1), Fraction(0)], a_ub=a_ub, b_ub=b_ub,
                   nonneg=[False, True])
    if res.status != "optimal":
        raise NumericalError(f"margin line search ended {res.status}")
    t_star, eps = res.x[0], res.x[1]
    if t_star <= 0:
        raise NumericalError("no positive margin; hypotheses not satisfied")
    coeffs = {trip: eps * mult for trip, mult in chosen.items()}
    return SrnCertificate(coeffs, t_star, "Constructive")


def _centralizer_blocks(diag_entries, tol=1e-9):
    blocks, reps = [], []
    scale = max(1.0, float(np.abs(diag_entries).max()))
    for i, v in enumerate(diag_entries):
        for bi, r in enumerate(reps):
            if abs(v - r) <= tol * scale:
                blocks[bi].append(i)
                break
        else:
            reps.append(v)
            blocks.append([i])
    return [tuple(blk) for blk in blocks]


def search_rn_metric(D, b: Bracket, budget: int = DEFAULT_BUDGET, seed=None):
    """Derivative-free search for a metric with negative Ricci.

    Minimizes the top Ricci eigenvalue over metric parameters: the
    scale is pinned to 1, the shear X ranges over the nilpotent part,
    and h = exp(A) with A commuting with D when D is diagonal (full
    otherwise).  Phases: the identity metric, a pure-scaling line, then
    restarted compass descent.  Returns the first witness below -1e-6,
    or the best value found once the evaluation budget runs out.
    """
    from scipy.linalg import expm

    M = D.matrix if isinstance(D, Derivation) else np.asarray(D, dtype=float)
    if M.ndim == 1:
        M = np.diag(M)
    n = b.dim
    if M.shape != (n, n):
        raise PreconditionError(f"derivation shape {M.shape} does not match")
    seed = default_seed() if seed is None else int(seed)
    rng = generator(seed, 21)

    off = M - np.diag(np.diag(M))
    diagonal_d = not off.size or np.abs(off).max() <= 1e-9 * max(1.0, np.abs(M).max())
    if diagonal_d:
        blocks = _centralizer_blocks(np.diag(M))
    else:
        blocks = [tuple(range(n))]
    slots = [(blk, len(blk)) for blk in blocks]
    asize = sum(k * k for _, k in slots)

    state = {"evals": 0, "best": math.inf, "best_params": MetricParams.identity(n)}

    def unpack(x):
        A = np.zeros((n, n))
        pos = 0
        for blk, k in slots:
            A[np.ix_(blk, blk)] = np.asarray(x[pos:pos + k * k]).reshape(k, k)
            pos += k * k
        return A, np.asarray(x[asize:asize + n])

    def evaluate(x):
        if state["evals"] >= budget:
            return None
        state["evals"] += 1
        A, X = unpack(x)
        try:
            params = MetricParams(1.0, X, expm(A))
            lam = is_ricci_negative(M, b, params)[1]
        except (PreconditionError, NumericalError, np.linalg.LinAlgError):
            return math.inf
        if lam < state["best"]:
            state["best"] = lam
            state["best_params"] = params
        return lam

    def finished():
        return state["best"] < NEGATIVITY_THRESHOLD

    dim = asize + n
    # identity metric, then the pure-scaling line h = e^s
    lam = evaluate(np.zeros(dim))
    if lam is not None and not finished():
        for s in np.linspace(0.25, 25.0, 50):
            x = np.zeros(dim)
            pos = 0
            for blk, k in slots:
                x[pos:pos + k * k] = (s * np.eye(k)).ravel()
                pos += k * k
            if evaluate(x) is None or finished():
                break

    while not finished() and state["evals"] < budget:
        if state["best"] < math.inf and state["evals"] < budget // 3:
            # descend from the best point found so far first
            base = state["best_params"]
            with np.errstate(all="ignore"):
                try:
                    A0 = _matrix_log_blocks(base.h, slots)
                except NumericalError:
                    A0 = np.zeros((n, n))
            x = np.concatenate([_pack_blocks(A0, slots), base.X])
        else:
            x = 0.6 * rng.standard_normal(dim)
        _compass_descent(x, evaluate, finished, state, budget)
        if state["evals"] >= budget:
            break

    if finished():
        params = state["best_params"]
        flag, lam = is_ricci_negative(M, b, params)
        if flag and lam < NEGATIVITY_THRESHOLD:
            return RnWitness(params, lam)
    return SearchFailure(state["best"], state["best_params"], state["evals"])


def _pack_blocks(A, slots):
    parts = []
    for blk, k in slots:
        parts.append(A[np.ix_(blk, blk)].ravel())
    return np.concatenate(parts) if parts else np.zeros(0)


def _matrix_log_blocks(h, slots):
    from scipy.linalg import logm

    n = h.shape[0]
    A = np.zeros((n, n))
    for blk, k in slots:
        sub = h[np.ix_(blk, blk)]
        L = logm(sub)
        if np.abs(L.imag).max() > 1e-8:
            raise NumericalError("metric factor outside the exp image")
        A[np.ix_(blk, blk)] = L.real
    return A


def _compass_descent(x0, evaluate, finished, state, budget,
                     step0=0.5, min_step=1e-3):
    x = np.asarray(x0, dtype=float).copy()
    current = evaluate(x)
    if current is None or finished():
        return
    step = step0
    dim = len(x)
    while step >= min_step and state["evals"] < budget and not finished():
        improved = False
        for i in range(dim):
            for sgn in (1.0, -1.0):
                trial = x.copy()
                trial[i] += sgn * step
                val = evaluate(trial)
                if val is None or finished():
                    return
                if val < current - 1e-12:
                    x, current = trial, val
                    improved = True
                    break
            if finished():
                return
        if not improved:
            step *= 0.5
