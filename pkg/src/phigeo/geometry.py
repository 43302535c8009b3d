"""Entropies, divergences, and Fisher metrics of the two dual kinds
(linear-constraint / Naudts and escort-constraint / Amari), together with
the operators connecting them and the (c,d) closed forms."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .deform import Deformation, ProbVec, escort, exp_of_log, h_phi, uniform
from .errors import BoundaryError, BranchError, DivergentIntegralError
from .families import CdParams, cd_family
from .specfun import Tolerance, integrate, numeric_diff, upper_gamma

_QUAD_TOL = Tolerance(abs_tol=1e-13, rel_tol=1e-13)


@dataclass
class MetricMatrix:
    """Symmetric metric matrix tagged with its coordinate chart.

    chart ``simplex_interior`` means coordinates (p_1, ..., p_{n-1}) with
    p_0 dependent; chart ``theta`` means natural parameters.
    """
    entries: np.ndarray
    chart: str
    base_point: object = None

    def __post_init__(self):
        m = np.asarray(self.entries, dtype=float)
        self.entries = 0.5 * (m + m.T)

    def is_positive_definite(self, floor: float = 0.0) -> bool:
        return bool(np.all(np.linalg.eigvalsh(self.entries) > floor))


@dataclass
class DualityReport:
    lhs_label: str
    rhs_label: str
    max_abs_residual: float
    max_rel_residual: float
    grid: list = field(default_factory=list)
    conformal_factor: list | None = None

    @property
    def ok(self) -> bool:
        return math.isfinite(self.max_rel_residual)


def _report(lhs_label, rhs_label, pairs, grid=None, conformal=None):
    abs_res = 0.0
    rel_res = 0.0
    for lhs, rhs in pairs:
        lhs = np.asarray(lhs, dtype=float)
        rhs = np.asarray(rhs, dtype=float)
        diff = float(np.max(np.abs(lhs - rhs)))
        scale = max(float(np.max(np.abs(lhs))), float(np.max(np.abs(rhs))), 1e-300)
        abs_res = max(abs_res, diff)
        rel_res = max(rel_res, diff / scale)
    return DualityReport(lhs_label, rhs_label, abs_res, rel_res,
                         grid=list(grid or []), conformal_factor=conformal)


def _require_interior(p: ProbVec, what: str):
    if not p.interior:
        raise BoundaryError(f"{what} requires an interior probability vector")


# ---------------------------------------------------------------------------
# Entropies

def _log_int0(d: Deformation, p: float) -> float:
    """integral_0^p log_phi(x) dx, closed form if the family carries one."""
    if p == 0.0:
        return 0.0
    if d.log_int0 is not None:
        return d.log_int0(p)
    # Substitute x = exp(-t): the integrand log_phi(e^-t) e^-t must decay.
    t0 = -math.log(p)

    def g(t):
        return d.log(math.exp(-t)) * math.exp(-t)

    probes = [abs(g(t)) for t in (50.0, 100.0, 200.0)]
    if not (probes[1] < max(probes[0], 1e-280) and probes[2] < 1e-12):
        raise DivergentIntegralError(
            f"{d.name}: integral of log_phi from 0 diverges")
    t_hi = 200.0
    while abs(g(t_hi)) > 1e-16 and t_hi < 700.0:
        t_hi *= 1.5
    return integrate(g, t0, t_hi, _QUAD_TOL)


def entropy_naudts(d: Deformation, p: ProbVec) -> float:
    """Linear-constraint (Naudts) entropy: -sum_j integral_0^{p_j} log_phi."""
    return -sum(_log_int0(d, pj) for pj in p.probs)


def entropy_amari(d: Deformation, p: ProbVec) -> float:
    """Escort-constraint (Amari, canonical) entropy:
    -(1/h_phi) sum_j phi(p_j) log_phi(p_j)."""
    _require_interior(p, "entropy_amari")
    h = h_phi(d, p)
    return -sum(d.phi(pj) * d.log(pj) for pj in p.probs) / h


def entropy_from_phi_nu(d: Deformation, nu: float, p: ProbVec) -> float:
    """Trace-form entropy sum_i (phi(p_i) - p_i)/nu of the deformed-log
    duality (Tsallis entropy for phi = x^q, nu = 1-q)."""
    _require_interior(p, "entropy_from_phi_nu")
    return sum((d.phi(pj) - pj) / nu for pj in p.probs)


# ---------------------------------------------------------------------------
# Divergences

def divergence_naudts(d: Deformation, p: ProbVec, q: ProbVec) -> float:
    """sum_j integral_{q_j}^{p_j} (log_phi(x) - log_phi(q_j)) dx >= 0."""
    _require_interior(p, "divergence_naudts")
    _require_interior(q, "divergence_naudts")
    total = 0.0
    for pj, qj in zip(p.probs, q.probs):
        if d.log_int0 is not None:
            part = d.log_int0(pj) - d.log_int0(qj)
        else:
            part = integrate(d.log, qj, pj, _QUAD_TOL) if pj != qj else 0.0
        total += part - d.log(qj) * (pj - qj)
    return total


def divergence_amari(d: Deformation, p: ProbVec, q: ProbVec) -> float:
    """(1/h_phi(p)) sum_j phi(p_j) (log_phi(p_j) - log_phi(q_j))."""
    _require_interior(p, "divergence_amari")
    _require_interior(q, "divergence_amari")
    h = h_phi(d, p)
    return sum(d.phi(pj) * (d.log(pj) - d.log(qj))
               for pj, qj in zip(p.probs, q.probs)) / h


def divergence_csiszar(f, p: ProbVec, q: ProbVec) -> float:
    """Csiszar f-divergence sum_i q_i f(p_i/q_i) for convex f with f(1)=0."""
    _require_interior(q, "divergence_csiszar")
    return sum(qj * f(pj / qj) for pj, qj in zip(p.probs, q.probs))


def divergence_bregman(F, gradF, p: ProbVec, q: ProbVec) -> float:
    """Bregman divergence F(p) - F(q) - <grad F(q), p - q>."""
    g = np.asarray(gradF(q), dtype=float)
    return float(F(p) - F(q) - g @ (p.probs - q.probs))


# ---------------------------------------------------------------------------
# Metrics

def metric_naudts(d: Deformation, p: ProbVec) -> MetricMatrix:
    """g^N = diag(1/phi(p_i)) + 1/phi(p_0), simplex-interior chart."""
    _require_interior(p, "metric_naudts")
    inv = np.array([1.0 / d.phi(pj) for pj in p.probs])
    m = np.diag(inv[1:]) + inv[0]
    return MetricMatrix(m, "simplex_interior", p)


def metric_amari(d: Deformation, p: ProbVec) -> MetricMatrix:
    """g^A = (1/h_phi) (diag(phi'/phi (p_i)) + phi'/phi (p_0))."""
    _require_interior(p, "metric_amari")
    h = h_phi(d, p)
    ratio = np.array([d.phi_prime(pj) / d.phi(pj) for pj in p.probs])
    m = (np.diag(ratio[1:]) + ratio[0]) / h
    return MetricMatrix(m, "simplex_interior", p)


def metric_fd_oracle(div, p: ProbVec) -> MetricMatrix:
    """Finite-difference Hessian of q -> div(p, q) at q = p over the
    simplex-interior coordinates.  The independent oracle for the closed
    metric formulas."""
    _require_interior(p, "metric_fd_oracle")

    def f(y):
        vec = np.concatenate(([1.0 - y.sum()], y))
        return div(p, ProbVec(vec))

    H = numeric_diff(f, p.probs[1:], "hessian")
    return MetricMatrix(np.atleast_2d(H), "simplex_interior", p)


def t_operator(d: Deformation, p: ProbVec) -> MetricMatrix:
    """The local transform T(g)(x) = -N_g (log g)'(x) applied to the Naudts
    diagonal generator g = 1/phi, with N_g = 1/sum_i(1/g(p_i)) = 1/h_phi.

    With that normalization T(g^N) reproduces the escort-constraint metric.
    """
    _require_interior(p, "t_operator")
    n_g = 1.0 / h_phi(d, p)
    # -(log(1/phi))' = phi'/phi
    vals = np.array([n_g * d.phi_prime(pj) / d.phi(pj) for pj in p.probs])
    m = np.diag(vals[1:]) + vals[0]
    return MetricMatrix(m, "simplex_interior", p)


def ts_metric_transform(d_ht: Deformation, nu: float, p: ProbVec) -> MetricMatrix:
    """T_nu(g)(x) = g(x) / (1 + nu * integral_1^x g)^2 applied to g = 1/phi.

    Written this way round the transform sends 1/phi to 1/phi_TS, since the
    dual generator is phi_TS = phi * (1 + nu * log_phi)^2; the factor moves
    upstairs only when the transform acts on phi itself.  The deformed-log
    integral is evaluated by quadrature here, so agreement with
    metric_naudts(ts_dual(d, nu), p) is a genuine two-path check.
    """
    _require_interior(p, "ts_metric_transform")

    def val(x):
        acc = integrate(lambda y: 1.0 / d_ht.phi(y), 1.0, x, _QUAD_TOL)
        return 1.0 / ((1.0 + nu * acc) ** 2 * d_ht.phi(x))

    vals = np.array([val(pj) for pj in p.probs])
    m = np.diag(vals[1:]) + vals[0]
    return MetricMatrix(m, "simplex_interior", p)


def conformal_check(chi: Deformation, p: ProbVec,
                    xi: Deformation | None = None) -> DualityReport:
    """Check g^N_chi = h_xi * g^A_xi with xi = exp(log_chi).

    A pre-built xi may be passed to amortize its construction over many
    points."""
    _require_interior(p, "conformal_check")
    if xi is None:
        xi = exp_of_log(chi)
    lhs = metric_naudts(chi, p).entries
    omega = h_phi(xi, p)
    rhs = omega * metric_amari(xi, p).entries
    return _report("naudts_metric(chi)", "h_xi * amari_metric(xi)",
                   [(lhs, rhs)], grid=[p.probs.tolist()],
                   conformal=[omega])


# ---------------------------------------------------------------------------
# (c,d) closed forms

def cd_entropy_closed(params: CdParams, p: ProbVec) -> float:
    """The printed (c,d)-entropy r A^-d e^A sum_i Gamma(1+d, A - c ln p_i) - rc.

    Note: this equals c times the integral-form entropy of the (c,d)-log
    (a p-independent multiplicative constant, consistent with the
    entropy-up-to-a-constant convention)."""
    if params.branch != "generic":
        raise BranchError(
            f"cd_entropy_closed: no closed form on branch {params.branch}")
    c, d, r, A = params.c, params.d, params.r, params.A
    s = sum(upper_gamma(1.0 + d, A - c * math.log(pj)) for pj in p.probs)
    return r * A ** (-d) * math.exp(A) * s - r * c


def cd_entropy_aligned(params: CdParams, p: ProbVec,
                       constant: float | None = None) -> float:
    """Closed-form (c,d)-entropy mapped onto the integral-form convention:
    divide out the factor c, then shift by a constant fixed once at the
    uniform distribution (see cd_entropy_alignment_constant)."""
    base = cd_entropy_closed(params, p) / params.c
    return base + (constant if constant is not None else 0.0)


def cd_entropy_alignment_constant(params: CdParams, n: int) -> float:
    """The additive constant aligning cd_entropy_closed/c with the
    quadrature entropy, computed once at the uniform distribution."""
    u = uniform(n)
    quad = entropy_naudts(cd_family(params.c, params.d, params.r), u)
    return quad - cd_entropy_closed(params, u) / params.c


def _cd_printed_naudts_term(params: CdParams, x: float) -> float:
    c, d, r = params.c, params.d, params.r
    k = (c - 1.0) * r + 1.0
    lx = math.log(x)
    dfam_log = r - r * x ** (c - 1.0) * (1.0 - (k / (d * r)) * lx) ** d
    num = (c - 1.0) * k * lx + d
    den = (-c * r + r - 1.0) * lx + d * r
    return (r - dfam_log) / x * (num / den)


def _cd_printed_amari_term(params: CdParams, x: float) -> float:
    c, d, r = params.c, params.d, params.r
    k = (c - 1.0) * r + 1.0
    lx = math.log(x)
    t1 = (d - 1.0) * k / (k * lx - d * r)
    t2 = ((c - 1.0) ** 2 * r + c - 1.0) / (
        (c - 1.0) * d * r - c * d * r + (c - 1.0) * k * lx + d + d * r)
    return (2.0 - c - t1 - t2) / x


def cd_metrics_closed(params: CdParams, p: ProbVec):
    """Evaluate the two printed (c,d) metric expressions verbatim.

    Returns (naudts_matrix, amari_matrix).  The printed Naudts form equals
    the generic 1/phi metric; the printed Amari form omits the global
    1/h_phi factor of the general escort metric, so the attached check
    compares it against h_phi * metric_amari.  Both reports are stored on
    the matrices as ``.check``.
    """
    if params.branch != "generic":
        raise BranchError(
            f"cd_metrics_closed: no closed form on branch {params.branch}")
    _require_interior(p, "cd_metrics_closed")
    nvals = np.array([_cd_printed_naudts_term(params, pj) for pj in p.probs])
    avals = np.array([_cd_printed_amari_term(params, pj) for pj in p.probs])
    mN = MetricMatrix(np.diag(nvals[1:]) + nvals[0], "simplex_interior", p)
    mA = MetricMatrix(np.diag(avals[1:]) + avals[0], "simplex_interior", p)

    dfam = cd_family(params.c, params.d, params.r)
    h = h_phi(dfam, p)
    mN.check = _report("printed_naudts", "generic_naudts",
                       [(mN.entries, metric_naudts(dfam, p).entries)])
    mA.check = _report("printed_amari", "h_phi * generic_amari",
                       [(mA.entries, h * metric_amari(dfam, p).entries)])
    return mN, mA
