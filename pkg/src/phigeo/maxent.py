"""Deformed exponential families on finite configuration sets: the
normalizer Psi, maximum-entropy fitting under linear and escort moment
constraints, and the Legendre pair built on the Massieu function -Psi."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linprog

from .deform import Deformation, ProbVec, escort
from .errors import (BoundaryError, ConvergenceError, DomainError,
                     InfeasibleTargetError, NoNormalizationError, RangeError)
from .specfun import GRAD_STEP, Tolerance, find_root

_ROOT_TOL = Tolerance(abs_tol=1e-14, rel_tol=1e-14, max_iter=300)


@dataclass(frozen=True)
class ConfigMatrix:
    """n states by m constraints; row i is the configuration vector E_i.

    The columns must be linearly independent of each other and of the
    all-ones vector, otherwise theta is not identifiable.
    """
    E: np.ndarray

    def __post_init__(self):
        m = np.atleast_2d(np.asarray(self.E, dtype=float))
        if m.shape[0] == 1 and m.shape[1] > 1 and np.ndim(self.E) == 1:
            m = m.T
        object.__setattr__(self, "E", m)
        n, k = m.shape
        if n < 2 or k < 1:
            raise DomainError(f"configuration matrix must be at least 2x1, got {n}x{k}")
        if not np.all(np.isfinite(m)):
            raise DomainError("configuration matrix has non-finite entries")
        aug = np.column_stack([np.ones(n), m])
        if np.linalg.matrix_rank(aug) < k + 1:
            raise DomainError(
                "columns of E plus the constant are linearly dependent; "
                "theta would not be identifiable")

    @property
    def n_states(self) -> int:
        return self.E.shape[0]

    @property
    def n_constraints(self) -> int:
        return self.E.shape[1]


@dataclass(frozen=True)
class PhiExpFamily:
    """p_i = exp_phi(psi + theta . E_i) with psi caching the normalizer."""
    d: Deformation
    E: ConfigMatrix
    theta: np.ndarray
    psi: float
    pmf: ProbVec

    def __post_init__(self):
        object.__setattr__(self, "theta", np.asarray(self.theta, dtype=float))


def normalize(d: Deformation, E: ConfigMatrix, theta) -> PhiExpFamily:
    """Find the unique psi with sum_i exp_phi(psi + theta . E_i) = 1.

    The sum is non-decreasing in psi (strictly where positive), so a
    bracketed root finder applies; states may sit below the cutoff.
    """
    theta = np.asarray(theta, dtype=float).reshape(-1)
    if theta.shape[0] != E.n_constraints:
        raise DomainError("theta length does not match constraint count")
    if not np.all(np.isfinite(theta)):
        raise DomainError("theta must be finite")
    a = E.E @ theta
    n = E.n_states

    def total(psi):
        return sum(d.exp(psi + ai) for ai in a)

    log_unif = d.log(1.0 / n)
    lo = log_unif - float(np.max(a))
    hi = log_unif - float(np.min(a))
    # keep every argument strictly below the upper range limit
    cap = d.log_upper_limit - float(np.max(a))
    if math.isfinite(cap):
        hi = min(hi, lo + 0.999999 * (cap - lo))
    f_hi = total(hi) - 1.0
    grow = 0
    while f_hi < 0.0:
        if math.isfinite(cap) and hi >= lo + 0.9999995 * (cap - lo):
            raise NoNormalizationError(
                f"{d.name}: no psi below the range limit normalizes theta={theta}")
        step = max(hi - lo, 1.0)
        hi = hi + step if not math.isfinite(cap) else min(
            hi + step, lo + 0.9999995 * (cap - lo))
        f_hi = total(hi) - 1.0
        grow += 1
        if grow > 200:
            raise NoNormalizationError(
                f"{d.name}: failed to bracket the normalizer for theta={theta}")
    psi = find_root(lambda s: total(s) - 1.0, lo, hi, _ROOT_TOL)
    probs = np.array([d.exp(psi + ai) for ai in a])
    s = probs.sum()
    if abs(s - 1.0) > 1e-10:
        raise NoNormalizationError(
            f"{d.name}: normalizer residual {s - 1.0:.3e} too large")
    return PhiExpFamily(d, E, theta, psi, ProbVec(probs / s))


def _require_interior(fam: PhiExpFamily, what: str):
    if not fam.pmf.interior:
        raise BoundaryError(f"{what}: pmf has cutoff zeros")


def psi_forms(fam: PhiExpFamily) -> dict:
    """The normalizer recovered three ways.

    From log_phi(p_i) = psi + theta . E_i, averaging with any weights w
    gives psi = <log_phi(p)>_w - theta . <E>_w; psi_linear uses w = p,
    psi_escort the escort weights.  phi_sum_diagnostic reports -sum phi(p_i),
    a quantity sometimes quoted as the normalizer but generally different
    from it; it is returned without any equality claim.
    """
    _require_interior(fam, "psi_forms")
    d, p = fam.d, fam.pmf.probs
    logs = np.array([d.log(pj) for pj in p])
    esc = escort(d, fam.pmf).probs
    mom_lin = fam.E.E.T @ p
    mom_esc = fam.E.E.T @ esc
    return {
        "psi_root": fam.psi,
        "psi_linear": float(logs @ p - fam.theta @ mom_lin),
        "psi_escort": float(logs @ esc - fam.theta @ mom_esc),
        "phi_sum_diagnostic": float(-sum(d.phi(pj) for pj in p)),
    }


def eta_coords(fam: PhiExpFamily) -> np.ndarray:
    """Dual coordinates: escort moments eta = E^T . escort(pmf).

    They equal the gradient of the Massieu function -psi(theta); the
    normalizer itself has gradient -eta."""
    _require_interior(fam, "eta_coords")
    return fam.E.E.T @ escort(fam.d, fam.pmf).probs


def massieu(fam: PhiExpFamily) -> float:
    """-psi, the potential whose theta-gradient is eta."""
    return -fam.psi


def varphi_dual(fam: PhiExpFamily) -> dict:
    """The Legendre transform of the Massieu function at eta.

    legendre_value = theta . eta - (-psi); escort_average_value is the
    escort mean of log_phi(p).  Both equal minus the escort-constraint
    entropy."""
    _require_interior(fam, "varphi_dual")
    d, p = fam.d, fam.pmf.probs
    eta = eta_coords(fam)
    esc = escort(d, fam.pmf).probs
    avg = float(sum(P * d.log(pj) for P, pj in zip(esc, p)))
    return {
        "legendre_value": float(fam.theta @ eta + fam.psi),
        "escort_average_value": avg,
    }


def _hull_check(E: ConfigMatrix, targets: np.ndarray):
    """Require the targets strictly inside the convex hull of the rows of E.

    Solved as an LP maximizing the smallest weight of a representing
    mixture; a non-positive optimum means the targets sit outside or on a
    face reachable only by boundary distributions."""
    n, m = E.E.shape
    # variables: w_1..w_n, t ; maximize t
    c = np.zeros(n + 1)
    c[-1] = -1.0
    A_eq = np.zeros((m + 1, n + 1))
    A_eq[:m, :n] = E.E.T
    A_eq[m, :n] = 1.0
    b_eq = np.concatenate([targets, [1.0]])
    A_ub = np.zeros((n, n + 1))
    A_ub[:, :n] = -np.eye(n)
    A_ub[:, -1] = 1.0
    res = linprog(c, A_ub=A_ub, b_ub=np.zeros(n), A_eq=A_eq, b_eq=b_eq,
                  bounds=[(None, None)] * n + [(None, None)], method="highs")
    if not res.success or -res.fun <= 1e-10:
        raise InfeasibleTargetError(
            f"targets {targets} are not strictly inside the hull of the "
            "configuration rows")


def _fit(d: Deformation, E: ConfigMatrix, targets, moment_fn, label):
    targets = np.asarray(targets, dtype=float).reshape(-1)
    if targets.shape[0] != E.n_constraints:
        raise DomainError("target length does not match constraint count")
    _hull_check(E, targets)
    m = E.n_constraints

    def residual(theta):
        fam = normalize(d, E, theta)
        return moment_fn(fam) - targets, fam

    theta = np.zeros(m)
    r, fam = residual(theta)
    norm = np.max(np.abs(r))
    for _ in range(100):
        if norm <= 1e-10:
            return fam
        J = np.empty((m, m))
        for j in range(m):
            h = max(abs(theta[j]), 1.0) * GRAD_STEP
            tp = theta.copy(); tp[j] += h
            tm = theta.copy(); tm[j] -= h
            try:
                rp, _ = residual(tp)
                rm, _ = residual(tm)
            except NoNormalizationError:
                raise ConvergenceError(
                    f"{label}: Jacobian stencil left the admissible theta set")
            J[:, j] = (rp - rm) / (2.0 * h)
        try:
            step = np.linalg.solve(J, -r)
        except np.linalg.LinAlgError:
            step = np.linalg.lstsq(J, -r, rcond=None)[0]
        lam = 1.0
        for _ in range(40):
            try:
                r_new, fam_new = residual(theta + lam * step)
            except (NoNormalizationError, RangeError, OverflowError):
                lam *= 0.5
                continue
            if np.max(np.abs(r_new)) < norm:
                theta = theta + lam * step
                r, fam, norm = r_new, fam_new, np.max(np.abs(r_new))
                break
            lam *= 0.5
        else:
            raise ConvergenceError(
                f"{label}: damped Newton stalled at residual {norm:.3e}")
    if norm <= 1e-8:
        return fam
    raise ConvergenceError(f"{label}: residual {norm:.3e} after iteration budget")


def fit_linear_moments(d: Deformation, E: ConfigMatrix, targets) -> PhiExpFamily:
    """theta such that E^T . pmf = targets (entropy of integral type is
    maximal under these plain moment constraints)."""
    return _fit(d, E, targets, lambda fam: E.E.T @ fam.pmf.probs,
                "fit_linear_moments")


def fit_escort_moments(d: Deformation, E: ConfigMatrix, targets) -> PhiExpFamily:
    """theta such that E^T . escort(pmf) = targets (canonical entropy is
    maximal under escort moment constraints)."""
    return _fit(d, E, targets,
                lambda fam: E.E.T @ escort(d, fam.pmf).probs,
                "fit_escort_moments")
