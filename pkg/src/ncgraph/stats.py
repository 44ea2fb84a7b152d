"""Comparison of simulated snapshots with the limiting distributions."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, asdict, field
from typing import Optional

import numpy as np
from scipy import optimize, stats

from .limits import LimitTable, u_d
from .params import ModelParams, derive_constants
from .simulator import Snapshot


class InsufficientSupportError(ValueError):
    pass


class FitMethod(enum.Enum):
    LOGLOG_LS = "loglog_ls"
    DISCRETE_MLE = "discrete_mle"


@dataclass
class EmpiricalDistribution:
    """Normalised X(n,d,w)/V_n, X(n,w)/V_n and U(n,d)/V_n.

    ``n`` and ``V_n`` are None when the distribution comes from theory.
    """

    xdw: dict
    xw: dict
    ud: dict
    n: Optional[int] = None
    V_n: Optional[int] = None


def empirical_ratios(snap: Snapshot) -> EmpiricalDistribution:
    V = snap.V_n
    if V <= 0:
        raise ValueError("snapshot has no vertices")
    return EmpiricalDistribution(
        xdw={cell: c / V for cell, c in snap.xdw.items()},
        xw={w: c / V for w, c in snap.xw.items()},
        ud={d: c / V for d, c in snap.ud.items()},
        n=snap.n,
        V_n=V,
    )


def degree_marginals(table: LimitTable, D_cut: int, eps: float = 0.1, tail_tol: float = 1e-10) -> dict:
    return {d: u_d(table.constants, table.N, d, eps, tail_tol)[0] for d in range(table.N - 1, D_cut + 1)}


def theoretical_distribution(table: LimitTable, D_cut: int, eps: float = 0.1,
                             tail_tol: float = 1e-10) -> EmpiricalDistribution:
    """The limit law in the same shape as :func:`empirical_ratios` output."""
    xdw = {(d, w): x for d, w, x in table.cells() if x > 0}
    xw = {w: float(x) for w, x in enumerate(table.xw, start=1)}
    return EmpiricalDistribution(xdw, xw, degree_marginals(table, D_cut, eps, tail_tol))


def _tv_truncated(emp: dict, theo: dict, keys) -> tuple:
    """TV distance after renormalising both laws on ``keys``; also the two truncated masses."""
    a = np.array([emp.get(k, 0.0) for k in keys])
    b = np.array([theo.get(k, 0.0) for k in keys])
    A, B = a.sum(), b.sum()
    tv = 0.5 * float(np.abs(a / A - b / B).sum()) if A > 0 and B > 0 else 1.0
    return tv, 1.0 - float(A), 1.0 - float(B)


def fit_power_law_exponent(dist: dict, k_min: int, k_max: int,
                           method: FitMethod = FitMethod.LOGLOG_LS) -> tuple:
    """Fit ``mass(k) ~ k^slope`` on ``[k_min, k_max]``; returns ``(slope, stderr)``.

    The slope is negative for a decaying law (``-(1 + 1/alpha)`` for the weights).
    DISCRETE_MLE treats the masses as counts of a power law truncated to the
    window and reports the inverse-Fisher standard error.
    """
    ks = np.array(sorted(k for k, m in dist.items() if k_min <= k <= k_max and m > 0), dtype=float)
    if len(ks) < 10:
        raise InsufficientSupportError(
            f"need at least 10 support points in [{k_min}, {k_max}], found {len(ks)}")
    mass = np.array([dist[int(k)] for k in ks], dtype=float)
    if method is FitMethod.LOGLOG_LS:
        res = stats.linregress(np.log(ks), np.log(mass))
        return float(res.slope), float(res.stderr)

    support = np.arange(k_min, k_max + 1, dtype=float)
    log_support = np.log(support)
    total = mass.sum()
    sum_log = float((mass * np.log(ks)).sum())

    def nll(gamma):
        return gamma * sum_log + total * _logsumexp(-gamma * log_support)

    res = optimize.minimize_scalar(nll, bounds=(1e-6, 50.0), method="bounded",
                                   options={"xatol": 1e-10})
    gamma = float(res.x)
    weights = np.exp(-gamma * log_support - _logsumexp(-gamma * log_support))
    mean = (weights * log_support).sum()
    var = (weights * (log_support - mean) ** 2).sum()
    return -gamma, float(1.0 / math.sqrt(total * var))


def _logsumexp(v: np.ndarray) -> float:
    m = v.max()
    return float(m + np.log(np.exp(v - m).sum()))


def vn_drift(snapshots, p: float) -> list:
    """``(n, |V_n/n - p|)`` for every snapshot with n > 0."""
    return [(s.n, abs(s.V_n / s.n - p)) for s in snapshots if s.n > 0]


@dataclass
class ComparisonReport:
    params: dict
    n: Optional[int]
    V_n: Optional[int]
    W_cut: int
    D_cut: int
    max_cell_deviation: float
    max_cell: list
    tv_weights: float
    tv_degrees: Optional[float]
    weight_truncation_mass: dict
    degree_truncation_mass: dict
    fit_window: list
    fit_method: str
    # both exponents are positive: mass(w) ~ w^-exponent
    fitted_exponent: Optional[float]
    fitted_exponent_stderr: Optional[float]
    theoretical_exponent: Optional[float]
    vn_drift: Optional[float]
    notes: list = field(default_factory=list)

    def as_dict(self) -> dict:
        return asdict(self)


def default_fit_window(W_cut: int) -> tuple:
    return max(10, W_cut // 10), W_cut


def compare(empirical: EmpiricalDistribution, table: LimitTable, params: ModelParams,
            W_cut: int, D_cut: int, fit_window: Optional[tuple] = None,
            fit_method: FitMethod = FitMethod.LOGLOG_LS, eps: float = 0.1,
            tail_tol: float = 1e-10, ud_theory: Optional[dict] = None) -> ComparisonReport:
    N = table.N
    if W_cut > table.W_max:
        raise ValueError(f"W_cut = {W_cut} exceeds table range {table.W_max}")
    constants = derive_constants(params)
    notes = []
    if ud_theory is None and constants.alpha2 > 0:
        ud_theory = degree_marginals(table, D_cut, eps, tail_tol)

    max_dev, max_cell = 0.0, [N - 1, 1]
    for w in range(1, W_cut + 1):
        for k, x in enumerate(table.row(w)):
            d = k + N - 1
            dev = abs(empirical.xdw.get((d, w), 0.0) - float(x))
            if dev > max_dev:
                max_dev, max_cell = dev, [d, w]

    theo_w = {w: float(x) for w, x in enumerate(table.xw, start=1)}
    tv_w, emp_w_trunc, theo_w_trunc = _tv_truncated(empirical.xw, theo_w, range(1, W_cut + 1))
    if ud_theory is None:
        tv_d = emp_d_trunc = theo_d_trunc = None
        notes.append("degree comparison unsupported: alpha2 = 0")
    else:
        tv_d, emp_d_trunc, theo_d_trunc = _tv_truncated(empirical.ud, ud_theory, range(N - 1, D_cut + 1))

    window = tuple(fit_window) if fit_window else default_fit_window(W_cut)
    try:
        slope, stderr = fit_power_law_exponent(empirical.xw, window[0], window[1], fit_method)
        fitted = -slope
    except InsufficientSupportError as exc:
        fitted, stderr = None, None
        notes.append(str(exc))

    drift = None
    if empirical.n:
        drift = abs(empirical.V_n / empirical.n - params.p)

    return ComparisonReport(
        params=params.as_dict(),
        n=empirical.n,
        V_n=empirical.V_n,
        W_cut=W_cut,
        D_cut=D_cut,
        max_cell_deviation=max_dev,
        max_cell=max_cell,
        tv_weights=tv_w,
        tv_degrees=tv_d,
        weight_truncation_mass={"empirical": emp_w_trunc, "theory": theo_w_trunc},
        degree_truncation_mass={"empirical": emp_d_trunc, "theory": theo_d_trunc},
        fit_window=list(window),
        fit_method=fit_method.value,
        fitted_exponent=fitted,
        fitted_exponent_stderr=stderr,
        theoretical_exponent=constants.gamma_exponent,
        vn_drift=drift,
        notes=notes,
    )
