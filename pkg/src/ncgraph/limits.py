"""Limiting weight/degree distributions of the N-interactions graph.

``x[d, w]`` is the a.s. limit of the fraction of vertices with degree ``d`` and
weight ``w``.  It obeys the row recurrence::

    x[N-1, 1] = 1 / (alpha + beta + 1)
    x[d, w] = (alpha1 (w-1) x[d, w-1] + alpha2 (w-1) x[d-1, w-1]
               + beta x[d-(N-1), w-1]) / (alpha w + beta + 1)

Row sums give the weight law ``x_w`` with ratio
``(alpha (w-1) + beta) / (alpha w + beta + 1)``, which has a Gamma-function
closed form and a ``w^-(1 + 1/alpha)`` tail.  Degree marginals ``u_d`` sum a
column over all weights.

The joint law also has a product representation: ``W ~ x_w`` and
``S_W = xi_1 + ... + xi_W`` with ``xi_1 = N-1`` and ``xi_j`` in ``{0, 1, N-1}``
with weights ``alpha1 (j-1), alpha2 (j-1), beta``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammaln

from .params import DerivedConstants, DomainError

__all__ = [
    "LimitTable", "SwMoments", "RepresentationSample",
    "xdw_table", "xw_recurrence", "xw_closed_form", "xw_asymptotic", "xw_tail_mass",
    "weight_constant", "sw_moments", "clt_approx_xdw", "u_d", "u_d_asymptotic",
    "representation_joint", "sample_representation", "weight_cap",
]


@dataclass
class LimitTable:
    """Jagged table of ``x[d, w]``; ``rows[w-1][d-(N-1)]`` for d in N-1..(N-1)w."""

    constants: DerivedConstants
    N: int
    W_max: int
    rows: list = field(repr=False)
    xw: np.ndarray = field(repr=False)
    normalization_deficit: float = 0.0

    def row(self, w: int) -> np.ndarray:
        return self.rows[w - 1]

    def x(self, d: int, w: int) -> float:
        if not 1 <= w <= self.W_max:
            raise IndexError(f"weight {w} outside table range 1..{self.W_max}")
        k = d - (self.N - 1)
        row = self.rows[w - 1]
        return float(row[k]) if 0 <= k < len(row) else 0.0

    def cells(self):
        """Yield ``(d, w, x_dw)`` for every stored cell."""
        for w, row in enumerate(self.rows, start=1):
            for k, value in enumerate(row):
                yield k + self.N - 1, w, float(value)


@dataclass(frozen=True)
class SwMoments:
    w: int
    mean: float
    variance: float


def _require_alpha(constants: DerivedConstants, what: str):
    if not constants.alpha > 0:
        raise DomainError(f"{what} requires alpha > 0 (got alpha = {constants.alpha})")


def _next_row(prev: np.ndarray, w: int, N: int, c: DerivedConstants) -> np.ndarray:
    n = len(prev)
    row = np.zeros(n + N - 1)
    row[:n] += c.alpha1 * (w - 1) * prev
    row[1:n + 1] += c.alpha2 * (w - 1) * prev
    row[N - 1:] += c.beta * prev
    return row / (c.alpha * w + c.beta + 1)


def xdw_table(constants: DerivedConstants, N: int, W_max: int) -> LimitTable:
    if W_max < 1:
        raise ValueError("W_max must be at least 1")
    row = np.array([1.0 / (constants.alpha + constants.beta + 1)])
    rows = [row]
    for w in range(2, W_max + 1):
        row = _next_row(row, w, N, constants)
        rows.append(row)
    xw = np.array([r.sum() for r in rows])
    return LimitTable(constants, N, W_max, rows, xw, 1.0 - float(xw.sum()))


def xw_recurrence(constants: DerivedConstants, W_max: int) -> np.ndarray:
    """``x_1 .. x_{W_max}`` from the scalar recurrence (valid for alpha = 0)."""
    a, b = constants.alpha, constants.beta
    w = np.arange(2, W_max + 1, dtype=float)
    ratios = (a * (w - 1) + b) / (a * w + b + 1)
    return np.concatenate(([1.0], np.cumprod(ratios))) / (a + b + 1)


def weight_constant(constants: DerivedConstants) -> float:
    """The constant C in ``x_w ~ C w^-(1 + 1/alpha)``."""
    _require_alpha(constants, "the weight power-law constant")
    a, b = constants.alpha, constants.beta
    return math.exp(gammaln(1 + (b + 1) / a) - gammaln(1 + b / a)) / a


def xw_closed_form(constants: DerivedConstants, w):
    _require_alpha(constants, "the closed form of x_w")
    a, b = constants.alpha, constants.beta
    w = np.asarray(w, dtype=float)
    log_x = (gammaln(1 + (b + 1) / a) - gammaln(1 + b / a) - math.log(a)
             + gammaln(w + b / a) - gammaln(w + (b + 1) / a + 1))
    out = np.exp(log_x)
    return float(out) if out.ndim == 0 else out


def xw_asymptotic(constants: DerivedConstants, w):
    C = weight_constant(constants)
    out = C * np.asarray(w, dtype=float) ** -(1 + 1 / constants.alpha)
    return float(out) if out.ndim == 0 else out


def xw_tail_mass(constants: DerivedConstants, W: int, x_W: float | None = None) -> float:
    """Exact ``sum_{w > W} x_w``.

    The recurrence telescopes: with ``g_w = (alpha w + beta) x_w`` one has
    ``x_w = g_{w-1} - g_w`` and ``g_w -> 0``, so the tail equals ``g_W``.
    """
    if W < 1:
        return 1.0
    if x_W is None:
        x_W = float(xw_recurrence(constants, W)[-1])
    return (constants.alpha * W + constants.beta) * x_W


def _xi_laws(constants: DerivedConstants, j: np.ndarray):
    """Probabilities of xi_j in {0, 1, N-1} for j >= 2."""
    jm1 = np.asarray(j, dtype=float) - 1
    total = constants.alpha * jm1 + constants.beta
    return constants.alpha1 * jm1 / total, constants.alpha2 * jm1 / total, constants.beta / total


def _sw_moment_arrays(constants: DerivedConstants, N: int, w_max: int):
    """Mean and variance of S_1 .. S_{w_max}."""
    if w_max >= 2 and constants.alpha == 0 and constants.beta == 0:
        raise DomainError("xi law is degenerate when alpha = beta = 0")
    j = np.arange(2, w_max + 1)
    _, p1, pn = _xi_laws(constants, j)
    mean_xi = p1 + (N - 1) * pn
    var_xi = p1 + (N - 1) ** 2 * pn - mean_xi ** 2
    mean = np.concatenate(([N - 1.0], N - 1 + np.cumsum(mean_xi)))
    var = np.concatenate(([0.0], np.cumsum(var_xi)))
    return mean, var


def sw_moments(constants: DerivedConstants, N: int, w: int) -> SwMoments:
    if w < 1:
        raise ValueError("w must be at least 1")
    mean, var = _sw_moment_arrays(constants, N, w)
    return SwMoments(w, float(mean[-1]), float(var[-1]))


def clt_approx_xdw(constants: DerivedConstants, N: int, d, w: int):
    """Gaussian local approximation of ``x[d, w]`` for large ``w``."""
    a1, a2 = constants.alpha1, constants.alpha2
    if not (a1 > 0 and a2 > 0):
        raise DomainError("local CLT approximation needs alpha1 > 0 and alpha2 > 0")
    if w < 2:
        raise ValueError("local CLT approximation needs w >= 2")
    m = sw_moments(constants, N, w)
    peak = xw_closed_form(constants, w) * constants.alpha / math.sqrt(2 * math.pi * a1 * a2 * w)
    d = np.asarray(d, dtype=float)
    out = peak * np.exp(-(d - m.mean) ** 2 / (2 * m.variance))
    return float(out) if out.ndim == 0 else out


def _degree_column(constants: DerivedConstants, N: int, d: int, W: int) -> np.ndarray:
    """``x[d, w]`` for w = 1..W, running the row recurrence on degrees <= d only.

    Degrees never decrease along a row step, so truncating at ``d`` is exact.
    """
    row = np.zeros(d - (N - 1) + 1)
    row[0] = 1.0 / (constants.alpha + constants.beta + 1)
    column = np.empty(W)
    column[0] = row[-1]
    c = constants
    for w in range(2, W + 1):
        new = c.alpha1 * (w - 1) * row
        new[1:] += c.alpha2 * (w - 1) * row[:-1]
        if len(row) > N - 1:
            new[N - 1:] += c.beta * row[:len(row) - (N - 1)]
        row = new / (c.alpha * w + c.beta + 1)
        column[w - 1] = row[-1]
    return column


def _upper_tail_bound(constants: DerivedConstants, N: int, d: int, W: int, x_W: float) -> float:
    """Certified bound on ``sum_{w > W} x[d, w]``.

    ``x[d, w] = x_w P(S_w = d) <= x_w P(S_w <= d)``.  Each xi_j has mean at
    least alpha2/alpha and lies in [0, N-1], so Hoeffding gives
    ``P(S_w <= d) <= exp(-2 t^2 / ((w-1)(N-1)^2))`` with
    ``t = (w-1) alpha2/alpha - (d-N+1)``; the bound decreases in w once
    t > 0, so the tail is at most its value at W+1 times the exact weight tail.
    """
    slope = constants.alpha2 / constants.alpha
    excess = d - (N - 1)
    s = W  # (W+1) - 1
    t = s * slope - excess
    if t <= 0:
        return xw_tail_mass(constants, W, x_W)
    hoeffding = math.exp(-2 * t * t / (s * (N - 1) ** 2))
    return hoeffding * xw_tail_mass(constants, W, x_W)


def u_d(constants: DerivedConstants, N: int, d: int, eps: float = 0.1, tail_tol: float = 1e-10):
    """Degree marginal ``u_d = sum_w x[d, w]`` and a certified bound on the omitted tail.

    The sum starts at the window ``f +- f^(1/2+eps)`` with ``f = alpha d / alpha2``
    and grows (doubling margin) until the Hoeffding tail bound is below
    ``tail_tol``.
    """
    if d < N - 1:
        raise ValueError(f"degree must be at least N-1 = {N - 1}")
    if not constants.alpha2 > 0:
        raise DomainError("u_d is unsupported when alpha2 = 0")
    if not 0 < eps < 1 / 6:
        raise ValueError("eps must lie in (0, 1/6)")
    f = constants.alpha * d / constants.alpha2
    spread = f ** (0.5 + eps)
    W = max(math.ceil(f + spread), math.ceil(d / (N - 1)))
    margin = max(1, math.ceil(spread))
    while True:
        x_W = float(xw_recurrence(constants, W)[-1])
        bound = _upper_tail_bound(constants, N, d, W, x_W)
        if bound <= tail_tol:
            break
        W += margin
        margin *= 2
    column = _degree_column(constants, N, d, W)
    return float(column.sum()), bound


def u_d_asymptotic(constants: DerivedConstants, d):
    a, a2 = constants.alpha, constants.alpha2
    if not (a > 0 and a2 > 0):
        raise DomainError("degree asymptotics need alpha > 0 and alpha2 > 0")
    log_c = gammaln(1 + (constants.beta + 1) / a) - gammaln(1 + constants.beta / a) - math.log(a2)
    out = math.exp(log_c) * (a * np.asarray(d, dtype=float) / a2) ** -(1 + 1 / a)
    return float(out) if out.ndim == 0 else out


def representation_joint(constants: DerivedConstants, N: int, W_max: int) -> list:
    """Rows of ``P(S_W = d, W = w) = x_w P(S_w = d)`` computed by convolution.

    Independent of :func:`xdw_table`: the degree law of ``S_w`` is built by
    convolving the xi laws and then scaled by the weight law.
    """
    xw = xw_recurrence(constants, W_max)
    dist = np.array([1.0])  # law of S_w - (N-1)
    rows = [xw[0] * dist]
    for w in range(2, W_max + 1):
        p0, p1, pn = (float(v) for v in _xi_laws(constants, w))
        new = np.zeros(len(dist) + N - 1)
        new[:len(dist)] += p0 * dist
        new[1:len(dist) + 1] += p1 * dist
        new[N - 1:] += pn * dist
        dist = new
        rows.append(xw[w - 1] * dist)
    return rows


def weight_cap(constants: DerivedConstants, tail: float = 1e-3, limit: int = 10 ** 7) -> int:
    """Smallest W with ``P(W_limit > W) < tail``."""
    W = 16
    while W <= limit:
        xw = xw_recurrence(constants, W)
        g = (constants.alpha * np.arange(1, W + 1) + constants.beta) * xw
        hits = np.nonzero(g < tail)[0]
        if hits.size:
            return int(hits[0]) + 1
        W *= 2
    raise ValueError(f"weight tail does not fall below {tail} before W = {limit}")


@dataclass
class RepresentationSample:
    counts: dict  # (d, w) -> number of draws
    count: int
    W_cap: int
    truncated_mass: float  # P(W > W_cap) under the exact weight law

    def normalized(self) -> dict:
        return {cell: c / self.count for cell, c in self.counts.items()}


def sample_representation(constants: DerivedConstants, N: int, rng: np.random.Generator,
                          count: int, W_cap: int | None = None) -> RepresentationSample:
    """Monte Carlo draws of ``(S_W, W)``.

    W comes from the weight law truncated at ``W_cap`` and renormalised
    (inverse CDF); then ``xi_2 .. xi_W`` are drawn independently.
    """
    _require_alpha(constants, "sampling the weight law")
    if W_cap is None:
        W_cap = weight_cap(constants)
    xw = xw_recurrence(constants, W_cap)
    truncated_mass = xw_tail_mass(constants, W_cap, float(xw[-1]))
    cdf = np.cumsum(xw)
    cdf /= cdf[-1]
    W = np.searchsorted(cdf, rng.random(count), side="right") + 1
    W = np.minimum(W, W_cap)
    S = np.full(count, N - 1, dtype=np.int64)
    order = np.argsort(-W, kind="stable")
    W_sorted = W[order]
    S_sorted = S[order]
    w_top = int(W_sorted[0]) if count else 1
    active = count
    for j in range(2, w_top + 1):
        while active and W_sorted[active - 1] < j:
            active -= 1
        p0, p1, _ = (float(v) for v in _xi_laws(constants, j))
        u = rng.random(active)
        S_sorted[:active] += np.where(u < p0, 0, np.where(u < p0 + p1, 1, N - 1))
    S[order] = S_sorted
    cells, counts = np.unique(np.stack([S, W]), axis=1, return_counts=True)
    hist = {(int(d), int(w)): int(c) for (d, w), c in zip(cells.T, counts)}
    return RepresentationSample(hist, count, W_cap, truncated_mass)
