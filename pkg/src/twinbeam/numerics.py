"""Shared numerical kernels.

Adaptive Gauss-Kronrod quadrature (21-point Kronrod rule with embedded
10-point Gauss rule), Fourier integrals built on it, bisection, and central
finite differences with one Richardson step.

The integrator is vectorised over panels: the integrand receives a 1-D array
of abscissae and must return an array of the same shape (real or complex).
Refinement is global and deterministic, so identical inputs give
bit-identical results.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Optional

import numpy as np

from .errors import BadBracket, NumericalInstability, QuadratureFailure

__all__ = [
    "QuadratureResult",
    "integrate",
    "fourier_series",
    "find_root",
    "derivative",
    "sinc",
]

# Kronrod abscissae on [-1, 1] (positive half, descending); odd indices are the
# 10-point Gauss nodes.
_XGK = np.array([
    0.995657163025808080735527280689003,
    0.973906528517171720077964012084452,
    0.930157491355708226001207180059508,
    0.865063366688984510732096688423493,
    0.780817726586416897063717578345042,
    0.679409568299024406234327365114874,
    0.562757134668604683339000099272694,
    0.433395394129247190799265943165784,
    0.294392862701460198131126603103866,
    0.148874338981631210884826001129720,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.011694638867371874278064396062192,
    0.032558162307964727478818972459390,
    0.054755896574351996031381300244580,
    0.075039674810919952767043140916190,
    0.093125454583697605535065465083366,
    0.109387158802297641899210590325805,
    0.123491976262065851077600525360081,
    0.134709217311473325928054001771707,
    0.142775938577060080797094273138717,
    0.147739104901338491374841515972068,
    0.149445554002916905664936468389821,
])
_WG = np.array([
    0.066671344308688137593568809893332,
    0.149451349150580593145776339657697,
    0.219086362515982043995534934228163,
    0.269266719309996355091226921569469,
    0.295524224714752870173892994651338,
])

# full 21-node layout: -x0..-x9, 0, x9..x0
NODES = np.concatenate([-_XGK[:-1], [0.0], _XGK[:-1][::-1]])
KRONROD_WEIGHTS = np.concatenate([_WGK[:-1], [_WGK[-1]], _WGK[:-1][::-1]])
GAUSS_WEIGHTS = np.zeros(21)
GAUSS_WEIGHTS[1:10:2] = _WG
GAUSS_WEIGHTS[11:20:2] = _WG[::-1]

_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class QuadratureResult:
    """Value of a definite integral with its error estimate."""

    value: complex | float
    error_estimate: float
    panels_used: int

    def __float__(self) -> float:
        return float(np.real(self.value))


def _gk21(f, lo, hi):
    centre = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo)
    x = centre[:, None] + half[:, None] * NODES[None, :]
    fx = np.asarray(f(x.ravel())).reshape(x.shape)
    if not np.all(np.isfinite(fx)):
        raise QuadratureFailure("integrand returned non-finite values")
    kron = half * (fx @ KRONROD_WEIGHTS)
    gauss = half * (fx @ GAUSS_WEIGHTS)
    # QUADPACK-style error heuristic
    resabs = np.abs(half) * (np.abs(fx) @ KRONROD_WEIGHTS)
    mean = kron / np.where(half == 0, 1.0, 2.0 * half)
    resasc = np.abs(half) * (np.abs(fx - mean[:, None]) @ KRONROD_WEIGHTS)
    err = np.abs(kron - gauss)
    with np.errstate(divide="ignore", invalid="ignore"):
        scaled = np.where(resasc > 0, resasc * np.minimum(1.0, (200.0 * err / resasc) ** 1.5), err)
    err = np.where(resasc > 0, scaled, err)
    err = np.maximum(err, 50.0 * _EPS * resabs)
    return kron, err, resabs


def integrate(
    f: Callable[[np.ndarray], np.ndarray],
    a: float,
    b: float,
    rel_tol: float = 1e-6,
    seeds: Optional[Iterable[float]] = None,
    *,
    abs_tol: float = 0.0,
    n_initial: int = 1,
    max_panels: int = 100_000,
) -> QuadratureResult:
    """Adaptive quadrature of ``f`` over ``[a, b]``.

    Parameters
    ----------
    f : callable
        Vectorised integrand, ``f(x)`` with ``x`` a 1-D array.
    a, b : float
        Integration limits, ``a < b``.
    rel_tol : float
        Relative tolerance on the total integral.
    seeds : iterable of float, optional
        Breakpoints forced as initial panel boundaries (points outside
        ``(a, b)`` are ignored).
    abs_tol : float
        Absolute tolerance floor; the target is ``max(abs_tol, rel_tol*|I|)``,
        never below the roundoff level ``100 eps int|f|``.
    n_initial : int
        Number of equal panels in the starting partition (before seeds).
    max_panels : int
        Panel budget; exceeding it raises :class:`QuadratureFailure`.
    """
    if not a < b:
        raise ValueError(f"integration limits must satisfy a < b, got [{a}, {b}]")
    edges = np.linspace(a, b, max(1, int(n_initial)) + 1)
    if seeds is not None:
        s = np.asarray(list(seeds), dtype=float)
        s = s[(s > a) & (s < b)]
        edges = np.union1d(edges, s)
    lo, hi = edges[:-1], edges[1:]
    if len(lo) > max_panels:
        raise QuadratureFailure(f"initial partition exceeds panel budget {max_panels}")
    vals, errs, absv = _gk21(f, lo, hi)
    min_width = 64 * _EPS * max(abs(a), abs(b))

    while True:
        total = vals.sum()
        err_total = errs.sum()
        # below ~100 eps * int|f| the error estimate is roundoff, not truncation
        tol = max(abs_tol, rel_tol * abs(total), 100.0 * _EPS * absv.sum())
        if err_total <= tol:
            return QuadratureResult(total, float(err_total), len(lo))
        order = np.argsort(-errs, kind="stable")
        cum = np.cumsum(errs[order])
        n_split = int(np.searchsorted(cum, err_total - 0.5 * tol)) + 1
        chosen = np.sort(order[:n_split])
        if len(lo) + n_split > max_panels:
            raise QuadratureFailure(
                f"panel budget {max_panels} exhausted (error {err_total:.3e} > tol {tol:.3e})"
            )
        if np.any(hi[chosen] - lo[chosen] <= min_width):
            raise QuadratureFailure(
                f"panel width underflow near x={lo[chosen][0]:.6e}; integrand likely singular"
            )
        keep = np.ones(len(lo), dtype=bool)
        keep[chosen] = False
        mid = 0.5 * (lo[chosen] + hi[chosen])
        new_lo = np.concatenate([lo[chosen], mid])
        new_hi = np.concatenate([mid, hi[chosen]])
        new_vals, new_errs, new_abs = _gk21(f, new_lo, new_hi)
        lo = np.concatenate([lo[keep], new_lo])
        hi = np.concatenate([hi[keep], new_hi])
        vals = np.concatenate([vals[keep], new_vals])
        errs = np.concatenate([errs[keep], new_errs])
        absv = np.concatenate([absv[keep], new_abs])
        pos = np.argsort(lo, kind="stable")
        lo, hi, vals, errs, absv = lo[pos], hi[pos], vals[pos], errs[pos], absv[pos]


def fourier_series(
    f: Callable[[np.ndarray], np.ndarray],
    tau_grid,
    cutoff: float,
    rel_tol: float = 1e-6,
    seeds: Optional[Iterable[float]] = None,
    *,
    sign: int = +1,
    abs_tol: float = 0.0,
    n_initial: int = 1,
) -> np.ndarray:
    """``int dW/2pi exp(sign*i*W*tau) f(W)`` over ``|W| <= cutoff`` for each tau."""
    tau_grid = np.atleast_1d(np.asarray(tau_grid, dtype=float))
    seeds = None if seeds is None else list(seeds)
    out = np.empty(tau_grid.shape, dtype=complex)
    for j, tau in enumerate(tau_grid):
        def integrand(w, tau=tau):
            return f(w) * np.exp(1j * sign * w * tau) / (2.0 * np.pi)
        # one extra initial panel per oscillation of the kernel
        n_osc = int(np.ceil(cutoff * abs(tau) / np.pi))
        res = integrate(integrand, -cutoff, cutoff, rel_tol, seeds,
                        abs_tol=abs_tol, n_initial=max(n_initial, n_osc))
        out[j] = res.value
    return out


def find_root(f: Callable[[float], float], bracket, xtol_rel: float = 1e-12, max_iter: int = 80) -> float:
    """Bisection root of ``f`` inside ``bracket = (a, b)``."""
    a, b = float(bracket[0]), float(bracket[1])
    fa, fb = f(a), f(b)
    if fa == 0.0:
        return a
    if fb == 0.0:
        return b
    if np.sign(fa) == np.sign(fb):
        raise BadBracket(f"f({a})={fa:.3e} and f({b})={fb:.3e} have the same sign")
    width = abs(b - a)
    for _ in range(max_iter):
        m = 0.5 * (a + b)
        fm = f(m)
        if fm == 0.0:
            return m
        if np.sign(fm) == np.sign(fa):
            a, fa = m, fm
        else:
            b = m
        if abs(b - a) < xtol_rel * width:
            break
    return 0.5 * (a + b)


def derivative(f: Callable, x: float, order: int = 1, rel_step: float = 1e-6,
               max_disagreement: float = 1e-4) -> tuple[float, float]:
    """Central finite-difference derivative with one Richardson halving.

    Returns ``(value, relative_error_estimate)``. Raises
    :class:`NumericalInstability` when the estimates at ``h`` and ``h/2``
    disagree by more than ``max_disagreement`` relative to the result. For
    vanishing derivatives the comparison scale is floored so that roundoff
    noise of ``10 eps |f(x)| / (h/2)**order`` alone cannot trigger the error.
    """
    h = rel_step * abs(x) if x != 0 else rel_step
    f0 = f(x)

    def estimate(step):
        if order == 1:
            return (f(x + step) - f(x - step)) / (2.0 * step)
        if order == 2:
            return (f(x + step) - 2.0 * f0 + f(x - step)) / step**2
        raise ValueError("order must be 1 or 2")

    d_h = estimate(h)
    d_h2 = estimate(0.5 * h)
    value = (4.0 * d_h2 - d_h) / 3.0
    noise = 10.0 * _EPS * abs(f0) / (0.5 * h) ** order
    scale = max(abs(value), noise / max_disagreement)
    rel = abs(d_h2 - d_h) / scale if scale > 0 else 0.0
    if rel > max_disagreement:
        raise NumericalInstability(
            f"order-{order} derivative estimates disagree by {rel:.2e} (relative) at x={x:.6e}"
        )
    return value, abs(value - d_h2) / scale if scale > 0 else 0.0


def sinc(x):
    """sin(x)/x with sinc(0) = 1 (unnormalised)."""
    return np.sinc(np.asarray(x) / np.pi)
