"""Bound states of the three-center array from its secular determinant.

The determinant of the Krein matrix factorises into an odd-sector factor
``1 + u - w**2`` and an even-sector factor ``(1 + u)(1 + v) - w**2 (1 - v)``
(with ``u, v`` divided by the disbalance ``alpha``).  Roots in ``kappa`` are
the bound states ``E = -kappa**2``.

Besides the shallow odd state that tends to the delta-prime eigenvalue
``-4/beta**2`` for ``beta < 0``, the array with ``beta < 0`` also carries a
deep even state near ``kappa ~ |beta| / (2 a**2)`` which escapes to minus
infinity as ``a -> 0``.  Searches are therefore always confined to a window
``(kappa_min, kappa_max]``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import bisect

from .delta_arrays import (
    CouplingConfig,
    DeltaArray,
    cs_gamma_matrix,
    gamma_matrix,
    uvw,
)
from .errors import ThresholdNotFound
from .kernels import as_kappa

KAPPA_MIN = 1e-3
N_BRACKET = 512


@dataclass(frozen=True)
class BoundState:
    kappa_star: float
    branch: str  # "odd" or "even"

    @property
    def energy(self):
        return -self.kappa_star**2


def _scaled_uvw(cfg, k):
    u, v, w = uvw(cfg.beta, cfg.a, k)
    return u / cfg.alpha, v / cfg.alpha, w


def secular_residuals(cfg, s):
    """Left minus right hand sides of the two secular equations

    ``exp(-2 kappa a) = 1 + u`` and
    ``exp(-2 kappa a) = (1 + u)(1 + v)/(1 - v)``.
    """
    u, v, w = _scaled_uvw(cfg, as_kappa(s))
    r1 = w * w - (1 + u)
    with np.errstate(divide="ignore", invalid="ignore"):
        r2 = w * w - (1 + u) * (1 + v) / (1 - v)
    return float(r1), float(r2)


def _odd_factor(cfg, k):
    u, v, w = _scaled_uvw(cfg, k)
    return 1 + u - w * w


def _even_factor(cfg, k):
    u, v, w = _scaled_uvw(cfg, k)
    return (1 + u) * (1 + v) - w * w * (1 - v)


_BRANCHES = {"odd": _odd_factor, "even": _even_factor}


def find_bound_states(cfg, kappa_max=10.0, kappa_min=KAPPA_MIN, n_grid=N_BRACKET):
    """All roots of the secular determinant with ``kappa`` in
    ``(kappa_min, kappa_max]``, sorted by ``kappa``.

    Roots are bracketed on a log-spaced grid and refined by bisection to
    ``1e-12`` relative.
    """
    if kappa_max <= kappa_min:
        return []
    grid = np.geomspace(kappa_min, kappa_max, n_grid)
    found = []
    for branch, fac in _BRANCHES.items():
        f = np.array([fac(cfg, k) for k in grid])
        for i in range(n_grid - 1):
            lo, hi = grid[i], grid[i + 1]
            if f[i + 1] == 0.0:
                found.append(BoundState(float(hi), branch))
            elif f[i] * f[i + 1] < 0:
                root = bisect(lambda k: fac(cfg, k), lo, hi, xtol=1e-300, rtol=1e-12)
                found.append(BoundState(float(root), branch))
    return sorted(found, key=lambda b: b.kappa_star)


def _reduced_array(cfg):
    # a zero coupling means no point interaction at that center
    c = np.array([cfg.alpha * cfg.outer_coupling, cfg.alpha * cfg.center_coupling,
                  cfg.alpha * cfg.outer_coupling])
    y = np.array([cfg.y - cfg.a, cfg.y, cfg.y + cfg.a])
    scale = abs(2.0 / cfg.beta) + 1.0 / cfg.a
    keep = np.abs(c) > 1e-12 * scale * abs(cfg.alpha)
    return DeltaArray(tuple(c[keep]), tuple(y[keep]))


def negative_count(cfg, s):
    """Number of negative eigenvalues of the Krein matrix at ``kappa``.

    The Krein matrix decreases monotonically in ``kappa`` and tends to
    ``diag(1/c_j)``, so ``negative_count(K) - negative_count(k)`` is the
    number of bound states with ``kappa*`` in ``(k, K]``.
    """
    arr = _reduced_array(cfg)
    if len(arr) == 0:
        return 0
    ev = np.linalg.eigvalsh(gamma_matrix(arr, s).entries)
    return int(np.count_nonzero(ev < 0))


def count_bound_states(cfg, kappa_lo, kappa_hi):
    return negative_count(cfg, kappa_hi) - negative_count(cfg, kappa_lo)


def a0_grid(a_cap=0.5, a_min=1e-4, per_octave=4):
    n = int(np.floor(np.log2(a_cap / a_min) * per_octave)) + 1
    return a_cap * 2.0 ** (-np.arange(n) / per_octave)


def a0_threshold(s, beta, alpha=1.0, kappa_max=None, a_cap=0.5, a_min=1e-4):
    """Largest grid spacing ``a0`` such that no bound state lies in
    ``[kappa, kappa_max]`` for any grid spacing ``a <= a0``.

    ``kappa_max`` defaults to ``10 * kappa``; it keeps the escaping deep state
    out of the window.  The grid is geometric, four points per octave, from
    ``a_cap`` down to ``a_min``.
    """
    k = as_kappa(s)
    if beta == 0:
        raise ValueError("beta must be nonzero")
    if alpha == 1 and beta < 0 and k <= -2.0 / beta:
        raise ThresholdNotFound(
            f"kappa = {k} must exceed -2/beta = {-2.0 / beta} for the balanced array"
        )
    kmax = 10.0 * k if kappa_max is None else float(kappa_max)
    best = None
    for a in a0_grid(a_cap, a_min)[::-1]:
        cfg = CouplingConfig(beta, a, alpha)
        if count_bound_states(cfg, k * (1 - 1e-12), kmax) != 0:
            break
        best = a
    if best is None:
        raise ThresholdNotFound(f"no admissible spacing down to a = {a_min}")
    return float(best)


def krein_det(cfg, s):
    return float(np.linalg.det(cs_gamma_matrix(cfg, s).entries))
