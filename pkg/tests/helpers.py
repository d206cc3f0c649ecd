"""Shared oracles and fixtures for the test suite."""
import math

import numpy as np

from deltaprime.delta_arrays import CouplingConfig
from deltaprime.potentials import ScaledPotential, form_bound, form_t, make_shape, w12_norm

GLOBAL_GRID = np.linspace(-30.0, 30.0, 60001)


def _bump(c, r):
    def f(x):
        t = (x - c) / r
        return np.where(np.abs(t) < 1, (1 - t * t) ** 3, 0.0)
    return f


def corpus():
    """Twenty smooth or Lipschitz decaying test functions."""
    fs = []
    for s, c in [(0.3, 0.0), (1.0, 0.0), (2.5, 0.4), (0.1, -0.05), (0.7, 1.2)]:
        fs.append(lambda x, s=s, c=c: np.exp(-0.5 * ((x - c) / s) ** 2))
    for lam, c in [(1.0, 0.0), (2.0, 0.1), (0.5, -0.3), (4.0, 0.02)]:
        fs.append(lambda x, lam=lam, c=c: np.exp(-lam * np.abs(x - c)))
    for c, r in [(0.0, 1.0), (0.1, 0.3), (-0.5, 2.0), (0.0, 0.05)]:
        fs.append(_bump(c, r))
    fs.append(lambda x: 1.0 / np.cosh(x))
    fs.append(lambda x: 1.0 / np.cosh(3 * (x - 0.2)) ** 2)
    fs.append(lambda x: x * np.exp(-x * x))
    fs.append(lambda x: np.cos(5 * x) * np.exp(-0.5 * x * x))
    fs.append(lambda x: np.sin(2 * x) * np.exp(-np.abs(x)))
    fs.append(lambda x: (1 + x) * np.exp(-0.25 * x * x))
    fs.append(lambda x: np.exp(-np.abs(x)) * (1 + np.abs(x)))
    assert len(fs) == 20
    return fs


def parameter_samples(n=20, seed=7):
    rng = np.random.default_rng(seed)
    names = ["box", "triangle", "gauss"]
    out = []
    for _ in range(n):
        beta = rng.uniform(0.2, 3.0) * rng.choice([-1.0, 1.0])
        a = float(np.exp(rng.uniform(math.log(0.02), math.log(0.3))))
        if abs(a - beta / 2) < 1e-3:
            a *= 1.1
        eps = float(10 ** rng.uniform(-6, -2))
        alpha = float(rng.choice([1.0, 2.0, 0.5]))
        name = names[rng.integers(3)]
        shape = make_shape(name, sigma=0.15) if name == "gauss" else make_shape(name, h=0.5)
        out.append(ScaledPotential(CouplingConfig(beta, a, alpha), eps, (shape,) * 3))
    return out


def refined_grid(sp, per_bump=4001):
    """Global grid plus fine patches covering each scaled bump."""
    pieces = [GLOBAL_GRID]
    for y, _, s in sp.bumps():
        lo, hi = y + sp.epsilon * s.support[0], y + sp.epsilon * s.support[1]
        pieces.append(np.linspace(lo - 0.1 * (hi - lo), hi + 0.1 * (hi - lo), per_bump))
    return np.unique(np.concatenate(pieces))


def form_checks(sp, fs, slack=1e-3):
    """Worst ratio ``|t_j[u, v]| / bound`` over the pairs ``(f_i, f_i)`` and
    ``(f_i, f_i+1)``; the form estimates hold when it is at most ``1 + slack``."""
    x = refined_grid(sp)
    vals = [f(x) for f in fs]
    norms = [w12_norm(v, x) for v in vals]
    worst = 0.0
    for i in range(len(fs)):
        for jj in (i, (i + 1) % len(fs)):
            for j in (-1, 0, 1):
                t = form_t(j, sp, x, vals[i], vals[jj])
                b = form_bound(j, sp, norms[i], norms[jj])
                worst = max(worst, abs(t) / b)
    return worst
