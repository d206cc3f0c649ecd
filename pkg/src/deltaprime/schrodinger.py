"""Resolvent kernel of ``-d²/dx² + V`` for compactly supported piecewise-constant ``V``.

On a cell where ``V`` is constant the equation ``-u'' + (V + kappa²) u = 0``
is solved exactly (cosh/sinh when ``V + kappa² > 0``, cos/sin when it is
negative, linear at zero).  The solution decaying at ``-inf`` is carried to
the right and the one decaying at ``+inf`` to the left, each in the direction
in which it grows, so the propagation is stable.  States are stored as a unit
vector ``(u, u'/kappa)`` times ``exp(E)`` so that the enormous growth inside
deep wells never overflows.

The Green's function is ``G(x, x') = -u_-(min) u_+(max) / W`` with the
Wronskian ``W = u_- u_+' - u_-' u_+`` (``-2 kappa`` for ``V = 0``).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import EigenvalueHit, OverflowGuard
from .kernels import KernelModel, as_kappa

WRONSKIAN_RTOL = 1e-8
EIGEN_RTOL = 1e-12
EXPONENT_LIMIT = 1e300


@dataclass(frozen=True, eq=False)
class PiecewiseConstantPotential:
    """``values[i]`` on ``[breakpoints[i], breakpoints[i+1])``, zero outside."""

    breakpoints: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        b = np.asarray(self.breakpoints, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if b.size == 0 and v.size == 0:
            pass
        elif b.ndim != 1 or v.shape != (b.size - 1,):
            raise ValueError("need len(values) == len(breakpoints) - 1")
        elif np.any(np.diff(b) <= 0):
            raise ValueError("breakpoints must be strictly increasing")
        if not (np.all(np.isfinite(b)) and np.all(np.isfinite(v))):
            raise ValueError("breakpoints and values must be finite")
        object.__setattr__(self, "breakpoints", b)
        object.__setattr__(self, "values", v)

    @property
    def n_cells(self):
        return self.values.size

    @property
    def widths(self):
        return np.diff(self.breakpoints)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        if self.n_cells == 0:
            return np.zeros_like(x)
        i = np.searchsorted(self.breakpoints, x, side="right") - 1
        ok = (i >= 0) & (i < self.n_cells)
        return np.where(ok, self.values[np.clip(i, 0, self.n_cells - 1)], 0.0)

    def integral(self):
        return float(np.sum(self.values * self.widths)) if self.n_cells else 0.0


def discretize(sp, cells_per_bump=64):
    """Cell averages of ``alpha * W`` on a uniform grid over each bump.

    Averages use the exact cumulative mass of each shape, so every cell
    carries exactly its share of the mass and box shapes are reproduced
    without error.  Gaussian bumps are cut at six standard deviations.
    """
    if cells_per_bump < 8:
        raise ValueError("cells_per_bump must be at least 8")
    eps = sp.epsilon
    bumps = [b for b in sp.bumps() if b[1] != 0]
    if not bumps:
        return PiecewiseConstantPotential(np.array([]), np.array([]))
    nominal = []
    for y, _, shape in bumps:
        lo, hi = shape.support
        t = np.linspace(lo, hi, cells_per_bump + 1)
        t = np.union1d(t, [k for k in shape.kinks if lo < k < hi])
        if eps * np.min(np.diff(t)) < 1e3 * np.spacing(abs(y) + eps * max(-lo, hi)):
            raise ValueError(f"epsilon = {eps:g} cannot resolve {cells_per_bump} cells at x = {y:g}")
        nominal.append((y + eps * t, t))
    bp = np.unique(np.concatenate([e for e, _ in nominal]))
    mass = np.zeros(bp.size - 1)
    for (y, w, shape), (e, t) in zip(bumps, nominal):
        # (bp - y)/eps, but with the bump's own edges at their nominal
        # positions: rounding y + eps*t must not move mass across the
        # support ends when eps << |y|
        s = (bp - y) / eps
        s[np.searchsorted(bp, e)] = t
        mass += w * np.diff(shape.cdf(s))
    vals = mass / np.diff(bp)
    return PiecewiseConstantPotential(bp, vals)


def _one_minus_e_over_q(q, d):
    # (1 - exp(-2 q d)) / q, with the q -> 0 limit 2 d
    out = np.empty(np.broadcast(q, d).shape)
    q, d = np.broadcast_arrays(q, d)
    small = q * d < 1e-300
    out[small] = 2 * d[small]
    big = ~small
    out[big] = -np.expm1(-2 * q[big] * d[big]) / q[big]
    return out


def _propagate(u, du, lam, delta):
    """Move the state ``(u, du)`` by ``delta`` through a cell with
    ``V + kappa² = lam``.  Returns ``(u, du, log_growth)`` where the true
    values are the returned ones times ``exp(log_growth)``."""
    u, du, lam, delta = np.broadcast_arrays(*(np.asarray(t, dtype=float) for t in (u, du, lam, delta)))
    s = np.sign(delta)
    d = np.abs(delta)
    out_u = np.empty(u.shape)
    out_du = np.empty(u.shape)
    grow = np.zeros(u.shape)

    hyp = lam >= 0
    if np.any(hyp):
        q = np.sqrt(lam[hyp])
        dd = d[hyp]
        e = np.exp(-2 * q * dd)
        r = _one_minus_e_over_q(q, dd)
        u0, v0, ss = u[hyp], du[hyp], s[hyp]
        out_u[hyp] = 0.5 * (u0 * (1 + e) + ss * v0 * r)
        out_du[hyp] = 0.5 * (ss * q * q * u0 * r + v0 * (1 + e))
        grow[hyp] = q * dd
    osc = ~hyp
    if np.any(osc):
        q = np.sqrt(-lam[osc])
        t = q * delta[osc]
        c, sn = np.cos(t), np.sin(t)
        sinc = delta[osc] * np.sinc(t / np.pi)
        u0, v0 = u[osc], du[osc]
        out_u[osc] = u0 * c + v0 * sinc
        out_du[osc] = -q * u0 * sn + v0 * c
    return out_u, out_du, grow


@dataclass(frozen=True, eq=False)
class LogState:
    """Per-node states ``(u, du) * exp(log_scale)``."""

    u: np.ndarray
    du: np.ndarray
    log_scale: np.ndarray


@dataclass(frozen=True, eq=False)
class DecayingSolutionPair:
    """Solutions decaying at ``-inf`` (``u_minus``) and ``+inf`` (``u_plus``).

    ``u_minus`` is normalised to ``exp(kappa (x - x_L))`` left of the support,
    ``u_plus`` to ``exp(-kappa (x - x_R))`` right of it; both are stored at
    every breakpoint.  ``wronskian`` is kept as ``mantissa * exp(log_scale)``.
    """

    potential: PiecewiseConstantPotential
    kappa: float
    u_minus: LogState
    u_plus: LogState
    wronskian_mantissa: float
    wronskian_log_scale: float
    wronskian_drift: float

    @property
    def wronskian(self):
        return self.wronskian_mantissa * np.exp(self.wronskian_log_scale)

    def _locate(self, x):
        bp = self.potential.breakpoints
        return np.searchsorted(bp, x, side="right") - 1

    def evaluate_minus(self, x):
        """``u_minus(x)`` as ``(mantissa, log_scale)``."""
        return self._evaluate(x, minus=True)

    def evaluate_plus(self, x):
        return self._evaluate(x, minus=False)

    def _evaluate(self, x, minus):
        x = np.asarray(x, dtype=float)
        k = self.kappa
        pot = self.potential
        bp = pot.breakpoints
        n = pot.n_cells
        mant = np.empty(x.shape)
        logs = np.empty(x.shape)
        if n == 0:
            mant[...] = 1.0
            logs[...] = k * x if minus else -k * x
            return mant, logs
        st = self.u_minus if minus else self.u_plus
        i = self._locate(x)
        left = i < 0
        right = i >= n
        if minus:
            # anchor at the left end of the cell, move right
            mant[left] = 1.0
            logs[left] = k * (x[left] - bp[0])
            node = np.where(right, n, np.clip(i, 0, n - 1))
            lam = np.where(right, k * k, pot.values[np.clip(i, 0, n - 1)] + k * k)
        else:
            mant[right] = 1.0
            logs[right] = -k * (x[right] - bp[-1])
            node = np.where(left, 0, np.clip(i + 1, 1, n))
            lam = np.where(left, k * k, pot.values[np.clip(i, 0, n - 1)] + k * k)
        sel = ~left if minus else ~right
        nd = node[sel]
        u, du, g = _propagate(st.u[nd], st.du[nd], lam[sel], x[sel] - bp[nd])
        mant[sel] = u
        logs[sel] = g + st.log_scale[nd]
        return mant, logs


def _normalise(u, du, k):
    r = max(abs(u), abs(du) / k)
    if r == 0 or not np.isfinite(r):
        raise OverflowGuard("state lost all significance during propagation")
    return u / r, du / r, np.log(r)


def decaying_solutions(pot, s):
    """Build the decaying solution pair for ``-kappa²``.

    Raises
    ------
    EigenvalueHit
        The Wronskian vanishes relative to the solution scales.
    OverflowGuard
        The accumulated exponents leave the representable range.
    """
    k = as_kappa(s)
    n = pot.n_cells
    bp = pot.breakpoints
    if n == 0:
        one = np.ones(1)
        st_m = LogState(one.copy(), k * one, np.zeros(1))
        st_p = LogState(one.copy(), -k * one, np.zeros(1))
        return DecayingSolutionPair(pot, k, st_m, st_p, -2.0 * k, 0.0, 0.0)
    lam = pot.values + k * k
    w = pot.widths
    um, dum, lm = np.empty(n + 1), np.empty(n + 1), np.empty(n + 1)
    u, du, l = _normalise(1.0, k, k)
    um[0], dum[0], lm[0] = u, du, l
    for i in range(n):
        u2, du2, g = _propagate(um[i], dum[i], lam[i], w[i])
        u2, du2, r = _normalise(float(u2), float(du2), k)
        um[i + 1], dum[i + 1], lm[i + 1] = u2, du2, lm[i] + float(g) + r
    up, dup, lp = np.empty(n + 1), np.empty(n + 1), np.empty(n + 1)
    u, du, l = _normalise(1.0, -k, k)
    up[n], dup[n], lp[n] = u, du, l
    for i in range(n - 1, -1, -1):
        u2, du2, g = _propagate(up[i + 1], dup[i + 1], lam[i], -w[i])
        u2, du2, r = _normalise(float(u2), float(du2), k)
        up[i], dup[i], lp[i] = u2, du2, lp[i + 1] + float(g) + r
    if max(np.max(np.abs(lm)), np.max(np.abs(lp))) > np.log(EXPONENT_LIMIT):
        raise OverflowGuard("solution exponents exceed the safe range; reduce the domain or kappa")

    wm = um * dup - dum * up
    wl = lm + lp
    # health check: W is constant across nodes
    ref = int(np.argmax(np.abs(wm)))
    # mantissas are unit-scaled, so |wm| <= 2 kappa
    if np.abs(wm[ref]) < EIGEN_RTOL * 2 * k:
        raise EigenvalueHit(f"Wronskian vanishes at kappa = {k}: -kappa² is an eigenvalue")
    ratio = (wm / wm[ref]) * np.exp(wl - wl[ref])
    drift = float(np.max(np.abs(ratio - 1.0)))
    if drift > 1e-2:
        raise EigenvalueHit(
            f"Wronskian drifts by {drift:.3g} across cells at kappa = {k}; "
            "-kappa² is (numerically) an eigenvalue"
        )
    return DecayingSolutionPair(
        pot, k, LogState(um, dum, lm), LogState(up, dup, lp),
        float(wm[ref]), float(wl[ref]), drift,
    )


class PotentialResolvent(KernelModel):
    """Kernel of ``(-d²/dx² + V + kappa²)^-1`` for a piecewise-constant ``V``."""

    tag = "potential"

    def __init__(self, pot, kappa, support_points=None):
        super().__init__(kappa)
        self.potential = pot
        self.solutions = decaying_solutions(pot, self.kappa)
        self._support_points = support_points

    @classmethod
    def from_scaled(cls, sp, kappa, cells_per_bump=64):
        pot = discretize(sp, cells_per_bump)
        pts = []
        for y, _, shape in sp.bumps():
            pts += [y + sp.epsilon * shape.support[0], y + sp.epsilon * shape.support[1]]
        return cls(pot, kappa, tuple(sorted(pts)))

    @property
    def breakpoints(self):
        if self._support_points is not None:
            return self._support_points
        bp = self.potential.breakpoints
        return (float(bp[0]), float(bp[-1])) if bp.size else ()

    @property
    def wronskian_drift(self):
        return self.solutions.wronskian_drift

    def __call__(self, x, xp):
        x = np.asarray(x, dtype=float)
        xp = np.asarray(xp, dtype=float)
        lo, hi = np.broadcast_arrays(np.minimum(x, xp), np.maximum(x, xp))
        sol = self.solutions
        mm, lm = sol.evaluate_minus(lo)
        mp, lp = sol.evaluate_plus(hi)
        out = -mm * mp / sol.wronskian_mantissa * np.exp(lm + lp - sol.wronskian_log_scale)
        return float(out) if out.ndim == 0 else out

    def matrix(self, nodes):
        """Kernel on the tensor grid ``nodes x nodes`` (one solve per node)."""
        nodes = np.asarray(nodes, dtype=float)
        sol = self.solutions
        mm, lm = sol.evaluate_minus(nodes)
        mp, lp = sol.evaluate_plus(nodes)
        i, j = np.meshgrid(np.arange(nodes.size), np.arange(nodes.size), indexing="ij")
        lo = np.where(nodes[i] <= nodes[j], i, j)
        hi = np.where(nodes[i] <= nodes[j], j, i)
        return -mm[lo] * mp[hi] / sol.wronskian_mantissa * np.exp(
            lm[lo] + lp[hi] - sol.wronskian_log_scale
        )


def potential_resolvent_kernel(sp, s, x, xp, cells_per_bump=64):
    return PotentialResolvent.from_scaled(sp, s, cells_per_bump)(x, xp)
