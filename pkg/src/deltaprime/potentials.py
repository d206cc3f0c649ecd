"""Squeezed three-bump potentials and their form estimates.

The potential approximating the three-center array at spacing ``a`` is

    W(x) = beta/(eps a²) V0((x - y)/eps)
           + (2/beta - 1/a) (1/eps) [V-1((x - y + a)/eps) + V+1((x - y - a)/eps)]

times the disbalance ``alpha``.  Each shape ``V_j`` has unit mass.  The
constants ``C(a)``, ``tau`` and ``tau_alpha`` control how fast ``eps`` must go
to zero relative to ``a`` for the potential resolvent to follow the array.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate, special

from .delta_arrays import CouplingConfig
from .errors import GridTooCoarse, NormalizationFailure

MASS_RTOL = 1e-10
GAUSS_CUTOFF = 6.0
MIN_SUPPORT_SAMPLES = 32


@dataclass(frozen=True, eq=False)
class PotentialShape:
    """Unit-mass profile ``V`` with its cumulative mass function.

    ``support`` is where the profile is (numerically) nonzero; Gaussian
    profiles are cut at ``GAUSS_CUTOFF`` standard deviations, which loses a
    mass of about ``2e-9``.
    """

    id: str
    params: dict
    evaluate: object = field(repr=False)
    cdf: object = field(repr=False)
    support: tuple
    kinks: tuple = ()
    mass: float = float("nan")
    sqrt_moment: float = float("nan")
    l2_norm: float = float("nan")

    def __call__(self, x):
        return self.evaluate(np.asarray(x, dtype=float))

    @property
    def spec(self):
        if self.id == "custom":
            return "custom"
        name = "gauss" if self.id == "gaussian" else self.id
        return name + ":" + ",".join(f"{k}={v!r}" for k, v in self.params.items())


def _box(h):
    def ev(x):
        return np.where(np.abs(x) <= h, 1.0 / (2 * h), 0.0)

    def cdf(x):
        return np.clip((np.asarray(x, dtype=float) + h) / (2 * h), 0.0, 1.0)

    return ev, cdf, (-h, h), ()


def _triangle(h):
    def ev(x):
        return np.maximum(0.0, (h - np.abs(x)) / (h * h))

    def cdf(x):
        t = np.clip(np.asarray(x, dtype=float), -h, h)
        left = 0.5 * ((t + h) / h) ** 2
        right = 1.0 - 0.5 * ((h - t) / h) ** 2
        return np.where(t <= 0, left, right)

    return ev, cdf, (-h, h), (0.0,)


def _gaussian(sigma):
    def ev(x):
        return np.exp(-0.5 * (x / sigma) ** 2) / (sigma * math.sqrt(2 * math.pi))

    def cdf(x):
        return special.ndtr(np.asarray(x, dtype=float) / sigma)

    c = GAUSS_CUTOFF * sigma
    return ev, cdf, (-c, c), ()


def _custom(samples):
    xs, vs = (np.asarray(s, dtype=float) for s in samples)
    if xs.ndim != 1 or xs.shape != vs.shape or xs.size < 2 or np.any(np.diff(xs) <= 0):
        raise ValueError("custom samples need increasing x and matching values")
    cum = np.concatenate([[0.0], np.cumsum(0.5 * (vs[1:] + vs[:-1]) * np.diff(xs))])

    def ev(x):
        return np.interp(x, xs, vs, left=0.0, right=0.0)

    def cdf(x):
        x = np.asarray(x, dtype=float)
        i = np.clip(np.searchsorted(xs, x, side="right") - 1, 0, xs.size - 2)
        t = np.clip(x - xs[i], 0.0, xs[i + 1] - xs[i])
        slope = (vs[i + 1] - vs[i]) / (xs[i + 1] - xs[i])
        part = vs[i] * t + 0.5 * slope * t * t
        return np.where(x <= xs[0], 0.0, np.where(x >= xs[-1], cum[-1], cum[i] + part))

    return ev, cdf, (float(xs[0]), float(xs[-1])), tuple(float(v) for v in xs[1:-1])


def _quad(f, lo, hi, kinks):
    pts = sorted({lo, hi, *[k for k in kinks if lo < k < hi], *([0.0] if lo < 0 < hi else [])})
    total = 0.0
    for a, b in zip(pts, pts[1:]):
        total += integrate.quad(f, a, b, limit=200, epsabs=1e-14, epsrel=1e-13)[0]
    return total


def make_shape(id, **params):
    """Build a unit-mass profile.

    Parameters
    ----------
    id : {"box", "gaussian", "triangle", "custom"}
        ``box`` is ``1/(2h)`` on ``[-h, h]``, ``triangle`` the hat of
        half-width ``h``, ``gaussian`` the centered normal density of width
        ``sigma`` and ``custom`` a piecewise-linear profile through
        ``samples=(x, V)``.

    Raises
    ------
    NormalizationFailure
        If the mass differs from one by more than ``1e-10``.
    """
    key = {"gauss": "gaussian"}.get(id, id)
    if key == "box":
        h = float(params.get("h", 0.5))
        if h <= 0:
            raise ValueError("h must be positive")
        ev, cdf, sup, kinks = _box(h)
        params = {"h": h}
    elif key == "triangle":
        h = float(params.get("h", 0.5))
        if h <= 0:
            raise ValueError("h must be positive")
        ev, cdf, sup, kinks = _triangle(h)
        params = {"h": h}
    elif key == "gaussian":
        sigma = float(params.get("sigma", 1.0))
        if sigma <= 0:
            raise ValueError("sigma must be positive")
        ev, cdf, sup, kinks = _gaussian(sigma)
        params = {"sigma": sigma}
    elif key == "custom":
        ev, cdf, sup, kinks = _custom(params["samples"])
        params = {}
    else:
        raise ValueError(f"unknown shape {id!r}")

    lo, hi = sup
    if key == "gaussian":
        mass = integrate.quad(lambda t: ev(np.float64(t)), -np.inf, np.inf, epsabs=1e-14)[0]
        s = params["sigma"]
        m_half = 2 ** 0.25 * special.gamma(0.75) / math.sqrt(math.pi)
        sqrt_moment = math.sqrt(s) * m_half
        l2 = 1.0 / math.sqrt(2 * s * math.sqrt(math.pi))
    else:
        def f(t):
            return float(ev(np.float64(t)))

        mass = _quad(f, lo, hi, kinks)
        sqrt_moment = _quad(lambda t: math.sqrt(abs(t)) * abs(f(t)), lo, hi, kinks)
        l2 = math.sqrt(_quad(lambda t: f(t) ** 2, lo, hi, kinks))
    if not abs(mass - 1.0) <= MASS_RTOL:
        raise NormalizationFailure(f"{key} shape has mass {mass!r}, expected 1")
    return PotentialShape(key, params, ev, cdf, (float(lo), float(hi)), kinks,
                          float(mass), float(sqrt_moment), float(l2))


def parse_shape(text):
    """Parse ``box:h=0.5``, ``gauss:sigma=0.2`` or ``triangle:h=0.5``."""
    name, _, rest = text.strip().partition(":")
    params = {}
    for item in filter(None, rest.split(",")):
        k, eq, v = item.partition("=")
        if not eq:
            raise ValueError(f"bad shape parameter {item!r} in {text!r}")
        params[k.strip()] = float(v)
    if name not in ("box", "gauss", "gaussian", "triangle"):
        raise ValueError(f"unknown shape {name!r}; expected box, gauss or triangle")
    return make_shape(name, **params)


@dataclass(frozen=True, eq=False)
class ScaledPotential:
    """``alpha * W`` for a coupling configuration, width ``epsilon`` and
    shapes ``(V-1, V0, V+1)``."""

    cfg: CouplingConfig
    epsilon: float
    shapes: tuple

    def __post_init__(self):
        eps = float(self.epsilon)
        if not (np.isfinite(eps) and eps > 0):
            raise ValueError("epsilon must be positive")
        object.__setattr__(self, "epsilon", eps)
        shapes = self.shapes
        if isinstance(shapes, PotentialShape):
            shapes = (shapes,) * 3
        if len(shapes) != 3:
            raise ValueError("need three shapes (V-1, V0, V+1)")
        object.__setattr__(self, "shapes", tuple(shapes))

    def bumps(self):
        """``(center, weight, shape)`` per bump; weights include ``alpha``."""
        c = self.cfg
        w_out = c.alpha * c.outer_coupling
        w_mid = c.alpha * c.beta / c.a**2
        return (
            (c.y - c.a, w_out, self.shapes[0]),
            (c.y, w_mid, self.shapes[1]),
            (c.y + c.a, w_out, self.shapes[2]),
        )

    def support(self):
        eps = self.epsilon
        pieces = [(y + eps * s.support[0], y + eps * s.support[1]) for y, _, s in self.bumps()]
        return min(p[0] for p in pieces), max(p[1] for p in pieces)

    def total_mass(self):
        return sum(w for _, w, _ in self.bumps())


def w_eval(sp, x):
    """Pointwise ``alpha * W(x)``."""
    x = np.asarray(x, dtype=float)
    eps = sp.epsilon
    out = np.zeros_like(x)
    for y, w, shape in sp.bumps():
        out = out + w / eps * shape((x - y) / eps)
    return float(out) if out.ndim == 0 else out


def sqrt_moments(shapes):
    return tuple(s.sqrt_moment for s in shapes)


def c_of_a(beta, a, shapes):
    """``sqrt(2) (|beta|/a² m0 + |2/beta - 1/a| (m-1 + m+1))`` with
    ``m_j = int sqrt|x| |V_j|``."""
    if isinstance(shapes, PotentialShape):
        shapes = (shapes,) * 3
    m_l, m0, m_r = sqrt_moments(shapes)
    return math.sqrt(2) * (abs(beta) / a**2 * m0 + abs((2.0 * a - beta) / (beta * a)) * (m_l + m_r))


def tau(epsilon, a, s, beta, shapes, c_gamma):
    """``4 sqrt(eps) C_Gamma C(a) / a²``; the Neumann series for the potential
    resolvent converges when it is below one.  ``s`` is accepted for
    signature symmetry; the kappa dependence enters through ``c_gamma``."""
    return 4.0 * math.sqrt(epsilon) * c_gamma * c_of_a(beta, a, shapes) / a**2


def tau_alpha(epsilon, a, s, beta, shapes, c_gamma):
    """``4 sqrt(eps) C_Gamma_alpha C(a) / a`` for the disbalanced family."""
    return 4.0 * math.sqrt(epsilon) * c_gamma * c_of_a(beta, a, shapes) / a


def neumann_bound(c_gamma, tau_value, a, power=2):
    """``2 C_Gamma tau / (a**power (1 - tau))``; ``inf`` when ``tau >= 1``."""
    if tau_value >= 1:
        return math.inf
    return 2.0 * c_gamma * tau_value / (a**power * (1.0 - tau_value))


def w12_norm(f, x):
    """``sqrt(int |f|² + |f'|²)`` by the trapezoid rule, ``f'`` by central
    differences."""
    f = np.asarray(f, dtype=float)
    x = np.asarray(x, dtype=float)
    if f.size < 2:
        return 0.0
    df = np.gradient(f, x)
    return float(math.sqrt(np.trapezoid(f * f + df * df, x)))


_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(8)


def _scaled_density_integral(shape, center, eps, g, panels=64):
    """``int (1/eps) V((x - center)/eps) g(x) dx`` with Gauss-Legendre panels
    over the support, edges at the kinks of ``V``."""
    lo, hi = shape.support
    edges = sorted({lo, hi, *[k for k in shape.kinks if lo < k < hi]})
    total = 0.0
    for a, b in zip(edges, edges[1:]):
        t = np.linspace(a, b, panels + 1)
        mid = 0.5 * (t[1:] + t[:-1])[:, None]
        half = 0.5 * np.diff(t)[:, None]
        nodes = (mid + half * _GL_NODES).ravel()
        wts = (half * _GL_WEIGHTS).ravel()
        total += float(np.sum(wts * shape(nodes) * g(center + eps * nodes)))
    return total


def form_t(j, sp, x, u, v):
    """The form ``t_j[u, v]`` measuring how far bump ``j`` is from a point
    interaction, for real samples ``u, v`` on the grid ``x``.

    ``t_0 = alpha beta/a² (u(y) v(y) - int (1/eps) V0((x-y)/eps) u v)`` and for
    ``j = +-1`` the same with weight ``alpha (2/beta - 1/a)`` and center
    ``y + j a``.  Between samples ``u v`` is interpolated linearly.

    Raises
    ------
    GridTooCoarse
        Fewer than 32 samples inside the scaled support of the bump.
    """
    if j not in (-1, 0, 1):
        raise ValueError("j must be -1, 0 or +1")
    x = np.asarray(x, dtype=float)
    uv = np.asarray(u, dtype=float) * np.asarray(v, dtype=float)
    center, weight, shape = sp.bumps()[j + 1]
    eps = sp.epsilon
    lo, hi = center + eps * shape.support[0], center + eps * shape.support[1]
    inside = np.count_nonzero((x >= lo) & (x <= hi))
    if inside < MIN_SUPPORT_SAMPLES:
        raise GridTooCoarse(
            f"only {inside} samples inside the support [{lo:.3g}, {hi:.3g}] of bump {j}"
        )

    def g(t):
        return np.interp(t, x, uv)

    point = float(np.interp(center, x, uv))
    return weight * (point - _scaled_density_integral(shape, center, eps, g))


def form_bound(j, sp, u_norm, v_norm):
    """Right-hand side ``sqrt(2 eps) |weight| m_j ||u|| ||v||`` of the
    single-bump form estimate."""
    _, weight, shape = sp.bumps()[j + 1]
    return math.sqrt(2 * sp.epsilon) * abs(weight) * shape.sqrt_moment * u_norm * v_norm
