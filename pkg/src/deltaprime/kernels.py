"""Closed-form resolvent kernels on the imaginary axis k = i*kappa.

All kernels are real for kappa > 0 and are evaluated with numpy broadcasting,
so ``x`` and ``xp`` may be scalars or arrays of compatible shape.  Scalar
inputs give Python floats back.

Conventions
-----------
* free kernel        ``G(x, x') = exp(-kappa |x - x'|) / (2 kappa)``
* signed kernel      ``sgn(x - x') G(x, x')`` with ``sgn(0) = 0``
* delta-prime kernel ``G(x, x') + c sgn(x-y) sgn(x'-y) exp(-kappa(|x-y| + |x'-y|))``
  with ``c = beta / (2 (2 + beta kappa))``
* Dirichlet kernel   half-line Dirichlet Green's functions on either side of
  ``y``, zero across ``y``
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ResonantSpectralPoint

RESONANCE_RTOL = 1e-9


@dataclass(frozen=True)
class SpectralPoint:
    """Spectral parameter k = i*kappa; the energy is -kappa**2."""

    kappa: float

    def __post_init__(self):
        k = float(self.kappa)
        if not np.isfinite(k) or k <= 0:
            raise ValueError(f"kappa must be positive and finite, got {self.kappa!r}")
        object.__setattr__(self, "kappa", k)

    @property
    def energy(self):
        return -self.kappa**2


def as_kappa(s):
    """Accept a :class:`SpectralPoint` or a bare positive number."""
    if isinstance(s, SpectralPoint):
        return s.kappa
    return SpectralPoint(s).kappa


def _out(v):
    v = np.asarray(v, dtype=float)
    return float(v) if v.ndim == 0 else v


def free_kernel(s, x, xp):
    k = as_kappa(s)
    d = np.abs(np.asarray(x, dtype=float) - np.asarray(xp, dtype=float))
    return _out(np.exp(-k * d) / (2 * k))


def signed_kernel(s, x, xp):
    k = as_kappa(s)
    diff = np.asarray(x, dtype=float) - np.asarray(xp, dtype=float)
    return _out(np.sign(diff) * np.exp(-k * np.abs(diff)) / (2 * k))


def delta_prime_coefficient(beta, s):
    """Coefficient ``beta / (2 (2 + beta kappa))`` of the rank-one correction.

    Raises :class:`ResonantSpectralPoint` when ``2 + beta kappa`` vanishes
    relative to ``1 + |beta kappa|``.
    """
    k = as_kappa(s)
    if beta == 0:
        raise ValueError("beta must be nonzero")
    den = 2.0 + beta * k
    if abs(den) < RESONANCE_RTOL * (1.0 + abs(beta * k)):
        raise ResonantSpectralPoint(
            f"2 + beta*kappa = {den:.3g}: kappa = {k} is the delta-prime "
            f"resonance -2/beta = {-2.0 / beta}"
        )
    return beta / (2.0 * den)


def delta_prime_kernel(beta, y, s, x, xp):
    k = as_kappa(s)
    c = delta_prime_coefficient(beta, k)
    x = np.asarray(x, dtype=float) - y
    xp = np.asarray(xp, dtype=float) - y
    corr = c * np.sign(x) * np.sign(xp) * np.exp(-k * (np.abs(x) + np.abs(xp)))
    return _out(np.exp(-k * np.abs(x - xp)) / (2 * k) + corr)


def dirichlet_kernel(y, s, x, xp):
    k = as_kappa(s)
    x = np.asarray(x, dtype=float) - y
    xp = np.asarray(xp, dtype=float) - y
    ax, axp = np.abs(x), np.abs(xp)
    lo, hi = np.minimum(ax, axp), np.maximum(ax, axp)
    # exp(-k hi) sinh(k lo) / k, written without overflow
    val = (np.exp(-k * (hi - lo)) - np.exp(-k * (hi + lo))) / (2 * k)
    return _out(np.where(x * xp > 0, val, 0.0))


class KernelModel:
    """Integral kernel of a resolvent ``(H + kappa**2)**-1``.

    Subclasses implement ``__call__(x, xp)``; ``breakpoints`` lists the points
    where the kernel is not smooth away from the diagonal (used to place
    quadrature panel edges) and ``center`` anchors the exponential envelope of
    kernel differences.
    """

    tag = "abstract"

    def __init__(self, kappa):
        self.kappa = as_kappa(kappa)

    @property
    def breakpoints(self):
        return ()

    @property
    def center(self):
        bp = self.breakpoints
        return 0.5 * (min(bp) + max(bp)) if bp else 0.0

    def __call__(self, x, xp):
        raise NotImplementedError

    def __repr__(self):
        return f"{type(self).__name__}(kappa={self.kappa})"


class FreeResolvent(KernelModel):
    tag = "free"

    def __call__(self, x, xp):
        return free_kernel(self.kappa, x, xp)


class DeltaPrimeResolvent(KernelModel):
    tag = "delta-prime"

    def __init__(self, beta, kappa, y=0.0):
        super().__init__(kappa)
        self.beta = float(beta)
        self.y = float(y)
        self.coefficient = delta_prime_coefficient(self.beta, self.kappa)

    @property
    def breakpoints(self):
        return (self.y,)

    def __call__(self, x, xp):
        return delta_prime_kernel(self.beta, self.y, self.kappa, x, xp)


class DirichletResolvent(KernelModel):
    tag = "dirichlet"

    def __init__(self, kappa, y=0.0):
        super().__init__(kappa)
        self.y = float(y)

    @property
    def breakpoints(self):
        return (self.y,)

    def __call__(self, x, xp):
        return dirichlet_kernel(self.y, self.kappa, x, xp)
