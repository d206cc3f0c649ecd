"""Krein-formula resolvents of finite delta arrays.

For couplings ``c_j`` at centers ``y_j`` the resolvent kernel at k = i*kappa is

    G(x - x') - sum_{j,j'} [Gamma^-1]_{jj'} G(x - y_j) G(x' - y_j'),
    Gamma_{jj'} = delta_{jj'} / c_j + G(y_j - y_j'),

with ``G`` the free kernel.  The three-center Cheon-Shigehara array uses the
couplings ``alpha * (2/beta - 1/a, beta/a**2, 2/beta - 1/a)`` at ``y - a, y,
y + a``; it converges to the delta-prime interaction of strength ``beta`` for
``alpha == 1`` and to a Dirichlet decoupling at ``y`` otherwise.

Note on the disbalance factor: ``alpha`` multiplies the couplings (and so the
approximating potential), hence it *divides* the dimensionless entries
``u, v`` of the Krein matrix.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
import scipy.linalg

from .errors import DegenerateCoupling, SingularGamma, SingularU
from .kernels import KernelModel, as_kappa, free_kernel

SINGULAR_RCOND = 1e-13


@dataclass(frozen=True)
class CouplingConfig:
    beta: float
    a: float
    alpha: float = 1.0
    y: float = 0.0

    def __post_init__(self):
        for name in ("beta", "a", "alpha", "y"):
            v = float(getattr(self, name))
            if not np.isfinite(v):
                raise ValueError(f"{name} must be finite")
            object.__setattr__(self, name, v)
        if self.beta == 0:
            raise ValueError("beta must be nonzero")
        if self.a <= 0:
            raise ValueError("spacing a must be positive")
        if self.alpha == 0:
            raise ValueError("alpha must be nonzero")

    @property
    def outer_coupling(self):
        # 2/beta - 1/a without cancellation near a = beta/2
        return (2.0 * self.a - self.beta) / (self.beta * self.a)

    @property
    def center_coupling(self):
        return self.beta / self.a**2


@dataclass(frozen=True)
class DeltaArray:
    couplings: tuple
    centers: tuple

    def __post_init__(self):
        c = tuple(float(v) for v in self.couplings)
        y = tuple(float(v) for v in self.centers)
        if len(c) != len(y):
            raise ValueError("couplings and centers differ in length")
        if any(v == 0 or not np.isfinite(v) for v in c):
            raise ValueError("couplings must be nonzero and finite")
        if any(b <= a for a, b in zip(y, y[1:])):
            raise ValueError("centers must be strictly increasing")
        object.__setattr__(self, "couplings", c)
        object.__setattr__(self, "centers", y)

    def __len__(self):
        return len(self.couplings)


@dataclass(frozen=True)
class GammaMatrix:
    """Krein matrix at k = i*kappa.

    ``source`` optionally keeps ``(inverse couplings, centers)`` so that the
    inverse can be refined against entries recomputed in extended precision.
    """

    entries: np.ndarray
    kappa: float
    source: tuple | None = None

    @property
    def size(self):
        return self.entries.shape[0]


class UVW(NamedTuple):
    u: float
    v: float
    w: float


def cs_couplings(cfg):
    return cs_couplings_perturbed(cfg, 0.0, 0.0)


def cs_couplings_perturbed(cfg, phi0, phi1):
    """Couplings with the O(a) corrections ``phi0`` (relative, center) and
    ``phi1`` (additive, outer).

    The corrections are supposed to be smooth functions of ``a`` that vanish
    like ``O(a)``; only their values at ``cfg.a`` are passed in and that
    behaviour is the caller's responsibility.
    """
    outer = cfg.outer_coupling + phi1
    scale = abs(2.0 / cfg.beta) + 1.0 / cfg.a
    if abs(cfg.outer_coupling) <= 1e-12 * scale or outer == 0:
        raise DegenerateCoupling(
            f"outer coupling 2/beta - 1/a vanishes at a = {cfg.a}, beta = {cfg.beta}"
        )
    center = cfg.center_coupling * (1.0 + phi0)
    if center == 0:
        raise DegenerateCoupling("center coupling vanishes")
    al = cfg.alpha
    return DeltaArray(
        (al * outer, al * center, al * outer),
        (cfg.y - cfg.a, cfg.y, cfg.y + cfg.a),
    )


def uvw(beta, a, s):
    """``u = 2 beta kappa a / (2a - beta)``, ``v = 2 kappa a**2 / beta``,
    ``w = exp(-kappa a)``.  ``a = 0`` is allowed and gives ``(0, 0, 1)``."""
    k = as_kappa(s)
    den = 2.0 * a - beta
    if abs(den) < 1e-12 * max(abs(beta), 2.0 * abs(a)):
        raise SingularU(f"2a - beta = {den:.3g} (a = {a}, beta = {beta})")
    return UVW(2.0 * beta * k * a / den, 2.0 * k * a * a / beta, float(np.exp(-k * a)))


def gamma_matrix(arr, s):
    k = as_kappa(s)
    y = np.asarray(arr.centers)
    ent = free_kernel(k, y[:, None], y[None, :]) + np.diag(1.0 / np.asarray(arr.couplings))
    return GammaMatrix(np.atleast_2d(ent).reshape(len(y), len(y)), k, (arr.couplings, arr.centers))


def _extended_entries(gm):
    c, y = gm.source
    k = np.longdouble(gm.kappa)
    y = np.asarray(y, dtype=np.longdouble)
    g = np.exp(-k * np.abs(y[:, None] - y[None, :])) / (2 * k)
    return g + np.diag(1 / np.asarray(c, dtype=np.longdouble))


def cs_gamma_matrix(cfg, s):
    """Krein matrix of the three-center array assembled from ``u, v, w``."""
    k = as_kappa(s)
    u, v, w = uvw(cfg.beta, cfg.a, k)
    u, v = u / cfg.alpha, v / cfg.alpha
    m = np.array([[1 + u, w, w * w], [w, 1 + v, w], [w * w, w, 1 + u]])
    return GammaMatrix(m / (2 * k), k)


def _check_singular(entries, inv):
    # reciprocal 1-norm condition number; the Krein matrices of the arrays are
    # legitimately ill conditioned (about a**-2), so a determinant test is not used
    if not np.all(np.isfinite(inv)):
        raise SingularGamma("Gamma is numerically singular")
    norm = np.linalg.norm(entries, 1)
    rcond = 1.0 / (norm * np.linalg.norm(inv, 1))
    if not rcond >= SINGULAR_RCOND:
        raise SingularGamma(f"reciprocal condition number {rcond:.3g} below {SINGULAR_RCOND:g}")


def gamma_det(gm):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        lu, piv = scipy.linalg.lu_factor(gm.entries, check_finite=True)
    swaps = np.count_nonzero(piv != np.arange(len(piv)))
    return float((-1) ** swaps * np.prod(np.diag(lu)))


def gamma_inverse(gm, refine=2):
    """Inverse via LU with partial pivoting; raises :class:`SingularGamma`.

    For the three-center arrays the diagonal ``1/c_j + 1/(2 kappa)`` is
    dominated by the kernel part and rounding it costs digits in proportion to
    the condition number (about ``a**-2``).  When ``gm.source`` is known the
    inverse gets ``refine`` steps of iterative refinement with the residual
    ``I - Gamma X`` formed in ``np.longdouble``.
    """
    ent = gm.entries
    if ent.size == 0:
        return GammaMatrix(ent.copy(), gm.kappa)
    with warnings.catch_warnings():
        # exact singularity is reported below as SingularGamma
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        lu, piv = scipy.linalg.lu_factor(ent)
    if np.any(np.diag(lu) == 0):
        raise SingularGamma("zero pivot in the LU factorization of Gamma")
    eye = np.eye(ent.shape[0])
    inv = scipy.linalg.lu_solve((lu, piv), eye)
    _check_singular(ent, inv)
    if gm.source is not None and refine:
        ext = _extended_entries(gm)
        for _ in range(refine):
            resid = (eye - ext @ inv.astype(np.longdouble)).astype(float)
            inv = inv + scipy.linalg.lu_solve((lu, piv), resid)
    return GammaMatrix(inv, gm.kappa)


def cs_gamma_inverse(cfg, s):
    """Explicit inverse of the three-center Krein matrix.

    With ``p = w**2 - 1 - u`` and ``q = (1+u)(1+v) - w**2 (1-v)``::

        Gamma^-1 = 2 kappa / (p q) * [[w²-(1+u)(1+v), -w p,          w² v        ],
                                      [-w p,           (w²+1+u) p,   -w p        ],
                                      [w² v,           -w p,          w²-(1+u)(1+v)]]
    """
    k = as_kappa(s)
    u, v, w = uvw(cfg.beta, cfg.a, k)
    u, v = u / cfg.alpha, v / cfg.alpha
    w2 = w * w
    # w**2 - 1 with expm1: p and q cancel at O(a) and are O(a**2) themselves
    w2m1 = np.expm1(-2.0 * k * cfg.a)
    p = w2m1 - u
    q = -w2m1 + u + v + u * v + w2 * v
    if p * q == 0:
        raise SingularGamma("closed-form determinant vanishes")
    corner = w2m1 - u - v - u * v
    m = np.array([
        [corner, -w * p, w2 * v],
        [-w * p, (w2 + 1 + u) * p, -w * p],
        [w2 * v, -w * p, corner],
    ])
    return GammaMatrix(2 * k / (p * q) * m, k)


class ArrayResolvent(KernelModel):
    """Resolvent kernel of a finite delta array (Krein formula)."""

    tag = "delta-array"

    def __init__(self, arr, kappa):
        super().__init__(kappa)
        self.array = arr
        self._y = np.asarray(arr.centers, dtype=float)
        self.gamma = gamma_matrix(arr, self.kappa)
        self.gamma_inv = gamma_inverse(self.gamma).entries

    @classmethod
    def cheon_shigehara(cls, cfg, kappa):
        return cls(cs_couplings(cfg), kappa)

    @property
    def breakpoints(self):
        return tuple(self.array.centers)

    def __call__(self, x, xp):
        k = self.kappa
        x = np.asarray(x, dtype=float)
        xp = np.asarray(xp, dtype=float)
        base = free_kernel(k, x, xp)
        if len(self._y) == 0:
            return base
        gx = np.exp(-k * np.abs(x[..., None] - self._y)) / (2 * k)
        gxp = np.exp(-k * np.abs(xp[..., None] - self._y)) / (2 * k)
        corr = np.einsum("...i,ij,...j->...", gx, self.gamma_inv, gxp)
        out = np.asarray(base) - corr
        return float(out) if out.ndim == 0 else out


def array_resolvent_kernel(arr, s, x, xp):
    return ArrayResolvent(arr, s)(x, xp)
