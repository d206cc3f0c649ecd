"""Distances between resolvent kernels and the convergence studies built on them.

The Hilbert-Schmidt distance is the L² norm of the kernel difference on the
plane.  It is computed by tensor Gauss-Legendre quadrature on ``[-L, L]²``
with panel edges at every point where either kernel has a kink, plus a bound
for the part of the plane outside the box.  Every kernel difference handled
here decays like ``exp(-kappa (|x - c| + |x' - c|))`` away from the
interaction centers ``c``, which is what the bound uses.
"""
from __future__ import annotations

import csv
import enum
import io
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .delta_arrays import ArrayResolvent, CouplingConfig, cs_gamma_matrix, gamma_inverse
from .errors import (
    DegenerateCoupling,
    PowerIterationStall,
    RegimeViolation,
    SingularGamma,
    SingularU,
)
from .kernels import DeltaPrimeResolvent, DirichletResolvent, as_kappa, delta_prime_coefficient
from .potentials import ScaledPotential, make_shape, parse_shape, tau, tau_alpha
from .schrodinger import PotentialResolvent
from .spectra import count_bound_states

GL_ORDER = 8
DEFAULT_NODES = 320
CSV_COLUMNS = ("param", "hs_distance", "op_norm", "tail_bound")


# quadrature ----------------------------------------------------------------

def default_half_width(kappa, points=()):
    """``L = max(12/kappa, 4 R)`` with ``R`` the largest ``|breakpoint|``."""
    r = max((abs(p) for p in points), default=0.0)
    return max(12.0 / kappa, 4.0 * r)


def panel_nodes(edges, L, n=DEFAULT_NODES, order=GL_ORDER):
    """Composite Gauss-Legendre nodes and weights on ``[-L, L]``.

    Every interval between consecutive ``edges`` gets at least one panel;
    the remaining panels (``ceil(n / order)`` in total) are shared in
    proportion to length.
    """
    pts = sorted({-L, L, *[float(e) for e in edges if -L < e < L]})
    lengths = np.diff(pts)
    n_pan = max(int(math.ceil(n / order)), len(lengths))
    extra = n_pan - len(lengths)
    share = np.floor(lengths / (2 * L) * extra).astype(int)
    # hand out the rounding remainder to the longest intervals
    for i in np.argsort(-lengths)[: extra - int(share.sum())]:
        share[i] += 1
    gx, gw = np.polynomial.legendre.leggauss(order)
    xs, ws = [], []
    for (lo, hi), m in zip(zip(pts[:-1], pts[1:]), share + 1):
        e = np.linspace(lo, hi, m + 1)
        half = 0.5 * np.diff(e)[:, None]
        mid = 0.5 * (e[1:] + e[:-1])[:, None]
        xs.append((mid + half * gx).ravel())
        ws.append((half * gw).ravel())
    return np.concatenate(xs), np.concatenate(ws)


def kernel_matrix(model, x):
    if hasattr(model, "matrix"):
        return model.matrix(x)
    return np.asarray(model(x[:, None], x[None, :]), dtype=float)


def _setup(kA, kB, s, L, n):
    k = as_kappa(s) if s is not None else kA.kappa
    if not (math.isclose(kA.kappa, k) and math.isclose(kB.kappa, k)):
        raise ValueError("both kernels must be built at the requested kappa")
    bps = tuple(kA.breakpoints) + tuple(kB.breakpoints)
    if L is None:
        L = default_half_width(k, bps)
    n = DEFAULT_NODES if n is None else int(n)
    x, w = panel_nodes(bps, L, n)
    diff = kernel_matrix(kA, x) - kernel_matrix(kB, x)
    center = 0.5 * (min(bps) + max(bps)) if bps else 0.0
    radius = max((abs(b - center) for b in bps), default=0.0)
    return k, L, x, w, diff, center, radius


def _tail(k, L, x, diff, center, radius):
    # envelope constant measured where the difference is in its exponential regime
    near = np.abs(x - center) <= radius + 4.0 / k
    env = np.exp(k * np.abs(x - center))
    scaled = np.abs(diff) * env[:, None] * env[None, :]
    c_env = float(np.max(scaled[np.ix_(near, near)])) if np.any(near) else 0.0
    lp = L - abs(center)
    return c_env**2 / k**2 * (1.0 - (-np.expm1(-2 * k * lp)) ** 2)


def hs_distance(kA, kB, s=None, L=None, n=None):
    """Hilbert-Schmidt distance between two resolvent kernels.

    Parameters
    ----------
    kA, kB : KernelModel
        Kernels at the same ``kappa``.
    L : float, optional
        Half-width of the quadrature box, default ``max(12/kappa, 4 R)``.
    n : int, optional
        Target number of nodes per axis.

    Returns
    -------
    value : float
        HS norm of the difference restricted to ``[-L, L]²``.
    tail_bound : float
        Bound on the amount by which the full-plane norm exceeds ``value``,
        from the envelope ``C exp(-kappa (|x-c| + |x'-c|))`` with ``C``
        measured on the nodes.  Decays like ``exp(-2 kappa L)``.
    """
    k, L, x, w, diff, center, radius = _setup(kA, kB, s, L, n)
    value = float(math.sqrt(max(0.0, float(w @ (diff * diff) @ w))))
    t2 = _tail(k, L, x, diff, center, radius)
    tail = t2 / (2 * value) if value > 0 else math.sqrt(t2)
    return value, float(min(tail, math.sqrt(t2)))


def _power_norm(a, tol=1e-12, max_iter=10_000):
    m = a.shape[0]
    if not np.any(a):
        return 0.0
    v = np.ones(m) + np.linspace(0.0, 1.0, m)
    v /= np.linalg.norm(v)
    lam = 0.0
    change = math.inf
    for _ in range(max_iter):
        y = a @ (a @ v)
        new = float(np.linalg.norm(y))
        if new == 0.0:
            return 0.0
        v = y / new
        change = abs(new - lam) / new
        lam = new
        if change < tol:
            break
    if change > 1e-6:
        raise PowerIterationStall(f"relative change {change:.3g} after {max_iter} iterations")
    return math.sqrt(lam)


def op_norm_estimate(kA, kB, s=None, L=None, n=None):
    """Largest singular value of the weighted difference matrix
    ``W^(1/2) (K_A - K_B) W^(1/2)``, by power iteration on its square."""
    _, _, _, w, diff, _, _ = _setup(kA, kB, s, L, n)
    sw = np.sqrt(w)
    return _power_norm(sw[:, None] * diff * sw[None, :])


def distances(kA, kB, s=None, L=None, n=None):
    """``(hs, tail_bound, op_norm)`` sharing one kernel evaluation."""
    k, L, x, w, diff, center, radius = _setup(kA, kB, s, L, n)
    value = float(math.sqrt(max(0.0, float(w @ (diff * diff) @ w))))
    t2 = _tail(k, L, x, diff, center, radius)
    tail = t2 / (2 * value) if value > 0 else math.sqrt(t2)
    sw = np.sqrt(w)
    op = _power_norm(sw[:, None] * diff * sw[None, :])
    return value, float(min(tail, math.sqrt(t2))), op


# Krein-matrix constant ------------------------------------------------------

def gamma_inverse_norm(beta, a, alpha, s):
    gm = cs_gamma_matrix(CouplingConfig(beta, a, alpha), s)
    return float(np.linalg.norm(gamma_inverse(gm).entries, 2))


def measure_c_gamma(beta, alpha, s, a_grid, p=None):
    """``max_a a**p ||Gamma^-1||_2`` over ``a_grid``; ``p`` defaults to 2 for
    ``alpha == 1`` and 1 otherwise."""
    if p is None:
        p = 2 if alpha == 1 else 1
    return max(a**p * gamma_inverse_norm(beta, a, alpha, s) for a in a_grid)


# studies ----------------------------------------------------------------

class StudyId(enum.Enum):
    TRIPLE_TO_DELTAPRIME = "triple-to-deltaprime"
    ALPHA_TO_DIRICHLET = "alpha-to-dirichlet"
    POTENTIAL_TO_TRIPLE = "potential-to-triple"
    POTENTIAL_TO_DELTAPRIME = "potential-to-deltaprime"
    POTENTIAL_TO_DIRICHLET = "potential-to-dirichlet"

    @property
    def uses_potential(self):
        return self.value.startswith("potential")


DEFAULT_A_GRID = tuple(0.1 * 2.0**-j for j in range(5))
DEFAULT_EPS_GRID = (1e-4, 1e-6, 1e-8)
DEFAULT_RATE_WINDOWS = {
    StudyId.TRIPLE_TO_DELTAPRIME: (0.7, 1.3),
    StudyId.ALPHA_TO_DIRICHLET: (0.7, 1.3),
    StudyId.POTENTIAL_TO_TRIPLE: (0.0, math.inf),
    StudyId.POTENTIAL_TO_DELTAPRIME: (0.0, math.inf),
    StudyId.POTENTIAL_TO_DIRICHLET: (0.0, math.inf),
}


@dataclass
class StudyRow:
    param: float
    hs_distance: float
    op_norm: float
    tail_bound: float
    tau: float | None = None
    extra: dict = field(default_factory=dict)


@dataclass
class ConvergenceReport:
    study_id: StudyId
    rows: list
    fitted_rate: float
    config: dict

    @property
    def params(self):
        return np.array([r.param for r in self.rows])

    @property
    def hs(self):
        return np.array([r.hs_distance for r in self.rows])

    def columns(self):
        cols = list(CSV_COLUMNS)
        if any(r.tau is not None for r in self.rows):
            cols.append("tau")
        return cols

    def to_csv(self):
        buf = io.StringIO()
        cols = self.columns()
        wr = csv.writer(buf, lineterminator="\n")
        wr.writerow(cols)
        for r in self.rows:
            vals = [r.param, r.hs_distance, r.op_norm, r.tail_bound]
            if "tau" in cols:
                vals.append(r.tau)
            wr.writerow([format(float(v), ".17g") for v in vals])
        return buf.getvalue()

    def to_json(self):
        cols = self.columns()
        rows = []
        for r in self.rows:
            d = {c: getattr(r, c) for c in cols}
            d.update(r.extra)
            rows.append(d)
        doc = {
            "study_id": self.study_id.value,
            "fitted_rate": self.fitted_rate,
            "rows": rows,
            "config": self.config,
        }
        return json.dumps(doc, indent=2, sort_keys=True, default=_json_default) + "\n"

    def rate_ok(self, window=None):
        lo, hi = window if window is not None else DEFAULT_RATE_WINDOWS[self.study_id]
        return bool(lo <= self.fitted_rate <= hi)


def _json_default(o):
    if isinstance(o, (np.floating, np.integer)):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, enum.Enum):
        return o.value
    raise TypeError(f"cannot serialise {type(o).__name__}")


def fit_rate(params, values):
    """Log-log least-squares slope over the finest half of the grid."""
    p = np.asarray(params, dtype=float)
    v = np.asarray(values, dtype=float)
    order = np.argsort(-p)
    p, v = p[order], v[order]
    m = max(2, (len(p) + 1) // 2)
    p, v = p[-m:], v[-m:]
    if len(p) < 2 or np.any(v <= 0):
        return float("nan")
    return float(np.polyfit(np.log(p), np.log(v), 1)[0])


def power_rule(nu):
    return lambda eps: eps**nu


def parse_rule(text):
    """``a=eps^0.0625`` (or ``a=eps**0.0625``) -> exponent ``0.0625``."""
    t = text.replace(" ", "").replace("**", "^")
    if not t.startswith("a=eps^"):
        raise ValueError(f"rule must look like a=eps^<nu>, got {text!r}")
    return float(t[len("a=eps^"):])


def _shapes(spec):
    if spec is None:
        return (make_shape("box", h=0.5),) * 3
    if isinstance(spec, str):
        spec = [spec]
    shapes = tuple(parse_shape(s) if isinstance(s, str) else s for s in spec)
    if len(shapes) == 1:
        shapes = shapes * 3
    if len(shapes) != 3:
        raise ValueError("give one shape or three (V-1, V0, V+1)")
    return shapes


def check_regime(study_id, beta, kappa, alpha):
    """Raise :class:`RegimeViolation` listing every failed precondition."""
    sid = StudyId(study_id) if not isinstance(study_id, StudyId) else study_id
    failed = []
    if beta == 0:
        failed.append("beta must be nonzero")
    if not kappa > 0:
        failed.append("kappa must be positive")
    if failed:
        raise RegimeViolation(failed)
    if sid in (StudyId.ALPHA_TO_DIRICHLET, StudyId.POTENTIAL_TO_DIRICHLET):
        if alpha in (0, 1):
            failed.append(f"alpha must differ from 0 and 1 (got {alpha})")
    elif sid in (StudyId.TRIPLE_TO_DELTAPRIME, StudyId.POTENTIAL_TO_DELTAPRIME):
        if alpha != 1:
            failed.append(f"alpha must be 1 for the delta-prime limit (got {alpha})")
    elif alpha == 0:
        failed.append("alpha must be nonzero")
    if sid in (StudyId.TRIPLE_TO_DELTAPRIME, StudyId.POTENTIAL_TO_DELTAPRIME):
        den = 2 + beta * kappa
        if abs(den) < 1e-9 * (1 + abs(beta * kappa)):
            failed.append(f"kappa = {kappa} is the delta-prime resonance -2/beta")
    if sid.uses_potential:
        if not kappa > 1:
            failed.append(f"kappa must exceed 1 (got {kappa})")
        if alpha == 1 and not kappa > -2.0 / beta:
            failed.append(f"kappa must exceed -2/beta = {-2.0 / beta} (got {kappa})")
    if failed:
        raise RegimeViolation(failed)


def _check_spacings(beta, alpha, kappa, a_vals):
    # a < a0(kappa): no bound state of the array in the window [kappa, 10 kappa]
    failed = []
    for a in a_vals:
        cfg = CouplingConfig(beta, a, alpha)
        if count_bound_states(cfg, kappa * (1 - 1e-12), 10 * kappa) != 0:
            failed.append(f"a = {a:.6g} exceeds a0(kappa): the array has a bound state "
                          f"with kappa* in [{kappa}, {10 * kappa}]")
    if failed:
        raise RegimeViolation(failed)


def _reference(sid, beta, kappa, y):
    if sid in (StudyId.TRIPLE_TO_DELTAPRIME, StudyId.POTENTIAL_TO_DELTAPRIME):
        return DeltaPrimeResolvent(beta, kappa, y)
    if sid in (StudyId.ALPHA_TO_DIRICHLET, StudyId.POTENTIAL_TO_DIRICHLET):
        return DirichletResolvent(kappa, y)
    return None


def study(study_id, params=None):
    """Run one convergence study.

    Parameters
    ----------
    study_id : StudyId or str
    params : dict
        ``beta`` (default -1, or 0.5 for the potential studies), ``kappa``
        (4 for the delta-prime limit, 2 otherwise), ``alpha`` (1, or 2 for the
        Dirichlet studies), ``y`` (0), ``a_grid`` for the array studies,
        ``eps_grid`` and ``rule_nu`` (``a = eps**nu``, default 1/16) for the
        potential studies, ``shapes`` (``box:h=0.5``), ``cells_per_bump``,
        ``n`` and ``L`` for the quadrature, ``c_gamma`` to override the
        measured Krein constant.

    Returns
    -------
    ConvergenceReport
        Rows sorted by parameter (``a`` or ``eps``) descending.
    """
    sid = study_id if isinstance(study_id, StudyId) else StudyId(study_id)
    p = dict(params or {})
    dirichlet = sid in (StudyId.ALPHA_TO_DIRICHLET, StudyId.POTENTIAL_TO_DIRICHLET)
    # potential studies run at spacings a ~ 0.3-0.6, where beta < 0 arrays
    # carry bound states below -kappa**2 for moderate kappa
    beta = float(p.get("beta", 0.5 if sid.uses_potential else -1.0))
    kappa = float(p.get("kappa", 4.0 if sid is StudyId.TRIPLE_TO_DELTAPRIME else 2.0))
    alpha = float(p.get("alpha", 2.0 if dirichlet else 1.0))
    y = float(p.get("y", 0.0))
    n = p.get("n")
    L = p.get("L")
    check_regime(sid, beta, kappa, alpha)

    config = {"study_id": sid.value, "beta": beta, "kappa": kappa, "alpha": alpha, "y": y,
              "n": n if n is None else int(n), "L": L}
    ref = _reference(sid, beta, kappa, y)
    rows = []
    try:
        if not sid.uses_potential:
            grid = sorted((float(a) for a in p.get("a_grid", DEFAULT_A_GRID)), reverse=True)
            config["a_grid"] = grid
            for a in grid:
                arr = ArrayResolvent.cheon_shigehara(CouplingConfig(beta, a, alpha, y), kappa)
                hs, tail, op = distances(arr, ref, kappa, L, n)
                rows.append(StudyRow(a, hs, op, tail))
        else:
            nu = float(p.get("rule_nu", 1.0 / 16.0))
            eps_grid = sorted((float(e) for e in p.get("eps_grid", DEFAULT_EPS_GRID)), reverse=True)
            shapes = _shapes(p.get("shapes"))
            cells = int(p.get("cells_per_bump", 64))
            a_vals = [e**nu for e in eps_grid]
            _check_spacings(beta, alpha, kappa, a_vals)
            cg = p.get("c_gamma")
            if cg is None:
                cg = measure_c_gamma(beta, alpha, kappa, a_vals)
            config.update(eps_grid=eps_grid, rule_nu=nu, cells_per_bump=cells,
                          shapes=[s.spec for s in shapes], c_gamma=float(cg))
            for eps, a in zip(eps_grid, a_vals):
                cfg = CouplingConfig(beta, a, alpha, y)
                sp = ScaledPotential(cfg, eps, shapes)
                pot = PotentialResolvent.from_scaled(sp, kappa, cells)
                target = ref if ref is not None else ArrayResolvent.cheon_shigehara(cfg, kappa)
                hs, tail, op = distances(pot, target, kappa, L, n)
                if alpha == 1:
                    t = tau(eps, a, kappa, beta, shapes, cg)
                    power = 2
                else:
                    t = tau_alpha(eps, a, kappa, beta, shapes, cg)
                    power = 1
                extra = {"a": a, "wronskian_drift": pot.wronskian_drift}
                if t < 1:
                    extra["neumann_bound"] = 2 * cg * t / (a**power * (1 - t))
                rows.append(StudyRow(eps, hs, op, tail, t, extra))
    except (SingularGamma, SingularU, DegenerateCoupling) as exc:
        raise RegimeViolation([f"array not admissible on this grid: {exc}"]) from exc

    rows.sort(key=lambda r: -r.param)
    rate = fit_rate([r.param for r in rows], [r.hs_distance for r in rows])
    return ConvergenceReport(sid, rows, rate, config)


def deltaprime_dirichlet_floor(beta, kappa):
    """Closed-form HS distance between the delta-prime and Dirichlet kernels.

    The Dirichlet kernel is ``G - exp(-kappa(|x|+|x'|))/(2 kappa)`` on the
    whole plane, so the difference is the separable kernel
    ``(c sgn(x) sgn(x') + 1/(2 kappa)) exp(-kappa(|x|+|x'|))`` whose HS norm is
    ``sqrt(c² + 1/(4 kappa²)) / kappa``.
    """
    c = delta_prime_coefficient(beta, kappa)
    return math.sqrt(c * c + 1.0 / (4 * kappa * kappa)) / kappa


def negative_control(params=None):
    """HS distances of the disbalanced array to the (wrong) delta-prime
    kernel over the ``a`` grid, with the closed-form plateau."""
    p = dict(params or {})
    beta = float(p.get("beta", -1.0))
    kappa = float(p.get("kappa", 3.0))
    alpha = float(p.get("alpha", 2.0))
    grid = sorted((float(a) for a in p.get("a_grid", DEFAULT_A_GRID)), reverse=True)
    ref = DeltaPrimeResolvent(beta, kappa)
    out = []
    for a in grid:
        arr = ArrayResolvent.cheon_shigehara(CouplingConfig(beta, a, alpha), kappa)
        out.append((a, hs_distance(arr, ref, kappa, p.get("L"), p.get("n"))[0]))
    return out, deltaprime_dirichlet_floor(beta, kappa)


__all__ = [
    "CSV_COLUMNS", "ConvergenceReport", "StudyId", "StudyRow", "check_regime",
    "deltaprime_dirichlet_floor", "distances", "fit_rate", "hs_distance",
    "kernel_matrix", "measure_c_gamma", "negative_control", "op_norm_estimate",
    "panel_nodes", "parse_rule", "power_rule", "study",
]
