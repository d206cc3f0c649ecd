"""Truncated Laurent series (jets) in the spacing ``a``.

A :class:`Jet` stores ``c_0 a**v + c_1 a**(v+1) + ... + c_n a**(v+n)`` and
represents a quantity known up to ``O(a**(v+n+1))``.  Coefficients may be any
field type supporting ``+ - * /`` (floats, ``fractions.Fraction``, ``mpmath``
numbers); nothing below forces binary64.

The expansions of the three-center array verified here are written in terms
of

    u = 2 beta kappa a / (2a - beta),  v = 2 kappa a**2 / beta,  w = exp(-kappa a)

with the disbalance ``alpha`` entering as ``u -> alpha u, v -> alpha v``.  In
terms of couplings this is the array ``(1/alpha) * A_a``; see
:mod:`deltaprime.delta_arrays`, where ``alpha`` multiplies the couplings.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

from .errors import DivisionByZeroSeries, UnknownExpansionId, ValuationMismatch
from .kernels import as_kappa

DEFAULT_ORDER = 6
TRIM_RTOL = 1e-10


class Jet:
    """Truncated Laurent series ``a**valuation * sum_k coeffs[k] a**k``.

    Parameters
    ----------
    coeffs : sequence
        Coefficients from the lowest retained power upwards.
    valuation : int
        Power of ``a`` carried by ``coeffs[0]``.

    Notes
    -----
    ``order`` is the highest power of ``a`` that is exact; arithmetic
    truncates results to the order both operands support.
    """

    __slots__ = ("coeffs", "valuation")

    def __init__(self, coeffs, valuation=0):
        coeffs = list(coeffs)
        if not coeffs:
            raise ValueError("a jet needs at least one coefficient")
        for c in coeffs:
            try:
                ok = math.isfinite(c)
            except TypeError:
                ok = True
            if not ok:
                raise ValueError("jet coefficients must be finite")
        self.coeffs = coeffs
        self.valuation = int(valuation)

    # construction -----------------------------------------------------
    @classmethod
    def constant(cls, c, order):
        zero = c * 0
        return cls([c] + [zero] * order)

    @classmethod
    def variable(cls, order, one=1.0):
        """The expansion variable ``a`` itself."""
        zero = one * 0
        return cls([zero, one] + [zero] * (order - 1)) if order >= 1 else cls([zero])

    # bookkeeping ------------------------------------------------------
    @property
    def order(self):
        return self.valuation + len(self.coeffs) - 1

    def coeff(self, k):
        """Coefficient of ``a**k``; zero below the valuation."""
        if k > self.order:
            raise IndexError(f"order {k} not retained (jet known to a^{self.order})")
        i = k - self.valuation
        return self.coeffs[i] if i >= 0 else self.coeffs[0] * 0

    def _as_jet(self, other):
        if isinstance(other, Jet):
            return other
        return Jet.constant(self.coeffs[0] * 0 + other, max(self.order, 0))

    def _dense(self, lo, hi):
        zero = self.coeffs[0] * 0
        return [self.coeff(k) if k >= self.valuation else zero for k in range(lo, hi + 1)]

    def trim(self, rtol=TRIM_RTOL):
        """Drop leading coefficients below ``rtol * max|c|`` (cancellation noise)."""
        scale = max(abs(c) for c in self.coeffs)
        i = 0
        while i < len(self.coeffs) - 1 and abs(self.coeffs[i]) <= rtol * scale:
            i += 1
        if scale == 0:
            i = len(self.coeffs)
        if i == len(self.coeffs):
            return Jet([self.coeffs[-1] * 0], self.order)
        return Jet(self.coeffs[i:], self.valuation + i)

    def is_zero(self):
        return all(c == 0 for c in self.coeffs)

    def true_valuation(self):
        for i, c in enumerate(self.coeffs):
            if c != 0:
                return self.valuation + i
        return None

    # ring operations --------------------------------------------------
    def __add__(self, other):
        other = self._as_jet(other)
        lo = min(self.valuation, other.valuation)
        hi = min(self.order, other.order)
        if hi < lo:
            hi = lo
        a, b = self._dense(lo, hi), other._dense(lo, hi)
        return Jet([x + y for x, y in zip(a, b)], lo)

    __radd__ = __add__

    def __neg__(self):
        return Jet([-c for c in self.coeffs], self.valuation)

    def __sub__(self, other):
        return self + (-self._as_jet(other))

    def __rsub__(self, other):
        return self._as_jet(other) + (-self)

    def __mul__(self, other):
        if not isinstance(other, Jet):
            return self.scale(other)
        v = self.valuation + other.valuation
        hi = min(self.valuation + other.order, other.valuation + self.order)
        n = hi - v + 1
        zero = self.coeffs[0] * 0
        out = [zero] * n
        for i, x in enumerate(self.coeffs[:n]):
            for j, y in enumerate(other.coeffs[: n - i]):
                out[i + j] = out[i + j] + x * y
        return Jet(out, v)

    __rmul__ = __mul__

    def scale(self, c):
        return Jet([c * x for x in self.coeffs], self.valuation)

    def divide(self, other, rtol=None, laurent=False):
        """Quotient ``self / other``.

        Parameters
        ----------
        rtol : float, optional
            When given, both operands are first trimmed with :meth:`trim`, so
            leading coefficients that should cancel exactly but carry rounding
            noise are removed.
        laurent : bool
            Allow a negative valuation shift (a pole in ``a``).

        Raises
        ------
        DivisionByZeroSeries
            The divisor vanishes to its retained order.
        ValuationMismatch
            The quotient would have a pole and ``laurent`` is false.
        """
        other = self._as_jet(other)
        num, den = (self.trim(rtol), other.trim(rtol)) if rtol is not None else (self, other)
        vd = den.true_valuation()
        if vd is None:
            raise DivisionByZeroSeries("divisor vanishes to its retained order")
        den = Jet(den.coeffs[vd - den.valuation:], vd)
        vn = num.true_valuation()
        if vn is None:
            vn = num.valuation
        if vn < vd and not laurent:
            raise ValuationMismatch(
                f"dividend valuation {vn} below divisor valuation {vd}"
            )
        num = Jet(num.coeffs[vn - num.valuation:] or [num.coeffs[-1] * 0], vn)
        n = min(len(num.coeffs), len(den.coeffs))
        d0 = den.coeffs[0]
        q = []
        for k in range(n):
            acc = num.coeffs[k]
            for j in range(1, k + 1):
                acc = acc - den.coeffs[j] * q[k - j]
            q.append(acc / d0)
        return Jet(q, vn - vd)

    def __truediv__(self, other):
        if not isinstance(other, Jet):
            return self.scale(1 / other)
        return self.divide(other)

    def __rtruediv__(self, other):
        return self._as_jet(other).divide(self)

    def exp(self, expfn=math.exp):
        """``exp`` of a jet with nonnegative valuation.

        ``expfn`` evaluates the exponential of the constant term; it is only
        called when that term is nonzero.
        """
        if self.valuation < 0 and any(c != 0 for c in self.coeffs[: -self.valuation]):
            raise ValuationMismatch("exp of a jet with a pole")
        dense = self._dense(0, self.order)
        c0 = dense[0]
        n = len(dense)
        one = c0 * 0 + 1
        # f' = g' f, solved term by term
        out = [one] + [c0 * 0] * (n - 1)
        for k in range(1, n):
            acc = c0 * 0
            for j in range(1, k + 1):
                acc = acc + j * dense[j] * out[k - j]
            out[k] = acc / k
        if c0 != 0:
            e0 = expfn(c0)
            out = [e0 * c for c in out]
        return Jet(out)

    def __call__(self, a):
        """Partial sum at a concrete ``a``."""
        s = self.coeffs[0] * 0
        for k, c in enumerate(self.coeffs):
            s = s + c * a ** (self.valuation + k)
        return s

    def __repr__(self):
        return f"Jet({self.coeffs!r}, valuation={self.valuation})"


def jet_add(x, y):
    return x + y


def jet_sub(x, y):
    return x - y


def jet_mul(x, y):
    return x * y


def jet_div(x, y, rtol=None, laurent=False):
    return x.divide(y, rtol=rtol, laurent=laurent)


def jet_exp(x):
    return x.exp()


def jet_scale(x, c):
    return x.scale(c)


# building blocks of the three-center array -------------------------------

def _num(x, like):
    return like * 0 + x


def _kappa(s):
    # keep non-float scalar types (mpmath, Fraction) intact
    if isinstance(s, (int, float)):
        return as_kappa(s)
    return getattr(s, "kappa", s)


def jet_u(s, beta, M):
    k = _kappa(s)
    one = _num(1, k)
    num = Jet([one * 0, 2 * beta * k] + [one * 0] * (M - 1))
    den = Jet([-beta * one, 2 * one] + [one * 0] * (M - 1))
    return num.divide(den)


def jet_v(s, beta, M):
    k = _kappa(s)
    zero = _num(0, k)
    return Jet([zero, zero, 2 * k / beta] + [zero] * (M - 2))


def jet_w(s, M, power=1):
    """``w**power = exp(-power kappa a)``."""
    k = _kappa(s)
    zero = _num(0, k)
    return Jet([zero, -power * k] + [zero] * (M - 1)).exp()


def _check_order(M, beta):
    if M < 1:
        raise ValueError("order M must be at least 1")
    if beta == 0:
        raise ValueError("beta must be nonzero")


def _uvw_jets(s, beta, alpha, M):
    _check_order(M, beta)
    return alpha * jet_u(s, beta, M), alpha * jet_v(s, beta, M), jet_w(s, M)


def jet_D(s, beta, alpha=1, M=DEFAULT_ORDER):
    """``D = (w² - 1 - u)[(1 + u)(1 + v) - w²(1 - v)] / (2 kappa)``."""
    k = _kappa(s)
    u, v, w = _uvw_jets(s, beta, alpha, M)
    w2 = w * w
    return ((w2 - 1 - u) * ((1 + u) * (1 + v) - w2 * (1 - v))) / (2 * k)


def jet_N(s, beta, alpha=1, region="outer", M=DEFAULT_ORDER):
    """Numerator of the sandwich ``sum Gamma^-1 G G = e e N / (4 kappa² D)``.

    ``region="outer"`` is for ``x, x'`` on the same side outside the array,
    ``"mixed"`` for the other sign combination.
    """
    u, v, w = _uvw_jets(s, beta, alpha, M)
    w2 = w * w
    common = (w2 - 1 - u) * (u - 1 - w2)
    corner = w2 - (1 + u) * (1 + v)
    if region == "outer":
        wm2 = jet_w(s, M, power=-2)
        return (w2 + wm2) * corner + 2 * (w2 * v) + common
    if region == "mixed":
        return (w2 * w2 + 1) * v + 2 * corner + common
    raise ValueError(f"region must be 'outer' or 'mixed', got {region!r}")


def gamma_jet_matrix(s, beta, alpha=1, M=DEFAULT_ORDER):
    k = _kappa(s)
    u, v, w = _uvw_jets(s, beta, alpha, M)
    w2 = w * w
    rows = [[1 + u, w, w2], [w, 1 + v, w], [w2, w, 1 + u]]
    return [[e / (2 * k) for e in row] for row in rows]


def gamma_inv_jet(s, beta, alpha=1, M=DEFAULT_ORDER, rtol=TRIM_RTOL):
    """Inverse of the Krein matrix as a 3x3 matrix of Laurent jets.

    Computed as adjugate over determinant of the jet matrix; the pole
    (``a**-2`` for ``alpha == 1``, ``a**-1`` otherwise) comes out of the
    valuation shift of the division.  ``rtol`` trims rounding noise in the
    leading coefficients; pass ``None`` for exact coefficient types.
    """
    g = gamma_jet_matrix(s, beta, alpha, M)

    def minor(i, j):
        r = [x for x in range(3) if x != i]
        c = [y for y in range(3) if y != j]
        return g[r[0]][c[0]] * g[r[1]][c[1]] - g[r[0]][c[1]] * g[r[1]][c[0]]

    det = g[0][0] * minor(0, 0) - g[0][1] * minor(0, 1) + g[0][2] * minor(0, 2)
    out = [[None] * 3 for _ in range(3)]
    for i in range(3):
        for j in range(3):
            cof = minor(j, i)
            if (i + j) % 2:
                cof = -cof
            out[i][j] = cof.divide(det, rtol=rtol, laurent=True)
    return out


# verification ------------------------------------------------------------

class ExpansionId(enum.Enum):
    DEXP = "dexp"
    NEXP = "nexp"
    NEXP2 = "nexp2"
    LIMKERN = "limkern"
    GAMMAINV = "gammainv"
    DALPHA = "dalpha"
    NALPHA = "nalpha"

    @classmethod
    def parse(cls, name):
        if isinstance(name, cls):
            return name
        try:
            return cls(str(name).lower())
        except ValueError:
            raise UnknownExpansionId(
                f"unknown expansion {name!r}; expected one of "
                + ", ".join(m.value for m in cls)
            ) from None


@dataclass
class VerificationRow:
    order: int
    computed: float
    expected: float
    abs_err: float
    rel_err: float
    entry: tuple = ()


@dataclass
class VerificationReport:
    target: ExpansionId
    params: dict
    order: int
    rows: list = field(default_factory=list)
    passed: bool = False

    def format(self):
        lines = [f"{self.target.value} {self.params} M={self.order}"]
        for r in self.rows:
            tag = f"[{r.entry[0]},{r.entry[1]}] " if r.entry else ""
            lines.append(
                f"  {tag}a^{r.order:+d}: computed={r.computed:.15g} expected={r.expected:.15g} "
                f"abs_err={r.abs_err:.3g} rel_err={r.rel_err:.3g}"
            )
        lines.append("PASS" if self.passed else "FAIL")
        return "\n".join(lines)


LEADING_RTOL = 1e-9
SUBLEADING_RTOL = 1e-10


def gamma_inv_leading(kappa, beta):
    """Leading ``a**-2`` coefficient matrix of the inverse Krein matrix (``alpha = 1``).

    ``-beta / (2 kappa² (2 + beta kappa))`` times the matrix with rows
    ``2k(k + 1/b), -2k(k + 2/b), 2k/b`` / ``.., 4k(k + 2/b), ..`` / mirror.
    """
    k, b = kappa, beta
    p = -b / (2 * k * k * (2 + b * k))
    d = 2 * k * (k + 1 / b)
    o = -2 * k * (k + 2 / b)
    c = 2 * k / b
    m = 4 * k * (k + 2 / b)
    return [[p * d, p * o, p * c], [p * o, p * m, p * o], [p * c, p * o, p * d]]


def _rows_for(jet, lead_order, lead_value, scale, entry=()):
    rows = []
    for k in range(min(jet.valuation, lead_order), lead_order + 1):
        got = float(jet.coeff(k))
        exp = float(lead_value) if k == lead_order else 0.0
        err = abs(got - exp)
        rel = err / abs(exp) if exp != 0 else err / scale
        rows.append(VerificationRow(k, got, exp, err, rel, entry))
    return rows


def _max_abs(jet):
    return max(abs(float(c)) for c in jet.coeffs)


def verify_expansion(target, params, M=DEFAULT_ORDER):
    """Check an expansion identity of the three-center array with jets.

    Sub-leading orders must vanish to ``1e-10`` relative to the largest
    coefficient, the leading one must match to ``1e-9`` relative.

    Leading terms checked (``k = kappa``, ``b = beta``):

    ========  =====  ==================================
    dexp      a^4    ``-2 k² (k + 2/b)``
    nexp      a^4    ``4 k^4``
    nexp2     a^4    ``-4 k^4``
    dalpha    a^2    ``-2 k (1 - alpha)²``
    nalpha    a^2    ``-4 k² (1 - alpha)²``
    limkern   a^0    ``-b / (2 (2 + b k))``, or ``1/(2k)`` for alpha != 1
    gammainv  a^-2   :func:`gamma_inv_leading`
    ========  =====  ==================================

    The disbalanced pair vanishes to second order as the *square* of
    ``1 - alpha``; their ratio ``2 kappa`` is what drives the Dirichlet
    limit.

    Parameters
    ----------
    target : ExpansionId or str
    params : dict
        ``kappa``, ``beta`` and, where it matters, ``alpha``.
    """
    tid = ExpansionId.parse(target)
    k = float(params["kappa"])
    b = float(params["beta"])
    al = float(params.get("alpha", 1.0))
    if tid in (ExpansionId.DALPHA, ExpansionId.NALPHA):
        if al == 1:
            raise ValueError(f"{tid.value} requires alpha != 1")
    elif tid is not ExpansionId.LIMKERN and al != 1:
        raise ValueError(f"{tid.value} is stated for alpha = 1")
    if tid in (ExpansionId.LIMKERN, ExpansionId.GAMMAINV, ExpansionId.DEXP) and al == 1:
        if abs(2 + b * k) < 1e-9 * (1 + abs(b * k)):
            raise ValueError("kappa = -2/beta is excluded")
    rep = VerificationReport(tid, {"kappa": k, "beta": b, "alpha": al}, M)
    rows = []
    if tid is ExpansionId.DEXP:
        j = jet_D(k, b, 1, M)
        rows = _rows_for(j, 4, -2 * k * k * (k + 2 / b), _max_abs(j))
    elif tid is ExpansionId.NEXP:
        j = jet_N(k, b, 1, "outer", M)
        rows = _rows_for(j, 4, 4 * k**4, _max_abs(j))
    elif tid is ExpansionId.NEXP2:
        j = jet_N(k, b, 1, "mixed", M)
        rows = _rows_for(j, 4, -4 * k**4, _max_abs(j))
    elif tid is ExpansionId.DALPHA:
        j = jet_D(k, b, al, M)
        rows = _rows_for(j, 2, -2 * k * (1 - al) ** 2, _max_abs(j))
    elif tid is ExpansionId.NALPHA:
        j = jet_N(k, b, al, "outer", M)
        rows = _rows_for(j, 2, -4 * k * k * (1 - al) ** 2, _max_abs(j))
    elif tid is ExpansionId.LIMKERN:
        ratio = jet_N(k, b, al, "outer", M).divide(jet_D(k, b, al, M), rtol=TRIM_RTOL)
        sand = ratio.scale(1 / (4 * k * k))
        want = -b / (2 * (2 + b * k)) if al == 1 else 1 / (2 * k)
        rows = _rows_for(sand, 0, want, _max_abs(sand))
    elif tid is ExpansionId.GAMMAINV:
        gi = gamma_inv_jet(k, b, 1, M)
        lead = gamma_inv_leading(k, b)
        scale = max(abs(x) for r in lead for x in r)
        for i in range(3):
            for jj in range(3):
                rows += _rows_for(gi[i][jj], -2, lead[i][jj], scale, (i, jj))
    rep.rows = rows
    rep.passed = all(
        (r.rel_err <= LEADING_RTOL) if r.expected != 0 else (r.rel_err <= SUBLEADING_RTOL)
        for r in rows
    )
    return rep
