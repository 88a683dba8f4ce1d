"""Arbitrary-precision ground truth for ``K_nu``, its order derivative and the Matérn kernel.

``besselk_reference`` runs two independent routes in mpmath and refuses to
answer when they disagree:

* ``series``: the ascending two-branch series summed term by term with
  ``mpmath.gamma``/``rgamma`` at enough guard digits to absorb its
  cancellation (non-integer order only);
* ``integral``: ``K_nu(x) = int_0^inf exp(-x cosh t) cosh(nu t) dt`` by
  tanh-sinh quadrature (any real order).

Results can be memoized in a CSV file with columns
``nu, x, digits, route, value_string``.
"""

import csv
import math
import os
import tempfile
import threading
from dataclasses import dataclass

import mpmath

from .errors import RouteDisagreement

__all__ = [
    "PrecisionConfig",
    "OracleCache",
    "besselk_reference",
    "besselk_route",
    "dbesselk_dnu_reference",
    "dbesselk_dx_reference",
    "matern_cov_reference",
    "dmatern_dnu_reference",
]

CACHE_COLUMNS = ("nu", "x", "digits", "route", "value_string")
_KEY_DIGITS = 40
# below this distance to an integer the series route is skipped
_SERIES_MIN_DIST = 1e-6


@dataclass(frozen=True)
class PrecisionConfig:
    digits: int = 50
    quad_tol: float = 1e-45
    fd_step: float = 1e-20

    def __post_init__(self):
        if self.digits < 30:
            raise ValueError("digits must be >= 30")
        if not 0 < self.fd_step < 10 ** (-self.digits / 3):
            raise ValueError("need 0 < fd_step < 10^(-digits/3)")
        if not self.quad_tol > 0:
            raise ValueError("quad_tol must be positive")


DEFAULT_PRECISION = PrecisionConfig()


def _key(v):
    return mpmath.nstr(mpmath.mpf(v), _KEY_DIGITS, strip_zeros=False)


class OracleCache:
    """In-memory memo backed by an optional CSV file.

    Writes go to a temporary file that atomically replaces the old one, so
    concurrent readers always see a complete file.  One writer at a time.
    """

    def __init__(self, path=None):
        self.path = path
        self._data = {}
        self._dirty = False
        self._lock = threading.Lock()
        if path is not None and os.path.exists(path):
            with open(path, newline="", encoding="utf-8") as fh:
                for row in csv.DictReader(fh):
                    key = (row["nu"], row["x"], int(row["digits"]), row["route"])
                    self._data[key] = row["value_string"]

    def __len__(self):
        return len(self._data)

    def get(self, nu, x, digits, route):
        s = self._data.get((_key(nu), _key(x), digits, route))
        return None if s is None else mpmath.mpf(s)

    def put(self, nu, x, digits, route, value):
        with mpmath.workdps(digits + 10):
            s = mpmath.nstr(value, digits + 5, strip_zeros=False)
        with self._lock:
            self._data[(_key(nu), _key(x), digits, route)] = s
            self._dirty = True

    def save(self):
        if self.path is None or not self._dirty:
            return
        with self._lock:
            items = sorted(self._data.items())
            self._dirty = False
        d = os.path.dirname(os.path.abspath(self.path))
        os.makedirs(d, exist_ok=True)
        fd, tmp = tempfile.mkstemp(dir=d, suffix=".tmp")
        with os.fdopen(fd, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(CACHE_COLUMNS)
            for (nu, x, digits, route), s in items:
                w.writerow([nu, x, digits, route, s])
        os.replace(tmp, self.path)


def _cached(cache, nu, x, digits, route, compute):
    if cache is not None:
        v = cache.get(nu, x, digits, route)
        if v is not None:
            return v
    v = compute()
    if cache is not None:
        cache.put(nu, x, digits, route, v)
    return v


def _series(nu, x, digits):
    dist = abs(nu - mpmath.nint(nu))
    guard = 15 + int(2 * x / math.log(10)) + int(max(0.0, -math.log10(float(dist))))
    with mpmath.workdps(digits + guard):
        nu = mpmath.mpf(nu)
        half = mpmath.mpf(x) / 2
        a0 = mpmath.gamma(nu) * half ** (-nu) * mpmath.gamma(1 - nu)
        b0 = mpmath.gamma(-nu) * half**nu * mpmath.gamma(1 + nu)
        total = mpmath.mpf(0)
        eps = mpmath.mpf(10) ** (-(digits + 5))
        k = 0
        small = 0
        while True:
            w = half ** (2 * k) / (2 * mpmath.factorial(k))
            term = w * (a0 * mpmath.rgamma(1 + k - nu) + b0 * mpmath.rgamma(1 + k + nu))
            total += term
            if k > x and abs(term) <= eps * abs(total):
                small += 1
                if small == 2:
                    return +total
            else:
                small = 0
            k += 1


def _integral(nu, x, digits):
    with mpmath.workdps(digits + 15):
        nu = mpmath.mpf(nu)
        x = mpmath.mpf(x)
        target = (digits + 20) * mpmath.log(10)
        t_max = mpmath.mpf(1)
        for _ in range(60):
            if x * (mpmath.cosh(t_max) - 1) - abs(nu) * t_max >= target:
                break
            t_max *= 1.25
        peak = mpmath.asinh(abs(nu) / x) if nu != 0 else mpmath.mpf(0)
        pts = sorted({mpmath.mpf(0), min(peak, t_max), t_max} | set(mpmath.linspace(0, t_max, 9)))
        return +mpmath.quad(lambda t: mpmath.exp(-x * mpmath.cosh(t)) * mpmath.cosh(nu * t), pts)


def besselk_route(nu, x, route, pc=DEFAULT_PRECISION, cache=None):
    """Single-route evaluation (``"series"`` or ``"integral"``)."""
    fn = {"series": _series, "integral": _integral}[route]
    return _cached(cache, nu, x, pc.digits, route, lambda: fn(nu, x, pc.digits))


def _series_ok(nu):
    with mpmath.workdps(60):
        m = mpmath.mpf(nu)
        return abs(m - mpmath.nint(m)) >= _SERIES_MIN_DIST


def besselk_reference(nu, x, pc=DEFAULT_PRECISION, cache=None):
    """``K_nu(x)`` to ``pc.digits`` digits for real ``nu`` and ``x > 0``.

    Both routes run when the order is non-integer and must agree to
    ``10^-(digits-10)`` relative, else :class:`RouteDisagreement`.  Near
    integer order only the integral route is used.
    """
    if not x > 0:
        raise ValueError("x must be positive")
    b = besselk_route(nu, x, "integral", pc, cache)
    if not _series_ok(nu):
        return b
    a = besselk_route(nu, x, "series", pc, cache)
    with mpmath.workdps(pc.digits + 10):
        rel = abs(a - b) / abs(a)
        if rel > mpmath.mpf(10) ** (-(pc.digits - 10)):
            raise RouteDisagreement(f"K_{nu}({x}): series and integral differ by {mpmath.nstr(rel, 3)} relative")
    return a


def dbesselk_dnu_reference(nu, x, pc=DEFAULT_PRECISION, cache=None):
    """Central difference of :func:`besselk_reference` in ``nu`` at step ``pc.fd_step``, all in mpmath."""

    def compute():
        with mpmath.workdps(pc.digits + 30):
            h = mpmath.mpf(pc.fd_step)
            v = mpmath.mpf(nu)
            up = besselk_reference(v + h, x, pc, cache)
            dn = besselk_reference(v - h, x, pc, cache)
            return (up - dn) / (2 * h)

    return _cached(cache, nu, x, pc.digits, "dnu", compute)


def dbesselk_dx_reference(nu, x, pc=DEFAULT_PRECISION, cache=None):
    """Central difference of :func:`besselk_reference` in ``x``."""

    def compute():
        with mpmath.workdps(pc.digits + 30):
            h = mpmath.mpf(pc.fd_step)
            v = mpmath.mpf(x)
            return (besselk_reference(nu, v + h, pc, cache) - besselk_reference(nu, v - h, pc, cache)) / (2 * h)

    return _cached(cache, nu, x, pc.digits, "dx", compute)


def matern_cov_reference(sigma, rho, nu, r, pc=DEFAULT_PRECISION):
    with mpmath.workdps(pc.digits + 10):
        if r == 0:
            return mpmath.mpf(sigma) ** 2
        nu = mpmath.mpf(nu)
        u = mpmath.sqrt(2 * nu) * mpmath.mpf(r) / mpmath.mpf(rho)
        k = besselk_reference(nu, u, pc)
        return mpmath.mpf(sigma) ** 2 * mpmath.mpf(2) ** (1 - nu) / mpmath.gamma(nu) * u**nu * k


def dmatern_dnu_reference(sigma, rho, nu, r, pc=DEFAULT_PRECISION):
    with mpmath.workdps(pc.digits + 30):
        h = mpmath.mpf(pc.fd_step)
        v = mpmath.mpf(nu)
        up = matern_cov_reference(sigma, rho, v + h, r, pc)
        dn = matern_cov_reference(sigma, rho, v - h, r, pc)
        return (up - dn) / (2 * h)
