"""Unsafe baseline: the classical closed-form order derivative of ``K_nu``.

Kept only so that accuracy sweeps can show how it fails.  It is *not* a
supported derivative; use :func:`maternk.derivs.dbesselk_dnu_cs`.

The identity is

    dK_nu/dnu = (pi/2) csc(nu pi) [d/dnu I_{-nu} - dI_nu/dnu] - pi cot(nu pi) K_nu

with ``dI_mu/dmu = I_mu log(x/2) - (x/2)^mu sum_k psi(k+mu+1)/Gamma(k+mu+1) (x^2/4)^k / k!``,
evaluated literally in double precision, with ``K_nu`` built from the same
``I`` series.
"""

import math

from scipy.special import psi, rgamma

from .errors import DomainError, PoleError

__all__ = ["dbesselk_dnu_naive"]


def _i_and_dmu(mu, x, max_terms=500):
    half = 0.5 * x
    q = half * half
    log_half = math.log(half)
    pref = half**mu
    i_sum = 0.0
    d_sum = 0.0
    fact = 1.0
    qk = 1.0
    for k in range(max_terms):
        if k:
            fact *= k
            qk *= q
        w = qk / fact
        r = rgamma(k + mu + 1)
        ti = w * r
        td = w * psi(k + mu + 1) * r
        i_sum += ti
        d_sum += td
        if k > 2 and abs(ti) <= 1e-17 * abs(i_sum) and abs(td) <= 1e-17 * abs(d_sum):
            break
    i_mu = pref * i_sum
    return i_mu, i_mu * log_half - pref * d_sum


def dbesselk_dnu_naive(nu, x):
    """Order derivative of ``K_nu(x)`` from the closed-form identity. Unsafe baseline."""
    nu = float(nu)
    x = float(x)
    if not x > 0:
        raise DomainError("x must be positive")
    if abs(nu - round(nu)) < 1e-12:
        raise PoleError(f"identity undefined at integer order nu={nu}")
    i_pos, di_pos = _i_and_dmu(nu, x)
    i_neg, di_neg = _i_and_dmu(-nu, x)
    s = math.sin(math.pi * nu)
    k = 0.5 * math.pi / s * (i_neg - i_pos)
    # d/dnu [I_{-nu}] = -(dI_mu/dmu at mu = -nu)
    d = 0.5 * math.pi / s * (-di_neg - di_pos) - math.pi * math.cos(math.pi * nu) / s * k
    return float(d)
