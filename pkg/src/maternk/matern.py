"""Matérn covariance and its gradient over (sigma, rho, nu).

The smoothness derivative is a single complex-step evaluation of the whole
covariance expression: ``Gamma(nu)``, ``2^(1-nu)``, the ``sqrt(2 nu)`` scaling
of the distance and ``K`` at complex order and complex argument.
"""

import cmath
import math
from dataclasses import dataclass

from .besselk import DEFAULT_CONFIG, besselk
from .derivs import DEFAULT_STEP, dbesselk_dx
from .errors import DomainError
from .gammafn import gamma_complex

__all__ = ["MaternParams", "matern_cov", "matern_grad"]


@dataclass(frozen=True)
class MaternParams:
    sigma: float
    rho: float
    nu: float

    def __post_init__(self):
        for name in ("sigma", "rho", "nu"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise DomainError(f"{name} must be positive and finite, got {v!r}")

    def as_tuple(self):
        return (self.sigma, self.rho, self.nu)


def _cov(sigma, rho, nu, r, cfg):
    # covariance at r > 0; nu may be complex
    u = cmath.sqrt(2.0 * nu) * (r / rho)
    res = besselk(nu, u, cfg)
    log_pref = (1.0 - nu) * math.log(2.0) + nu * cmath.log(u)
    c = sigma * sigma / gamma_complex(nu) * cmath.exp(log_pref) * res.value
    return c, res


def matern_cov(p, r, cfg=DEFAULT_CONFIG):
    """Matérn covariance ``C(r)`` for parameters ``p``; ``C(0) = sigma^2``."""
    if r < 0:
        raise DomainError(f"distance must be non-negative, got {r!r}")
    if r == 0:
        return p.sigma * p.sigma
    return _cov(p.sigma, p.rho, p.nu, r, cfg)[0].real


def matern_grad(p, r, step=DEFAULT_STEP, cfg=DEFAULT_CONFIG, full_output=False):
    """Gradient ``(dC/dsigma, dC/drho, dC/dnu)`` at distance ``r``.

    sigma and rho derivatives are analytic (the latter via ``dK/dx``); the
    nu derivative is ``Im C(nu + i h) / h``.  With ``full_output`` the
    complex-step :class:`EvalResult` is returned as well (``None`` at r = 0).
    """
    if r < 0:
        raise DomainError(f"distance must be non-negative, got {r!r}")
    sigma, rho, nu = p.as_tuple()
    if r == 0:
        grad = (2.0 * sigma, 0.0, 0.0)
        return (grad, None) if full_output else grad

    u = math.sqrt(2.0 * nu) * r / rho
    kv = besselk(nu, u, cfg).value.real
    dk = dbesselk_dx(nu, u, cfg)
    pref = sigma * sigma * 2.0 ** (1.0 - nu) / gamma_complex(nu).real
    cov = pref * u**nu * kv
    d_sigma = 2.0 * cov / sigma
    d_rho = pref * (nu * u ** (nu - 1.0) * kv + u**nu * dk) * (-u / rho)

    c, res = _cov(sigma, rho, complex(nu, step.h_cs), r, cfg)
    d_nu = c.imag / step.h_cs
    grad = (d_sigma, d_rho, d_nu)
    return (grad, res) if full_output else grad
