"""Derivatives of ``K_nu(x)`` with respect to order and argument.

The order derivative is taken by complex step, ``Im K_{nu+ih}(x) / h``, with
central and adaptive (Richardson) finite differences kept as baselines.
"""

import math
import warnings
from dataclasses import dataclass

from .besselk import DEFAULT_CONFIG, besselk
from .errors import StagnationWarning

__all__ = [
    "StepConfig",
    "dbesselk_dnu_cs",
    "dbesselk_dnu_fd",
    "dbesselk_dx",
    "richardson_derivative",
]


@dataclass(frozen=True)
class StepConfig:
    h_cs: float = 1e-8
    h_fd: float = 1e-6
    fd_order: str = "central2"
    # starting step for the adaptive scheme; halved each level
    h_adaptive: float = 0.05

    def __post_init__(self):
        if not 0 < self.h_cs <= 1e-4:
            raise ValueError("need 0 < h_cs <= 1e-4")
        if not 0 < self.h_fd < 1:
            raise ValueError("need 0 < h_fd < 1")
        if self.fd_order not in ("central2", "adaptive"):
            raise ValueError(f"unknown fd_order {self.fd_order!r}")
        if not self.h_adaptive > 0:
            raise ValueError("h_adaptive must be positive")


DEFAULT_STEP = StepConfig()
_EPS = 2.0**-52


def richardson_derivative(f, x, h0, max_levels=10, safe=2.0):
    """Central differences at ``h0, h0/2, h0/4, ...`` with a Richardson tableau.

    Returns ``(derivative, error_estimate)``.  Refinement stops once the
    diagonal drifts more than ``safe`` times the best error seen, which is
    where round-off starts to win.
    """
    prev = None
    best_err = math.inf
    best = None
    first_err = None
    for i in range(max_levels):
        h = h0 / 2**i
        row = [(f(x + h) - f(x - h)) / (2.0 * h)]
        for j in range(1, i + 1):
            row.append(row[j - 1] + (row[j - 1] - prev[j - 1]) / (4**j - 1))
            err = max(abs(row[j] - row[j - 1]), abs(row[j] - prev[j - 1]))
            if first_err is None:
                first_err = err
            if err <= best_err:
                best_err, best = err, row[j]
        if i > 0 and abs(row[i] - prev[i - 1]) >= safe * best_err:
            break
        prev = row
    if best is None:
        return row[0], math.inf
    resolved = best_err <= 1e3 * _EPS * max(abs(best), 1e-300)
    if first_err is not None and best_err >= first_err and not resolved and i > 1:
        warnings.warn(
            f"adaptive finite difference stagnated at x={x!r} (error estimate {best_err:.3g})",
            StagnationWarning,
            stacklevel=2,
        )
    return best, best_err


def _k_real(nu, x, cfg):
    return besselk(nu, x, cfg).value.real


def dbesselk_dnu_cs(nu, x, step=DEFAULT_STEP, cfg=DEFAULT_CONFIG, full_output=False):
    """``d K_nu(x) / d nu`` by complex step.

    With ``full_output`` the :class:`EvalResult` of the complex-order
    evaluation is returned alongside, so callers can see the path taken and
    whether the order was nudged.
    """
    res = besselk(complex(nu, step.h_cs), x, cfg)
    d = res.value.imag / step.h_cs
    return (d, res) if full_output else d


def dbesselk_dnu_fd(nu, x, step=DEFAULT_STEP, cfg=DEFAULT_CONFIG):
    """``d K_nu(x) / d nu`` by central or adaptive finite differences."""
    if step.fd_order == "central2":
        h = step.h_fd
        return (_k_real(nu + h, x, cfg) - _k_real(nu - h, x, cfg)) / (2.0 * h)
    return richardson_derivative(lambda v: _k_real(v, x, cfg), nu, step.h_adaptive)[0]


def dbesselk_dx(nu, x, cfg=DEFAULT_CONFIG):
    """``d K_nu(x) / d x = -(K_{nu-1}(x) + K_{nu+1}(x)) / 2``."""
    d = -0.5 * (besselk(nu - 1, x, cfg).value + besselk(nu + 1, x, cfg).value)
    if isinstance(nu, complex) or isinstance(x, complex):
        return d
    return d.real
