"""Complex-order modified Bessel K, complex-step order derivatives, and Matérn GP likelihoods."""

from .besselk import EvalResult, Path, SeriesConfig, besselk, besselk_large, besselk_small, kummer_m, tricomi_u
from .derivs import StepConfig, dbesselk_dnu_cs, dbesselk_dnu_fd, dbesselk_dx
from .errors import (
    CancellationWarning,
    DomainError,
    NoConvergence,
    NotPositiveDefinite,
    PoleError,
    RouteDisagreement,
    StagnationWarning,
    ValidationError,
)
from .gammafn import gamma_complex, log_gamma_complex, pochhammer
from .gp import Dataset, LikelihoodResult, assemble_cov, nll, nll_grad, sample_dataset
from .matern import MaternParams, matern_cov, matern_grad

__version__ = "0.1.0"
