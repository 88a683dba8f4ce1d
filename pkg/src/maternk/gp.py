"""Mean-zero Gaussian-process likelihood with a Matérn covariance.

``value`` is ``-2 log L = log|Sigma| + y^T Sigma^{-1} y`` and ``gradient`` is
its derivative over (sigma, rho, nu).
"""

import csv
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import cho_factor, cho_solve
from scipy.spatial.distance import pdist

from .besselk import DEFAULT_CONFIG
from .derivs import DEFAULT_STEP
from .errors import NotPositiveDefinite, ValidationError
from .matern import matern_cov, matern_grad

__all__ = [
    "Dataset",
    "LikelihoodResult",
    "assemble_cov",
    "assemble_cov_and_grads",
    "nll",
    "nll_grad",
    "sample_dataset",
]

JITTER_START = 1e-12
JITTER_MAX = 1e-6


@dataclass(frozen=True)
class Dataset:
    locations: np.ndarray
    observations: np.ndarray

    def __post_init__(self):
        loc = np.asarray(self.locations, dtype=float)
        if loc.ndim == 1:
            loc = loc[:, None]
        y = np.asarray(self.observations, dtype=float).ravel()
        if loc.ndim != 2 or loc.shape[0] < 1:
            raise ValidationError("need at least one location")
        if loc.shape[0] != y.shape[0]:
            raise ValidationError(f"{loc.shape[0]} locations but {y.shape[0]} observations")
        if not (np.all(np.isfinite(loc)) and np.all(np.isfinite(y))):
            raise ValidationError("locations and observations must be finite")
        if loc.shape[0] > 1 and np.min(pdist(loc)) == 0.0:
            raise ValidationError("locations must be pairwise distinct")
        object.__setattr__(self, "locations", loc)
        object.__setattr__(self, "observations", y)

    @property
    def n(self):
        return self.observations.shape[0]

    @classmethod
    def from_csv(cls, path):
        """Read ``x_1, ..., x_d, y`` columns with a header row."""
        with open(path, newline="", encoding="utf-8") as fh:
            reader = csv.reader(fh)
            try:
                header = next(reader)
            except StopIteration:
                raise ValidationError(f"{path}: empty file") from None
            header = [h.strip() for h in header]
            if len(header) < 2 or header[-1] != "y":
                raise ValidationError(f"{path}: header must be x_1,...,x_d,y; got {header}")
            rows = []
            for lineno, row in enumerate(reader, start=2):
                if not row or all(not c.strip() for c in row):
                    continue
                if len(row) != len(header):
                    raise ValidationError(f"{path}: row {lineno} has {len(row)} fields, expected {len(header)}")
                try:
                    rows.append([float(c) for c in row])
                except ValueError:
                    raise ValidationError(f"{path}: row {lineno} has a non-numeric field: {row}") from None
        if not rows:
            raise ValidationError(f"{path}: no data rows")
        arr = np.array(rows)
        return cls(arr[:, :-1], arr[:, -1])

    def to_csv(self, path):
        d = self.locations.shape[1]
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow([f"x_{i + 1}" for i in range(d)] + ["y"])
            for loc, y in zip(self.locations, self.observations):
                w.writerow([repr(float(v)) for v in loc] + [repr(float(y))])


@dataclass
class LikelihoodResult:
    value: float
    gradient: np.ndarray = field(default=None)
    chol_jitter_used: float = 0.0


def _unique_distances(locations):
    n = locations.shape[0]
    iu = np.triu_indices(n, k=1)
    d = pdist(locations)
    uniq, inverse = np.unique(d, return_inverse=True)
    return iu, uniq, inverse


def _fill(n, diag, iu, vals):
    m = np.empty((n, n))
    np.fill_diagonal(m, diag)
    m[iu] = vals
    m[(iu[1], iu[0])] = vals
    return m


def assemble_cov(p, locations, cfg=DEFAULT_CONFIG):
    """Covariance matrix ``Sigma_jk = C(|x_j - x_k|)``; symmetric by construction."""
    locations = np.asarray(locations, dtype=float)
    if locations.ndim == 1:
        locations = locations[:, None]
    n = locations.shape[0]
    iu, uniq, inverse = _unique_distances(locations)
    vals = np.array([matern_cov(p, r, cfg) for r in uniq])
    return _fill(n, p.sigma**2, iu, vals[inverse])


def assemble_cov_and_grads(p, locations, step=DEFAULT_STEP, cfg=DEFAULT_CONFIG):
    """``Sigma`` and the three derivative matrices, one kernel-gradient call per distinct distance."""
    n = locations.shape[0]
    iu, uniq, inverse = _unique_distances(locations)
    covs = np.empty(uniq.shape[0])
    grads = np.empty((uniq.shape[0], 3))
    for i, r in enumerate(uniq):
        grads[i] = matern_grad(p, r, step, cfg)
        # dC/dsigma = 2 C / sigma
        covs[i] = 0.5 * p.sigma * grads[i, 0]
    sigma = _fill(n, p.sigma**2, iu, covs[inverse])
    d_diag = (2.0 * p.sigma, 0.0, 0.0)
    dmats = [_fill(n, d_diag[j], iu, grads[inverse, j]) for j in range(3)]
    return sigma, dmats


def _factor(sigma_mat, sigma):
    try:
        return cho_factor(sigma_mat, lower=True), 0.0
    except np.linalg.LinAlgError:
        pass
    scale = float(np.mean(np.diag(sigma_mat)))
    jitter = JITTER_START
    while jitter <= JITTER_MAX * (1 + 1e-9):
        try:
            eye = np.eye(sigma_mat.shape[0]) * jitter * scale
            return cho_factor(sigma_mat + eye, lower=True), jitter * scale
        except np.linalg.LinAlgError:
            jitter *= 10.0
    raise NotPositiveDefinite(
        f"covariance not positive definite even with jitter {JITTER_MAX:g} x mean diagonal (sigma={sigma:g})"
    )


def _value(factor, y):
    c, _ = factor
    logdet = 2.0 * float(np.sum(np.log(np.diag(c))))
    alpha = cho_solve(factor, y)
    return logdet + float(y @ alpha), alpha


def nll(p, data, cfg=DEFAULT_CONFIG):
    """``-2 log L`` via Cholesky: ``2 sum log diag(L) + |L^{-1} y|^2``."""
    sigma_mat = assemble_cov(p, data.locations, cfg)
    factor, jitter = _factor(sigma_mat, p.sigma)
    value, _ = _value(factor, data.observations)
    return LikelihoodResult(value, None, jitter)


def nll_grad(p, data, step=DEFAULT_STEP, cfg=DEFAULT_CONFIG):
    """Value and gradient of ``-2 log L`` over (sigma, rho, nu).

    Component j is ``tr(Sigma^{-1} dSigma_j) - alpha^T dSigma_j alpha`` with
    ``alpha = Sigma^{-1} y``; the trace is the Hadamard sum with
    ``Sigma^{-1}`` obtained column by column from the factorization.
    """
    sigma_mat, dmats = assemble_cov_and_grads(p, data.locations, step, cfg)
    factor, jitter = _factor(sigma_mat, p.sigma)
    value, alpha = _value(factor, data.observations)
    inv = cho_solve(factor, np.eye(data.n))
    grad = np.array([float(np.sum(inv * d)) - float(alpha @ d @ alpha) for d in dmats])
    if not (math.isfinite(value) and np.all(np.isfinite(grad))):
        raise NotPositiveDefinite("likelihood evaluation produced non-finite values")
    return LikelihoodResult(value, grad, jitter)


def sample_dataset(p, n, seed=0, dim=2, extent=10.0):
    """Draw ``n`` uniform locations in ``[0, extent]^dim`` and one GP realization at ``p``."""
    rng = np.random.default_rng(seed)
    loc = rng.uniform(0.0, extent, (n, dim))
    factor, _ = _factor(assemble_cov(p, loc), p.sigma)
    y = np.tril(factor[0]) @ rng.standard_normal(n)
    return Dataset(loc, y)
