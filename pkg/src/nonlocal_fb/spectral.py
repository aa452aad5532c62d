"""Principal eigenvalues of the truncated nonlocal operators and critical lengths.

The operator ``phi -> d int_0^l J(x-y) phi(y) dy - d s(x) phi + a0 phi`` with
``s = 1`` (lethal exterior) or ``s = j`` (reflecting exterior) is discretized
by the trapezoid rule.  Conjugating with the square roots of the weights
makes the matrix symmetric, so its Rayleigh quotient is the discrete form
of the variational characterization and the Perron vector is positive.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import linalg

from .model import Kernel, ModelSpec

log = logging.getLogger(__name__)

VARIANTS = ("dirichlet", "neumann")


class SpectralError(RuntimeError):
    """Eigen-solve failure; ``result`` holds the last iterate when available."""

    def __init__(self, message, result=None):
        super().__init__(message)
        self.result = result


@dataclass
class SpectralResult:
    lambda_p: float
    x: np.ndarray = field(repr=False)
    phi: np.ndarray = field(repr=False)
    iterations: int
    residual: float
    rayleigh: float
    norm_A: float

    @property
    def l(self) -> float:
        return float(self.x[-1])


def _check_variant(variant: str) -> str:
    v = {"dirichlet-1.2": "dirichlet", "neumann-1.3": "neumann"}.get(variant, variant)
    if v not in VARIANTS:
        raise ValueError(f"variant must be one of {VARIANTS}, got {variant!r}")
    return v


def assemble(variant: str, kernel: Kernel, d: float, a0, l: float, n: int):
    """Trapezoid matrix ``A`` on ``n + 1`` nodes of ``[0, l]`` with its nodes and weights.

    ``a0`` may be a scalar or an array of node values.
    """
    variant = _check_variant(variant)
    x = np.linspace(0.0, l, n + 1)
    dx = l / n
    w = np.full(n + 1, dx)
    w[0] = w[-1] = 0.5 * dx
    col = kernel(x)
    A = d * linalg.toeplitz(col) * w[None, :]
    sink = np.ones_like(x) if variant == "dirichlet" else kernel.j(x)
    A[np.diag_indices_from(A)] += -d * sink + a0
    return A, x, w


def perron_pair(B: np.ndarray, kappa: float, tol: float = 1e-12, max_iter: int = 50_000,
                switch_after: int = 200, start: np.ndarray | None = None):
    """Largest eigenpair of the symmetric matrix ``B`` with ``B + kappa I >= 0``.

    Plain power iteration on ``P = B + kappa I``; if the eigenvalue has not
    settled after ``switch_after`` sweeps, the iteration continues with
    ``(sigma I - P)^-1`` where ``sigma`` is the Collatz-Wielandt upper bound
    ``max_i (P psi)_i / psi_i``.  Since ``sigma >= rho(P)`` that inverse is
    entrywise nonnegative, so the iterates stay in the positive cone.
    Returns ``(lambda, psi, iterations)``.
    """
    n = B.shape[0]
    P = B + kappa * np.eye(n)
    psi = np.ones(n) if start is None else np.asarray(start, dtype=float).copy()
    psi /= np.linalg.norm(psi)
    lam_old = np.inf
    it = 0
    scale = max(1.0, float(np.abs(P).sum(axis=1).max()))
    while it < min(switch_after, max_iter):
        y = P @ psi
        it += 1
        lam = float(psi @ y)
        psi = y / np.linalg.norm(y)
        if abs(lam - lam_old) <= tol * scale and np.linalg.norm(P @ psi - lam * psi) <= 1e-13 * scale:
            return lam - kappa, psi, it
        lam_old = lam

    lu = None
    sigma = None
    while it < max_iter:
        y = P @ psi
        ratio = y / psi
        upper = float(ratio.max())
        lam = float(psi @ y)
        if np.linalg.norm(y - lam * psi) <= 1e-13 * scale:
            return lam - kappa, psi, it
        if lu is None or upper < sigma - 0.5 * (sigma - lam):
            # tighter shift: refactor (sigma stays above the spectral radius)
            sigma = upper + 1e-14 * scale
            lu = linalg.lu_factor(sigma * np.eye(n) - P, check_finite=False)
        z = linalg.lu_solve(lu, psi, check_finite=False)
        it += 1
        z = np.abs(z)  # rounding only; exact iterates are positive
        psi = z / np.linalg.norm(z)
        if abs(lam - lam_old) <= tol * scale and it > switch_after + 2:
            y = P @ psi
            lam = float(psi @ y)
            if np.linalg.norm(y - lam * psi) <= 1e-12 * scale:
                return lam - kappa, psi, it
        lam_old = lam
    raise SpectralError(f"principal eigenvalue did not converge in {max_iter} iterations",
                        (lam_old - kappa, psi, it))


def lambda_p(variant: str, kernel: Kernel, d: float, a0, l: float, dx: float | None = None,
             n: int | None = None, tol: float = 1e-12, max_iter: int = 50_000) -> SpectralResult:
    """Principal eigenvalue of the truncated operator on ``[0, l]``.

    Give either ``dx`` (rounded so that ``l/dx`` is an integer) or the cell
    count ``n``; the default is 256 cells.  ``dx <= l/32`` is required.
    """
    if not l > 0:
        raise ValueError("interval length must be positive")
    if n is None:
        n = 256 if dx is None else int(round(l / dx))
    if n < 32:
        raise ValueError("need dx <= l/32")
    if float(kernel(l / n)) <= 0.0:
        raise SpectralError("kernel support is below the grid spacing; the matrix is reducible")
    A, x, w = assemble(variant, kernel, d, a0, l, n)
    sw = np.sqrt(w)
    B = A * sw[:, None] / sw[None, :]
    B = 0.5 * (B + B.T)
    # kappa = 2d, raised if needed so that B + kappa I is entrywise nonnegative
    kappa = max(2.0 * d, -float(np.min(np.diag(B))))
    lam, psi, its = perron_pair(B, kappa, tol=tol, max_iter=max_iter, start=sw)
    phi = psi / sw
    phi = phi / phi.max()
    if np.any(phi <= 0):
        raise SpectralError("eigenvector lost positivity; refine the grid")
    residual = float(np.max(np.abs(A @ phi - lam * phi)))
    rayleigh = float(psi @ B @ psi / (psi @ psi))
    return SpectralResult(lam, x, phi, its, residual, rayleigh, float(np.abs(A).sum(axis=1).max()))


def _lambda_at(variant, kernel, d, a0, l, n):
    return lambda_p(variant, kernel, d, a0, l, n=n).lambda_p


def _bisect_length(variant, kernel, d, a0, lo, hi, n, tol):
    f_lo = _lambda_at(variant, kernel, d, a0, lo, n)
    f_hi = _lambda_at(variant, kernel, d, a0, hi, n)
    if not (f_lo < 0 < f_hi):
        raise SpectralError(f"critical length not bracketed on [{lo}, {hi}] with n={n}")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if _lambda_at(variant, kernel, d, a0, mid, n) < 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def unconditional(variant: str, d: float, a0: float) -> bool:
    """True when the principal eigenvalue is positive for every interval length."""
    variant = _check_variant(variant)
    return a0 >= (d if variant == "dirichlet" else 0.5 * d)


def critical_length(variant: str, kernel: Kernel, d: float, a0: float, n: int = 256,
                    tol: float = 1e-6, l_max: float = 1e4, nodes_per_scale: int = 32,
                    extrapolate: bool = True) -> float | None:
    """Unique root of ``l -> lambda_p(l)``; None when the eigenvalue never changes sign.

    The root is found by bisection at a fixed cell count ``n`` and again at
    ``2n``; the two are combined by Richardson extrapolation (the trapezoid
    bias is second order).
    """
    if not a0 > 0:
        raise ValueError("a0 must be positive")
    if unconditional(variant, d, a0):
        return None
    base = kernel.scale
    l = base
    lam = _lambda_at(variant, kernel, d, a0, l, n)
    if lam < 0:
        while lam < 0:
            l *= 2.0
            if l > l_max:
                raise SpectralError(f"no sign change below l={l_max}; a0 is too close to the threshold")
            lam = _lambda_at(variant, kernel, d, a0, l, n)
        lo, hi = l / 2.0, l
    else:
        while lam >= 0:
            l /= 2.0
            if l < 1e-8 * base:
                raise SpectralError("eigenvalue positive on arbitrarily short intervals")
            lam = _lambda_at(variant, kernel, d, a0, l, n)
        lo, hi = l, 2.0 * l
    n = max(n, min(2048, int(math.ceil(hi * nodes_per_scale / base))))
    coarse = _bisect_length(variant, kernel, d, a0, lo, hi, n, tol)
    if not extrapolate:
        return coarse
    fine = _bisect_length(variant, kernel, d, a0, lo, hi, 2 * n, tol)
    return (4.0 * fine - coarse) / 3.0


def model_critical_length(spec: ModelSpec, **kwargs) -> float | None:
    """Front position beyond which spreading is certain; None when unconditional.

    For the predator-prey model this is the smaller of the two species'
    lengths (each with lethal exterior and growth rate ``a_i``).
    """
    rates = spec.growth_rates()
    if spec.variant == "predprey":
        if any(unconditional("dirichlet", d, a) for d, a in zip(spec.d, rates)):
            return None
        return min(critical_length("dirichlet", k, d, a, **kwargs)
                   for k, d, a in zip(spec.kernels, spec.d, rates))
    return critical_length(spec.variant, spec.kernels[0], spec.d[0], rates[0], **kwargs)


def eigen_ladder(variant: str, kernel: Kernel, d: float, a0: float, lengths, n: int = 256):
    """Rows ``(l, lambda_p, residual, iterations)`` over a list of lengths."""
    rows = []
    for l in lengths:
        res = lambda_p(variant, kernel, d, a0, float(l), n=n)
        rows.append((float(l), res.lambda_p, res.residual, res.iterations))
    return rows
