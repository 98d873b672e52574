"""The three prediction models: classical, quantum-mechanical, and Fock.

The classical model synthesizes the evolved observable from its projection
onto the eigenbasis. The quantum model evaluates a sampled multiplication
operator in an evolved feature state, as a ratio of quadratic forms; the
Fock model does the same with the elementwise n-th power of an evolved
root state. The two ratio models are positivity preserving by construction
and exactly normalization-free.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .dynamics import FlowSpec, true_flow
from .features import bessel_ratios
from .rkha import FourierVector
from .spectrum import SpectralBasis, eigenfunction_values

log = logging.getLogger(__name__)

STATE_FLOOR = 1e-300


class DegenerateStateError(RuntimeError):
    """The evolved feature state was annihilated (xi'xi below floor)."""


@dataclass(frozen=True)
class EvalGrid:
    """Uniform l x ... x l grid, nodes (2 pi a/l, 2 pi b/l) in row-major (a, b) order."""

    l: int
    N: int = 2

    def __post_init__(self) -> None:
        if self.l < 1:
            raise ValueError("grid side must be positive")

    @property
    def nodes(self) -> np.ndarray:
        axes = [2.0 * np.pi * np.arange(self.l) / self.l] * self.N
        mesh = np.meshgrid(*axes, indexing="ij")
        return np.stack([m.reshape(-1) for m in mesh], axis=-1)


@dataclass(frozen=True)
class PredictionContext:
    basis: SpectralBasis
    grid: EvalGrid
    obs_values: np.ndarray   # sampled observable, diag of the multiplication operator
    Z: np.ndarray            # eigenfunction values at the grid nodes
    kappa_eval: float
    n: int


def make_context(basis: SpectralBasis, grid: EvalGrid, f,
                 kappa_eval: float, n: int) -> PredictionContext:
    obs = sample_observable(f, grid)
    Z = eigenfunction_values(basis, grid.nodes)
    return PredictionContext(basis=basis, grid=grid, obs_values=obs, Z=Z,
                             kappa_eval=kappa_eval, n=n)


def sample_observable(f, grid: EvalGrid) -> np.ndarray:
    vals = np.asarray(f(grid.nodes), dtype=float).reshape(-1)
    if vals.shape != (grid.l ** grid.N,):
        raise ValueError("observable did not return one value per grid node")
    return vals


def unitary_phases(omega: np.ndarray, t: float) -> np.ndarray:
    return np.exp(1j * np.asarray(omega) * t)


def classical_predict(basis: SpectralBasis, f_hat: FourierVector, t: float, x,
                      projection: str = "alg2") -> np.ndarray:
    """y = (C' f_hat)^T diag(e^{i omega t}) zeta(x), real part.

    projection="rkha" divides the coefficients by lambda_{tau/2} before
    projecting (the reproducing-space inner product); "alg2" projects the
    raw coefficient vector. Imaginary residuals above 1e-8 are logged and
    then truncated.
    """
    if projection == "alg2":
        coeffs = f_hat.coeffs
    elif projection == "rkha":
        coeffs = f_hat.coeffs / basis.lambda_half
    else:
        raise ValueError(f"unknown classical projection {projection!r}")
    a = basis.C.conj().T @ coeffs
    zeta = eigenfunction_values(basis, x)
    y = zeta @ (a * unitary_phases(basis.omega, t))
    resid = float(np.max(np.abs(np.imag(np.atleast_1d(y)))))
    if resid > 1e-8:
        log.warning("classical prediction imaginary residual %.3g", resid)
    return np.real(y)


def _projected_feature(ctx: PredictionContext, x, n: int) -> np.ndarray:
    """C' F_hat(x) for a batch of evaluation points x of shape (..., N)."""
    lat = ctx.basis.lattice
    x = np.asarray(x, dtype=float).reshape(-1, lat.N)
    ix = lat.index_array
    rvec = np.ones(lat.m)
    ratios = bessel_ratios(lat.J, ctx.kappa_eval / n)
    for i in range(lat.N):
        rvec = rvec * ratios[np.abs(ix[:, i])]
    fhat = np.exp(-1j * x @ ix.T.astype(float)) * rvec
    return fhat @ ctx.basis.C.conj()


def _quadratic_ratio(ctx: PredictionContext, xi: np.ndarray,
                     on_degenerate: str) -> np.ndarray:
    w = np.abs(xi) ** 2
    denom = w.sum(axis=0)
    bad = denom < STATE_FLOOR
    if np.any(bad):
        if on_degenerate == "error":
            raise DegenerateStateError("evolved feature state annihilated (xi'xi underflow)")
        denom = np.where(bad, 1.0, denom)
        return np.where(bad, np.nan, (ctx.obs_values @ w) / denom)
    return (ctx.obs_values @ w) / denom


def qm_predict(ctx: PredictionContext, t: float, x,
               on_degenerate: str = "error") -> np.ndarray:
    """xi = Z conj(phases) (C' F_kappa(x)); y = xi' M xi / xi' xi."""
    v = _projected_feature(ctx, x, n=1)
    xi = ctx.Z @ (np.conj(unitary_phases(ctx.basis.omega, t))[:, None] * v.T)
    y = _quadratic_ratio(ctx, xi, on_degenerate)
    return y[0] if np.asarray(x).size == ctx.basis.lattice.N else y


def fock_predict(ctx: PredictionContext, t: float, x,
                 on_degenerate: str = "error") -> np.ndarray:
    """Same ratio with the elementwise n-th power of the evolved root state."""
    v = _projected_feature(ctx, x, ctx.n)
    xi = ctx.Z @ (np.conj(unitary_phases(ctx.basis.omega, t))[:, None] * v.T)
    y = _quadratic_ratio(ctx, xi ** ctx.n, on_degenerate)
    return y[0] if np.asarray(x).size == ctx.basis.lattice.N else y


def true_predict(spec: FlowSpec, f, t: float, x) -> np.ndarray:
    return np.asarray(f(true_flow(spec, x, t)))


def error_field(pred: np.ndarray, truth: np.ndarray) -> dict:
    pred = np.asarray(pred, dtype=float)
    truth = np.asarray(truth, dtype=float)
    if pred.shape != truth.shape:
        raise ValueError(f"field shapes differ: {pred.shape} vs {truth.shape}")
    diff = pred - truth
    finite = np.isfinite(diff)
    return {
        "field": diff,
        "l2": float(np.sqrt(np.mean(diff[finite] ** 2))),
        "linf": float(np.max(np.abs(diff[finite]))),
        "min_pred": float(np.nanmin(pred)),
    }
