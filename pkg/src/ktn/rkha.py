"""Subexponential RKHA weights and Hilbert-algebra operations.

The weight family lambda_tau(j) = prod_i exp(-tau |j_i|^p) with 0 < p < 1
is subconvolutive, so the associated reproducing kernel space is a Banach
algebra under pointwise multiplication. In coefficient space the product
is a truncated convolution; powers, inner products and Dirichlet energies
are all computed directly on coefficient vectors over a WavenumberLattice.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.signal import convolve

from .lattice import MultiIndex, WavenumberLattice


@dataclass(frozen=True)
class RkhaParams:
    p: float
    tau: float

    def __post_init__(self) -> None:
        if not 0.0 < self.p < 1.0:
            raise ValueError(f"subexponential exponent must lie in (0,1), got {self.p}")
        if self.tau <= 0.0:
            raise ValueError(f"smoothing scale must be positive, got {self.tau}")


@dataclass(frozen=True)
class FourierVector:
    """Complex coefficient vector over a lattice, in lattice order."""

    lattice: WavenumberLattice
    coeffs: np.ndarray

    def __post_init__(self) -> None:
        if self.coeffs.shape != (self.lattice.m,):
            raise ValueError(
                f"coefficient length {self.coeffs.shape} does not match "
                f"lattice size {self.lattice.m}"
            )


def weight(params: RkhaParams, j: MultiIndex) -> float:
    return float(np.exp(-params.tau * sum(abs(c) ** params.p for c in j)))


def weight_vector(params: RkhaParams, lat: WavenumberLattice, half: bool = False) -> np.ndarray:
    """lambda_tau (half=False) or lambda_{tau/2} (half=True) in lattice order."""
    tau = params.tau / 2.0 if half else params.tau
    degrees = np.abs(lat.index_array).astype(float) ** params.p
    return np.exp(-tau * degrees.sum(axis=1))


def _axis_weights(params: RkhaParams, J: int) -> np.ndarray:
    """One-dimensional weights exp(-tau |j|^p) for j = -J..J."""
    j = np.arange(-J, J + 1)
    return np.exp(-params.tau * np.abs(j).astype(float) ** params.p)


def kernel_eval(params: RkhaParams, lat: WavenumberLattice, x, y) -> float:
    """Truncated Mercer sum sum_j lambda_tau(j) cos(j.(y-x)).

    The square lattice and the product weights factorize the sum over axes,
    so the kernel is a product of 1-d cosine sums.
    """
    x = np.asarray(x, dtype=float).reshape(lat.N)
    y = np.asarray(y, dtype=float).reshape(lat.N)
    w1 = _axis_weights(params, lat.J)
    j1 = np.arange(-lat.J, lat.J + 1)
    val = 1.0
    for i in range(lat.N):
        val *= float(np.sum(w1 * np.cos(j1 * (y[i] - x[i]))))
    return val


def markov_check(params: RkhaParams, lat: WavenumberLattice, g: int) -> dict:
    """Scan k_tau(0, y) on a uniform g^N grid; report min and quadrature mean.

    Periodic trapezoid quadrature is exact for band-limited functions when
    g > 2J, so the mean must equal 1 to machine precision. The min is
    reported, not asserted: truncation can introduce small negative lobes
    even though the full kernel is nonnegative.
    """
    if g <= 2 * lat.J:
        raise ValueError(f"grid resolution {g} cannot resolve the kernel at J={lat.J}")
    theta = 2.0 * np.pi * np.arange(g) / g
    w1 = _axis_weights(params, lat.J)
    j1 = np.arange(-lat.J, lat.J + 1)
    profile = np.cos(np.outer(theta, j1)) @ w1
    field = profile
    for _ in range(lat.N - 1):
        field = np.multiply.outer(field, profile)
    return {"min": float(field.min()), "mean": float(field.mean())}


def subconvolutivity_constant(params: RkhaParams, lat: WavenumberLattice) -> float:
    """max_j (lambda * lambda)(j) / lambda(j), convolution truncated to the lattice."""
    shape = (2 * lat.J + 1,) * lat.N
    w = weight_vector(params, lat)
    grid = _to_grid(lat, w)
    full = convolve(grid, grid, mode="full", method="direct")
    # central band of the full convolution = sum over in-band pairs a+b=j
    sl = tuple(slice(lat.J, lat.J + n) for n in shape)
    ratio = full[sl] / grid
    return float(ratio.max())


def _to_grid(lat: WavenumberLattice, coeffs: np.ndarray) -> np.ndarray:
    """Reorder a lattice-ordered vector onto a dense (2J+1)^N grid (index j+J)."""
    shape = (2 * lat.J + 1,) * lat.N
    grid = np.zeros(shape, dtype=coeffs.dtype)
    ix = lat.index_array + lat.J
    grid[tuple(ix.T)] = coeffs
    return grid


def _from_grid(lat: WavenumberLattice, grid: np.ndarray) -> np.ndarray:
    ix = lat.index_array + lat.J
    return grid[tuple(ix.T)]


def pointwise_product(f: FourierVector, g: FourierVector) -> FourierVector:
    """Coefficient convolution truncated to the lattice (pointwise product of functions).

    Out-of-band terms are dropped rather than growing the lattice, mirroring
    the projection onto the truncated space.
    """
    if f.lattice is not g.lattice and f.lattice != g.lattice:
        raise ValueError("pointwise_product requires both vectors on the same lattice")
    lat = f.lattice
    full = convolve(_to_grid(lat, f.coeffs), _to_grid(lat, g.coeffs),
                    mode="full", method="direct")
    sl = tuple(slice(lat.J, lat.J + 2 * lat.J + 1) for _ in range(lat.N))
    return FourierVector(lat, _from_grid(lat, full[sl]))


def power_n(f: FourierVector, n: int) -> FourierVector:
    """n-fold truncated convolution of f with itself."""
    if n < 1:
        raise ValueError(f"power requires n >= 1, got {n}")
    out = f
    for _ in range(n - 1):
        out = pointwise_product(out, f)
    return out


def rkha_inner(f: FourierVector, g: FourierVector, params: RkhaParams) -> complex:
    if f.lattice is not g.lattice and f.lattice != g.lattice:
        raise ValueError("rkha_inner requires both vectors on the same lattice")
    lam = weight_vector(params, f.lattice)
    return complex(np.sum(np.conj(f.coeffs) * g.coeffs / lam))


def dirichlet_energy(c: np.ndarray, lam: np.ndarray) -> float:
    """(sum_{i>=1} |c_i|^2 / lam_i) / (sum_i |c_i|^2), full-tau weights.

    Position 0 is the constant mode by lattice ordering, so the numerator
    skips it; constants have zero energy.
    """
    c = np.asarray(c)
    norm2 = float(np.sum(np.abs(c) ** 2))
    if norm2 == 0.0:
        raise ValueError("Dirichlet energy undefined for the zero vector")
    num = float(np.sum(np.abs(c[1:]) ** 2 / lam[1:]))
    return num / norm2
