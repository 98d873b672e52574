"""Von Mises feature states and scaled Bessel arithmetic.

All Bessel computations are carried out in exponentially scaled form
I_j(kappa) e^{-kappa} or as ratios I_j/I_0: the raw functions overflow at
the sharpness values used for pointwise evaluation (kappa up to 10^4),
while every downstream formula only consumes ratios.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .lattice import WavenumberLattice
from .rkha import FourierVector


@dataclass(frozen=True)
class VonMisesParams:
    mu: tuple[float, ...]     # mode location, radians per dimension
    kappa: tuple[float, ...]  # per-dimension sharpness, entries >= 0

    def __post_init__(self) -> None:
        if len(self.mu) != len(self.kappa):
            raise ValueError("mu and kappa must have the same dimension")
        for k in self.kappa:
            if not (np.isfinite(k) and k >= 0.0):
                raise ValueError(f"sharpness must be finite and nonnegative, got {k}")


def scaled_bessel_i(j_max: int, kappa: float) -> np.ndarray:
    """I_j(kappa) e^{-kappa} for j = 0..j_max by backward (Miller) recurrence.

    The downward recurrence I_{j-1} = I_{j+1} + (2j/kappa) I_j is seeded
    well above j_max with an arbitrary tiny value and normalized with
    I_0 + 2 sum_{j>=1} I_j = e^kappa, which reads sum = 1 in scaled form.
    """
    if kappa < 0.0:
        raise ValueError("kappa must be nonnegative")
    if kappa == 0.0:
        out = np.zeros(j_max + 1)
        out[0] = 1.0
        return out
    # seed past max(order, argument): the recurrence only converges from
    # above the turning point j ~ kappa
    seed = j_max + int(math.ceil(10.0 + 2.0 * math.sqrt(max(j_max, kappa, 1.0) * kappa)))
    vals = np.zeros(seed + 2)
    vals[seed + 1] = 0.0
    vals[seed] = 1e-300
    for j in range(seed, 0, -1):
        vals[j - 1] = vals[j + 1] + (2.0 * j / kappa) * vals[j]
        if vals[j - 1] > 1e250:
            vals /= 1e250
    norm = vals[0] + 2.0 * vals[1:].sum()
    return vals[: j_max + 1] / norm


def bessel_ratio(j: int, kappa: float) -> float:
    """I_j(kappa)/I_0(kappa) in [0, 1], stable for kappa up to 1e4."""
    if j < 0:
        raise ValueError("order must be nonnegative")
    vals = scaled_bessel_i(j, kappa)
    return float(vals[j] / vals[0])


def bessel_ratios(j_max: int, kappa: float) -> np.ndarray:
    """All ratios I_j/I_0 for j = 0..j_max from a single recurrence."""
    vals = scaled_bessel_i(j_max, kappa)
    return vals / vals[0]


def von_mises_eval(p: VonMisesParams, x) -> np.ndarray:
    """Density value(s) at x, exponent-shifted to avoid overflow.

    prod_i exp(kappa_i (cos(x_i - mu_i) - 1)) / (I_0(kappa_i) e^{-kappa_i});
    integrates to 1 against normalized Haar measure.
    """
    x = np.asarray(x, dtype=float)
    N = len(p.mu)
    if N == 1 and (x.ndim == 0 or x.shape[-1] != 1):
        x = x[..., None]
    if x.shape[-1] != N:
        raise ValueError(f"point dimension {x.shape} does not match density dimension {N}")
    out = np.ones(x.shape[:-1])
    for i in range(N):
        i0e = scaled_bessel_i(0, p.kappa[i])[0]
        out = out * np.exp(p.kappa[i] * (np.cos(x[..., i] - p.mu[i]) - 1.0)) / i0e
    return out


def von_mises_fourier(p: VonMisesParams, lat: WavenumberLattice) -> FourierVector:
    """Fourier coefficients prod_i I_{|j_i|}(kappa_i)/I_0(kappa_i) e^{-i j_i mu_i},
    in the synthesis convention f(x) = sum_j f_hat(j) e^{i j.x}."""
    if len(p.mu) != lat.N:
        raise ValueError("parameter dimension does not match lattice")
    ix = lat.index_array
    coeffs = np.ones(lat.m, dtype=complex)
    for i in range(lat.N):
        ratios = bessel_ratios(lat.J, p.kappa[i])
        coeffs *= ratios[np.abs(ix[:, i])] * np.exp(-1j * ix[:, i] * p.mu[i])
    return FourierVector(lat, coeffs)


def root_feature(x, kappa_eval: float, n: int, lat: WavenumberLattice) -> FourierVector:
    """Fourier vector of the n-th-root feature state: von Mises at mode x
    with isotropic sharpness kappa_eval/n (the n-th root of a von Mises
    density is again von Mises up to normalization)."""
    if n < 1:
        raise ValueError("grading n must be >= 1")
    if kappa_eval <= 0.0:
        raise ValueError("kappa_eval must be positive")
    x = np.asarray(x, dtype=float).reshape(lat.N)
    p = VonMisesParams(mu=tuple(x), kappa=(kappa_eval / n,) * lat.N)
    return von_mises_fourier(p, lat)
