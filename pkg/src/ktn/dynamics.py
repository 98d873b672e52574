"""Benchmark torus flows: ergodic rotation and the Stepanoff flow.

Provides the vector fields, true flow maps (analytic for the rotation,
adaptive Runge-Kutta for Stepanoff), and the exact generator matrix
elements <phi_r, V.grad phi_s> in the character basis.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp
from scipy.sparse import csr_matrix

from .lattice import WavenumberLattice, position_of

TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class FlowSpec:
    kind: str  # "rotation" | "stepanoff"
    alpha: float

    def __post_init__(self) -> None:
        if self.kind not in ("rotation", "stepanoff"):
            raise ValueError(f"unknown flow kind {self.kind!r}")
        if not np.isfinite(self.alpha):
            raise ValueError("alpha must be finite")


def vector_field(spec: FlowSpec, x) -> np.ndarray:
    """Velocity at x; x may be a single point or an array of shape (..., 2)."""
    x = np.asarray(x, dtype=float)
    if spec.kind == "rotation":
        out = np.empty_like(x)
        out[..., 0] = 1.0
        out[..., 1] = spec.alpha
        return out
    t1, t2 = x[..., 0], x[..., 1]
    v2 = spec.alpha * (1.0 - np.cos(t1 - t2))
    v1 = v2 + (1.0 - spec.alpha) * (1.0 - np.cos(t2))
    return np.stack([v1, v2], axis=-1)


def true_flow(spec: FlowSpec, x, t: float, rtol: float = 1e-9, atol: float = 1e-11) -> np.ndarray:
    """Flow map Phi^t(x), wrapped to [0, 2pi)^2.

    The rotation advances analytically. Stepanoff trajectories are
    integrated with an adaptive Dormand-Prince scheme; many initial
    conditions may be stacked along the leading axes of x.
    """
    x = np.asarray(x, dtype=float)
    if spec.kind == "rotation":
        disp = np.array([1.0, spec.alpha]) * t
        return np.mod(x + disp, TWO_PI)
    if t == 0.0:
        return np.mod(x, TWO_PI)
    shape = x.shape
    y0 = x.reshape(-1)

    def rhs(_t, y):
        return vector_field(spec, y.reshape(-1, 2)).reshape(-1)

    sol = solve_ivp(rhs, (0.0, t), y0, method="RK45", rtol=rtol, atol=atol)
    if not sol.success:
        raise RuntimeError(f"flow integration failed: {sol.message}")
    return np.mod(sol.y[:, -1].reshape(shape), TWO_PI)


def generator_matrix(spec: FlowSpec, lat: WavenumberLattice) -> csr_matrix:
    """Matrix elements <phi_r, V.grad phi_s> over the lattice (skew-Hermitian).

    Rotation: diagonal. Stepanoff: the velocity components have constant
    parts (1, alpha) and cosine parts, so each column couples (j1,j2) to
    itself with i(j1 + alpha j2), to (j1+1,j2-1) and (j1-1,j2+1) with
    -i(j1+j2)alpha/2, and to (j1,j2+-1) with -i j1 (1-alpha)/2. Couplings
    leaving the band are dropped (Galerkin truncation onto the lattice).
    The diagonal is fixed by the mean of the velocity field and is verified
    entrywise against grid quadrature in the tests.
    """
    m = lat.m
    ix = lat.index_array
    if spec.kind == "rotation":
        if lat.N == 1:
            diag = 1j * spec.alpha * ix[:, 0]
        else:
            diag = 1j * (ix[:, 0] + spec.alpha * ix[:, 1])
        return csr_matrix((diag.astype(complex), (np.arange(m), np.arange(m))), shape=(m, m))
    if lat.N != 2:
        raise ValueError("Stepanoff flow is defined on the 2-torus")
    rows, cols, vals = [], [], []
    a = spec.alpha
    for s, (j1, j2) in enumerate(lat.order):
        rows.append(s)
        cols.append(s)
        vals.append(1j * (j1 + a * j2))
        for dr in ((j1 + 1, j2 - 1), (j1 - 1, j2 + 1)):
            r = position_of(lat, dr)
            if r is not None:
                rows.append(r)
                cols.append(s)
                vals.append(-0.5j * (j1 + j2) * a)
        for dr in ((j1, j2 + 1), (j1, j2 - 1)):
            r = position_of(lat, dr)
            if r is not None:
                rows.append(r)
                cols.append(s)
                vals.append(-0.5j * j1 * (1.0 - a))
    return csr_matrix((np.array(vals, dtype=complex), (rows, cols)), shape=(m, m))
