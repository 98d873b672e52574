"""Eigendecomposition of the regularized generator.

Two schemes are supported: the compact scheme diagonalizes the smoothed
generator V_tau = Lam V Lam directly, and the resolvent scheme solves the
generalized eigenproblem V_tau c = beta B c with the positive-definite mass
matrix B and recovers frequencies through the inverse resolvent map
q_inverse. Eigenpairs are ordered by increasing Dirichlet energy with the
constant mode prepended.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from scipy.linalg import cholesky, eigh, solve_triangular
from scipy.sparse import csr_matrix, identity
from scipy.sparse.linalg import eigsh

from .dynamics import FlowSpec, generator_matrix
from .lattice import WavenumberLattice, position_of
from .rkha import RkhaParams, dirichlet_energy, weight_vector

log = logging.getLogger(__name__)

PAIR_TOL = 1e-8


@dataclass(frozen=True)
class SchemeKind:
    tag: str  # "compact" | "resolvent"
    z: float | None = None

    def __post_init__(self) -> None:
        if self.tag not in ("compact", "resolvent"):
            raise ValueError(f"unknown scheme {self.tag!r}")
        if self.tag == "resolvent" and (self.z is None or self.z <= 0.0):
            raise ValueError("resolvent scheme requires z > 0")


@dataclass(frozen=True)
class SpectralBasis:
    """Eigenfrequencies, coefficient columns and Dirichlet energies.

    omega[0] = 0 and C[:, 0] is the zero-mode indicator; the 2d nontrivial
    columns follow in nondecreasing Dirichlet energy, unit 2-norm each.
    """

    omega: np.ndarray         # (2d+1,)
    C: np.ndarray             # (m, 2d+1)
    E: np.ndarray             # (2d+1,)
    lambda_half: np.ndarray   # (m,)
    lattice: WavenumberLattice

    @property
    def d(self) -> int:
        return (len(self.omega) - 1) // 2


def regularized_generator(V, lambda_half: np.ndarray) -> csr_matrix:
    """V_tau = Lam V Lam with Lam = diag(lambda_{tau/2}); stays skew-Hermitian."""
    V = csr_matrix(V)
    lam = np.asarray(lambda_half)
    return csr_matrix(V.multiply(lam[:, None]).multiply(lam[None, :]))


def mass_matrix(V, z: float) -> csr_matrix:
    """B = z^2 I - V^2 for skew-Hermitian V, i.e. z^2 I + V'V >= z^2 I.

    Positive definiteness requires the conjugate-correct form; the entries
    of V are imaginary, so V^2 is real and B is real symmetric.
    """
    if z <= 0.0:
        raise ValueError("resolvent parameter z must be positive")
    V = csr_matrix(V)
    skew = abs(V + V.conj().T)
    if skew.nnz and skew.max() > 1e-12:
        raise ValueError("mass_matrix requires a skew-Hermitian generator")
    m = V.shape[0]
    return csr_matrix(z * z * identity(m, dtype=complex, format="csr") - V @ V)


def _is_diagonal(A: csr_matrix) -> bool:
    coo = A.tocoo()
    return bool(np.all(coo.row == coo.col))


def solve_gep(V_tau, B, n_eig: int, method: str = "auto"):
    """Solve V_tau c = beta B c; return (beta, C) for the n_eig largest |beta|.

    beta is purely imaginary; eigenvectors are returned with unit 2-norm.
    Diagonal pencils (the rotation) are solved entrywise. The dense path
    reduces by Cholesky of B to a standard Hermitian problem; the iterative
    path uses shifted Lanczos on the sparse pencil and must agree with the
    dense path on small instances.
    """
    V_tau = csr_matrix(V_tau)
    B = csr_matrix(B)
    m = V_tau.shape[0]
    if n_eig > m:
        raise ValueError(f"n_eig={n_eig} exceeds matrix size {m}")

    if method == "auto":
        if _is_diagonal(V_tau) and _is_diagonal(B):
            method = "diagonal"
        elif m <= 3000:
            method = "dense"
        else:
            method = "iterative"

    if method == "diagonal":
        nu = (V_tau.diagonal() / B.diagonal()).imag
        top = np.lexsort((np.arange(m), -np.abs(nu)))[:n_eig]
        C = np.zeros((m, n_eig), dtype=complex)
        C[top, np.arange(n_eig)] = 1.0
        return 1j * nu[top], C

    if method == "dense":
        L = cholesky(B.toarray(), lower=True)
        Y = solve_triangular(L, V_tau.toarray(), lower=True)
        A = solve_triangular(L, Y.conj().T, lower=True).conj().T
        H = -1j * A
        H = 0.5 * (H + H.conj().T)
        nu, W = eigh(H)
        top = np.lexsort((np.arange(m), -np.abs(nu)))[:n_eig]
        C = solve_triangular(L.conj().T, W[:, top], lower=False)
    elif method == "iterative":
        H = csr_matrix(V_tau.imag).tocsc().astype(float)   # -i V_tau, real symmetric
        Br = csr_matrix(B.real).tocsc().astype(float)
        nu_k, C = eigsh(H, k=n_eig, M=Br, which="LM")
        order = np.lexsort((np.arange(n_eig), -np.abs(nu_k)))
        nu = nu_k
        top = order
        C = C[:, top].astype(complex)
    else:
        raise ValueError(f"unknown solver method {method!r}")

    C = C / np.linalg.norm(C, axis=0, keepdims=True)
    return 1j * nu[top], C


def q_inverse(z: float, beta: complex) -> complex:
    """Inverse of the resolvent frequency map: beta = i b -> i omega.

    omega = (1 + sqrt(max(0, 1 - 4 z^2 b^2))) / (2 b); the discriminant is
    clamped at zero when |2 z b| > 1 (such beta lie outside the exact range
    of the map).
    """
    b = complex(beta).imag
    if b == 0.0:
        raise ValueError("q_inverse is undefined at beta = 0 (zero mode bypasses it)")
    s = 2.0 * z * b
    disc = (1.0 - s) * (1.0 + s)
    # sub-roundoff discriminants are rounding debris of the branch point;
    # snapping them to zero keeps the inverse exact at |omega| = z
    if disc < 8.0 * np.finfo(float).eps:
        disc = 0.0
    return 1j * (1.0 + np.sqrt(disc)) / (2.0 * b)


def _flip_permutation(lat: WavenumberLattice) -> np.ndarray:
    """Position map j -> -j; flip-conjugation sends eigenvectors of beta to -beta."""
    perm = np.empty(lat.m, dtype=np.int64)
    for s, j in enumerate(lat.order):
        perm[s] = position_of(lat, tuple(-c for c in j))
    return perm


def _fix_phase(c: np.ndarray) -> np.ndarray:
    k = int(np.argmax(np.abs(c)))
    ph = c[k] / abs(c[k])
    return c * np.conj(ph)


def eigendecompose(spec: FlowSpec, params: RkhaParams, lat: WavenumberLattice,
                   scheme: SchemeKind, n_eig: int, d: int,
                   method: str = "auto") -> SpectralBasis:
    """Full pipeline: assemble, solve, recover frequencies, order, pair.

    The 2d nontrivial eigenpairs of lowest Dirichlet energy are kept, ties
    broken by |omega| ascending then sign(omega) descending; the partner of
    each positive-frequency column is rebuilt by flip-conjugation, which is
    an exact eigenvector of the opposite eigenvalue for real vector fields
    and guarantees conjugate-pair columns.
    """
    if not 2 * d <= n_eig <= lat.m - 1:
        raise ValueError(f"need 2d <= n_eig <= m-1, got d={d}, n_eig={n_eig}, m={lat.m}")
    V = generator_matrix(spec, lat)
    lam_half = weight_vector(params, lat, half=True)
    lam_full = lam_half ** 2
    V_tau = regularized_generator(V, lam_half)

    if scheme.tag == "resolvent":
        B = mass_matrix(V, scheme.z)
        beta, C = solve_gep(V_tau, B, n_eig, method=method)
        omega = np.array([q_inverse(scheme.z, b).imag for b in beta])
    else:
        H = 0.5 * (V_tau.imag + V_tau.imag.T).toarray()
        nu, W = eigh(H)
        # drop the exact constant eigenvector, keep the rest as candidates
        k0 = int(np.argmax(np.abs(W[0, :])))
        keep = [k for k in range(lat.m) if k != k0]
        omega = nu[keep]
        C = W[:, keep].astype(complex)
        C = C / np.linalg.norm(C, axis=0, keepdims=True)

    energies = np.array([dirichlet_energy(C[:, k], lam_full) for k in range(C.shape[1])])
    keys = sorted(range(C.shape[1]),
                  key=lambda k: (round(energies[k], 12), round(abs(omega[k]), 12),
                                 -np.sign(omega[k])))
    if scheme.tag == "compact":
        keys = keys[:n_eig]
    sel = keys[:2 * d]
    omega = omega[sel]
    E = energies[sel]
    C = C[:, sel]
    for k in range(C.shape[1]):
        C[:, k] = _fix_phase(C[:, k])

    flip = _flip_permutation(lat)
    used = np.zeros(2 * d, dtype=bool)
    for i in range(2 * d):
        if used[i] or omega[i] <= 0.0:
            continue
        partners = [j for j in range(2 * d)
                    if not used[j] and j != i and abs(omega[j] + omega[i]) <= PAIR_TOL]
        if not partners:
            log.warning("no conjugate partner for omega=%.6g within %g", omega[i], PAIR_TOL)
            continue
        j = partners[0]
        C[:, j] = np.conj(C[flip, i])
        omega[j] = -omega[i]
        E[j] = E[i]
        used[i] = used[j] = True

    m = lat.m
    omega_out = np.concatenate([[0.0], omega])
    E_out = np.concatenate([[0.0], E])
    C_out = np.zeros((m, 2 * d + 1), dtype=complex)
    C_out[0, 0] = 1.0
    C_out[:, 1:] = C
    return SpectralBasis(omega=omega_out, C=C_out, E=E_out,
                         lambda_half=lam_half, lattice=lat)


def eigenfunction_values(basis: SpectralBasis, x) -> np.ndarray:
    """zeta_r(x) = sum_s C[s,r] lambda_{tau/2}(j_s) exp(i j_s.x); zeta_0 = 1.

    x may be a single point or an array of shape (..., N); the result has
    shape (..., 2d+1).
    """
    x = np.asarray(x, dtype=float)
    jt = basis.lattice.index_array.astype(float)
    phases = np.exp(1j * x @ jt.T)           # (..., m)
    return (phases * basis.lambda_half) @ basis.C
