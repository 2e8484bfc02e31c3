"""Dense complex-matrix primitives for quantum states.

States are plain ``numpy.ndarray`` density matrices (Hermitian, PSD,
trace one). Validation happens at the boundaries (constructors, file
loads, CLI inputs); the numerical kernels trust their inputs.

All entropies are in bits (base-2 logarithms).
"""

from __future__ import annotations

import numpy as np

from .errors import ValidationError

# Hermiticity / trace / PSD tolerances for a valid density matrix.
HERMITIAN_ATOL = 1e-10
TRACE_ATOL = 1e-10
EIGVAL_FLOOR = -1e-10

# Eigenvalues below this are treated as exact zeros in entropy sums;
# anything in (EIGVAL_FLOOR, ENTROPY_CLAMP) is numerical noise.
ENTROPY_CLAMP = 1e-12

LN2 = np.log(2.0)


def validate_density_matrix(rho: np.ndarray, name: str = "rho") -> np.ndarray:
    """Check the density-matrix invariants and return rho as complex ndarray.

    Raises ValidationError if rho is not square, not Hermitian to 1e-10,
    its trace is off one by more than 1e-10, or it has an eigenvalue
    below -1e-10.
    """
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValidationError(f"{name} must be a square matrix, got shape {rho.shape}")
    herm_err = np.max(np.abs(rho - rho.conj().T))
    if herm_err > HERMITIAN_ATOL:
        raise ValidationError(f"{name} is not Hermitian (max asymmetry {herm_err:.3e})")
    tr_err = abs(np.trace(rho).real - 1.0)
    if tr_err > TRACE_ATOL or abs(np.trace(rho).imag) > TRACE_ATOL:
        raise ValidationError(f"{name} trace deviates from 1 by {tr_err:.3e}")
    lam_min = float(np.linalg.eigvalsh(rho)[0])
    if lam_min < EIGVAL_FLOOR:
        raise ValidationError(f"{name} has negative eigenvalue {lam_min:.3e}")
    return rho


def tensor_product(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product with row-major index pairing (i_A, i_B) -> i_A*dim_B + i_B."""
    return np.kron(np.asarray(a), np.asarray(b))


def partial_trace(rho: np.ndarray, dims, keep) -> np.ndarray:
    """Trace out all subsystems not listed in `keep`.

    Parameters
    ----------
    rho : ndarray
        Density matrix on the full system, dimension prod(dims).
    dims : sequence of int
        Dimension of each subsystem, in tensor order.
    keep : iterable of int
        Indices of subsystems to keep. The result is ordered by
        ascending original index.
    """
    rho = np.asarray(rho, dtype=complex)
    dims = [int(d) for d in dims]
    total = int(np.prod(dims))
    if rho.shape != (total, total):
        raise ValidationError(
            f"density matrix shape {rho.shape} does not match subsystem dims {dims}"
        )
    keep = sorted(set(int(k) for k in keep))
    if not keep:
        raise ValidationError("keep must name at least one subsystem")
    for k in keep:
        if k < 0 or k >= len(dims):
            raise ValidationError(f"keep index {k} out of range for {len(dims)} subsystems")

    trace_out = [i for i in range(len(dims)) if i not in keep]
    work = rho.reshape(dims + dims)
    cur_dims = list(dims)
    for idx in sorted(trace_out, reverse=True):
        work = np.trace(work, axis1=idx, axis2=idx + len(cur_dims))
        cur_dims.pop(idx)
    out = int(np.prod(cur_dims))
    return work.reshape(out, out)


def hermitian_spectrum(h: np.ndarray):
    """Eigendecomposition of a Hermitian matrix, eigenvalues descending.

    Returns (eigenvalues, eigenvectors) with eigenvectors as columns so
    that U @ diag(w) @ U^dag reconstructs the input.
    """
    w, u = np.linalg.eigh(np.asarray(h, dtype=complex))
    order = np.argsort(w)[::-1]
    return w[order], u[:, order]


def von_neumann_entropy(rho: np.ndarray) -> float:
    """S(rho) = -sum lambda log2 lambda over eigenvalues above the clamp.

    Eigenvalues in (-1e-10, 1e-12) are treated as exact zeros; an
    eigenvalue below -1e-10 means the input is not a state and raises.
    """
    w = np.linalg.eigvalsh(np.asarray(rho, dtype=complex))
    if w[0] < EIGVAL_FLOOR:
        raise ValidationError(f"entropy of non-PSD matrix (min eigenvalue {w[0]:.3e})")
    w = w[w >= ENTROPY_CLAMP]
    if w.size == 0:
        return 0.0
    return float(-np.sum(w * np.log2(w)))


def binary_entropy(x: float) -> float:
    """h2(x) = -x log2 x - (1-x) log2(1-x), with 0 log 0 = 0."""
    if not 0.0 <= x <= 1.0:
        raise ValidationError(f"binary_entropy argument {x} outside [0, 1]")
    if x == 0.0 or x == 1.0:
        return 0.0
    return float(-x * np.log2(x) - (1.0 - x) * np.log2(1.0 - x))


def _psd_sqrt(m: np.ndarray) -> np.ndarray:
    w, u = np.linalg.eigh(m)
    w = np.maximum(w, 0.0)
    return (u * np.sqrt(w)) @ u.conj().T


def fidelity(rho: np.ndarray, sigma: np.ndarray) -> float:
    """Fidelity F(rho, sigma) = (Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2.

    Uses the squared convention. A rank-one rho short-circuits to
    <psi|sigma|psi>; otherwise the general eigendecomposition path runs.
    """
    rho = np.asarray(rho, dtype=complex)
    sigma = np.asarray(sigma, dtype=complex)
    if rho.shape != sigma.shape:
        raise ValidationError(f"fidelity dims differ: {rho.shape} vs {sigma.shape}")
    purity = float(np.trace(rho @ rho).real)
    if purity >= 1.0 - 1e-12:
        w, u = hermitian_spectrum(rho)
        psi = u[:, 0]
        return float(np.real(psi.conj() @ sigma @ psi))
    sr = _psd_sqrt(rho)
    inner = sr @ sigma @ sr
    w = np.linalg.eigvalsh(inner)
    w = np.maximum(w, 0.0)
    return float(np.sum(np.sqrt(w)) ** 2)


def random_density_matrix(dim: int, rank: int, seed) -> np.ndarray:
    """rho = A A^dag / Tr(A A^dag) with A a dim x rank complex Gaussian matrix.

    Deterministic for a given seed; the generator is
    numpy.random.default_rng(seed) and A is drawn as
    standard_normal((dim, rank)) + 1j * standard_normal((dim, rank)).
    """
    if not 1 <= rank <= dim:
        raise ValidationError(f"rank {rank} must be in [1, dim={dim}]")
    rng = np.random.default_rng(seed)
    a = rng.standard_normal((dim, rank)) + 1j * rng.standard_normal((dim, rank))
    rho = a @ a.conj().T
    return rho / np.trace(rho).real
