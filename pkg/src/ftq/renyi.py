"""Sandwiched Renyi relative entropy and the alpha-Renyi coherent information.

The conditional quantity -H_alpha(R|B) on omega_RB = (id (x) N)(phi_rho)
is computed as min over sigma_B of D_alpha(omega || I_R (x) sigma_B).
The inner minimization iterates the normalized fixed-point map

    sigma  <-  Tr_R[ ((I (x) sigma^beta) omega (I (x) sigma^beta))^alpha ]

(beta = (1-alpha)/2alpha), whose stationary points match the classical
Arimoto optimizer on commuting inputs, with random restarts as a
safeguard. There is no global-optimality certificate: every Renyi value
reported by this module is an upper bound on the true minimum and is
flagged heuristic.
"""

from __future__ import annotations

import numpy as np
from scipy import optimize as _sciopt

from .channels import QuantumChannel
from .coherent import (
    OptimizationReport,
    OptimizerOptions,
    _seed_plan,
    _initial_factor,
    _state_from_factor,
)
from .errors import SupportError, ValidationError

# Eigenvalues of sigma below this are lifted to this value before the
# fractional power; the support precondition guards correctness.
SIGMA_LIFT = 1e-12
SUPPORT_OVERLAP_TOL = 1e-8


def sandwiched_relative_entropy(rho: np.ndarray, sigma: np.ndarray, alpha: float) -> float:
    """D_alpha(rho || sigma) = log2 Tr[(sigma^b rho sigma^b)^alpha] / (alpha - 1),

    with b = (1-alpha)/(2 alpha), matrix powers taken by
    eigendecomposition. Requires alpha > 1 and supp(rho) within
    supp(sigma): if sigma has a zero eigendirection carrying more than
    1e-8 of rho's weight, SupportError is raised.
    """
    if alpha <= 1.0:
        raise ValidationError(f"alpha must be > 1, got {alpha}")
    rho = np.asarray(rho, dtype=complex)
    sigma = np.asarray(sigma, dtype=complex)
    if rho.shape != sigma.shape:
        raise ValidationError(f"dims differ: {rho.shape} vs {sigma.shape}")

    w, u = np.linalg.eigh(sigma)
    dead = w < SIGMA_LIFT
    if np.any(dead):
        overlap = float(
            np.real(np.sum((u[:, dead].conj() * (rho @ u[:, dead])).sum(axis=0)))
        )
        if overlap > SUPPORT_OVERLAP_TOL:
            raise SupportError(
                f"sigma support does not cover rho (leaked weight {overlap:.3e})"
            )
    beta = (1.0 - alpha) / (2.0 * alpha)
    s_beta = (u * np.maximum(w, SIGMA_LIFT) ** beta) @ u.conj().T
    inner = s_beta @ rho @ s_beta
    inner = 0.5 * (inner + inner.conj().T)
    wx = np.maximum(np.linalg.eigvalsh(inner), 0.0)
    return float(np.log2(np.sum(wx**alpha)) / (alpha - 1.0))


def purification(rho: np.ndarray) -> np.ndarray:
    """A purifying vector of rho as a (dim_R, dim_S) matrix, dim_R = dim(rho)."""
    w, u = np.linalg.eigh(np.asarray(rho, dtype=complex))
    w = np.maximum(w, 0.0)
    return (u * np.sqrt(w)).T


def channel_reference_state(channel: QuantumChannel, rho: np.ndarray) -> np.ndarray:
    """omega_RB = (id_R (x) N)(phi_rho) with phi_rho a purification of rho."""
    if rho.shape != (channel.in_dim, channel.in_dim):
        raise ValidationError(
            f"state dim {rho.shape} does not match channel input dim {channel.in_dim}"
        )
    phi = purification(rho)  # (dR, in)
    vecs = np.stack([(phi @ k.T).ravel() for k in channel.kraus])
    return np.einsum("ka,kb->ab", vecs, vecs.conj())


def _conditional_step(omega, d_r, d_b, sigma, alpha):
    """Value of D_alpha(omega || I (x) sigma) and the fixed-point update of sigma."""
    beta = (1.0 - alpha) / (2.0 * alpha)
    w, u = np.linalg.eigh(sigma)
    s_beta = (u * np.maximum(w, SIGMA_LIFT) ** beta) @ u.conj().T
    t = np.kron(np.eye(d_r), s_beta)
    inner = t @ omega @ t
    inner = 0.5 * (inner + inner.conj().T)
    wx, ux = np.linalg.eigh(inner)
    wx = np.maximum(wx, 0.0)
    trace_alpha = float(np.sum(wx**alpha))
    value = float(np.log2(trace_alpha) / (alpha - 1.0))
    x_alpha = (ux * wx**alpha) @ ux.conj().T
    update = np.trace(x_alpha.reshape(d_r, d_b, d_r, d_b), axis1=0, axis2=2)
    update = 0.5 * (update + update.conj().T)
    tr = float(np.trace(update).real)
    if tr <= 0:
        return value, sigma
    return value, update / tr


def conditional_renyi_value(
    omega: np.ndarray,
    d_r: int,
    d_b: int,
    alpha: float,
    restarts: int = 4,
    max_iters: int = 120,
    seed: int = 0,
    tol: float = 1e-12,
) -> float:
    """min over sigma_B of D_alpha(omega_RB || I_R (x) sigma_B), heuristically.

    Starts from sigma = Tr_R omega plus random restarts; returns the
    smallest value visited, which upper-bounds the true minimum.
    """
    starts = [np.trace(omega.reshape(d_r, d_b, d_r, d_b), axis1=0, axis2=2)]
    for j in range(max(restarts - 1, 0)):
        rng = np.random.default_rng([seed, 7001 + j])
        a = rng.standard_normal((d_b, d_b)) + 1j * rng.standard_normal((d_b, d_b))
        starts.append((a @ a.conj().T))

    best = np.inf
    for sigma in starts:
        sigma = sigma / np.trace(sigma).real
        prev_value = np.inf
        for _ in range(max_iters):
            value, sigma_next = _conditional_step(omega, d_r, d_b, sigma, alpha)
            best = min(best, value)
            if value > prev_value + 1e-13:
                # oscillation: damp toward the previous iterate
                sigma_next = 0.5 * (sigma_next + sigma)
            if (
                np.max(np.abs(sigma_next - sigma)) < tol
                or abs(value - prev_value) < 1e-13
            ):
                break
            prev_value = value
            sigma = sigma_next
    return float(best)


def renyi_coherent_information_at(
    channel: QuantumChannel,
    rho: np.ndarray,
    alpha: float,
    restarts: int = 4,
    seed: int = 0,
) -> float:
    """-H_alpha(R|B) on the channel's reference state for input rho, in bits."""
    if alpha <= 1.0:
        raise ValidationError(f"alpha must be > 1, got {alpha}")
    omega = channel_reference_state(channel, rho)
    return conditional_renyi_value(
        omega, channel.in_dim, channel.out_dim, alpha, restarts=restarts, seed=seed
    )


def maximize_renyi_coherent_information(
    channel: QuantumChannel, alpha: float, opts: OptimizerOptions = OptimizerOptions()
) -> OptimizationReport:
    """Best value of the alpha-Renyi coherent information over input states.

    Outer maximization over rho = A A^dag / Tr(A A^dag) by Nelder-Mead
    around the same deterministic seed set as the von Neumann maximizer
    (maximally mixed, product of single-copy maximizers for tensor
    powers, one pure seed, then random). The report is flagged
    heuristic: inner minimizations carry no optimality certificate.
    """
    if alpha <= 1.0:
        raise ValidationError(f"alpha must be > 1, got {alpha}")
    dim = channel.in_dim
    kinds = _seed_plan(channel, opts)
    product_state = None
    if "product" in kinds:
        base_report = maximize_renyi_coherent_information(channel.base, alpha, opts)
        product_state = base_report.argmax
        for _ in range(channel.power - 1):
            product_state = np.kron(product_state, base_report.argmax)

    def _unpack(x):
        a = x[: x.size // 2].reshape(dim, -1) + 1j * x[x.size // 2 :].reshape(dim, -1)
        return _state_from_factor(a)

    def objective(x):
        # single inner start keeps the search cheap; best states are
        # re-evaluated carefully below
        return -renyi_coherent_information_at(
            channel, _unpack(x), alpha, restarts=1, seed=opts.seed
        )

    values, states, iteration_counts, converged = [], [], [], []
    for index, kind in enumerate(kinds):
        a0 = _initial_factor(kind, channel, opts, index, product_state)
        if a0.shape[1] < dim:
            a0 = np.hstack([a0, np.zeros((dim, dim - a0.shape[1]))])
        x0 = np.concatenate([a0.real.ravel(), a0.imag.ravel()])
        f0 = objective(x0)
        res = _sciopt.minimize(
            objective,
            x0,
            method="Nelder-Mead",
            options={"maxiter": 100 * dim, "xatol": 1e-6, "fatol": 1e-9},
        )
        x_best = res.x if res.fun <= f0 else x0
        rho_best = _unpack(x_best)
        values.append(
            renyi_coherent_information_at(
                channel, rho_best, alpha, restarts=4, seed=opts.seed
            )
        )
        states.append(rho_best)
        iteration_counts.append(int(res.nit))
        converged.append(bool(res.success))

    best = int(np.argmax(values))
    return OptimizationReport(
        value=values[best],
        argmax=states[best],
        restart_values=values,
        iterations=iteration_counts,
        converged=converged,
        heuristic=True,
        seed_kinds=kinds,
    )
