"""Coherent information of a channel and its maximization over input states.

The objective is I_c(N, rho) = S(N(rho)) - S(N^c(rho)) in bits, with
N^c the complementary (environment) channel. Maximization runs local
gradient ascent on the factor parameterization rho = A A^dag / Tr(A A^dag)
from several restarts. Two restarts are always seeded deterministically:
the maximally mixed state, and (for tensor-power channels) the product
of single-copy maximizers, which makes reported values superadditive by
construction.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .channels import QuantumChannel, apply, complementary_apply, tensor_power
from .errors import ValidationError
from .linalg import ENTROPY_CLAMP, von_neumann_entropy

# Floor for eigenvalues inside matrix logarithms; keeps entropy gradients
# finite near rank-deficient outputs without disturbing them elsewhere.
LOG_FLOOR = 1e-18


@dataclass(frozen=True)
class OptimizerOptions:
    """Knobs for the multi-restart ascent.

    Sub-seeds for restart i are derived as default_rng([seed, i]), so
    the result is a deterministic function of (inputs, seed) no matter
    how restarts are scheduled across threads.
    """

    restarts: int = 16
    max_iters: int = 2000
    step_init: float = 0.1
    step_decay: float = 0.5
    grad_tol: float = 1e-7
    seed: int = 0
    rank_schedule: tuple = None
    threads: int = 1
    finite_diff: bool = False

    def __post_init__(self):
        if self.restarts < 1:
            raise ValidationError("restarts must be >= 1")
        if self.max_iters < 1:
            raise ValidationError("max_iters must be >= 1")
        if self.step_init <= 0 or not 0 < self.step_decay < 1:
            raise ValidationError("step schedule must have step_init > 0, 0 < decay < 1")
        if self.grad_tol <= 0:
            raise ValidationError("grad_tol must be > 0")
        if self.threads < 1:
            raise ValidationError("threads must be >= 1")


@dataclass
class OptimizationReport:
    """Best value over restarts plus per-restart diagnostics."""

    value: float
    argmax: np.ndarray
    restart_values: list
    iterations: list
    converged: list
    heuristic: bool = False
    seed_kinds: list = field(default_factory=list)


def coherent_information_at(channel: QuantumChannel, rho: np.ndarray) -> float:
    """I_c at a fixed input: S(N(rho)) - S(N^c(rho)) in bits."""
    return von_neumann_entropy(apply(channel, rho)) - von_neumann_entropy(
        complementary_apply(channel, rho)
    )


class _Kernels:
    """Per-channel tensors reused across optimizer iterations."""

    def __init__(self, channel: QuantumChannel):
        self.k = channel.kraus
        self.kh = self.k.conj().transpose(0, 2, 1)  # K_i^dag stack
        self.dim = channel.in_dim

    def forward(self, rho):
        t = self.k @ rho
        return np.tensordot(t, self.k.conj(), axes=([0, 2], [0, 2]))

    def environment(self, rho):
        t = self.k @ rho
        return np.tensordot(t, self.k.conj(), axes=([1, 2], [1, 2]))

    def adjoint(self, x):
        """N^dag(X) = sum_i K_i^dag X K_i."""
        return ((self.kh @ x) @ self.k).sum(axis=0)

    def env_adjoint(self, y):
        """(N^c)^dag(Y) = sum_ij Y[i,j] K_i^dag K_j."""
        w = np.tensordot(y, self.k, axes=([1], [0]))  # W_i = sum_j Y[i,j] K_j
        return (self.kh @ w).sum(axis=0)


def _entropy_bits(w):
    w = w[w >= ENTROPY_CLAMP]
    if w.size == 0:
        return 0.0
    return float(-np.sum(w * np.log2(w)))


def _state_from_factor(a):
    rho = a @ a.conj().T
    return rho / np.trace(rho).real


def _objective(kern: _Kernels, a) -> float:
    rho = _state_from_factor(a)
    s_b = _entropy_bits(np.linalg.eigvalsh(kern.forward(rho)))
    s_e = _entropy_bits(np.linalg.eigvalsh(kern.environment(rho)))
    return s_b - s_e


def ascent_direction(kern: _Kernels, a):
    """Objective value and Wirtinger gradient G of I_c w.r.t. the factor A.

    The full differential is df = 2 Re Tr(G^dag dA); moving along +G is
    the steepest-ascent direction. Derived by chaining the matrix-log
    entropy derivative through the channel and its complement; the
    identity contributions of both entropy gradients cancel because
    both adjoint maps are unital.
    """
    t = float(np.trace(a @ a.conj().T).real)
    rho = (a @ a.conj().T) / t
    sigma_b = kern.forward(rho)
    sigma_e = kern.environment(rho)

    wb, ub = np.linalg.eigh(sigma_b)
    we, ue = np.linalg.eigh(sigma_e)
    f = _entropy_bits(wb) - _entropy_bits(we)

    log_b = (ub * np.log2(np.maximum(wb, LOG_FLOOR))) @ ub.conj().T
    log_e = (ue * np.log2(np.maximum(we, LOG_FLOOR))) @ ue.conj().T
    g_rho = kern.env_adjoint(log_e) - kern.adjoint(log_b)
    g_rho = 0.5 * (g_rho + g_rho.conj().T)

    c = float(np.trace(g_rho @ rho).real)
    grad = (g_rho - c * np.eye(kern.dim)) @ a / t
    return f, grad


def finite_diff_direction(kern: _Kernels, a, h: float = 1e-6):
    """Central-difference fallback for the ascent direction (slow)."""
    f0 = _objective(kern, a)
    grad = np.zeros_like(a, dtype=complex)
    for idx in np.ndindex(a.shape):
        for part, unit in ((1.0, 1.0), (1j, 1j)):
            da = np.zeros_like(a)
            da[idx] = unit * h
            df = _objective(kern, a + da) - _objective(kern, a - da)
            grad[idx] += 0.5 * (df / (2 * h)) * part
    return f0, grad


def _ascend(kern: _Kernels, a0, opts: OptimizerOptions):
    """Backtracking gradient ascent with a Barzilai-Borwein step guess."""
    direction = finite_diff_direction if opts.finite_diff else ascent_direction
    dim = kern.dim
    a = a0 * (np.sqrt(dim) / np.linalg.norm(a0))
    f, g = direction(kern, a)
    step = opts.step_init
    converged = False
    iters = 0
    stalls = 0
    for iters in range(1, opts.max_iters + 1):
        gnorm2 = float(np.vdot(g, g).real)
        if np.sqrt(gnorm2) <= opts.grad_tol:
            converged = True
            break
        s = step
        accepted = False
        while s > 1e-16:
            a_try = a + s * g
            f_try = _objective(kern, a_try)
            if f_try >= f + 2e-4 * s * gnorm2:
                accepted = True
                break
            s *= opts.step_decay
        if not accepted:
            break
        # creeping ascent toward a boundary plateau is not worth the budget
        stalls = stalls + 1 if f_try - f < 1e-12 else 0
        if stalls >= 3:
            a, f = a_try, f_try
            break
        a_new = a_try * (np.sqrt(dim) / np.linalg.norm(a_try))
        f_new, g_new = direction(kern, a_new)
        da = a_new - a
        dg = g_new - g
        dg2 = float(np.vdot(dg, dg).real)
        if dg2 > 0:
            bb = abs(float(np.vdot(da, dg).real)) / dg2
            step = min(max(bb, 1e-6), 1e6)
        else:
            step = min(s / opts.step_decay, 1e6)
        a, f, g = a_new, f_new, g_new
    return f, a, iters, converged


def _seed_plan(channel: QuantumChannel, opts: OptimizerOptions):
    kinds = ["mixed"]
    if channel.power >= 2 and channel.base is not None:
        kinds.append("product")
    kinds.append("pure")
    while len(kinds) < opts.restarts:
        kinds.append("random")
    return kinds[: opts.restarts]


def _factor_from_state(rho):
    w, u = np.linalg.eigh(rho)
    w = np.maximum(w, 0.0)
    return u * np.sqrt(w)


def _initial_factor(kind, channel, opts, index, product_state):
    dim = channel.in_dim
    if kind == "mixed":
        return np.eye(dim, dtype=complex)
    if kind == "product":
        return _factor_from_state(product_state)
    rng = np.random.default_rng([opts.seed, index])
    if kind == "pure":
        rank = 1
    else:
        schedule = opts.rank_schedule or (dim,)
        rank = min(int(schedule[index % len(schedule)]), dim)
    return rng.standard_normal((dim, rank)) + 1j * rng.standard_normal((dim, rank))


def maximize_coherent_information(
    channel: QuantumChannel, opts: OptimizerOptions = OptimizerOptions()
) -> OptimizationReport:
    """Best local-ascent value of I_c over the restart schedule.

    Non-convergence is reported through the `converged` flags; the best
    value seen is always returned. The reported value is an attained
    value of the objective, hence a certified lower bound on the true
    maximum.
    """
    kinds = _seed_plan(channel, opts)
    product_state = None
    if "product" in kinds:
        base_report = maximize_coherent_information(channel.base, opts)
        product_state = base_report.argmax
        for _ in range(channel.power - 1):
            product_state = np.kron(product_state, base_report.argmax)

    kern = _Kernels(channel)

    def run(index_kind):
        index, kind = index_kind
        a0 = _initial_factor(kind, channel, opts, index, product_state)
        return _ascend(kern, a0, opts)

    tasks = list(enumerate(kinds))
    if opts.threads > 1:
        with ThreadPoolExecutor(max_workers=opts.threads) as pool:
            results = list(pool.map(run, tasks))
    else:
        results = [run(t) for t in tasks]

    values = [r[0] for r in results]
    best = int(np.argmax(values))
    return OptimizationReport(
        value=values[best],
        argmax=_state_from_factor(results[best][1]),
        restart_values=values,
        iterations=[r[2] for r in results],
        converged=[r[3] for r in results],
        seed_kinds=kinds,
    )


def maximize_tensor_power(
    channel: QuantumChannel, g: int, opts: OptimizerOptions = OptimizerOptions()
) -> OptimizationReport:
    """Convenience wrapper: maximize I_c of the g-fold tensor power."""
    return maximize_coherent_information(tensor_power(channel, g), opts)
