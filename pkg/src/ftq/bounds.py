"""Closed-form overhead and threshold bounds, plus numeric cross-checks.

Every formula is evaluated exactly as printed in its FORMULAS entry,
including the mixed natural-log / log2 factors. Coherent-information
values are injected as inputs rather than recomputed here, so the same
bound can be driven by analytic values, optimizer output or
user-supplied numbers. Vacuous (non-positive or below-trivial) values
are returned as-is, never clamped.

The bound catalog (names are the tool's own identifiers, used verbatim
by the CLI `bound` subcommand):

  oneshot       per-gate one-shot converse (Ic + h2(e)) / (1 - 2e)
  lemma1        sum of one-shot converses over G gates under the joint
                fidelity-budget constraint prod(1 - e_i/2) >= 1 - eps*L
  p1 / p3       closed-form optima of the two relaxed allocation
                problems whose sum upper-bounds the lemma1 objective
  thm1          lower bound on physical qubits with explicit gate count G
  prop1         G-free weakening of thm1 (valid for d >= 2g)
  corollary1    limiting space overhead g / Ic
  prop2         exponential qubit demand when Ic = 0
  appendixd     Renyi variant of the qubit upper bound, and its
                Ic-independent cap `appendixd_dmax`
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channels import QuantumChannel, tensor_power
from .coherent import OptimizerOptions, maximize_coherent_information
from .errors import ValidationError
from .linalg import binary_entropy

LN2 = math.log(2.0)

# Accuracy/Lipschitz condition: eps * L may not exceed 1 - e^(-1/8).
EPS_L_MAX = 1.0 - math.exp(-0.125)
EPS_MAX = 0.11

FORMULAS = {
    "oneshot": "(Ic + h2(eps_i)) / (1 - 2 eps_i)",
    "lemma1": "sum_i (Ic + h2(eps_i)) / (1 - 2 eps_i)  s.t.  prod_i (1 - eps_i/2) >= 1 - eps L",
    "p1": "Ic * ((G - 1) + 1 / (1 - 4 ln(1/(1 - eps L))))",
    "p3": "G / (1 - 4 ln(1/(1 - eps L))) * h2((2/G) ln(1/(1 - eps L)))",
    "thm1": (
        "(d - Ic / (1 - 4 ln(1/(1 - eps L)))) / "
        "(Ic/g + (G/(g(G-1))) h2((2g/d) ln(1/(1 - eps L))) / (1 - 4 ln(1/(1 - eps L))))"
    ),
    "prop1": "d / (Ic/g + (1/(2(d-g) ln 2)) (ln(4d/g) + 8/7)) - 2g",
    "corollary1": "g / Ic",
    "prop2": "(g/4) exp(2 ln2 d - 4/3) - 1",
    "appendixd": (
        "G Ic_alpha + (alpha/(ln2 (alpha-1))) * "
        "(2 ln(1/(1 - eps L))) / (1 - 2 ln(1/(1 - eps L)))"
    ),
    "appendixd_dmax": "alpha / (3 ln2 (alpha - 1))",
}


def _check_condition_iii(eps: float, L: float):
    if not 0.0 < eps < EPS_MAX:
        raise ValidationError(f"eps={eps} outside (0, {EPS_MAX})")
    if L <= 0:
        raise ValidationError(f"L={L} must be positive")
    if eps * L > EPS_L_MAX + 1e-12:
        raise ValidationError(
            f"eps*L = {eps * L:.6f} exceeds 1 - e^(-1/8) = {EPS_L_MAX:.6f}"
        )


def ln_factor(eps: float, L: float) -> float:
    """ln(1/(1 - eps L)); at most 1/8 under the accuracy condition."""
    _check_condition_iii(eps, L)
    return math.log(1.0 / (1.0 - eps * L))


@dataclass(frozen=True)
class BoundParams:
    """Inputs shared by the bound formulas.

    d logical qubits, gate size g, accuracy eps in (0, 0.11), inverse
    Lipschitz constant L with eps*L <= 1 - e^(-1/8), optional gate
    count G (= ceil(N/g) in thm1) and optional Renyi order alpha > 1.
    """

    d: int
    g: int
    eps: float
    L: float
    G: int = None
    alpha: float = None

    def __post_init__(self):
        if self.d < 1 or self.g < 1:
            raise ValidationError(f"d={self.d} and g={self.g} must be positive")
        _check_condition_iii(self.eps, self.L)
        if self.G is not None and self.G < 2:
            raise ValidationError(f"G={self.G} must be >= 2")
        if self.alpha is not None and self.alpha <= 1:
            raise ValidationError(f"alpha={self.alpha} must be > 1")


@dataclass(frozen=True)
class EpsilonAllocation:
    """Per-gate accuracy budget {eps_i}, each in [0, 0.5)."""

    eps_i: tuple

    def __post_init__(self):
        vals = tuple(float(e) for e in self.eps_i)
        object.__setattr__(self, "eps_i", vals)
        for e in vals:
            if not 0.0 <= e < 0.5:
                raise ValidationError(f"allocation entry {e} outside [0, 0.5)")

    def feasibility_product(self, constraint: str = "half") -> float:
        if constraint == "half":
            return float(np.prod([1.0 - e / 2.0 for e in self.eps_i]))
        if constraint == "full":
            return float(np.prod([1.0 - e for e in self.eps_i]))
        raise ValidationError(f"unknown constraint variant '{constraint}'")

    def is_feasible(self, eps: float, L: float, constraint: str = "half") -> bool:
        return self.feasibility_product(constraint) >= 1.0 - eps * L - 1e-12


def oneshot_converse(eps_i: float, ic: float) -> float:
    """Qubits sendable in one shot at infidelity eps_i: (Ic + h2(eps_i)) / (1 - 2 eps_i)."""
    if not 0.0 <= eps_i < 0.5:
        raise ValidationError(f"eps_i={eps_i} outside [0, 0.5); the bound is vacuous")
    if ic < 0:
        raise ValidationError(f"Ic={ic} must be >= 0")
    return (ic + binary_entropy(eps_i)) / (1.0 - 2.0 * eps_i)


def lemma1_rhs(
    alloc, ic_g: float, eps: float, L: float, constraint: str = "half"
) -> float:
    """Sum of per-gate one-shot converses at a feasible accuracy allocation.

    The default constraint is prod(1 - eps_i/2) >= 1 - eps*L (classical
    communication halves the per-gate infidelity); constraint="full"
    uses prod(1 - eps_i) instead.
    """
    if not isinstance(alloc, EpsilonAllocation):
        alloc = EpsilonAllocation(tuple(alloc))
    _check_condition_iii(eps, L)
    if not alloc.is_feasible(eps, L, constraint):
        prod = alloc.feasibility_product(constraint)
        raise ValidationError(
            f"infeasible allocation: prod(1 - eps_i{'/2' if constraint == 'half' else ''})"
            f" = {prod:.9f} < 1 - eps*L = {1 - eps * L:.9f}"
        )
    return float(sum(oneshot_converse(e, ic_g) for e in alloc.eps_i))


def p1_optimum(G: int, eps: float, L: float, ic_g: float) -> float:
    """Optimum of the convex allocation problem: all budget on one gate."""
    if G < 1:
        raise ValidationError(f"G={G} must be >= 1")
    if ic_g < 0:
        raise ValidationError(f"Ic={ic_g} must be >= 0")
    c = 2.0 * ln_factor(eps, L)
    return ic_g * ((G - 1) + 1.0 / (1.0 - 2.0 * c))


def p3_optimum(G: int, eps: float, L: float) -> float:
    """Optimum of the concave allocation problem: budget split evenly."""
    if G < 1:
        raise ValidationError(f"G={G} must be >= 1")
    lnf = ln_factor(eps, L)
    return G / (1.0 - 4.0 * lnf) * binary_entropy(2.0 / G * lnf)


def thm1_bound(params: BoundParams, ic_g: float) -> float:
    """Lower bound on physical qubits with the gate count G explicit."""
    if params.G is None:
        raise ValidationError("thm1 requires the gate count G")
    if ic_g < 0:
        raise ValidationError(f"Ic={ic_g} must be >= 0")
    d, g, G = params.d, params.g, params.G
    if d < 2 * g:
        raise ValidationError(f"thm1 requires d >= 2g (d={d}, g={g})")
    lnf = ln_factor(params.eps, params.L)
    one_minus = 1.0 - 4.0 * lnf
    h2_term = (G / (g * (G - 1))) * binary_entropy(2.0 * g / d * lnf) / one_minus
    denom = ic_g / g + h2_term
    if denom == 0.0:
        raise ValidationError("degenerate denominator: Ic = 0 and the h2 term vanishes")
    return (d - ic_g / one_minus) / denom


def prop1_bound(d: int, g: int, ic_g: float) -> float:
    """G-free lower bound on physical qubits, valid for d >= 2g."""
    if d < 2 * g:
        raise ValidationError(f"prop1 requires d >= 2g (d={d}, g={g})")
    if ic_g < 0:
        raise ValidationError(f"Ic={ic_g} must be >= 0")
    log_term = (math.log(4.0 * d / g) + 8.0 / 7.0) / (2.0 * (d - g) * LN2)
    return d / (ic_g / g + log_term) - 2.0 * g


def corollary1_overhead(g: int, ic_g: float) -> float:
    """Limiting space overhead N/d: at least g / Ic."""
    if ic_g <= 0:
        raise ValidationError(
            "corollary1 needs Ic > 0; at Ic = 0 use the threshold machinery "
            "(sub-linear overhead is impossible there)"
        )
    return g / ic_g


def prop2_bound(d: int, g: int) -> float:
    """Physical qubits needed when Ic vanishes: (g/4) exp(2 ln2 d - 4/3) - 1."""
    return (g / 4.0) * math.exp(2.0 * LN2 * d - 4.0 / 3.0) - 1.0


def is_vacuous(bound_value: float, d: int) -> bool:
    """A qubit-count lower bound below trivial counting (N >= d) is vacuous."""
    return bound_value < d


def appendixd_bound(G: int, eps: float, L: float, alpha: float, ic_alpha: float) -> float:
    """Renyi upper bound on computable logical qubits d."""
    if alpha <= 1:
        raise ValidationError(f"alpha={alpha} must be > 1")
    if G < 1:
        raise ValidationError(f"G={G} must be >= 1")
    if ic_alpha < 0:
        raise ValidationError(f"Ic_alpha={ic_alpha} must be >= 0")
    lnf = ln_factor(eps, L)
    ratio = 2.0 * lnf / (1.0 - 2.0 * lnf)
    return G * ic_alpha + alpha / (LN2 * (alpha - 1.0)) * ratio


def appendixd_dmax(alpha: float) -> float:
    """Cap on logical qubits once the alpha-Renyi coherent information is zero."""
    if alpha <= 1:
        raise ValidationError(f"alpha={alpha} must be > 1")
    return alpha / (3.0 * LN2 * (alpha - 1.0))


@dataclass
class CapacityComparison:
    """Ratios k / Ic(N^(x)k) for k = 1..k_max.

    `min_ratio` is only an upper estimate of the true infimum over all
    k, because Ic values come from a heuristic maximizer and k stops at
    k_max.
    """

    rows: list  # (k, ic_k, ratio) with ratio = inf when ic_k <= 0
    min_ratio: float
    min_k: int


def capacity_comparison(
    channel: QuantumChannel, k_max: int, opts: OptimizerOptions = OptimizerOptions()
) -> CapacityComparison:
    """Tabulate k / Ic(N^(x)k) against the single-letter overhead bound."""
    if k_max < 1:
        raise ValidationError(f"k_max={k_max} must be >= 1")
    rows = []
    for k in range(1, k_max + 1):
        ic_k = maximize_coherent_information(tensor_power(channel, k), opts).value
        ratio = k / ic_k if ic_k > 0 else math.inf
        rows.append((k, ic_k, ratio))
    best = min(rows, key=lambda r: r[2])
    return CapacityComparison(rows=rows, min_ratio=best[2], min_k=best[0])


# ---------------------------------------------------------------------------
# Numeric cross-checks for the closed-form allocation optima. These maximize
# the stated objectives directly over {eps_i >= 0, sum eps_i <= c} with a
# dense simplex grid plus projected gradient ascent, so a drifted closed form
# would be flagged by exceeding them.
# ---------------------------------------------------------------------------


def _h2_vec(x):
    x = np.clip(x, 0.0, 1.0)
    out = np.zeros_like(x)
    mask = (x > 0) & (x < 1)
    xm = x[mask]
    out[mask] = -xm * np.log2(xm) - (1 - xm) * np.log2(1 - xm)
    return out


def _h2_prime(x):
    x = np.clip(x, 1e-15, 1 - 1e-15)
    return np.log2((1 - x) / x)


def _project_budget(x, c):
    """Euclidean projection onto {x >= 0, sum x <= c}."""
    x = np.maximum(x, 0.0)
    if x.sum() <= c:
        return x
    u = np.sort(x)[::-1]
    css = np.cumsum(u) - c
    idx = np.arange(1, x.size + 1)
    cond = u - css / idx > 0
    k = idx[cond][-1]
    tau = css[k - 1] / k
    return np.maximum(x - tau, 0.0)


def _simplex_grid(G, c, divisions):
    """All grid points of the scaled simplex {sum k_i <= divisions} * (c/divisions)."""
    pts = [[]]
    for _ in range(G):
        pts = [p + [k] for p in pts for k in range(divisions + 1 - sum(p))]
    return np.asarray(pts, dtype=float) * (c / divisions)


def _numeric_budget_max(objective, gradient, G, c, divisions, seed=0):
    grid = _simplex_grid(G, c, divisions)
    vals = objective(grid)
    order = np.argsort(vals)[::-1]
    starts = [grid[i] for i in order[:4]]
    starts.extend(c * np.eye(G))  # vertices
    starts.append(np.full(G, c / G))  # symmetric point
    rng = np.random.default_rng(seed)
    for _ in range(6):
        raw = rng.uniform(0, c, size=G)
        starts.append(_project_budget(raw, c))

    best = float(np.max(vals))
    for x in starts:
        x = _project_budget(np.asarray(x, dtype=float), c)
        f = float(objective(x[None, :])[0])
        step = c / 4.0
        for _ in range(400):
            g = gradient(x)
            x_new = _project_budget(x + step * g, c)
            f_new = float(objective(x_new[None, :])[0])
            while f_new < f and step > 1e-14:
                step *= 0.5
                x_new = _project_budget(x + step * g, c)
                f_new = float(objective(x_new[None, :])[0])
            if f_new <= f + 1e-15:
                break
            x, f = x_new, f_new
            step = min(step * 2.0, c)
        best = max(best, f)
    return best


def numeric_p1_optimum(G, eps, L, ic_g, divisions=None, seed=0):
    """Grid + projected-ascent maximum of sum Ic/(1-2 eps_i) under the budget."""
    c = 2.0 * ln_factor(eps, L)
    divisions = divisions or {1: 200, 2: 120, 3: 40, 4: 20}.get(G, 12)

    def obj(pts):
        return ic_g * np.sum(1.0 / (1.0 - 2.0 * pts), axis=-1)

    def grad(x):
        return 2.0 * ic_g / (1.0 - 2.0 * x) ** 2

    return _numeric_budget_max(obj, grad, G, c, divisions, seed)


def numeric_p3_optimum(G, eps, L, divisions=None, seed=0):
    """Grid + projected-ascent maximum of the concave h2-sum objective."""
    lnf = ln_factor(eps, L)
    c = 2.0 * lnf
    scale = 1.0 / (1.0 - 4.0 * lnf)
    divisions = divisions or {1: 200, 2: 120, 3: 40, 4: 20}.get(G, 12)

    def obj(pts):
        return scale * np.sum(_h2_vec(pts), axis=-1)

    def grad(x):
        return scale * _h2_prime(x)

    return _numeric_budget_max(obj, grad, G, c, divisions, seed)


def numeric_lemma1_relaxed_optimum(G, eps, L, ic_g, divisions=None, seed=0):
    """Maximum of the combined one-shot objective under the relaxed sum budget.

    This is the quantity the p1 + p3 decomposition upper-bounds.
    """
    c = 2.0 * ln_factor(eps, L)
    divisions = divisions or {1: 200, 2: 120, 3: 40, 4: 20}.get(G, 12)

    def obj(pts):
        return np.sum((ic_g + _h2_vec(pts)) / (1.0 - 2.0 * pts), axis=-1)

    def grad(x):
        h = _h2_vec(np.atleast_1d(x))
        return (_h2_prime(x) * (1.0 - 2.0 * x) + 2.0 * (ic_g + h)) / (1.0 - 2.0 * x) ** 2

    return _numeric_budget_max(obj, grad, G, c, divisions, seed)
