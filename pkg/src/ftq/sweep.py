"""Parameter sweeps over noise families and noise-threshold detection.

The threshold of a family is the boundary of {p : Ic(N(p)^(x)g) > tol_zero}.
Exact Ic = 0 is not numerically decidable; tol_zero (default 1e-4 bits,
the measured optimizer noise floor on the identity channel) stands in
for zero, and the reported maximum is always >= 0 because pure inputs
achieve 0. Monotonicity of Ic in the noise parameter is assumed for the
built-in families and asserted opportunistically along the search path;
a violation aborts with the offending points rather than returning a
silent answer.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .bounds import prop1_bound, is_vacuous
from .channels import NoiseFamily, tensor_power
from .coherent import OptimizerOptions, maximize_coherent_information
from .errors import MonotonicityError, NumericalError, ValidationError
from .renyi import maximize_renyi_coherent_information

DEFAULT_TOL_ZERO = 1e-4
DEFAULT_TOL_PARAM = 1e-3
COARSE_SCAN_POINTS = 17

# Optimizer jitter allowance when asserting Ic monotone in the parameter.
MONOTONICITY_SLACK = 1e-6


@dataclass
class SweepPoint:
    param: float
    ic_bits: float
    prop1_bound: float
    vacuous: bool


@dataclass
class SweepResult:
    family_id: str
    g: int
    d: int
    points: list
    threshold: float = None
    bracket: tuple = None


@dataclass
class ThresholdResult:
    threshold: float
    bracket: tuple
    heuristic: bool = False
    evaluations: dict = field(default_factory=dict, repr=False)


def _ic_evaluator(family: NoiseFamily, g: int, opts: OptimizerOptions, alpha=None):
    """Memoized p -> reported Ic(N(p)^(x)g); same seed at every grid point."""
    cache = {}

    def evaluate(p: float) -> float:
        if p not in cache:
            channel = tensor_power(family.instantiate(p), g)
            if alpha is None:
                cache[p] = maximize_coherent_information(channel, opts).value
            else:
                cache[p] = maximize_renyi_coherent_information(channel, alpha, opts).value
        return cache[p]

    return evaluate, cache


def sweep_family(
    family: NoiseFamily,
    g: int,
    grid,
    d: int,
    opts: OptimizerOptions = OptimizerOptions(),
) -> SweepResult:
    """Reported Ic and the prop1 bound at every grid point of the family."""
    if d < 2 * g:
        raise ValidationError(f"sweep needs d >= 2g for the prop1 bound (d={d}, g={g})")
    grid = [float(p) for p in grid]
    for p in grid:
        if not family.lo <= p <= family.hi:
            raise ValidationError(
                f"grid point {p} outside {family.family_id} range "
                f"[{family.lo}, {family.hi}]"
            )
    evaluate, _ = _ic_evaluator(family, g, opts)
    points = []
    for p in sorted(grid):
        ic = evaluate(p)
        bound = prop1_bound(d, g, max(ic, 0.0))
        points.append(SweepPoint(p, ic, bound, is_vacuous(bound, d)))
    return SweepResult(family_id=family.family_id, g=g, d=d, points=points)


def _check_monotone(cache: dict, tol_zero: float):
    params = sorted(cache)
    for lo, hi in zip(params, params[1:]):
        if cache[hi] > cache[lo] + max(MONOTONICITY_SLACK, 0.01 * tol_zero):
            raise MonotonicityError(
                f"Ic increased with noise: Ic({lo:.6g}) = {cache[lo]:.6g} but "
                f"Ic({hi:.6g}) = {cache[hi]:.6g} (offending triple: "
                f"{lo:.6g}, {hi:.6g}, delta {cache[hi] - cache[lo]:.3g})"
            )


def _bisect_threshold(evaluate, cache, lo, hi, tol_zero, tol_param):
    ic_lo, ic_hi = evaluate(lo), evaluate(hi)
    if ic_lo <= tol_zero:
        raise NumericalError(
            f"no sign change: Ic at range start {lo:.6g} is {ic_lo:.3g} <= "
            f"tol_zero {tol_zero:.3g}"
        )
    if ic_hi > tol_zero:
        raise NumericalError(
            f"no sign change: Ic at range end {hi:.6g} is {ic_hi:.3g} > "
            f"tol_zero {tol_zero:.3g}"
        )

    # coarse scan locates the sign-change bracket despite optimizer jitter
    scan = np.linspace(lo, hi, COARSE_SCAN_POINTS)
    bracket = (lo, hi)
    for a, b in zip(scan, scan[1:]):
        if evaluate(float(a)) > tol_zero >= evaluate(float(b)):
            bracket = (float(a), float(b))
            break
    _check_monotone(cache, tol_zero)

    lo, hi = bracket
    while hi - lo > tol_param:
        mid = 0.5 * (lo + hi)
        if evaluate(mid) > tol_zero:
            lo = mid
        else:
            hi = mid
    _check_monotone(cache, tol_zero)
    return 0.5 * (lo + hi), (lo, hi)


def find_threshold(
    family: NoiseFamily,
    g: int,
    tol_zero: float = DEFAULT_TOL_ZERO,
    tol_param: float = DEFAULT_TOL_PARAM,
    opts: OptimizerOptions = OptimizerOptions(),
) -> ThresholdResult:
    """Noise strength where the reported Ic(N(p)^(x)g) falls to tol_zero."""
    evaluate, cache = _ic_evaluator(family, g, opts)
    threshold, bracket = _bisect_threshold(
        evaluate, cache, family.lo, family.hi, tol_zero, tol_param
    )
    return ThresholdResult(threshold=threshold, bracket=bracket, evaluations=cache)


def find_renyi_threshold(
    family: NoiseFamily,
    g: int,
    alpha: float,
    tol_zero: float = DEFAULT_TOL_ZERO,
    tol_param: float = DEFAULT_TOL_PARAM,
    opts: OptimizerOptions = OptimizerOptions(),
) -> ThresholdResult:
    """Renyi variant of find_threshold; flagged heuristic like its maximizer."""
    evaluate, cache = _ic_evaluator(family, g, opts, alpha=alpha)
    threshold, bracket = _bisect_threshold(
        evaluate, cache, family.lo, family.hi, tol_zero, tol_param
    )
    return ThresholdResult(
        threshold=threshold, bracket=bracket, heuristic=True, evaluations=cache
    )
