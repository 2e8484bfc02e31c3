"""Command-line front-end.

Subcommands: coherent-info, renyi-info, bound, threshold, sweep,
compare-capacity. Every run emits a JSON document (or CSV for sweeps)
with an echo of the effective inputs and a provenance block; all
randomness hangs off a single --seed so identical invocations produce
identical output apart from the provenance timestamp.

Exit codes: 0 success, 2 validation error (bad flag, range, file),
3 numerical or I/O error during the computation.

Sweep and capacity reports written to a file also render a matplotlib
figure next to the delimited output (suppress with --no-plot, relocate
with --plot PATH).
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from .bounds import (
    FORMULAS,
    BoundParams,
    appendixd_bound,
    appendixd_dmax,
    capacity_comparison,
    corollary1_overhead,
    is_vacuous,
    lemma1_rhs,
    oneshot_converse,
    p1_optimum,
    p3_optimum,
    prop1_bound,
    prop2_bound,
    thm1_bound,
)
from .channels import QuantumChannel, family, load_channel, tensor_power
from .coherent import OptimizerOptions, maximize_coherent_information
from .errors import NumericalError, ValidationError
from .renyi import maximize_renyi_coherent_information
from .sweep import (
    DEFAULT_TOL_PARAM,
    DEFAULT_TOL_ZERO,
    find_renyi_threshold,
    find_threshold,
    sweep_family,
)

OBJECTIVE_FORMULAS = {
    "coherent-info": "max_rho [ S(N(rho)) - S(N^c(rho)) ]",
    "renyi-info": "max_rho min_sigma D_alpha(omega_RB || I_R (x) sigma_B)",
    "threshold": "boundary of { p : Ic(N(p)^(x)g) > tol_zero }",
}


def _add_channel_args(parser, with_g=True):
    parser.add_argument("--family", choices=["depolarizing", "dephasing", "amplitude-damping"])
    parser.add_argument("--param", type=float, help="noise parameter for --family")
    parser.add_argument("--channel-file", help="JSON channel-spec file")
    if with_g:
        parser.add_argument("--g", type=int, default=1, help="tensor power (gate size)")


def _add_optimizer_args(parser):
    parser.add_argument("--restarts", type=int, default=16)
    parser.add_argument("--max-iters", type=int, default=2000)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--grad-tol", type=float, default=1e-7)
    parser.add_argument("--step-init", type=float, default=0.1)
    parser.add_argument("--threads", type=int, default=None,
                        help="worker cap (falls back to FTQ_THREADS, then 1)")


def _add_output_args(parser, formats=("json",)):
    parser.add_argument("-o", "--output", help="write the document here instead of stdout")
    if len(formats) > 1:
        parser.add_argument("--format", choices=list(formats), default=formats[0])


def _add_plot_args(parser):
    parser.add_argument("--plot", help="render a figure to this path")
    parser.add_argument("--no-plot", action="store_true",
                        help="skip the figure that normally lands next to a file output")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ftq",
        description="Coherent information of tensor-power channels and "
        "fault-tolerance overhead/threshold bounds.",
    )
    parser.add_argument("--version", action="version", version=f"ftq {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("coherent-info", help="maximize I_c over input states")
    _add_channel_args(p)
    _add_optimizer_args(p)
    _add_output_args(p)

    p = sub.add_parser("renyi-info", help="maximize the alpha-Renyi coherent information")
    _add_channel_args(p)
    p.add_argument("--alpha", type=float, required=True)
    _add_optimizer_args(p)
    _add_output_args(p)

    p = sub.add_parser("bound", help="evaluate a closed-form bound")
    p.add_argument(
        "which",
        choices=["oneshot", "lemma1", "p1", "p3", "thm1", "prop1",
                 "corollary1", "prop2", "appendixd", "appendixd-dmax"],
    )
    p.add_argument("--d", type=int)
    p.add_argument("--g", type=int)
    p.add_argument("--G", type=int, dest="big_g")
    p.add_argument("--eps", type=float)
    p.add_argument("--L", type=float, dest="lipschitz")
    p.add_argument("--ic", type=float, help="coherent information of the g-fold channel")
    p.add_argument("--ic-alpha", type=float, help="alpha-Renyi coherent information")
    p.add_argument("--alpha", type=float)
    p.add_argument("--eps-i", type=float, help="single per-gate accuracy (oneshot)")
    p.add_argument("--eps-list", help="comma-separated allocation for lemma1")
    p.add_argument("--constraint", choices=["half", "full"], default="half")
    _add_output_args(p)

    p = sub.add_parser("threshold", help="noise strength where Ic reaches zero")
    p.add_argument("--family", required=True,
                   choices=["depolarizing", "dephasing", "amplitude-damping"])
    p.add_argument("--g", type=int, default=1)
    p.add_argument("--alpha", type=float, help="use the Renyi variant (heuristic)")
    p.add_argument("--tol-zero", type=float, default=DEFAULT_TOL_ZERO)
    p.add_argument("--tol-param", type=float, default=DEFAULT_TOL_PARAM)
    _add_optimizer_args(p)
    _add_output_args(p)

    p = sub.add_parser("sweep", help="Ic and the prop1 bound over a parameter grid")
    p.add_argument("--family", required=True,
                   choices=["depolarizing", "dephasing", "amplitude-damping"])
    p.add_argument("--g", type=int, default=1)
    p.add_argument("--grid", required=True, help="lo:hi:steps (inclusive endpoints)")
    p.add_argument("--d", type=int, required=True, help="logical qubits for the bound")
    _add_optimizer_args(p)
    _add_output_args(p, formats=("json", "csv"))
    _add_plot_args(p)

    p = sub.add_parser("compare-capacity", help="k / Ic(N^(x)k) table for k = 1..k_max")
    _add_channel_args(p, with_g=False)
    p.add_argument("--k-max", type=int, default=2)
    _add_optimizer_args(p)
    _add_output_args(p)
    _add_plot_args(p)

    return parser


def _resolve_threads(args) -> int:
    if getattr(args, "threads", None) is not None:
        threads = args.threads
    else:
        env = os.environ.get("FTQ_THREADS", "").strip()
        try:
            threads = int(env) if env else 1
        except ValueError:
            raise ValidationError(f"FTQ_THREADS={env!r} is not an integer")
    if threads < 1:
        raise ValidationError(f"--threads must be >= 1, got {threads}")
    return threads


def _optimizer_options(args) -> OptimizerOptions:
    return OptimizerOptions(
        restarts=args.restarts,
        max_iters=args.max_iters,
        step_init=args.step_init,
        grad_tol=args.grad_tol,
        seed=args.seed,
        threads=_resolve_threads(args),
    )


def _channel_from_args(args) -> tuple[QuantumChannel, dict]:
    has_family = args.family is not None
    has_file = args.channel_file is not None
    if has_family == has_file:
        raise ValidationError("exactly one channel source required: --family or --channel-file")
    if has_family:
        if args.param is None:
            raise ValidationError("--param is required with --family")
        fam = family(args.family)
        base = fam.instantiate(args.param)
        inputs = {"family": fam.family_id, "param": args.param}
    else:
        base = load_channel(args.channel_file)
        inputs = {"channel_file": str(args.channel_file)}
    g = getattr(args, "g", 1)
    if g < 1:
        raise ValidationError(f"--g must be >= 1, got {g}")
    inputs["g"] = g
    return tensor_power(base, g), inputs


def _optimizer_echo(opts: OptimizerOptions) -> dict:
    return {
        "restarts": opts.restarts,
        "max_iters": opts.max_iters,
        "seed": opts.seed,
        "grad_tol": opts.grad_tol,
        "step_init": opts.step_init,
        "threads": opts.threads,
    }


def _finite(x):
    return float(x) if x is not None and math.isfinite(x) else None


def _state_payload(rho: np.ndarray):
    return [[[float(z.real), float(z.imag)] for z in row] for row in rho]


def _document(command, inputs, result, *, seed=None, restarts=None,
              converged=None, formulas=(), heuristic=None):
    provenance = {
        "seed": seed,
        "restarts": restarts,
        "converged": list(converged) if converged is not None else [],
        "formulas": list(formulas),
        "timestamp": datetime.now(timezone.utc).isoformat(),
    }
    if heuristic is not None:
        provenance["heuristic"] = heuristic
    return {
        "tool": "ftq",
        "version": __version__,
        "command": command,
        "inputs": inputs,
        "result": result,
        "provenance": provenance,
    }


def _cmd_coherent_info(args):
    channel, inputs = _channel_from_args(args)
    opts = _optimizer_options(args)
    inputs.update(_optimizer_echo(opts))
    report = maximize_coherent_information(channel, opts)
    result = {
        "value_bits": report.value,
        "argmax": _state_payload(report.argmax),
        "restart_values": [float(v) for v in report.restart_values],
    }
    return _document(
        "coherent-info", inputs, result,
        seed=opts.seed, restarts=opts.restarts, converged=report.converged,
        formulas=[OBJECTIVE_FORMULAS["coherent-info"]],
    )


def _cmd_renyi_info(args):
    if args.alpha <= 1:
        raise ValidationError(f"--alpha must be > 1, got {args.alpha}")
    channel, inputs = _channel_from_args(args)
    opts = _optimizer_options(args)
    inputs.update(_optimizer_echo(opts))
    inputs["alpha"] = args.alpha
    report = maximize_renyi_coherent_information(channel, args.alpha, opts)
    result = {
        "value_bits": report.value,
        "alpha": args.alpha,
        "restart_values": [float(v) for v in report.restart_values],
    }
    return _document(
        "renyi-info", inputs, result,
        seed=opts.seed, restarts=opts.restarts, converged=report.converged,
        formulas=[OBJECTIVE_FORMULAS["renyi-info"]], heuristic=True,
    )


def _require(args, names):
    missing = [flag for flag, attr in names if getattr(args, attr) is None]
    if missing:
        raise ValidationError(
            f"bound {args.which} requires {', '.join(missing)}"
        )


def _cmd_bound(args):
    which = args.which
    vacuous = None
    if which == "oneshot":
        _require(args, [("--eps-i", "eps_i"), ("--ic", "ic")])
        value = oneshot_converse(args.eps_i, args.ic)
        inputs = {"eps_i": args.eps_i, "ic": args.ic}
    elif which == "lemma1":
        _require(args, [("--eps-list", "eps_list"), ("--ic", "ic"),
                        ("--eps", "eps"), ("--L", "lipschitz")])
        alloc = [float(tok) for tok in args.eps_list.split(",") if tok.strip()]
        value = lemma1_rhs(alloc, args.ic, args.eps, args.lipschitz, args.constraint)
        inputs = {"eps_list": alloc, "ic": args.ic, "eps": args.eps,
                  "L": args.lipschitz, "constraint": args.constraint}
    elif which == "p1":
        _require(args, [("--G", "big_g"), ("--eps", "eps"),
                        ("--L", "lipschitz"), ("--ic", "ic")])
        value = p1_optimum(args.big_g, args.eps, args.lipschitz, args.ic)
        inputs = {"G": args.big_g, "eps": args.eps, "L": args.lipschitz, "ic": args.ic}
    elif which == "p3":
        _require(args, [("--G", "big_g"), ("--eps", "eps"), ("--L", "lipschitz")])
        value = p3_optimum(args.big_g, args.eps, args.lipschitz)
        inputs = {"G": args.big_g, "eps": args.eps, "L": args.lipschitz}
    elif which == "thm1":
        _require(args, [("--d", "d"), ("--g", "g"), ("--G", "big_g"),
                        ("--eps", "eps"), ("--L", "lipschitz"), ("--ic", "ic")])
        params = BoundParams(d=args.d, g=args.g, eps=args.eps,
                             L=args.lipschitz, G=args.big_g)
        value = thm1_bound(params, args.ic)
        vacuous = is_vacuous(value, args.d)
        inputs = {"d": args.d, "g": args.g, "G": args.big_g, "eps": args.eps,
                  "L": args.lipschitz, "ic": args.ic}
    elif which == "prop1":
        _require(args, [("--d", "d"), ("--g", "g"), ("--ic", "ic")])
        value = prop1_bound(args.d, args.g, args.ic)
        vacuous = is_vacuous(value, args.d)
        inputs = {"d": args.d, "g": args.g, "ic": args.ic}
    elif which == "corollary1":
        _require(args, [("--g", "g"), ("--ic", "ic")])
        value = corollary1_overhead(args.g, args.ic)
        inputs = {"g": args.g, "ic": args.ic}
    elif which == "prop2":
        _require(args, [("--d", "d"), ("--g", "g")])
        value = prop2_bound(args.d, args.g)
        inputs = {"d": args.d, "g": args.g}
    elif which == "appendixd":
        _require(args, [("--G", "big_g"), ("--eps", "eps"), ("--L", "lipschitz"),
                        ("--alpha", "alpha"), ("--ic-alpha", "ic_alpha")])
        value = appendixd_bound(args.big_g, args.eps, args.lipschitz,
                                args.alpha, args.ic_alpha)
        inputs = {"G": args.big_g, "eps": args.eps, "L": args.lipschitz,
                  "alpha": args.alpha, "ic_alpha": args.ic_alpha}
    else:  # appendixd-dmax
        _require(args, [("--alpha", "alpha")])
        value = appendixd_dmax(args.alpha)
        inputs = {"alpha": args.alpha}

    formula_key = which.replace("-", "_")
    result = {"which": which, "value": value, "formula": FORMULAS[formula_key]}
    if vacuous is not None:
        result["vacuous"] = vacuous
    return _document("bound", inputs, result, seed=0, formulas=[FORMULAS[formula_key]])


def _cmd_threshold(args):
    fam = family(args.family)
    opts = _optimizer_options(args)
    inputs = {
        "family": fam.family_id,
        "g": args.g,
        "tol_zero": args.tol_zero,
        "tol_param": args.tol_param,
    }
    inputs.update(_optimizer_echo(opts))
    if args.alpha is not None:
        inputs["alpha"] = args.alpha
        found = find_renyi_threshold(fam, args.g, args.alpha,
                                     args.tol_zero, args.tol_param, opts)
    else:
        found = find_threshold(fam, args.g, args.tol_zero, args.tol_param, opts)
    result = {
        "threshold": found.threshold,
        "bracket": [found.bracket[0], found.bracket[1]],
        "heuristic": found.heuristic,
    }
    return _document(
        "threshold", inputs, result,
        seed=opts.seed, restarts=opts.restarts,
        formulas=[OBJECTIVE_FORMULAS["threshold"]],
        heuristic=found.heuristic or None,
    )


def _parse_grid(spec: str):
    parts = spec.split(":")
    if len(parts) != 3:
        raise ValidationError(f"--grid must be lo:hi:steps, got {spec!r}")
    try:
        lo, hi, steps = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise ValidationError(f"--grid must be lo:hi:steps with numeric fields, got {spec!r}")
    if steps < 1:
        raise ValidationError(f"--grid needs at least one point, got steps={steps}")
    if hi < lo:
        raise ValidationError(f"--grid range is empty: lo={lo} > hi={hi}")
    return [float(x) for x in np.linspace(lo, hi, steps)]


def _cmd_sweep(args):
    fam = family(args.family)
    grid = _parse_grid(args.grid)
    opts = _optimizer_options(args)
    inputs = {"family": fam.family_id, "g": args.g, "d": args.d, "grid": args.grid}
    inputs.update(_optimizer_echo(opts))
    result = sweep_family(fam, args.g, grid, args.d, opts)

    _maybe_plot(args, lambda path: _render_sweep(result, path))

    if args.format == "csv":
        return result  # serialized by emit_sweep_csv in main()
    payload = {
        "d": args.d,
        "g": args.g,
        "points": [
            {"param": pt.param, "ic_bits": pt.ic_bits,
             "prop1_bound": _finite(pt.prop1_bound), "vacuous": pt.vacuous}
            for pt in result.points
        ],
    }
    return _document(
        "sweep", inputs, payload,
        seed=opts.seed, restarts=opts.restarts,
        formulas=[OBJECTIVE_FORMULAS["coherent-info"], FORMULAS["prop1"]],
    )


def _render_sweep(result, path):
    from .plotting import render_sweep_figure

    render_sweep_figure(result, path)


def _cmd_compare_capacity(args):
    channel, inputs = _channel_from_args(args)
    if args.k_max < 1:
        raise ValidationError(f"--k-max must be >= 1, got {args.k_max}")
    opts = _optimizer_options(args)
    inputs["k_max"] = args.k_max
    inputs.update(_optimizer_echo(opts))
    comparison = capacity_comparison(channel, args.k_max, opts)

    def render(path):
        from .plotting import render_capacity_figure

        render_capacity_figure(comparison, path, label=channel.label)

    _maybe_plot(args, render)

    result = {
        "rows": [
            {"k": k, "ic_bits": ic, "ratio": _finite(ratio)}
            for k, ic, ratio in comparison.rows
        ],
        "min_ratio": _finite(comparison.min_ratio),
        "min_k": comparison.min_k,
        "note": "min over k <= k_max of reported values; upper estimate of the true infimum",
    }
    return _document(
        "compare-capacity", inputs, result,
        seed=opts.seed, restarts=opts.restarts,
        formulas=["inf_k k / Ic(N^(x)k)"],
    )


def _maybe_plot(args, render):
    if getattr(args, "no_plot", False):
        return
    path = getattr(args, "plot", None)
    if path is None and args.output:
        path = str(Path(args.output).with_suffix(".png"))
    if path is not None:
        render(path)


def emit_sweep_csv(result, destination) -> None:
    """Write a SweepResult as CSV: param,ic_bits,prop1_bound,vacuous.

    Values carry 12 significant digits; row order follows the grid.
    """
    lines = ["param,ic_bits,prop1_bound,vacuous"]
    for pt in result.points:
        lines.append(
            f"{pt.param:.12g},{pt.ic_bits:.12g},{pt.prop1_bound:.12g},"
            f"{'true' if pt.vacuous else 'false'}"
        )
    text = "\n".join(lines) + "\n"
    if hasattr(destination, "write"):
        destination.write(text)
    else:
        with open(destination, "w") as fh:
            fh.write(text)


def _emit(doc, args) -> None:
    if isinstance(doc, dict):
        text = json.dumps(doc, indent=2, sort_keys=True) + "\n"
    else:  # sweep CSV path
        import io

        buf = io.StringIO()
        emit_sweep_csv(doc, buf)
        text = buf.getvalue()
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


_HANDLERS = {
    "coherent-info": _cmd_coherent_info,
    "renyi-info": _cmd_renyi_info,
    "bound": _cmd_bound,
    "threshold": _cmd_threshold,
    "sweep": _cmd_sweep,
    "compare-capacity": _cmd_compare_capacity,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        doc = _HANDLERS[args.command](args)
        _emit(doc, args)
    except ValidationError as exc:
        print(f"ftq: error: {exc}", file=sys.stderr)
        return 2
    except (NumericalError, OSError) as exc:
        print(f"ftq: numerical error: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
