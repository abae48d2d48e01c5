"""Command line front end.

Each subcommand wraps one library operation and writes a table, CSV by
default or JSON with --format json.  Output starts with comment lines
echoing the tool version and the fully resolved configuration, so a
result file documents how to regenerate itself; rerunning the same
command reproduces the output byte for byte except for the timestamp
line.  Every data row carries the seed that regenerates it.

Exit codes: 0 success; 2 bad arguments or invalid input; 3 requests the
build refuses (register sizes past the dense cap, memory guard without
--force); 4 searches or iterations that failed to converge.

The module deliberately imports numpy and the rest of the library
lazily: the TROTTERKIT_THREADS environment variable has to land in the
BLAS pool variables before numpy first loads.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from datetime import datetime, timezone

THREAD_ENV = "TROTTERKIT_THREADS"

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_CAPABILITY = 3
EXIT_CONVERGENCE = 4

DEFAULT_MEM_GB = 4.0

MODEL_TOKENS = ("heisenberg1d", "power_law", "k_local")
SEARCH_CRITERIA = ("empirical", "empirical_worst", "triangle", "tp",
                   "counting", "interference", "worst")

# Growth exponent used to seed one size's empirical search from the
# previous size's answer.  A slight overshoot is cheaper than an
# undershoot, so this sits above the observed scaling of either formula
# order.
R_EXTRAPOLATION_POWER = 2.2


def _apply_thread_override() -> str | None:
    """Copy TROTTERKIT_THREADS into the BLAS pool variables.

    Returns an error message when the value is unusable, None otherwise.
    """
    value = os.environ.get(THREAD_ENV)
    if value is None or value == "":
        return None
    if not value.isdigit() or int(value) < 1:
        return f"{THREAD_ENV} must be a positive integer, got {value!r}"
    for name in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS",
                 "MKL_NUM_THREADS", "NUMEXPR_NUM_THREADS",
                 "VECLIB_MAXIMUM_THREADS"):
        os.environ[name] = value
    return None


# ---------------------------------------------------------------------------
# Argument value parsers (argparse type= callables)
# ---------------------------------------------------------------------------


def _int_list(spec: str) -> list[int]:
    """Parse "6", "4,6,8", "4..12", or comma mixes of those."""
    out: list[int] = []
    try:
        for part in spec.split(","):
            part = part.strip()
            if not part:
                continue
            if ".." in part:
                lo_s, hi_s = part.split("..", 1)
                lo, hi = int(lo_s), int(hi_s)
                if hi < lo:
                    raise argparse.ArgumentTypeError(
                        f"descending range {part!r}")
                out.extend(range(lo, hi + 1))
            else:
                out.append(int(part))
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"expected integers, ranges like 4..12, or comma lists; got {spec!r}"
        ) from None
    if not out:
        raise argparse.ArgumentTypeError(f"empty integer list {spec!r}")
    return out


def _float_list(spec: str) -> list[float]:
    try:
        values = [float(part) for part in spec.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"expected floats or a comma list, got {spec!r}") from None
    if not values:
        raise argparse.ArgumentTypeError(f"empty float list {spec!r}")
    return values


def _positive_int(spec: str) -> int:
    try:
        value = int(spec)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {spec!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {spec!r}")
    return value


def _criteria_list(spec: str) -> list[str]:
    names = [part.strip() for part in spec.split(",") if part.strip()]
    for name in names:
        if name not in SEARCH_CRITERIA:
            raise argparse.ArgumentTypeError(
                f"unknown criterion {name!r}; expected from {','.join(SEARCH_CRITERIA)}")
    if not names:
        raise argparse.ArgumentTypeError("empty criteria list")
    return names


def _resolve_t(spec: str, n: int) -> list[float]:
    """Turn a --t spec into concrete times for register size n.

    "n" means t = n.  "geom:lo:hi:k" is a k-point geometric grid.  Any
    other value is a float or comma list of floats.
    """
    spec = spec.strip()
    if spec == "n":
        return [float(n)]
    if spec.startswith("geom:"):
        parts = spec.split(":")
        if len(parts) != 4:
            raise _usage_error(f"bad grid spec {spec!r}; expected geom:LO:HI:COUNT")
        try:
            lo, hi, count = float(parts[1]), float(parts[2]), int(parts[3])
        except ValueError:
            raise _usage_error(f"bad grid spec {spec!r}") from None
        if lo <= 0 or hi < lo or count < 2:
            raise _usage_error(f"bad grid spec {spec!r}; need 0 < LO <= HI, COUNT >= 2")
        ratio = (hi / lo) ** (1.0 / (count - 1))
        return [lo * ratio**i for i in range(count)]
    try:
        return [float(part) for part in spec.split(",") if part.strip()]
    except ValueError:
        raise _usage_error(f"bad time value {spec!r}") from None


def _usage_error(message: str):
    from trotterkit.errors import ArgumentError

    return ArgumentError(message)


# ---------------------------------------------------------------------------
# Shared plumbing
# ---------------------------------------------------------------------------


def _build_instance(model: str, n: int, seed: int, alpha: float | None,
                    k: int, terms: int):
    from trotterkit import models

    if model == "heisenberg1d":
        return models.build_heisenberg_1d(n, seed=seed)
    if model == "power_law":
        if alpha is None:
            raise _usage_error("model power_law needs --alpha")
        return models.build_power_law(n, alpha=alpha, seed=seed)
    if model == "k_local":
        return models.build_k_local_random(n, k, terms_per_support=terms, seed=seed)
    raise _usage_error(f"unknown model {model!r}; expected from {','.join(MODEL_TOKENS)}")


def _memory_guard(n: int, samples: int, args) -> None:
    """Refuse dense work whose footprint exceeds the configured budget."""
    from trotterkit.errors import CapabilityError
    from trotterkit.pauli import DENSE_QUBIT_CAP

    dim = 1 << n
    dense = dim * dim * 16 if n <= DENSE_QUBIT_CAP else 0
    batch = 3 * dim * max(samples, 1) * 16
    need = dense + batch
    cap = args.mem_gb * 2**30
    if need > cap and not args.force:
        raise CapabilityError(
            f"estimated {need / 2**30:.2f} GiB for n={n} exceeds the "
            f"{args.mem_gb:.2f} GiB guard; pass --force or raise --mem-gb")


def _exact_applier(inst, t: float):
    from trotterkit.evolution import ExactEvolver

    evolver = ExactEvolver(inst)
    return lambda states: evolver.evolve(states, t)


def _formula_applier(inst, t: float, r: int, p: int):
    from trotterkit.formulas import SegmentApplier, make_plan

    return SegmentApplier(make_plan(inst, t, r, p))


def _extrapolate_r_start(chain: dict, key: tuple, n: int) -> int:
    """Seed a search from the previous register size's result."""
    prev = chain.get(key)
    if prev is None:
        return 1
    n_prev, r_prev = prev
    return max(1, int(r_prev * (n / n_prev) ** R_EXTRAPOLATION_POWER))


def _search_one(criterion: str, inst, p: int, t: float, eps: float,
                kind: str, samples: int, seed: int, r_start: int):
    from trotterkit import search

    if criterion == "empirical":
        return search.search_r_empirical(inst, p, t, eps, kind=kind,
                                         samples=samples, seed=seed,
                                         r_start=r_start)
    if criterion == "empirical_worst":
        return search.search_r_worst(inst, p, t, eps, r_start=r_start)
    return search.search_r_from_bound(criterion, inst, p, t, eps)


def _search_rows(args, model: str, alphas: list[float | None],
                 ns: list[int], ps: list[int],
                 criteria_for: dict[int, list[str]],
                 with_alpha_column: bool) -> tuple[list[str], list[list]]:
    """Minimum-r sweep shared by trotter-search and the figure protocols.

    Emits one row per (alpha, size, order, instance, criterion).  The
    empirical searches for consecutive sizes of the same configuration
    seed each other, which cuts the bracketing cost roughly in half.
    """
    columns = ["model"]
    if with_alpha_column:
        columns.append("alpha")
    columns += ["n", "p", "t", "eps", "criterion", "instance", "inst_seed",
                "r_min", "error_at_r_min", "samples", "seed"]

    rows: list[list] = []
    for alpha in alphas:
        chain: dict = {}
        for n in sorted(ns):
            _memory_guard(n, args.samples, args)
            times = _resolve_t(args.t, n)
            if len(times) != 1:
                raise _usage_error(
                    f"searches take a single --t per size, got {args.t!r}")
            t = times[0]
            # Instance outside order: both formula orders then share the
            # instance's cached reference diagonalization.
            for instance in range(args.instances):
                inst_seed = args.seed + instance
                inst = _build_instance(model, n, inst_seed, alpha,
                                       getattr(args, "k", 2),
                                       getattr(args, "terms", 1))
                for p in ps:
                    for criterion in criteria_for[p]:
                        key = (alpha, p, criterion, instance)
                        r_start = 1
                        if criterion in ("empirical", "empirical_worst"):
                            r_start = _extrapolate_r_start(chain, key, n)
                        res = _search_one(criterion, inst, p, t, args.eps,
                                          args.kind, args.samples, args.seed,
                                          r_start)
                        if criterion in ("empirical", "empirical_worst"):
                            chain[key] = (n, res.r_min)
                        row = [model]
                        if with_alpha_column:
                            row.append(alpha)
                        row += [n, p, t, args.eps, criterion, instance,
                                inst_seed, res.r_min, res.error_at_r_min,
                                res.samples, args.seed]
                        rows.append(row)
                        if args.progress:
                            print(f"done n={n} p={p} instance={instance} "
                                  f"{criterion}: r_min={res.r_min}",
                                  file=sys.stderr, flush=True)
    return columns, rows


# ---------------------------------------------------------------------------
# Subcommand runners.  Each returns (columns, rows).
# ---------------------------------------------------------------------------


def _cmd_hamiltonian(args):
    from trotterkit.pauli import PauliString

    inst = _build_instance(args.model, args.n, args.seed, args.alpha,
                           args.k, args.terms)
    rows = []
    for label, op in inst.groups:
        for (x, z), coeff in sorted(op.terms.items()):
            rows.append([args.model, args.n, label,
                         PauliString(op.n, x, z).label, float(coeff.real),
                         args.seed])
    return ["model", "n", "group", "string", "coeff", "seed"], rows


def _applicable_bounds(model: str, p: int, t: float) -> list[str]:
    names = ["triangle", "tp"]
    if model == "heisenberg1d" and p in (1, 2):
        names.append("counting")
    if model == "power_law" and p == 1:
        names.append("counting")
    if model == "heisenberg1d" and p == 1 and t > 0:
        names.append("interference")
    names.append("worst")
    return names


def _bound_report(name: str, inst, p: int, t: float, r: int):
    from trotterkit import bounds

    if name == "triangle":
        if p == 1:
            return bounds.triangle_bound_pf1(inst, t, r)
        if p == 2:
            return bounds.triangle_bound_pf2(inst, t, r)
        return bounds.tp_bound(inst, p, t, r)
    if name == "tp":
        return bounds.tp_bound(inst, p, t, r)
    if name == "counting":
        if inst.model == "power_law":
            if p != 1:
                raise _usage_error("power-law counting bound is first order only")
            return bounds.counting_bound_power_law(inst.n, inst.params["alpha"], t, r)
        if inst.model == "heisenberg_1d":
            return bounds.counting_bound_nn(inst.n, t, r, p=p)
        raise _usage_error(f"no counting bound for model {inst.model!r}")
    if name == "interference":
        if p != 1:
            raise _usage_error("interference bound applies to the first-order formula")
        return bounds.interference_bound(inst, t, r)
    if name == "worst":
        method = "dense" if inst.n <= 8 else "power"
        return bounds.worst_case_bound(inst, p, t, r, norm_method=method)
    raise _usage_error(f"unknown bound {name!r}")


def _cmd_bounds(args):
    _memory_guard(args.n, 0, args)
    inst = _build_instance(args.model, args.n, args.seed, args.alpha,
                           args.k, args.terms)
    names = (args.bounds.split(",") if args.bounds
             else _applicable_bounds(args.model, args.p, args.t))
    rows = []
    for name in names:
        report = _bound_report(name.strip(), inst, args.p, args.t, args.r)
        rows.append([args.model, args.n, args.p, args.t, args.r, name.strip(),
                     report.value, report.assumptions_ok, args.seed])
    return (["model", "n", "p", "t", "r", "bound", "value",
             "assumptions_ok", "seed"], rows)


def _cmd_empirical(args):
    from trotterkit import ensembles

    _memory_guard(args.n, args.samples, args)
    inst = _build_instance(args.model, args.n, args.seed, args.alpha,
                           args.k, args.terms)
    rows = []
    for t in _resolve_t(args.t, args.n):
        applier = _formula_applier(inst, t, args.r, args.p)
        stats = ensembles.empirical_error(applier, _exact_applier(inst, t),
                                          args.n, kind=args.kind,
                                          samples=args.samples, seed=args.seed)
        rows.append([args.model, args.n, args.p, t, args.r, args.kind,
                     stats.samples, stats.mean_sqrtS, stats.std_sqrtS,
                     stats.mean_S, stats.var_S, args.seed])
    return (["model", "n", "p", "t", "r", "kind", "samples", "mean_sqrt_s",
             "std_sqrt_s", "mean_s", "var_s", "seed"], rows)


def _cmd_trotter_search(args):
    criteria_for = {p: args.criteria for p in args.p}
    with_alpha = args.model == "power_law"
    alphas: list[float | None] = [args.alpha] if with_alpha else [None]
    if with_alpha and args.alpha is None:
        raise _usage_error("model power_law needs --alpha")
    return _search_rows(args, args.model, alphas, args.n, args.p,
                        criteria_for, with_alpha)


def _cmd_figure1(args):
    criteria_for = {
        1: ["empirical", "triangle", "counting", "interference", "worst"],
        2: ["empirical", "triangle", "counting", "worst"],
    }
    for p in args.p:
        if p not in criteria_for:
            criteria_for[p] = ["empirical", "triangle", "worst"]
    return _search_rows(args, "heisenberg1d", [None], args.n, args.p,
                        criteria_for, with_alpha_column=False)


def _cmd_figure2(args):
    criteria_for = {
        1: ["empirical", "triangle", "counting", "worst"],
        2: ["empirical", "triangle", "worst"],
    }
    for p in args.p:
        if p not in criteria_for:
            criteria_for[p] = ["empirical", "triangle", "worst"]
    return _search_rows(args, "power_law", list(args.alpha), args.n, args.p,
                        criteria_for, with_alpha_column=True)


def _cmd_error_vs_t(args):
    from trotterkit import ensembles

    _memory_guard(args.n, args.samples, args)
    inst = _build_instance(args.model, args.n, args.seed, args.alpha,
                           args.k, args.terms)
    rows = []
    for t in _resolve_t(args.t, args.n):
        applier = _formula_applier(inst, t, args.r, args.p)
        stats = ensembles.empirical_error(applier, _exact_applier(inst, t),
                                          args.n, kind=args.kind,
                                          samples=args.samples, seed=args.seed)
        rows.append([args.model, args.n, args.p, args.r, t, stats.mean_sqrtS,
                     stats.std_sqrtS, stats.samples, args.seed])
    return (["model", "n", "p", "r", "t", "mean_sqrt_s", "std_sqrt_s",
             "samples", "seed"], rows)


def _cmd_otoc(args):
    from trotterkit import otoc

    _memory_guard(args.n, args.samples or 0, args)
    inst = _build_instance(args.model, args.n, args.seed, args.alpha,
                           args.k, args.terms)
    columns = ["model", "n", "t", "p", "r", "mode", "value", "gap",
               "bound_avg", "bound_worst", "radius", "samples", "seed"]
    rows = []
    for t in _resolve_t(args.t, args.n):
        exact_cfg = otoc.OtocConfig(inst, t)
        exact = otoc.otoc_exact(exact_cfg)
        rows.append([args.model, args.n, t, None, None, "exact", exact,
                     None, None, None, None, None, args.seed])
        if args.p is not None or args.r is not None:
            if args.p is None or args.r is None:
                raise _usage_error("--p and --r must be given together")
            cfg = otoc.OtocConfig(inst, t, p=args.p, r=args.r)
            value = otoc.otoc_trotterized(cfg)
            limits = otoc.otoc_error_bound(cfg)
            rows.append([args.model, args.n, t, args.p, args.r, "trotter",
                         value, abs(value - exact), limits.avg, limits.worst,
                         None, None, args.seed])
        if args.samples:
            cfg = (otoc.OtocConfig(inst, t, p=args.p, r=args.r)
                   if args.p is not None else exact_cfg)
            estimate, radius = otoc.otoc_sampled(cfg, args.samples,
                                                 seed=args.seed,
                                                 delta=args.delta)
            rows.append([args.model, args.n, t, args.p, args.r, "sampled",
                         estimate, None, None, None, radius, args.samples,
                         args.seed])
    return columns, rows


def _cmd_haar_d(args):
    from trotterkit import haarmean

    rows = []
    for d in args.d:
        lams = haarmean.build_scenario(args.scenario, d, lam=args.lam,
                                       seed=args.seed)
        stat = haarmean.d_statistic(lams, trials=args.trials, seed=args.seed)
        rows.append([args.scenario, d, stat.value, stat.method, stat.samples,
                     stat.std_err, stat.cauchy, stat.mean_sqrt, args.seed])
    return (["scenario", "d", "d_value", "method", "samples", "std_err",
             "cauchy", "mean_sqrt", "seed"], rows)


def _cmd_sd_scaling(args):
    from trotterkit import ensembles, search

    rows = []
    chain: dict = {}
    for n in sorted(args.n):
        _memory_guard(n, args.samples, args)
        inst = _build_instance(args.model, n, args.seed, args.alpha,
                               args.k, args.terms)
        times = _resolve_t(args.t, n)
        if len(times) != 1:
            raise _usage_error(
                f"sd-scaling takes a single --t per size, got {args.t!r}")
        t = times[0]
        r_start = _extrapolate_r_start(chain, ("sd", args.p), n)
        res = search.search_r_empirical(inst, args.p, t, args.eps,
                                        kind=args.kind, samples=args.samples,
                                        seed=args.seed, r_start=r_start)
        chain[("sd", args.p)] = (n, res.r_min)
        applier = _formula_applier(inst, t, res.r_min, args.p)
        stats = ensembles.empirical_error(applier, _exact_applier(inst, t), n,
                                          kind=args.kind, samples=args.samples,
                                          seed=args.seed)
        rows.append([args.model, n, args.p, t, args.eps, res.r_min,
                     stats.mean_sqrtS, stats.std_sqrtS, stats.samples,
                     args.seed])
        if args.progress:
            print(f"done n={n}: r_emp={res.r_min}", file=sys.stderr,
                  flush=True)
    return (["model", "n", "p", "t", "eps", "r_emp", "mean_sqrt_s",
             "sd_sqrt_s", "samples", "seed"], rows)


_RUNNERS = {
    "hamiltonian": _cmd_hamiltonian,
    "bounds": _cmd_bounds,
    "empirical": _cmd_empirical,
    "trotter-search": _cmd_trotter_search,
    "figure1": _cmd_figure1,
    "figure2": _cmd_figure2,
    "error-vs-t": _cmd_error_vs_t,
    "otoc": _cmd_otoc,
    "haar-d": _cmd_haar_d,
    "sd-scaling": _cmd_sd_scaling,
}


# ---------------------------------------------------------------------------
# Parser construction
# ---------------------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", default="-",
                        help="output path; - writes to stdout (default)")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--config", default=None,
                        help="file of KEY = VALUE defaults, overridden by flags")
    common.add_argument("--force", action="store_true",
                        help="run even when the memory guard objects")
    common.add_argument("--progress", action="store_true",
                        help="print one stderr line per finished work item")
    common.add_argument("--mem-gb", type=float, default=DEFAULT_MEM_GB,
                        help=f"memory guard budget in GiB (default {DEFAULT_MEM_GB})")
    # Parent actions are shared between subparsers, so the figure commands
    # resolve their different default seed after parsing, not here.
    common.add_argument("--seed", type=int, default=None)

    model = argparse.ArgumentParser(add_help=False)
    model.add_argument("--model", choices=MODEL_TOKENS, default="heisenberg1d")
    model.add_argument("--alpha", type=float, default=None,
                       help="power-law decay exponent (power_law model)")
    model.add_argument("--k", type=_positive_int, default=2,
                       help="locality for the k_local model")
    model.add_argument("--terms", type=_positive_int, default=1,
                       help="terms per support for the k_local model")

    parser = argparse.ArgumentParser(
        prog="trotterkit",
        description="Average-case Trotter error: empirical sampling, analytic "
                    "bounds, and minimum-segment searches.")
    sub = parser.add_subparsers(dest="command", required=True)

    ham = sub.add_parser("hamiltonian", parents=[common, model],
                         help="dump one Hamiltonian instance, term by term")
    ham.add_argument("--n", type=int, required=True)

    bnd = sub.add_parser("bounds", parents=[common, model],
                         help="evaluate analytic error bounds at fixed t, r")
    bnd.add_argument("--n", type=int, required=True)
    bnd.add_argument("--p", type=int, default=1)
    bnd.add_argument("--t", type=float, required=True)
    bnd.add_argument("--r", type=_positive_int, required=True)
    bnd.add_argument("--bounds", default=None,
                     help="comma list; default is every bound that applies")

    emp = sub.add_parser("empirical", parents=[common, model],
                         help="sample the error over random input states")
    emp.add_argument("--n", type=int, required=True)
    emp.add_argument("--p", type=int, default=1)
    emp.add_argument("--t", default="1", help="float, comma list, or n")
    emp.add_argument("--r", type=_positive_int, required=True)
    emp.add_argument("--samples", type=_positive_int, default=20)
    emp.add_argument("--kind", default="haar",
                     choices=("haar", "local_haar", "computational_basis"))

    srch = sub.add_parser("trotter-search", parents=[common, model],
                          help="minimum segment count per criterion")
    srch.add_argument("--n", type=_int_list, required=True,
                      help="sizes: 6, 4,6,8, or 4..12")
    srch.add_argument("--p", type=_int_list, default=[1])
    srch.add_argument("--t", default="n", help="float or the token n")
    srch.add_argument("--eps", type=float, required=True)
    srch.add_argument("--instances", type=_positive_int, default=1)
    srch.add_argument("--samples", type=_positive_int, default=20)
    srch.add_argument("--criteria", type=_criteria_list,
                      default=["empirical"],
                      help=f"comma list from {','.join(SEARCH_CRITERIA)}")
    srch.add_argument("--kind", default="haar",
                      choices=("haar", "local_haar", "computational_basis"))

    fig1 = sub.add_parser("figure1", parents=[common],
                          help="canned nearest-neighbour chain search sweep")
    fig1.add_argument("--n", type=_int_list, default=list(range(4, 13)))
    fig1.add_argument("--p", type=_int_list, default=[1, 2])
    fig1.add_argument("--t", default="n")
    fig1.add_argument("--eps", type=float, default=1e-3)
    fig1.add_argument("--instances", type=_positive_int, default=5)
    fig1.add_argument("--samples", type=_positive_int, default=20)
    fig1.add_argument("--kind", default="haar",
                      choices=("haar", "local_haar", "computational_basis"))

    fig2 = sub.add_parser("figure2", parents=[common],
                          help="canned power-law interaction search sweep")
    fig2.add_argument("--n", type=_int_list, default=list(range(4, 11)))
    fig2.add_argument("--p", type=_int_list, default=[1, 2])
    fig2.add_argument("--alpha", type=_float_list, default=[0.0, 4.0])
    fig2.add_argument("--t", default="n")
    fig2.add_argument("--eps", type=float, default=1e-3)
    fig2.add_argument("--instances", type=_positive_int, default=5)
    fig2.add_argument("--samples", type=_positive_int, default=20)
    fig2.add_argument("--kind", default="haar",
                      choices=("haar", "local_haar", "computational_basis"))

    evt = sub.add_parser("error-vs-t", parents=[common, model],
                         help="error growth against evolution time at fixed r")
    evt.add_argument("--n", type=int, default=6)
    evt.add_argument("--p", type=int, default=1)
    evt.add_argument("--r", type=_positive_int, default=10000)
    evt.add_argument("--t", default="geom:1:1000:25",
                     help="comma list or geom:LO:HI:COUNT")
    evt.add_argument("--samples", type=_positive_int, default=20)
    evt.add_argument("--kind", default="haar",
                     choices=("haar", "local_haar", "computational_basis"))

    oto = sub.add_parser("otoc", parents=[common, model],
                         help="out-of-time-order correlator, exact and trotterized")
    oto.add_argument("--n", type=int, required=True)
    oto.add_argument("--t", default="1", help="float, comma list, or n")
    oto.add_argument("--p", type=int, default=None)
    oto.add_argument("--r", type=_positive_int, default=None)
    oto.add_argument("--samples", type=_positive_int, default=None,
                     help="basis-state sample count for the estimator")
    oto.add_argument("--delta", type=float, default=0.01,
                     help="confidence level for the sampling radius")

    hd = sub.add_parser("haar-d", parents=[common],
                        help="gap between the Cauchy-Schwarz bound and the Haar mean")
    hd.add_argument("--scenario", required=True,
                    choices=("one_nonzero", "equally_spaced", "degenerate",
                             "exponential_random"))
    hd.add_argument("--d", type=_int_list, required=True,
                    help="dimensions: 16, 2,4,8, or 2..64")
    hd.add_argument("--lam", type=float, default=1.0)
    hd.add_argument("--trials", type=_positive_int, default=1000)

    sd = sub.add_parser("sd-scaling", parents=[common, model],
                        help="input-to-input spread of the error at the empirical r")
    sd.add_argument("--n", type=_int_list, default=list(range(4, 11)))
    sd.add_argument("--p", type=int, default=1)
    sd.add_argument("--t", default="n")
    sd.add_argument("--eps", type=float, default=1e-3)
    sd.add_argument("--samples", type=_positive_int, default=20)
    sd.add_argument("--kind", default="haar",
                    choices=("haar", "local_haar", "computational_basis"))

    return parser


# ---------------------------------------------------------------------------
# Config files and output
# ---------------------------------------------------------------------------


def _read_config_pairs(path: str) -> list[tuple[str, str]]:
    """Parse a KEY = VALUE file; # starts a comment, blank lines skip."""
    try:
        text = open(path, encoding="utf-8").read()
    except OSError as exc:
        raise _usage_error(f"cannot read config file {path!r}: {exc}") from None
    pairs = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise _usage_error(f"{path}:{lineno}: expected KEY = VALUE, got {raw!r}")
        key, value = line.split("=", 1)
        key, value = key.strip(), value.strip()
        if not key or not value:
            raise _usage_error(f"{path}:{lineno}: expected KEY = VALUE, got {raw!r}")
        pairs.append((key, value))
    return pairs


def _extract_config_path(argv: list[str]) -> str | None:
    """Find --config before parsing, so it can supply required options."""
    for i, token in enumerate(argv):
        if token == "--config" and i + 1 < len(argv):
            return argv[i + 1]
        if token.startswith("--config="):
            return token.split("=", 1)[1]
    return None


def _splice_config(argv: list[str], path: str) -> list[str]:
    """Insert config pairs as options right after the subcommand token.

    Explicit command line flags come later in the argv, so they win.
    """
    extra: list[str] = []
    for key, value in _read_config_pairs(path):
        flag = "--" + key.replace("_", "-")
        if value.lower() in ("true", "false"):
            if value.lower() == "true":
                extra.append(flag)
        else:
            extra.extend([flag, value])
    return [argv[0]] + extra + argv[1:]


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _config_items(args) -> list[tuple[str, str]]:
    skip = {"command", "out", "format", "config"}
    items = []
    for key, value in sorted(vars(args).items()):
        if key in skip:
            continue
        if isinstance(value, list):
            rendered = ",".join(_cell(v) for v in value)
        else:
            rendered = _cell(value)
        items.append((key, rendered))
    return items


def _emit(args, columns: list[str], rows: list[list]) -> None:
    from trotterkit import __version__

    stamp = datetime.now(timezone.utc).isoformat(timespec="seconds")
    config = _config_items(args)
    if args.format == "csv":
        lines = [f"# tool: trotterkit {__version__}",
                 f"# command: {args.command}",
                 "# config: " + " ".join(f"{k}={v}" for k, v in config),
                 f"# generated: {stamp}",
                 ",".join(columns)]
        lines.extend(",".join(_cell(v) for v in row) for row in rows)
        text = "\n".join(lines) + "\n"
    else:
        payload = {
            "tool": "trotterkit",
            "version": __version__,
            "command": args.command,
            "config": {k: v for k, v in config},
            "generated": stamp,
            "columns": columns,
            "rows": [dict(zip(columns, row)) for row in rows],
        }
        text = json.dumps(payload, indent=2) + "\n"
    if args.out == "-":
        sys.stdout.write(text)
    else:
        with open(args.out, "w", encoding="utf-8") as handle:
            handle.write(text)


# ---------------------------------------------------------------------------
# Entry point
# ---------------------------------------------------------------------------


def main(argv: list[str] | None = None) -> int:
    thread_problem = _apply_thread_override()
    if thread_problem:
        print(f"error: {thread_problem}", file=sys.stderr)
        return EXIT_USAGE
    if argv is None:
        argv = sys.argv[1:]

    parser = _build_parser()
    from trotterkit.errors import (ArgumentError, CapabilityError,
                                   ConvergenceError, DimensionError,
                                   ValidationError)

    try:
        config_path = _extract_config_path(argv)
        if config_path and argv and not argv[0].startswith("-"):
            argv = _splice_config(argv, config_path)
        try:
            args = parser.parse_args(argv)
        except SystemExit as exc:
            # argparse already printed usage or help
            return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
        if args.seed is None:
            args.seed = 7 if args.command in ("figure1", "figure2") else 0
        columns, rows = _RUNNERS[args.command](args)
        _emit(args, columns, rows)
    except (ArgumentError, ValidationError, DimensionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CapabilityError as exc:
        print(f"refused: {exc}", file=sys.stderr)
        return EXIT_CAPABILITY
    except ConvergenceError as exc:
        print(f"did not converge: {exc}", file=sys.stderr)
        return EXIT_CONVERGENCE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
