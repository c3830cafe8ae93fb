"""``divgrad`` command line: ``eval``, ``check`` and ``solve``.

Vectors are text files with one number per line (an inline comma list is
accepted too), matrices are CSV rows, reports are JSON with a fixed key order.
Exit codes: 0 success, 1 failed check, 2 configuration error, 3 domain error,
4 solver failure.
"""

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from ._fields import as_field, canonical_summation, total
from .deformed_log import FamilyParams, LogParams, log_d, make_params
from .divergences import DivergenceParams
from .errors import DivgradError, DomainError, LineSearchFailure, NonDescent
from .invariance import factor_ode_residual, nominal_factor, star_factor
from .logdiv import canonical_family, ld_gradient, ld_value, plain_log
from .solver import ALGORITHMS, ArmijoOptions, DivergenceSpec, LinearModel, SolverOptions, sgm_solve
from .verify import FDSpec, fd_gradient, limit_gap, relative_error

EXIT_CHECK, EXIT_CONFIG, EXIT_DOMAIN, EXIT_SOLVER = 1, 2, 3, 4
SUITES = ("fd", "uv", "stationarity", "scale", "ode", "collapse", "limit")
SCALES = (0.1, 3.0, 10.0)
_LOG_FAMILY_ARGS = {
    "tsallis": ("t",),
    "kaniadakis": ("K",),
    "abe": ("z",),
    "gamma": ("gamma",),
    "kls": ("r", "K"),
}


class ConfigError(DivgradError):
    pass


def fmt(v):
    return float(f"{float(v):.17g}")


def vec(a):
    return [fmt(v) for v in np.asarray(a, dtype=float)]


def read_vector(spec, name, floor=None):
    path = Path(spec)
    try:
        if path.is_file():
            text = path.read_text()
            values = [float(tok) for tok in text.split()]
        else:
            values = [float(tok) for tok in spec.split(",") if tok.strip()]
    except ValueError as err:
        raise ConfigError(f"cannot parse {name} from {spec!r}: {err}") from None
    if not values:
        raise ConfigError(f"{name} is empty")
    arr = np.array(values)
    if floor is not None:
        arr = np.maximum(arr, floor)
    return as_field(arr, name)


def write_vector(path, values):
    Path(path).write_text("".join(f"{v:.17g}\n" for v in np.asarray(values, dtype=float)))


def read_matrix(path):
    try:
        H = np.loadtxt(path, delimiter=",", ndmin=2)
    except (OSError, ValueError) as err:
        raise ConfigError(f"cannot read matrix {path!r}: {err}") from None
    return H


def parse_log(args):
    if args.log_family and (args.log_a is not None or args.log_b is not None):
        raise ConfigError("give either --log-family or --log-a/--log-b, not both")
    if args.log_a is not None or args.log_b is not None:
        if args.log_a is None or args.log_b is None:
            raise ConfigError("--log-a and --log-b must be given together")
        return LogParams(args.log_a, args.log_b)
    if not args.log_family:
        return None
    name, _, rest = args.log_family.partition(":")
    name = name.strip().lower()
    if name in ("natural", "shannon", "ln"):
        return LogParams.natural_log()
    if name in ("plain", "identity"):
        return LogParams.identity()
    if name not in _LOG_FAMILY_ARGS:
        raise ConfigError(f"unknown log family {name!r}")
    keys = _LOG_FAMILY_ARGS[name]
    try:
        values = [float(v) for v in rest.split(",")] if rest else []
    except ValueError:
        raise ConfigError(f"bad parameters in --log-family {args.log_family!r}") from None
    if len(values) != len(keys):
        raise ConfigError(f"log family {name!r} takes {len(keys)} parameter(s): {', '.join(keys)}")
    return make_params(FamilyParams(name, **dict(zip(keys, values))))


def resolve_seed(args, draw=True):
    """Seed from --seed, then $DIVGRAD_SEED, then fresh entropy (or None if ``draw`` is false)."""
    if args.seed is not None:
        return int(args.seed) % 2**64
    env = os.environ.get("DIVGRAD_SEED")
    if env:
        try:
            return int(env) % 2**64
        except ValueError:
            raise ConfigError(f"DIVGRAD_SEED={env!r} is not an integer") from None
    if not draw:
        return None
    return int(np.random.SeedSequence().entropy) % 2**64


def divergence_params(args):
    return DivergenceParams(alpha=args.alpha, beta=args.beta)


def config_block(args, lp, seed):
    return {
        "family": canonical_family(args.family),
        "variant": args.variant,
        "alpha": args.alpha,
        "beta": args.beta,
        "log": str(lp if lp is not None else plain_log(args.family)),
        "canonical_sum": bool(args.canonical_sum),
        "seed": seed,
    }


def emit(report, out):
    text = json.dumps(report, indent=2) + "\n"
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


# -- eval -------------------------------------------------------------------


def cmd_eval(args):
    lp = parse_log(args)
    seed = resolve_seed(args, draw=False)
    p = read_vector(args.p, "p", args.floor)
    q = read_vector(args.q, "q", args.floor)
    dec = ld_gradient(args.family, args.variant, p, q, divergence_params(args), lp)
    report = {
        "command": "eval",
        "config": config_block(args, lp, seed),
        "value": fmt(dec.value),
        "grad": vec(dec.grad),
        "U": vec(dec.U),
        "V": vec(dec.V),
        "strict": dec.strict,
        "case_tag": dec.case_tag,
        "stationarity_residual": fmt(dec.stationarity_residual(q)),
    }
    emit(report, args.out)
    return 0


# -- check ------------------------------------------------------------------


def _inputs(args, rng):
    if args.p and args.q:
        return read_vector(args.p, "p", args.floor), read_vector(args.q, "q", args.floor)
    if args.p or args.q:
        raise ConfigError("give both --p and --q, or neither for a random instance")
    return rng.uniform(0.1, 10.0, args.n), rng.uniform(0.1, 10.0, args.n)


def _is_invariant(variant):
    return variant.lower() != "base"


def _checks(args, p, q, lp):
    dp = divergence_params(args)
    fam = canonical_family(args.family)
    dec = ld_gradient(fam, args.variant, p, q, dp, lp)
    grad = dec.grad.copy()
    if args.corrupt_gradient:
        grad[0] += 1e-3 * max(np.max(np.abs(grad)), 1.0)
    invariant = _is_invariant(args.variant)
    wanted = args.suite or list(SUITES)
    out = []

    def add(name, residual, tol):
        out.append({"name": name, "residual": fmt(residual), "tolerance": tol, "pass": bool(residual <= tol)})

    if "fd" in wanted:
        fd = fd_gradient(lambda x: ld_gradient(fam, args.variant, p, x, dp, lp).value, q, FDSpec())
        add("fd_gradient", relative_error(grad, fd), 1e-5)
    if "uv" in wanted:
        scale = np.maximum(dec.U + dec.V, np.finfo(float).tiny)
        add("uv_consistency", float(np.max(np.abs(dec.U - dec.V + grad) / scale)), 1e-10)
        if dec.strict:
            add("uv_positivity", 0.0 if min(dec.U.min(), dec.V.min()) > 0 else 1.0, 0.0)
    if invariant and "stationarity" in wanted:
        w = q * grad
        add("stationarity", abs(total(w)) / max(total(np.abs(w)), np.finfo(float).tiny), 1e-8)
    if invariant and "scale" in wanted:
        worst = max(
            abs(ld_gradient(fam, args.variant, p, lam * q, dp, lp).value - dec.value) for lam in SCALES
        )
        add("scale_invariance", worst / (1.0 + abs(dec.value)), 1e-9)
    if "ode" in wanted:
        k = star_factor(p, q).value
        add("ode_star", abs(factor_ode_residual(lambda pp, qq: star_factor(pp, qq).value, p, q)) / k, 1e-6)
        if fam in ("alpha", "beta", "alphabeta", "dual_kl"):
            fk = lambda pp, qq: nominal_factor(fam, pp, qq, dp).value
            add("ode_nominal", abs(factor_ode_residual(fk, p, q)) / fk(p, q), 1e-6)
    if "collapse" in wanted and fam not in ("F", "G", "dual_kl") and not (invariant and fam in ("GH", "AG", "AH")):
        from .divergences import alpha_split, alphabeta_split, beta_split, mean_split
        from .invariance import invariant_split

        if invariant:
            split = invariant_split(fam, p, q, dp)
        elif fam in ("GH", "AG", "AH"):
            split = mean_split(fam, p, q, dp.alpha)
        else:
            split = {"alpha": alpha_split, "beta": beta_split, "alphabeta": alphabeta_split}[fam](p, q, dp)
        base = split.value
        add("identity_collapse", abs(ld_value(split, LogParams.identity()) - base) / max(abs(base), 1e-300), 1e-12)
    if "limit" in wanted:
        worst = 0.0
        for eps in (1e-3, 1e-4):
            lpe = LogParams(1.0 + eps, 1.0 - eps)
            for x in np.geomspace(0.05, 20.0, 41):
                L = np.log(x)
                if abs(L) < 1e-2:
                    continue
                gap = abs(log_d(x, lpe) - L)
                worst = max(worst, gap / (eps**2 * abs(L) ** 3))
        add("limit_bound", worst, 1.0)
        add("limit_closed_form", limit_gap(2.0, 1e-3) / (1e-6 * np.log(2.0) ** 3), 1.0)
    return out


def cmd_check(args):
    lp = parse_log(args)
    seed = resolve_seed(args)
    rng = np.random.default_rng(seed)
    p, q = _inputs(args, rng)
    checks = _checks(args, p, q, lp)
    ok = all(c["pass"] for c in checks)
    report = {
        "command": "check",
        "config": config_block(args, lp, seed),
        "n": int(p.size),
        "corrupted": bool(args.corrupt_gradient),
        "checks": checks,
        "pass": ok,
    }
    emit(report, args.out)
    return 0 if ok else EXIT_CHECK


# -- solve ------------------------------------------------------------------


def _write_trace(path, trace):
    lines = ["k,divergence,step,sum_x,min_x\n"]
    lines += [f"{k},{v:.17g},{s:.17g},{sx:.17g},{mx:.17g}\n" for k, v, s, sx, mx in trace.rows()]
    Path(path).write_text("".join(lines))


def _summary(args, lp, seed, trace, C, target):
    v = np.array(trace.value)
    sums = np.array(trace.sum_x)
    reduction = 1.0 - v[-1] / v[0] if v[0] != 0 else 0.0
    if C is not None:
        conservation = float(np.max(np.abs(sums - C))) / C
    else:
        conservation = float(np.max(np.abs(np.diff(sums)), initial=0.0)) / sums[0]
    pre = np.array(trace.pre_normalize)
    neutrality = float(np.max(np.abs(pre - v) / np.maximum(np.abs(v), np.finfo(float).tiny)))
    return {
        "command": "solve",
        "config": config_block(args, lp, seed),
        "algorithm": args.algo,
        "sum_constraint": C,
        "status": trace.status,
        "iterations": trace.iterations,
        "initial_divergence": fmt(v[0]),
        "final_divergence": fmt(v[-1]),
        "reduction": fmt(reduction),
        "target_reduction": target,
        "max_increase": fmt(np.max(np.diff(v), initial=0.0)),
        "conservation_residual": fmt(conservation),
        "normalization_residual": fmt(neutrality),
        "pass": bool(reduction >= target or v[0] == 0),
    }


def cmd_solve(args):
    lp = parse_log(args)
    seed = resolve_seed(args, draw=False)
    if not args.H or not args.y:
        raise ConfigError("solve needs --H and --y")
    model = LinearModel(read_matrix(args.H), read_vector(args.y, "y", args.floor))
    x0 = read_vector(args.x0, "x0") if args.x0 else None
    opts = SolverOptions(args.algo, args.max_iter, args.tol, args.sum, ArmijoOptions())
    spec = DivergenceSpec(args.family, args.variant, divergence_params(args))
    out = Path(args.out) if args.out else None
    if out:
        out.mkdir(parents=True, exist_ok=True)
    code = 0
    try:
        x, trace = sgm_solve(model, spec, lp, opts, x0)
    except (LineSearchFailure, NonDescent) as err:
        x, trace = getattr(err, "x", None), getattr(err, "trace", None)
        print(f"divgrad: solver failure: {err}", file=sys.stderr)
        code = EXIT_SOLVER
        if x is None or trace is None or not trace.k:
            return code
    summary = _summary(args, lp, seed, trace, args.sum, args.target_reduction)
    if out:
        write_vector(out / "x.txt", x)
        _write_trace(out / "trace.csv", trace)
        emit(summary, out / "summary.json")
    else:
        emit(summary, None)
    return code


# -- entry point ------------------------------------------------------------


def build_parser():
    ap = argparse.ArgumentParser(prog="divgrad", description=__doc__.splitlines()[0])
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--family", required=True, help="alpha, beta, alphabeta, GH, AG, AH, F, G or dual_kl")
    common.add_argument("--variant", default="base", choices=("base", "invariant", "nominal", "star"))
    common.add_argument("--alpha", type=float)
    common.add_argument("--beta", type=float)
    common.add_argument("--log-a", type=float)
    common.add_argument("--log-b", type=float)
    common.add_argument("--log-family", help="natural, plain, tsallis:t, kaniadakis:K, abe:z, gamma:g, kls:r,K")
    common.add_argument("--seed", type=int, help="64-bit seed (fallback: $DIVGRAD_SEED)")
    common.add_argument("--floor", type=float, help="clip inputs from below before validation")
    common.add_argument("--canonical-sum", action="store_true", help="left-to-right summation everywhere")
    common.add_argument("--out", help="output file (eval, check) or directory (solve)")
    sub = ap.add_subparsers(dest="command", required=True)

    ev = sub.add_parser("eval", parents=[common], help="value, gradient and U - V split")
    ev.add_argument("--p", required=True)
    ev.add_argument("--q", required=True)

    ck = sub.add_parser("check", parents=[common], help="numerical identity checks")
    ck.add_argument("--p")
    ck.add_argument("--q")
    ck.add_argument("--n", type=int, default=8, help="length of random instances")
    ck.add_argument("--suite", action="append", choices=SUITES)
    ck.add_argument("--corrupt-gradient", action="store_true", help="debug: perturb the analytic gradient")

    sv = sub.add_parser("solve", parents=[common], help="minimize D(y || Hx) over x > 0")
    sv.add_argument("--H")
    sv.add_argument("--y")
    sv.add_argument("--x0")
    sv.add_argument("--algo", default="additive", choices=ALGORITHMS)
    sv.add_argument("--sum", type=float, help="sum constraint C")
    sv.add_argument("--max-iter", type=int, default=500)
    sv.add_argument("--tol", type=float, default=1e-10)
    sv.add_argument("--target-reduction", type=float, default=0.99)
    return ap


COMMANDS = {"eval": cmd_eval, "check": cmd_check, "solve": cmd_solve}


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        with canonical_summation(args.canonical_sum):
            return COMMANDS[args.command](args)
    except DomainError as err:
        print(f"divgrad: domain error: {err}", file=sys.stderr)
        return EXIT_DOMAIN
    except (DivgradError, ValueError) as err:
        print(f"divgrad: configuration error: {err}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
