"""Split-gradient minimization of ``D(y || Hx)`` over ``x > 0``.

Three updates share the opposite gradient ``-grad_x = H^T U - H^T V``:

* additive:        ``x <- x + a * x * (U_x - V_x)``
* preconditioned:  ``x <- x + a * x * (U_x / V_x - 1)``
* multiplicative:  ``x <- x * U_x / V_x`` (``a = 1``, no line search)

The additive and preconditioned steps are capped so every component stays
positive and then backtracked with the Armijo rule. With a sum constraint
``C`` each iterate is rescaled to ``sum(x) = C`` after the update.
"""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ._fields import as_field, matvec, rmatvec, total
from .divergences import DivergenceParams
from .errors import LineSearchFailure, NonDescent, ParamError, ShapeError
from .logdiv import canonical_family, ld_gradient

ALGORITHMS = ("additive", "preconditioned", "multiplicative")
SAFETY = 0.99
PATIENCE = 5
# |U_x - V_x| / (U_x + V_x) below this counts as a stationary point
STATIONARY_TOL = 1e-12


@dataclass(frozen=True)
class LinearModel:
    H: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        H = np.array(self.H, dtype=float, ndmin=2)
        y = as_field(self.y, "y")
        if H.ndim != 2 or H.shape[0] != y.size:
            raise ShapeError(f"H has shape {H.shape}; expected ({y.size}, n)")
        if np.any(H < 0) or not np.all(np.isfinite(H)):
            raise ParamError("H must have finite non-negative entries")
        empty = np.flatnonzero(~np.any(H > 0, axis=0))
        if empty.size:
            raise ParamError(f"column {int(empty[0])} of H has no positive entry")
        object.__setattr__(self, "H", H)
        object.__setattr__(self, "y", y)

    @property
    def n(self):
        return self.H.shape[1]

    def forward(self, x):
        return matvec(self.H, x)


@dataclass(frozen=True)
class ArmijoOptions:
    c1: float = 1e-4
    shrink: float = 0.5
    max_backtracks: int = 60


@dataclass(frozen=True)
class SolverOptions:
    algorithm: str = "additive"
    max_iters: int = 500
    rel_tol: float = 1e-10
    sum_constraint: Optional[float] = None
    armijo: ArmijoOptions = ArmijoOptions()
    step_cap: float = 1e6

    def __post_init__(self):
        if self.algorithm not in ALGORITHMS:
            raise ParamError(f"unknown algorithm {self.algorithm!r}; expected one of {ALGORITHMS}")
        if int(self.max_iters) < 1:
            raise ParamError("max_iters must be at least 1")
        if not self.rel_tol > 0:
            raise ParamError("rel_tol must be positive")
        if self.sum_constraint is not None and not self.sum_constraint > 0:
            raise ParamError("the sum constraint must be positive")
        a = self.armijo
        if not (0 < a.c1 < 1 and 0 < a.shrink < 1 and a.max_backtracks >= 1):
            raise ParamError(f"invalid Armijo options {a!r}")


@dataclass(frozen=True)
class DivergenceSpec:
    """Which divergence to minimize: family, variant and its parameters."""

    family: str
    variant: str = "base"
    params: DivergenceParams = DivergenceParams()


@dataclass
class IterateTrace:
    """One row per iteration; row 0 is the starting point."""

    k: list = field(default_factory=list)
    value: list = field(default_factory=list)
    step: list = field(default_factory=list)
    sum_x: list = field(default_factory=list)
    min_x: list = field(default_factory=list)
    residual: list = field(default_factory=list)
    # divergence right before the sum renormalization (equals value without one)
    pre_normalize: list = field(default_factory=list)
    status: str = "running"

    def record(self, k, value, step, x, residual, pre_normalize):
        self.k.append(k)
        self.value.append(float(value))
        self.step.append(float(step))
        self.sum_x.append(total(x))
        self.min_x.append(float(np.min(x)))
        self.residual.append(float(residual))
        self.pre_normalize.append(float(pre_normalize))

    @property
    def iterations(self):
        return len(self.k) - 1

    def rows(self):
        return list(zip(self.k, self.value, self.step, self.sum_x, self.min_x))


def chain_gradient(H, gq):
    """Gradient with respect to ``x`` of a function of ``q = H x``: ``H^T gq``."""
    H = np.atleast_2d(np.asarray(H, dtype=float))
    gq = np.asarray(gq, dtype=float).ravel()
    if H.shape[0] != gq.size:
        raise ShapeError(f"H has {H.shape[0]} rows but the gradient has {gq.size} entries")
    return rmatvec(H, gq)


def max_step(x, d, safety=SAFETY, step_cap=1e6):
    """Largest ``a`` keeping ``x * (1 + a d)`` positive, times ``safety``."""
    d = np.asarray(d, dtype=float)
    neg = d < 0
    if not np.any(neg):
        return float(step_cap)
    return float(min(safety * np.min(-1.0 / d[neg]), step_cap))


def armijo_step(phi, alpha_max, slope=None, phi0=None, c1=1e-4, shrink=0.5, max_backtracks=60):
    """Backtrack from ``alpha_max`` until ``phi(a) <= phi(0) + c1 a slope``.

    ``slope`` is ``phi'(0)``; when omitted it is estimated by a forward
    difference. Non-finite trial values count as rejections.
    """
    f0 = phi(0.0) if phi0 is None else phi0
    if not np.isfinite(f0):
        raise LineSearchFailure(f"phi(0) = {f0!r} is not finite")
    if slope is None:
        h = 1e-8 * min(alpha_max, 1.0)
        slope = (phi(h) - f0) / h
    a = float(alpha_max)
    for _ in range(max_backtracks + 1):
        fa = phi(a)
        if np.isfinite(fa) and fa <= f0 + c1 * a * slope:
            return a
        a *= shrink
    raise LineSearchFailure(
        f"no Armijo step in {max_backtracks} backtracks from {alpha_max:g} (slope {slope:.3e})"
    )


def normalize(x, C):
    return C * x / total(x)


def _fail(err, x, trace, status):
    trace.status = status
    err.x = x
    err.trace = trace
    return err


def sgm_solve(model, spec, lp=None, opts=SolverOptions(), x0=None):
    """Minimize ``D(y || H x)`` for the divergence described by ``spec``.

    Returns ``(x, trace)``. ``lp=None`` minimizes the divergence itself (see
    :func:`plain_log`). Failures raise with the last accepted iterate and the
    trace attached as ``err.x`` and ``err.trace``.
    """
    canonical_family(spec.family)
    C = opts.sum_constraint
    if x0 is None:
        scale = C if C is not None else total(model.y)
        x = np.full(model.n, scale / model.n)
    else:
        x = as_field(x0, "x0").copy()
        if x.size != model.n:
            raise ShapeError(f"x0 has {x.size} entries; H has {model.n} columns")
        if C is not None and abs(total(x) - C) > 1e-12 * C:
            raise ParamError(f"sum(x0) = {total(x)!r} differs from the constraint C = {C!r}")

    def evaluate(xx):
        return ld_gradient(spec.family, spec.variant, model.y, model.forward(xx), spec.params, lp)

    def value_at(xx):
        return ld_gradient(spec.family, spec.variant, model.y, model.forward(xx), spec.params, lp).value

    trace = IterateTrace()
    dec = evaluate(x)
    trace.record(0, dec.value, 0.0, x, dec.consistency_residual(), dec.value)
    if not dec.strict and opts.algorithm != "additive":
        raise _fail(
            NonDescent(
                f"{dec.case_tag}: this decomposition is not strictly positive and cannot drive the "
                f"{opts.algorithm} update; use a deformed logarithm or the additive algorithm"
            ),
            x, trace, "nondescent",
        )
    quiet = 0
    for k in range(1, int(opts.max_iters) + 1):
        if dec.consistency_residual() > 1e-8:
            raise _fail(NonDescent(f"U - V differs from -grad at iteration {k}"), x, trace, "nondescent")
        Ux = chain_gradient(model.H, dec.U)
        Vx = chain_gradient(model.H, dec.V)
        gx = chain_gradient(model.H, dec.grad)
        if np.max(np.abs(Ux - Vx) / np.maximum(Ux + Vx, np.finfo(float).tiny)) <= STATIONARY_TOL:
            trace.status = "stationary"
            return x, trace
        if opts.algorithm == "multiplicative":
            step = 1.0
            x_new = x * Ux / Vx
        else:
            d = Ux - Vx if opts.algorithm == "additive" else Ux / Vx - 1.0
            slope = total(gx * x * d)
            if not slope < 0:
                raise _fail(
                    NonDescent(f"directional derivative {slope:.3e} is not negative at iteration {k}"),
                    x, trace, "nondescent",
                )
            a_max = max_step(x, d, step_cap=opts.step_cap)
            phi = lambda a: value_at(x * (1.0 + a * d))
            arm = opts.armijo
            try:
                step = armijo_step(phi, a_max, slope, dec.value, arm.c1, arm.shrink, arm.max_backtracks)
            except LineSearchFailure as err:
                # rounding floor: the best possible decrease is below the value's resolution
                if abs(slope) * min(a_max, 1.0) <= 1e-10 * max(abs(dec.value), np.finfo(float).tiny):
                    trace.status = "stalled"
                    return x, trace
                raise _fail(err, x, trace, "linesearch") from None
            x_new = x * (1.0 + step * d)
        if not np.all(x_new > 0):
            raise _fail(NonDescent(f"iterate left the positive orthant at iteration {k}"), x, trace, "positivity")
        pre = value_at(x_new) if C is not None else None
        if C is not None:
            x_new = normalize(x_new, C)
        new = evaluate(x_new)
        if not np.isfinite(new.value):
            raise _fail(NonDescent(f"non-finite divergence at iteration {k}"), x, trace, "nonfinite")
        trace.record(k, new.value, step, x_new, new.consistency_residual(), new.value if pre is None else pre)
        change = abs(dec.value - new.value) / max(abs(dec.value), np.finfo(float).tiny)
        x, dec = x_new, new
        quiet = quiet + 1 if change < opts.rel_tol else 0
        if quiet >= PATIENCE:
            trace.status = "converged"
            return x, trace
    trace.status = "max_iters"
    return x, trace


def deconvolution_fixture(n=32, sigma=1.5, seed=20240617):
    """Gaussian-blur test problem: returns ``(H, y, x_true)`` with ``y = H x_true``.

    Columns of ``H`` sum to one, so ``sum(y) = sum(x_true)``.
    """
    rng = np.random.default_rng(seed)
    grid = np.arange(n)
    H = np.exp(-0.5 * ((grid[:, None] - grid[None, :]) / sigma) ** 2)
    H /= H.sum(axis=0, keepdims=True)
    x_true = np.full(n, 0.2)
    for centre in rng.choice(np.arange(4, n - 4), size=3, replace=False):
        width = rng.uniform(1.0, 2.5)
        x_true += rng.uniform(2.0, 6.0) * np.exp(-0.5 * ((grid - centre) / width) ** 2)
    return H, H @ x_true, x_true
