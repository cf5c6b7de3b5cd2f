"""Nonmonotone proximal gradient iteration with stepsize backtracking.

The outer loop alternates a prox step on a quadratic model of the smooth
part with a nonmonotone acceptance test against a reference value. The
reference is either a running convex combination of past objective values
(mean rule, the default) or the max over a sliding window (max rule, kept
as a comparison policy).
"""

from __future__ import annotations

import math
import time
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .core import (
    BarzilaiBorweinSafeguarded,
    CompositeProblem,
    ConstantGamma,
    IterationRecord,
    MaxReference,
    PreviousAccepted,
    RunResult,
    RunStatus,
    SolverParams,
    Vector,
    as_vector,
    check_dim,
)


class NumericalFailure(RuntimeError):
    """A non-finite value appeared during a solve."""


class BacktrackLimitExceeded(RuntimeError):
    """The stepsize loop hit its cap without finding an acceptable step.

    The loop is finite in exact arithmetic, so reaching the cap signals a
    modeling or numerics problem rather than a normal outcome.
    """


@dataclass
class SolverState:
    """Mutable per-run state; confined to a single solve call."""

    x: Vector
    psi_x: float
    reference: float
    grad_x: Vector
    k: int = 0
    gamma_prev: float | None = None
    max_window: deque | None = None
    # spectral data from the previous accepted step: <dx, dg> and <dg, dg>
    bb_num: float = math.nan
    bb_den: float = math.nan


@dataclass(frozen=True, eq=False)
class StepOutcome:
    """An accepted trial step together with its bookkeeping."""

    x_next: Vector
    gamma_used: float
    backtracks: int
    psi_next: float
    residual: float
    step_norm: float
    # gradient at x_next, cached so the outer loop evaluates it only once
    grad_next: Vector = field(repr=False)


def subproblem_step(
    problem: CompositeProblem, x: Vector, grad_x: Vector, gamma: float
) -> Vector:
    """One prox-gradient trial: a selected minimizer of the local model
    phi(z) + ||z - (x - gamma*grad_x)||^2 / (2 gamma)."""
    if gamma <= 0:
        raise ValueError("gamma must be positive")
    if not np.all(np.isfinite(grad_x)):
        raise NumericalFailure("gradient contains non-finite entries")
    x_next = problem.phi.prox(gamma, x - gamma * grad_x)
    if not np.all(np.isfinite(x_next)):
        raise NumericalFailure("prox step produced non-finite entries")
    return x_next


def accept_step(
    psi_next: float,
    reference: float,
    alpha_k: float,
    gamma_k: float,
    step_norm_sq: float,
) -> bool:
    """Nonmonotone sufficient-decrease test against the reference value."""
    return psi_next <= reference - ((1.0 - alpha_k) / (2.0 * gamma_k)) * step_norm_sq


def residual(
    x_next: Vector, x: Vector, gamma: float, grad_next: Vector, grad_x: Vector
) -> float:
    """Stationarity measure ||(x_next - x)/gamma - grad_next + grad_x||.

    This quantity upper-bounds the distance from 0 to the objective's limiting
    subdifferential at x_next, so driving it below the tolerance certifies
    approximate M-stationarity.
    """
    if gamma <= 0:
        raise ValueError("gamma must be positive")
    r = (x_next - x) / gamma - grad_next + grad_x
    return float(np.linalg.norm(r))


def update_reference(reference: float, p_next: float, psi_next: float) -> float:
    """Mean-rule update: convex combination of reference and new objective."""
    return (1.0 - p_next) * reference + p_next * psi_next


def max_rule_reference(window) -> float:
    """Max-rule reference: largest objective value in the sliding window."""
    if len(window) == 0:
        raise ValueError("max-rule window is empty")
    return float(max(window))


def compute_m(p_min: float) -> int:
    """Smallest l with (1 - sqrt(1 - p_min)) * sqrt(l) >= 1 + sqrt(1 - p_min).

    This is the fixed lookahead length that makes the reference-drop telescoping
    argument close; it only depends on p_min.
    """
    if not 0.0 < p_min <= 1.0:
        raise ValueError("p_min must lie in (0, 1]")
    r = math.sqrt(1.0 - p_min)
    l = 1
    while (1.0 - r) * math.sqrt(l) < 1.0 + r:
        l += 1
    return l


def _initial_gamma(state: SolverState, params: SolverParams) -> float:
    pol = params.gamma_init_policy
    if isinstance(pol, ConstantGamma):
        raw = pol.value
    elif isinstance(pol, PreviousAccepted):
        raw = state.gamma_prev if state.gamma_prev is not None else params.gamma_max
    elif isinstance(pol, BarzilaiBorweinSafeguarded):
        # Degenerate or nonpositive curvature falls back to the largest step;
        # the acceptance loop repairs overestimates.
        if state.bb_den > 0.0 and math.isfinite(state.bb_num) and state.bb_num > 0.0:
            raw = state.bb_num / state.bb_den
        else:
            raw = params.gamma_max
    else:  # pragma: no cover - rejected by SolverParams validation
        raise ValueError("unknown gamma_init_policy")
    return min(max(raw, params.gamma_min), params.gamma_max)


def backtrack(
    problem: CompositeProblem, state: SolverState, params: SolverParams
) -> StepOutcome:
    """Shrink the trial stepsize geometrically until the acceptance test holds.

    Raises BacktrackLimitExceeded after `max_backtracks` rejections and
    NumericalFailure on any non-finite intermediate value.
    """
    alpha_k = 0.5 * (params.alpha_min + params.alpha_max)
    beta_k = 0.5 * (params.beta_min + params.beta_max)
    gamma = _initial_gamma(state, params)
    x = state.x
    grad_x = state.grad_x
    reference = state.reference
    f_eval = problem.f.eval
    phi_eval = problem.phi.eval
    backtracks = 0
    while True:
        x_next = subproblem_step(problem, x, grad_x, gamma)
        dx = x_next - x
        step_norm_sq = float(dx @ dx)
        f_next = float(f_eval(x_next))
        if not math.isfinite(f_next):
            raise NumericalFailure("smooth term overflowed at a trial point")
        phi_next = phi_eval(x_next)
        if not phi_next.is_finite:
            raise NumericalFailure("prox returned a point outside dom(phi)")
        psi_next = f_next + phi_next.value
        if accept_step(psi_next, reference, alpha_k, gamma, step_norm_sq):
            grad_next = problem.f.grad(x_next)
            if not np.all(np.isfinite(grad_next)):
                raise NumericalFailure("gradient overflowed at the accepted point")
            res = residual(x_next, x, gamma, grad_next, grad_x)
            return StepOutcome(
                x_next=x_next,
                gamma_used=gamma,
                backtracks=backtracks,
                psi_next=psi_next,
                residual=res,
                step_norm=math.sqrt(step_norm_sq),
                grad_next=grad_next,
            )
        if backtracks >= params.max_backtracks:
            raise BacktrackLimitExceeded(
                f"no acceptable stepsize after {backtracks} backtracks "
                f"(gamma reached {gamma:.3e})"
            )
        gamma *= beta_k
        backtracks += 1


def solve(
    problem: CompositeProblem,
    params: SolverParams,
    x0,
    record_iterates: bool = False,
) -> RunResult:
    """Run the nonmonotone proximal gradient method from x0.

    Parameters
    ----------
    problem : CompositeProblem
        Target psi = f + phi; x0 must be feasible for phi.
    params : SolverParams
        Algorithm constants. With epsilon = 0 the residual test is disabled
        (except for an exact fixed point, whose residual is exactly zero) and
        the run ends at max_outer_iters.
    x0 : array_like
        Starting point in dom(phi). Rejected with ValueError otherwise.
    record_iterates : bool
        When True the result carries the full iterate sequence x^0..x^final
        (one entry more than the trace length).

    Returns
    -------
    RunResult
        Final point, status, and one IterationRecord per outer iteration.
        Backtrack-cap and numerical failures are reported as statuses with
        the partial trace attached, not raised.
    """
    t_start = time.perf_counter()
    x0 = as_vector(np.array(x0, dtype=np.float64))
    check_dim(x0, problem.dim, "x0")

    phi0 = problem.phi.eval(x0)
    if not phi0.is_finite:
        raise ValueError("x0 lies outside dom(phi)")

    trace: list[IterationRecord] = []
    iterates: list[Vector] | None = [x0.copy()] if record_iterates else None

    def result(status: RunStatus, x_final: Vector) -> RunResult:
        return RunResult(
            status=status,
            x_final=x_final,
            trace=trace,
            wall_time=time.perf_counter() - t_start,
            iterates=iterates,
        )

    f0 = float(problem.f.eval(x0))
    if not math.isfinite(f0):
        return result(RunStatus.NUMERICAL_FAILURE, x0)
    grad0 = problem.f.grad(x0)
    if not np.all(np.isfinite(grad0)):
        return result(RunStatus.NUMERICAL_FAILURE, x0)

    psi0 = f0 + phi0.value
    ref_policy = params.reference_policy
    is_max_rule = isinstance(ref_policy, MaxReference)
    window = deque([psi0], maxlen=ref_policy.window) if is_max_rule else None
    state = SolverState(
        x=x0, psi_x=psi0, reference=psi0, grad_x=grad0, max_window=window
    )
    reference_prev = psi0  # xi at k = 0 is defined as 0 below

    for k in range(params.max_outer_iters):
        try:
            out = backtrack(problem, state, params)
        except BacktrackLimitExceeded:
            return result(RunStatus.BACKTRACK_CAP_EXCEEDED, state.x)
        except NumericalFailure:
            return result(RunStatus.NUMERICAL_FAILURE, state.x)

        xi = 0.0 if k == 0 else math.sqrt(max(reference_prev - state.reference, 0.0))
        trace.append(
            IterationRecord(
                k=k,
                psi=state.psi_x,
                reference=state.reference,
                gamma_accepted=out.gamma_used,
                backtracks=out.backtracks,
                step_norm=out.step_norm,
                residual=out.residual,
                xi=xi,
            )
        )
        if iterates is not None:
            iterates.append(out.x_next.copy())

        # residual == 0 means an exact stationary fixed point; terminate even
        # when epsilon = 0 since further iterations would not move.
        if (params.epsilon > 0.0 and out.residual <= params.epsilon) or (
            out.residual == 0.0
        ):
            return result(RunStatus.CONVERGED_RESIDUAL, out.x_next)

        dx = out.x_next - state.x
        dg = out.grad_next - state.grad_x
        state.bb_num = float(dx @ dg)
        state.bb_den = float(dg @ dg)

        reference_prev = state.reference
        if is_max_rule:
            window.append(out.psi_next)
            state.reference = max_rule_reference(window)
        else:
            state.reference = update_reference(
                state.reference, params.p_min, out.psi_next
            )
        state.x = out.x_next
        state.psi_x = out.psi_next
        state.grad_x = out.grad_next
        state.gamma_prev = out.gamma_used
        state.k = k + 1

    return result(RunStatus.MAX_ITERS, state.x)
