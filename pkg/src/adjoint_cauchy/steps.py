"""Step size strategies for the boundary descent iteration.

Five interchangeable rules:

* ``Constant``: one fixed step.
* ``Armijo``: backtracking line search with the sufficient decrease test
  J(omega - beta*grad) <= J - xi*beta*||grad||^2, starting at beta = 1.
* ``OptimalTwoMode``: the constant step 2 / (C_M + C_N) that minimizes the
  worst-case contraction over a band of error modes.
* ``ModeSweep``: rho_k = 1 / C_m visiting each band mode once, which in
  exact arithmetic removes one error mode per iteration; after the band is
  exhausted it falls back to a tail step.
* ``ExplicitSchedule``: a literal step list with the same kind of tail.

C_m is the per-mode gradient factor of the annulus, strictly decreasing
in m, so 1 / C_m grows with the mode index and a "descending" sweep
(high modes first) applies the largest steps first.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Union

from .spectral import DEFAULT_BAND_CAP, gradient_factor

__all__ = [
    "Constant",
    "Armijo",
    "OptimalTwoMode",
    "ModeSweep",
    "ExplicitSchedule",
    "StepStrategy",
    "StepUnderflowError",
    "MAX_BACKTRACKS",
    "armijo_step",
    "optimal_step",
    "sweep_step",
    "default_tail_rho",
]

MAX_BACKTRACKS = 60


class StepUnderflowError(RuntimeError):
    """Armijo backtracking hit the halving cap without an acceptable step."""


@dataclass(frozen=True)
class Constant:
    rho: float

    def __post_init__(self):
        if not self.rho > 0.0:
            raise ValueError("constant step size must be positive")


@dataclass(frozen=True)
class Armijo:
    xi: float = 1.0 / 3.0
    tau: float = 0.5

    def __post_init__(self):
        if not 0.0 < self.xi < 0.5:
            raise ValueError("Armijo slope fraction must lie in (0, 1/2)")
        if not 0.0 < self.tau < 1.0:
            raise ValueError("Armijo shrink factor must lie in (0, 1)")


@dataclass(frozen=True)
class OptimalTwoMode:
    mode_min: int
    mode_max: int

    def __post_init__(self):
        if not 0 <= self.mode_min <= self.mode_max:
            raise ValueError("band must satisfy 0 <= mode_min <= mode_max")


@dataclass(frozen=True)
class ModeSweep:
    mode_min: int
    mode_max: int
    direction: str = "descending"
    tail_rho: float | None = None

    def __post_init__(self):
        if not 0 <= self.mode_min <= self.mode_max:
            raise ValueError("band must satisfy 0 <= mode_min <= mode_max")
        if self.direction not in ("ascending", "descending"):
            raise ValueError("direction must be 'ascending' or 'descending'")
        if self.tail_rho is not None and not self.tail_rho > 0.0:
            raise ValueError("tail step size must be positive")


@dataclass(frozen=True)
class ExplicitSchedule:
    rhos: tuple[float, ...]
    tail_rho: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "rhos", tuple(float(r) for r in self.rhos))
        if not self.rhos:
            raise ValueError("schedule needs at least one step")
        if any(not r > 0.0 for r in self.rhos):
            raise ValueError("scheduled step sizes must be positive")
        if self.tail_rho is not None and not self.tail_rho > 0.0:
            raise ValueError("tail step size must be positive")


StepStrategy = Union[Constant, Armijo, OptimalTwoMode, ModeSweep, ExplicitSchedule]


def armijo_step(
    evaluate: Callable[[float], float],
    j_value: float,
    grad_norm_sq: float,
    xi: float = 1.0 / 3.0,
    tau: float = 0.5,
    beta0: float = 1.0,
    max_backtracks: int = MAX_BACKTRACKS,
) -> tuple[float, int]:
    """Backtracking line search for one descent step.

    ``evaluate(beta)`` must return the functional at the trial iterate
    omega - beta*grad. Returns the first beta = beta0 * tau^m satisfying
    J(beta) <= j_value - xi*beta*grad_norm_sq together with the number of
    evaluations spent. Raises ``StepUnderflowError`` after
    ``max_backtracks`` halvings.
    """
    beta = beta0
    for m in range(max_backtracks + 1):
        trial = evaluate(beta)
        if trial <= j_value - xi * beta * grad_norm_sq:
            return beta, m + 1
        beta *= tau
    raise StepUnderflowError(
        f"step size underflow: no acceptable step after {max_backtracks} halvings "
        f"(last trial beta = {beta / tau:.3e})"
    )


def optimal_step(
    mode_min: int, mode_max: int, r_inner: float, r_outer: float
) -> tuple[float, float]:
    """Best constant step for a band of error modes and its contraction.

    Balancing the two edge modes gives rho = 2 / (C_min + C_max) and the
    per-step contraction delta = (C_min - C_max) / (C_min + C_max); a
    single-mode band yields delta = 0, one-step convergence.
    """
    if not 0 <= mode_min <= mode_max:
        raise ValueError("band must satisfy 0 <= mode_min <= mode_max")
    c_lo = gradient_factor(mode_min, r_inner, r_outer)
    c_hi = gradient_factor(mode_max, r_inner, r_outer)
    rho = 2.0 / (c_lo + c_hi)
    delta = (c_lo - c_hi) / (c_lo + c_hi)
    return rho, delta


def default_tail_rho(r_inner: float, r_outer: float) -> float:
    """Tail step once a sweep has exhausted its band.

    The optimal two-mode step for the widest tracked band [0, cap]; the
    cap mode's factor is negligible, so this is essentially 2 / C_0 =
    r_inner / r_outer.
    """
    return optimal_step(0, DEFAULT_BAND_CAP, r_inner, r_outer)[0]


def sweep_step(
    k: int,
    mode_min: int,
    mode_max: int,
    direction: str,
    r_inner: float,
    r_outer: float,
    tail_rho: float | None = None,
) -> float:
    """Step size of sweep iteration ``k``.

    For k = 0 .. mode_max - mode_min the step is the exact reciprocal of
    one band mode's gradient factor, visiting modes upward or downward;
    afterwards the tail step (``default_tail_rho`` unless given) is used.
    """
    if k < 0:
        raise ValueError("iteration index must be nonnegative")
    if not 0 <= mode_min <= mode_max:
        raise ValueError("band must satisfy 0 <= mode_min <= mode_max")
    if direction not in ("ascending", "descending"):
        raise ValueError("direction must be 'ascending' or 'descending'")
    if k <= mode_max - mode_min:
        mode = mode_min + k if direction == "ascending" else mode_max - k
        return 1.0 / gradient_factor(mode, r_inner, r_outer)
    if tail_rho is not None:
        return tail_rho
    return default_tail_rho(r_inner, r_outer)
