"""Scaled conjugate gradients (Moller 1993).

Gradient-only minimizer with a Levenberg-Marquardt style scale parameter in
place of a line search. A step is accepted only when it lowers the objective,
so the log of accepted values is non-increasing by construction.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

FG = Callable[[np.ndarray], tuple[float, np.ndarray]]


@dataclass
class ScgResult:
    x: np.ndarray
    f: float
    f_log: list[float]  # objective at start plus after every accepted step
    iterations: int
    converged: bool


def minimize_scg(
    fg: FG,
    x0: np.ndarray,
    max_iters: int = 200,
    xtol: float = 1e-10,
    ftol: float = 1e-12,
) -> ScgResult:
    """Minimize f given a fused value-and-gradient callable.

    Stops after ``max_iters`` accepted-or-rejected steps, or earlier when a
    successful step moves less than ``xtol`` and improves less than ``ftol``.
    """
    sigma0 = 1.0e-4
    x = np.asarray(x0, dtype=np.float64).copy()
    n = x.size

    fnow, gradnew = fg(x)
    if not np.isfinite(fnow):
        raise FloatingPointError("objective is not finite at the initial point")
    fold = fnow
    gradold = gradnew
    d = -gradnew
    success = True
    nsuccess = 0
    beta = 1.0
    betamin, betamax = 1.0e-15, 1.0e100
    f_log = [fnow]
    mu = kappa = theta = 0.0

    j = 1
    while j <= max_iters:
        if success:
            mu = float(d @ gradnew)
            if mu >= 0:
                d = -gradnew
                mu = float(d @ gradnew)
            kappa = float(d @ d)
            if kappa < np.finfo(np.float64).eps:
                return ScgResult(x, fnow, f_log, j - 1, True)
            sigma = sigma0 / np.sqrt(kappa)
            _, gplus = fg(x + sigma * d)
            theta = float(d @ (gplus - gradnew)) / sigma

        delta = theta + beta * kappa
        if delta <= 0:
            delta = beta * kappa
            beta = beta - theta / kappa
        alpha = -mu / delta

        xnew = x + alpha * d
        fnew, gnew_candidate = fg(xnew)
        if not np.isfinite(fnew):
            ratio = -1.0  # treat as a failed step and shrink trust
        else:
            ratio = 2.0 * (fnew - fold) / (alpha * mu)

        if ratio >= 0:
            success = True
            nsuccess += 1
            x = xnew
            fnow = fnew
            f_log.append(fnow)
        else:
            success = False
            fnow = fold

        if success:
            small_step = float(np.max(np.abs(alpha * d))) < xtol
            small_gain = abs(fnew - fold) < ftol
            if small_step and small_gain:
                return ScgResult(x, fnow, f_log, j, True)
            fold = fnew
            gradold = gradnew
            gradnew = gnew_candidate
            if float(gradnew @ gradnew) == 0.0:
                return ScgResult(x, fnow, f_log, j, True)

        if ratio < 0.25:
            beta = min(4.0 * beta, betamax)
        if ratio > 0.75:
            beta = max(0.5 * beta, betamin)

        if nsuccess == n:
            d = -gradnew
            nsuccess = 0
        elif success:
            gamma = float((gradold - gradnew) @ gradnew) / mu
            d = gamma * d - gradnew

        j += 1

    return ScgResult(x, fnow, f_log, max_iters, False)
