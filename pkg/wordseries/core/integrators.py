import logging
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from wordseries import settings

logger = logging.getLogger(__name__)

Rhs = Callable[[float, np.ndarray], np.ndarray]


@dataclass(frozen=True)
class HalvingResult:
    '''
    Attributes:
        times (np.ndarray): Sample times.
        states (np.ndarray): State at each sample time, from the finest run.
        substeps (int): RK4 steps per sample interval of the finest run.
        difference (float): Max difference between the last two runs.
        converged (bool): Whether difference fell under the tolerance.
    '''

    times: np.ndarray
    states: np.ndarray
    substeps: int
    difference: float
    converged: bool

    @property
    def final(self) -> np.ndarray:
        return self.states[-1]


def rk4_step(rhs: Rhs, t: float, x: np.ndarray, h: float) -> np.ndarray:
    k1 = rhs(t, x)
    k2 = rhs(t + h / 2, x + h / 2 * k1)
    k3 = rhs(t + h / 2, x + h / 2 * k2)
    k4 = rhs(t + h, x + h * k3)

    return x + h * (k1 + 2 * (k2 + k3) + k4) / 6


def rk4_integrate(rhs: Rhs, x0: np.ndarray, t0: float, t_end: float, steps: int = settings.RK_STEPS) -> np.ndarray:
    '''
    Classical four-stage Runge–Kutta with the fixed step (t_end − t0)/steps.

    Args:
        rhs (Rhs): Right-hand side f(t, x), returning an array shaped like x.
        x0 (np.ndarray): Initial state; complex states are supported.
        t0 (float): Initial time.
        t_end (float): Final time, may be smaller than t0.
        steps (int): Number of steps.

    Returns:
        np.ndarray: State at t_end.
    '''
    if steps < 1:
        raise ValueError('steps must be at least 1')

    x = np.array(x0, dtype=complex)
    h = (t_end - t0) / steps
    for step in range(steps):
        x = rk4_step(rhs, t0 + step * h, x, h)

    return x


def rk4_path(rhs: Rhs, x0: np.ndarray, times: Sequence[float], substeps: int) -> np.ndarray:
    '''States at every sample time, with substeps fixed RK4 steps between consecutive samples.'''
    times = np.asarray(times, dtype=float)
    states = np.empty((times.size,) + np.shape(x0), dtype=complex)
    states[0] = x0

    for index in range(1, times.size):
        states[index] = rk4_integrate(rhs, states[index - 1], times[index - 1], times[index], substeps)

    return states


def integrate_halving(rhs: Rhs, x0: np.ndarray, times: Sequence[float], substeps: int = 64,
                      tol: float = settings.SOLVE_TOL, max_halvings: int = settings.MAX_HALVINGS) -> HalvingResult:
    '''
    Repeats rk4_path with the step halved until two successive runs differ by
    less than tol at every sample time, or max_halvings is reached.
    '''
    times = np.asarray(times, dtype=float)
    states = rk4_path(rhs, x0, times, substeps)
    difference = np.inf

    for halving in range(max_halvings):
        substeps *= 2
        refined = rk4_path(rhs, x0, times, substeps)
        difference = float(np.max(np.abs(refined - states)))
        states = refined

        logger.debug('halving %d: %d substeps, difference %.3e', halving + 1, substeps, difference)
        if difference < tol:
            return HalvingResult(times, states, substeps, difference, True)

    logger.warning('step halving stopped after %d halvings with difference %.3e (tol %.1e)',
                   max_halvings, difference, tol)

    return HalvingResult(times, states, substeps, difference, False)
