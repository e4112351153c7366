"""Scikit-learn style front ends for the two partitioning methods.

Both estimators fit on a Scenario and expose the converged allocation
through trailing-underscore attributes; ``predict`` labels arbitrary
positions with the server that would own them under the fitted weights,
which makes partition maps and downstream pipelines straightforward.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.exceptions import NotFittedError

from .baseline import snr_solve
from .channel import path_gain
from .solver import Scenario, SolverOptions, solve
from .sync import unit_cost


def check_positions(X, ndim: int) -> np.ndarray:
    """Validate predict input: finite floats shaped (n, ndim)."""
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[None, :]
    if X.ndim != 2 or X.shape[1] != ndim:
        raise ValueError(f"positions must have shape (n, {ndim}), got {X.shape}")
    if not np.all(np.isfinite(X)):
        raise ValueError("positions must be finite")
    return X


def check_scenario(scenario) -> Scenario:
    if not isinstance(scenario, Scenario):
        raise TypeError(f"expected a Scenario, got {type(scenario).__name__}")
    return scenario


class _FittedPartitioner(BaseEstimator):
    """Shared fit bookkeeping and predict plumbing."""

    def _store(self, scenario, state, report):
        self.scenario_ = scenario
        self.state_ = state
        self.report_ = report
        self.assignment_ = state.assignment
        self.masses_ = state.masses
        self.render_cycles_ = state.render_cycles
        self.twin_cycles_ = state.twin_cycles
        self.dt_assignment_ = state.dt_assignment
        self.objective_ = state.objective
        self.n_iter_ = state.iteration
        return self

    def _fitted(self):
        if not hasattr(self, "state_"):
            raise NotFittedError(f"{type(self).__name__} has not been fitted")

    def predict(self, X):
        """Server index owning each position under the fitted weights."""
        self._fitted()
        X = check_positions(X, self.scenario_.grid.ndim)
        return self._decide(X)

    def fit_predict(self, scenario, y=None):
        self.fit(scenario)
        return self.assignment_


class OptimalTransportPartitioner(_FittedPartitioner):
    """Fixed-point partitioner balancing sensor mass, channel, and compute.

    Parameters mirror the solver options; the scenario's own options are
    ignored in favor of the estimator's when fitting.
    """

    def __init__(self, tol=1e-6, max_iter=500, damping=0.5, alpha_floor=1e-6,
                 infeasible_policy="report", exhausted_policy="drop"):
        self.tol = tol
        self.max_iter = max_iter
        self.damping = damping
        self.alpha_floor = alpha_floor
        self.infeasible_policy = infeasible_policy
        self.exhausted_policy = exhausted_policy

    def fit(self, scenario, y=None):
        scenario = check_scenario(scenario).with_options(
            SolverOptions(
                tol=self.tol,
                max_iter=self.max_iter,
                damping=self.damping,
                alpha_floor=self.alpha_floor,
                infeasible_policy=self.infeasible_policy,
                exhausted_policy=self.exhausted_policy,
            )
        )
        state, report = solve(scenario)
        return self._store(scenario, state, report)

    def _decide(self, X):
        sc = self.scenario_
        rho = sc.metaverse.sensing_density
        weights = np.empty((X.shape[0], sc.n_servers))
        for b, server in enumerate(sc.servers):
            r = rho if np.isscalar(rho) else np.asarray(rho)[sc.grid.cell_index(X)]
            weights[:, b] = self.masses_[b] * unit_cost(
                X, server, self.render_cycles_[b], sc.radio, sc.channel, sc.metaverse, rho=r
            )
        return np.argmin(weights, axis=1)


class SnrAssociation(_FittedPartitioner):
    """Best-channel association baseline with the same estimator surface."""

    def __init__(self):
        pass

    def fit(self, scenario, y=None):
        scenario = check_scenario(scenario)
        state, report = snr_solve(scenario)
        return self._store(scenario, state, report)

    def _decide(self, X):
        sc = self.scenario_
        gains = np.stack(
            [path_gain(X, s.position, sc.channel) for s in sc.servers], axis=1
        )
        return np.argmax(gains, axis=1)
