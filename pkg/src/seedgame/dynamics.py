"""Myopic consumption dynamics for two competing products.

Each period every agent best-responds to the previous period's consumption
profile, which makes the update linear:

    x_bar(k+1)   = (alpha - price) 1 + G x_bar(k)   + beta G x_under(k)
    x_under(k+1) = (alpha - price) 1 + G x_under(k) + beta G x_bar(k)

with x(0) given by the firms' seedings.  Truncated discounted sums come with
a certified bound on the omitted mass.
"""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .graph import (MarketParams, WeightedDigraph, _as_readonly, _check_id,
                    ensure_assumptions)

_DEFAULT_TAIL_TOL = 1e-10
_MAX_AUTO_HORIZON = 10_000_000


class TailCertificationError(RuntimeError):
    """No certified truncation bound is available for this graph/params pair."""


class NegativeStateError(ValueError):
    """Consumption states must be entrywise nonnegative."""


def _validated_vector(values, n: int, label: str) -> np.ndarray:
    arr = np.asarray(values, dtype=float)
    if arr.shape != (n,):
        raise ValueError(f"{label} must have shape ({n},), got {arr.shape}")
    if not np.isfinite(arr).all():
        raise ValueError(f"{label} contains non-finite entries")
    if (arr < 0).any():
        raise NegativeStateError(f"{label} has negative entries")
    return _as_readonly(arr)


@dataclass(frozen=True)
class SeedingPair:
    """Nonnegative seeding vectors for the two firms (0-based, agent i+1)."""

    s_bar: np.ndarray
    s_under: np.ndarray

    def __post_init__(self):
        s_bar = np.asarray(self.s_bar, dtype=float)
        n = s_bar.shape[0] if s_bar.ndim == 1 else -1
        if n < 1:
            raise ValueError("seedings must be nonempty 1-d vectors")
        object.__setattr__(self, "s_bar", _validated_vector(self.s_bar, n, "s_bar"))
        object.__setattr__(self, "s_under", _validated_vector(self.s_under, n, "s_under"))

    @classmethod
    def zeros(cls, n: int) -> "SeedingPair":
        return cls(np.zeros(n), np.zeros(n))

    @property
    def n(self) -> int:
        return self.s_bar.shape[0]


@dataclass(frozen=True)
class ConsumptionState:
    """Consumption profile of both products at period k."""

    x_bar: np.ndarray
    x_under: np.ndarray
    k: int

    def __post_init__(self):
        x_bar = np.asarray(self.x_bar, dtype=float)
        n = x_bar.shape[0] if x_bar.ndim == 1 else -1
        if n < 1:
            raise ValueError("states must be nonempty 1-d vectors")
        object.__setattr__(self, "x_bar", _validated_vector(self.x_bar, n, "x_bar"))
        object.__setattr__(self, "x_under", _validated_vector(self.x_under, n, "x_under"))
        if self.k < 0:
            raise ValueError(f"period index must be nonnegative, got {self.k}")

    @property
    def n(self) -> int:
        return self.x_bar.shape[0]


@dataclass(frozen=True)
class Trajectory:
    """Simulated path up to the horizon, with truncated discounted sums
    sum_{k=1..T} delta^k x(k) per product and a certified tail bound on the
    omitted k > T mass (max norm, per entry)."""

    states: tuple[ConsumptionState, ...]
    discounted_bar: np.ndarray
    discounted_under: np.ndarray
    tail_bound: float
    horizon: int

    @property
    def discounted_sums(self) -> tuple[np.ndarray, np.ndarray]:
        return (self.discounted_bar, self.discounted_under)


def agent_utility(i: int, x: float, state: ConsumptionState,
                  graph: WeightedDigraph, params: MarketParams,
                  firm: str = "a") -> float:
    """Per-period payoff of agent i consuming x of the given firm's product
    while the rest of the network consumes ``state``.

    u = alpha x - x^2 / 2 + x * sum_j g_ij (own_j + beta other_j) - price x,
    where own/other select the firm's own product column of the state.
    """
    idx = _check_id(i, graph.n) - 1
    if firm not in ("a", "b"):
        raise ValueError(f"firm must be 'a' or 'b', got {firm!r}")
    if state.n != graph.n:
        raise ValueError(f"state has {state.n} agents, graph has {graph.n}")
    own, other = ((state.x_bar, state.x_under) if firm == "a"
                  else (state.x_under, state.x_bar))
    row = graph.matrix.getrow(idx)
    social = float((row @ (own + params.beta * other))[0])
    x = float(x)
    return (params.alpha - params.price) * x - 0.5 * x * x + x * social


def best_response_step(state: ConsumptionState, graph: WeightedDigraph,
                       params: MarketParams) -> ConsumptionState:
    """One simultaneous best-response update of both consumption profiles."""
    if state.n != graph.n:
        raise ValueError(f"state has {state.n} agents, graph has {graph.n}")
    base = params.alpha - params.price
    matrix = graph.matrix
    g_bar = matrix @ state.x_bar
    g_under = matrix @ state.x_under
    x_bar = base + g_bar + params.beta * g_under
    x_under = base + g_under + params.beta * g_bar
    return ConsumptionState(x_bar=x_bar, x_under=x_under, k=state.k + 1)


def _tail_certificate(graph: WeightedDigraph, params: MarketParams,
                      seeding: SeedingPair, horizon: int) -> float:
    """Certified bound on sum_{k > T} delta^k ||x(k)||_inf.

    Per-entry growth is controlled by mu = (1 + beta) * max weighted
    in-degree: ||x(k+1)||_inf <= (alpha - price) + mu ||x(k)||_inf.  When
    mu < 1 the trajectory is capped by a steady-state bound; when only
    delta * mu < 1 the geometric growth is absorbed into the discounting.
    """
    delta = params.delta
    base = params.alpha - params.price
    mu = (1.0 + params.beta) * (float(graph.in_degrees.max()) if graph.edge_count else 0.0)
    x0 = max(float(seeding.s_bar.max()), float(seeding.s_under.max()))
    t1 = horizon + 1
    if mu < 1.0:
        cap = max(x0, base / (1.0 - mu)) if mu > 0 else max(x0, base)
        return delta ** t1 / (1.0 - delta) * cap
    gamma = delta * mu
    if gamma >= 1.0:
        raise TailCertificationError(
            f"cannot certify the truncation: delta * (1 + beta) * max in-degree "
            f"= {gamma:.6g} >= 1")
    geo_gamma = gamma ** t1 / (1.0 - gamma)
    if mu == 1.0:
        # ||x(k)||_inf <= x0 + k * base
        k_tail = delta ** t1 * (t1 * (1.0 - delta) + delta) / (1.0 - delta) ** 2
        return x0 * delta ** t1 / (1.0 - delta) + base * k_tail
    # ||x(k)||_inf <= mu^k x0 + base (mu^k - 1) / (mu - 1)
    return x0 * geo_gamma + base / (mu - 1.0) * (geo_gamma - delta ** t1 / (1.0 - delta))


def auto_horizon(graph: WeightedDigraph, params: MarketParams, seeding: SeedingPair,
                 tail_tol: float = _DEFAULT_TAIL_TOL) -> int:
    """Smallest horizon whose certified tail bound is at most tail_tol."""
    if tail_tol <= 0:
        raise ValueError("tail_tol must be positive")
    lo = 1
    if _tail_certificate(graph, params, seeding, lo) <= tail_tol:
        return lo
    hi = 2
    while _tail_certificate(graph, params, seeding, hi) > tail_tol:
        hi *= 2
        if hi > _MAX_AUTO_HORIZON:
            raise TailCertificationError(
                f"tail bound stays above {tail_tol:.3g} below horizon {_MAX_AUTO_HORIZON}")
    lo = hi // 2
    while lo + 1 < hi:
        mid = (lo + hi) // 2
        if _tail_certificate(graph, params, seeding, mid) <= tail_tol:
            hi = mid
        else:
            lo = mid
    return hi


def simulate(graph: WeightedDigraph, params: MarketParams, seeding: SeedingPair,
             horizon: int | None = None, tail_tol: float = _DEFAULT_TAIL_TOL,
             store_states: bool = True) -> Trajectory:
    """Run the best-response dynamics from the given seedings.

    With horizon=None the horizon is chosen so the certified tail bound drops
    to tail_tol.  States are stored unless store_states=False (sums-only
    streaming for large runs); discounted sums always cover k = 1..horizon.
    """
    ensure_assumptions(graph, params)
    if seeding.n != graph.n:
        raise ValueError(f"seeding has {seeding.n} agents, graph has {graph.n}")
    if horizon is None:
        horizon = auto_horizon(graph, params, seeding, tail_tol)
    if horizon < 1:
        raise ValueError(f"horizon must be at least 1, got {horizon}")
    state = ConsumptionState(x_bar=seeding.s_bar, x_under=seeding.s_under, k=0)
    states = [state] if store_states else []
    acc_bar = np.zeros(graph.n)
    acc_under = np.zeros(graph.n)
    discount = 1.0
    for _ in range(horizon):
        state = best_response_step(state, graph, params)
        discount *= params.delta
        acc_bar += discount * state.x_bar
        acc_under += discount * state.x_under
        if store_states:
            states.append(state)
    tail = _tail_certificate(graph, params, seeding, horizon)
    return Trajectory(states=tuple(states),
                      discounted_bar=_as_readonly(acc_bar),
                      discounted_under=_as_readonly(acc_under),
                      tail_bound=float(tail), horizon=int(horizon))


def write_trajectory_csv(trajectory: Trajectory, path) -> None:
    """Export states as CSV rows (k, node, x_bar, x_under), 1-based nodes."""
    if not trajectory.states:
        raise ValueError("trajectory was simulated without stored states")
    lines = ["k,node,x_bar,x_under"]
    for state in trajectory.states:
        for idx in range(state.n):
            lines.append(f"{state.k},{idx + 1},"
                         f"{float(state.x_bar[idx])!r},{float(state.x_under[idx])!r}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
