"""The two-firm seeding game: discounted consumption, firm payoffs, Nash
seeding, and epsilon-equilibrium certificates for sparse seed sets.

A firm's payoff is its discounted revenue minus the quadratic seeding cost.
Revenue counts the seeded period as sold consumption, so the payoff of the
x_bar firm is

    U(s_bar, s_under) = price * (1' s_bar + 1' y_bar) - ||s_bar||^2 / 2,

with y_bar = sum_{k>=1} delta^k x_bar(k) from the best-response dynamics.
The payoff is affine in the seedings with coefficients price * c_new (own)
and price * c_cross (rival), which yields the closed forms used here.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np
import scipy.linalg

from .centrality import CentralityBundle, _attenuated_solve, biproduct_centrality
from .dynamics import SeedingPair
from .graph import MarketParams, WeightedDigraph, _check_id, ensure_assumptions

_DEFAULT_TOL = 1e-10
_DENSE_SOLVER_MAX_N = 2000


@dataclass(frozen=True)
class SeedSet:
    """A set of seeded agents (1-based ids) inside a graph of n agents."""

    members: tuple[int, ...]
    n: int

    def __post_init__(self):
        ids = sorted({_check_id(i, self.n) for i in self.members})
        if len(ids) != len(self.members):
            raise ValueError("seed set contains duplicate ids")
        object.__setattr__(self, "members", tuple(ids))

    @classmethod
    def of(cls, ids: Iterable[int], n: int) -> "SeedSet":
        """Build from any id iterable, collapsing repeats."""
        return cls(members=tuple(sorted({int(i) for i in ids})), n=n)

    @classmethod
    def empty(cls, n: int) -> "SeedSet":
        return cls(members=(), n=n)

    @classmethod
    def full(cls, n: int) -> "SeedSet":
        return cls(members=tuple(range(1, n + 1)), n=n)

    @property
    def size(self) -> int:
        return len(self.members)

    def indicator(self) -> np.ndarray:
        """0/1 vector, 0-based."""
        ind = np.zeros(self.n)
        if self.members:
            ind[np.asarray(self.members) - 1] = 1.0
        return ind

    def mask(self) -> np.ndarray:
        return self.indicator() > 0


@dataclass(frozen=True)
class UtilityBreakdown:
    """A firm's payoff split into gross revenue, seeding cost, and the affine
    components of the gross term (zero-seeding baseline, own-seed linear term,
    rival-seed linear term)."""

    gross: float
    seeding_cost: float
    net: float
    baseline: float
    own_term: float
    cross_term: float


@dataclass(frozen=True)
class EpsilonReport:
    """Equilibrium quality of a pair of restricted seed sets.

    tau_bar / tau_under are the closed-form relative deviation-gain bounds for
    the two firms; epsilon_paper is their maximum.  epsilon_exact_a/b are the
    exact relative gains (best deviation payoff over candidate payoff, both
    net of seeding costs), reported separately and flagged None when the
    candidate payoff is nonpositive.  The two quantities answer slightly
    different questions and are never reconciled.
    """

    set_bar: SeedSet
    set_under: SeedSet
    tau_bar: float
    tau_under: float
    epsilon_paper: float
    epsilon_exact_a: float | None
    epsilon_exact_b: float | None
    residual_bar: float
    residual_under: float


class DiscountedSolver:
    """Prefactorized closed-form evaluator for repeated payoff queries.

    The 2n-dimensional discounted-consumption system block-diagonalizes under
    the sum/difference transform into two independent n x n systems with
    attenuations delta*(1+beta) and delta*(1-beta); no 2n x 2n matrix is ever
    materialized.  Dense-capable sizes cache LU factors of both systems.
    """

    def __init__(self, graph: WeightedDigraph, params: MarketParams,
                 tol: float = _DEFAULT_TOL):
        ensure_assumptions(graph, params)
        self.graph = graph
        self.params = params
        self.tol = tol
        self._q_plus = params.delta * (1.0 + params.beta)
        self._q_minus = params.delta * (1.0 - params.beta)
        self._r = params.delta * (params.alpha - params.price) / (1.0 - params.delta)
        n = graph.n
        self._lu_plus = self._lu_minus = None
        if n <= _DENSE_SOLVER_MAX_N:
            dense = graph.to_dense()
            eye = np.eye(n)
            self._lu_plus = scipy.linalg.lu_factor(eye - self._q_plus * dense)
            if params.beta == 0.0:
                self._lu_minus = self._lu_plus
            else:
                self._lu_minus = scipy.linalg.lu_factor(eye - self._q_minus * dense)

    def _solve(self, which: str, rhs: np.ndarray) -> np.ndarray:
        coeff = self._q_plus if which == "plus" else self._q_minus
        lu = self._lu_plus if which == "plus" else self._lu_minus
        if lu is not None:
            x = scipy.linalg.lu_solve(lu, rhs)
            matrix = self.graph.matrix
            residual = np.abs(rhs - (x - coeff * (matrix @ x))).max()
            if residual > self.tol:
                x, _ = _attenuated_solve(matrix, coeff, rhs, self.tol)
            return x
        x, _ = _attenuated_solve(self.graph.matrix, coeff, rhs, self.tol)
        return x

    def consumption(self, seeding: SeedingPair) -> tuple[np.ndarray, np.ndarray]:
        """Discounted sums (y_bar, y_under) with y = sum_{k>=1} delta^k x(k)."""
        if seeding.n != self.graph.n:
            raise ValueError(f"seeding has {seeding.n} agents, graph has {self.graph.n}")
        matrix = self.graph.matrix
        ones = np.ones(self.graph.n)
        rhs_sum = 2.0 * self._r * ones + self._q_plus * (matrix @ (seeding.s_bar + seeding.s_under))
        u = self._solve("plus", rhs_sum)
        diff_seed = seeding.s_bar - seeding.s_under
        if np.any(diff_seed):
            rhs_diff = self._q_minus * (matrix @ diff_seed)
            v = self._solve("minus", rhs_diff)
        else:
            v = np.zeros(self.graph.n)
        return 0.5 * (u + v), 0.5 * (u - v)

    def gross_revenues(self, seeding: SeedingPair) -> tuple[float, float]:
        """price * (seeded period + discounted consumption), per firm."""
        y_bar, y_under = self.consumption(seeding)
        p = self.params.price
        return (p * (float(seeding.s_bar.sum()) + float(y_bar.sum())),
                p * (float(seeding.s_under.sum()) + float(y_under.sum())))


def discounted_consumption(graph: WeightedDigraph, params: MarketParams,
                           seeding: SeedingPair,
                           tol: float = _DEFAULT_TOL) -> tuple[np.ndarray, np.ndarray]:
    """Closed-form discounted consumption sums (y_bar, y_under)."""
    return DiscountedSolver(graph, params, tol).consumption(seeding)


def _baseline(params: MarketParams, bundle: CentralityBundle) -> float:
    """Zero-seeding payoff: price * delta * (alpha - price) / (1 - delta) * 1'b."""
    r = params.delta * (params.alpha - params.price) / (1.0 - params.delta)
    return params.price * r * float(bundle.b.sum())


def _require_bundle(graph, params, bundle, tol) -> CentralityBundle:
    if bundle is None:
        return biproduct_centrality(graph, params, tol)
    if bundle.n != graph.n:
        raise ValueError(f"bundle has {bundle.n} agents, graph has {graph.n}")
    return bundle


def firm_utility(graph: WeightedDigraph, params: MarketParams, seeding: SeedingPair,
                 bundle: CentralityBundle | None = None,
                 solver: DiscountedSolver | None = None,
                 tol: float = _DEFAULT_TOL) -> tuple[UtilityBreakdown, UtilityBreakdown]:
    """Both firms' payoff breakdowns at the given seeding pair.

    gross comes from the full linear solve; the affine components satisfy
    gross = baseline + own_term + cross_term up to solver residual, with
    own_term = price * c_new . s_own and cross_term = price * c_cross . s_rival.
    """
    if solver is None:
        solver = DiscountedSolver(graph, params, tol)
    bundle = _require_bundle(graph, params, bundle, tol)
    gross_a, gross_b = solver.gross_revenues(seeding)
    p = params.price
    base = _baseline(params, bundle)
    cost_a = 0.5 * float(seeding.s_bar @ seeding.s_bar)
    cost_b = 0.5 * float(seeding.s_under @ seeding.s_under)
    breakdown_a = UtilityBreakdown(
        gross=gross_a, seeding_cost=cost_a, net=gross_a - cost_a,
        baseline=base,
        own_term=p * float(bundle.c_new @ seeding.s_bar),
        cross_term=p * float(bundle.c_cross @ seeding.s_under))
    breakdown_b = UtilityBreakdown(
        gross=gross_b, seeding_cost=cost_b, net=gross_b - cost_b,
        baseline=base,
        own_term=p * float(bundle.c_new @ seeding.s_under),
        cross_term=p * float(bundle.c_cross @ seeding.s_bar))
    return breakdown_a, breakdown_b


def utility_gradient(graph: WeightedDigraph, params: MarketParams, seeding: SeedingPair,
                     firm: str = "a", bundle: CentralityBundle | None = None,
                     tol: float = _DEFAULT_TOL) -> np.ndarray:
    """Gradient of a firm's payoff in its own seeding: price * c_new - s_own.

    Does not depend on the rival's seeding in any way.
    """
    if firm not in ("a", "b"):
        raise ValueError(f"firm must be 'a' or 'b', got {firm!r}")
    if seeding.n != graph.n:
        raise ValueError(f"seeding has {seeding.n} agents, graph has {graph.n}")
    bundle = _require_bundle(graph, params, bundle, tol)
    own = seeding.s_bar if firm == "a" else seeding.s_under
    return params.price * bundle.c_new - own


def nash_seeding(graph: WeightedDigraph, params: MarketParams,
                 bundle: CentralityBundle | None = None,
                 tol: float = _DEFAULT_TOL) -> SeedingPair:
    """The unique symmetric Nash seeding: both firms seed price * c_new."""
    bundle = _require_bundle(graph, params, bundle, tol)
    target = params.price * bundle.c_new
    return SeedingPair(s_bar=target.copy(), s_under=target.copy())


def best_response_gain(graph: WeightedDigraph, params: MarketParams, own_set: SeedSet,
                       bundle: CentralityBundle | None = None,
                       tol: float = _DEFAULT_TOL) -> float:
    """Payoff left on the table by seeding price * c_new only inside own_set:
    the best unrestricted deviation gains price^2 / 2 * sum_{i not in S} c_i^2,
    independent of the rival's seeding."""
    if own_set.n != graph.n:
        raise ValueError(f"seed set is over {own_set.n} agents, graph has {graph.n}")
    bundle = _require_bundle(graph, params, bundle, tol)
    outside = ~own_set.mask()
    c2 = bundle.c_new ** 2
    return 0.5 * params.price ** 2 * float(c2[outside].sum())


def restricted_nash_seeding(params: MarketParams, bundle: CentralityBundle,
                            set_bar: SeedSet, set_under: SeedSet) -> SeedingPair:
    """price * c_new zeroed outside each firm's allowed set."""
    c = bundle.c_new
    return SeedingPair(s_bar=params.price * c * set_bar.indicator(),
                       s_under=params.price * c * set_under.indicator())


def _tau(params: MarketParams, bundle: CentralityBundle, own_mask: np.ndarray) -> float:
    c2 = bundle.c_new ** 2
    numerator = float(c2[~own_mask].sum())
    kappa = (params.delta * (params.alpha - params.price)
             / (2.0 * params.price * (1.0 - params.delta)))
    denominator = kappa * float(bundle.b.sum()) + float(c2[own_mask].sum())
    if denominator == 0.0:
        return float("inf") if numerator > 0.0 else 0.0
    return numerator / denominator


def epsilon_for_sets(graph: WeightedDigraph, params: MarketParams,
                     set_bar: SeedSet, set_under: SeedSet,
                     bundle: CentralityBundle | None = None,
                     solver: DiscountedSolver | None = None,
                     tol: float = _DEFAULT_TOL) -> EpsilonReport:
    """Epsilon-equilibrium certificate for seeding price * c_new restricted to
    the given sets.

    The closed-form bounds tau use
    sum_{i not in S} c_i^2 / (delta (alpha - price) / (2 price (1 - delta)) 1'b
    + sum_{i in S} c_i^2); the exact relative gains divide the best deviation's
    net payoff improvement by the candidate's net payoff.
    """
    for label, s in (("set_bar", set_bar), ("set_under", set_under)):
        if s.n != graph.n:
            raise ValueError(f"{label} is over {s.n} agents, graph has {graph.n}")
    bundle = _require_bundle(graph, params, bundle, tol)
    if solver is None:
        solver = DiscountedSolver(graph, params, tol)
    mask_bar = set_bar.mask()
    mask_under = set_under.mask()
    tau_bar = _tau(params, bundle, mask_bar)
    tau_under = _tau(params, bundle, mask_under)

    candidate = restricted_nash_seeding(params, bundle, set_bar, set_under)
    payoff_a, payoff_b = firm_utility(graph, params, candidate,
                                      bundle=bundle, solver=solver, tol=tol)
    gain_a = best_response_gain(graph, params, set_bar, bundle=bundle, tol=tol)
    gain_b = best_response_gain(graph, params, set_under, bundle=bundle, tol=tol)
    exact_a = gain_a / payoff_a.net if payoff_a.net > 0.0 else None
    exact_b = gain_b / payoff_b.net if payoff_b.net > 0.0 else None

    c2 = bundle.c_new ** 2
    total = float(c2.sum())
    return EpsilonReport(
        set_bar=set_bar, set_under=set_under,
        tau_bar=tau_bar, tau_under=tau_under,
        epsilon_paper=max(tau_bar, tau_under),
        epsilon_exact_a=exact_a, epsilon_exact_b=exact_b,
        residual_bar=float(c2[~mask_bar].sum()) / total,
        residual_under=float(c2[~mask_under].sum()) / total)


def sparsify(graph: WeightedDigraph, params: MarketParams, epsilon_target: float,
             bundle: CentralityBundle | None = None,
             tol: float = _DEFAULT_TOL) -> tuple[SeedSet, SeedSet, EpsilonReport]:
    """Smallest greedy symmetric seed set with epsilon_paper <= epsilon_target.

    Agents enter by descending c_new^2, ties broken by ascending id.  Both
    firms share the set; each added agent strictly lowers tau, so the loop
    terminates (the full set reaches tau = 0).
    """
    if not (np.isfinite(epsilon_target) and epsilon_target >= 0):
        raise ValueError(f"epsilon_target must be a nonnegative real, got {epsilon_target}")
    bundle = _require_bundle(graph, params, bundle, tol)
    c2 = bundle.c_new ** 2
    order = np.lexsort((np.arange(graph.n), -c2))
    kappa = (params.delta * (params.alpha - params.price)
             / (2.0 * params.price * (1.0 - params.delta)))
    base = kappa * float(bundle.b.sum())
    inside = 0.0
    outside = float(c2.sum())
    count = 0
    while count < graph.n:
        denominator = base + inside
        tau = (outside / denominator if denominator > 0.0
               else (float("inf") if outside > 0.0 else 0.0))
        if tau <= epsilon_target:
            break
        picked = order[count]
        inside += float(c2[picked])
        outside -= float(c2[picked])
        count += 1
    members = tuple(sorted(int(i) + 1 for i in order[:count]))
    seed_set = SeedSet.of(members, graph.n)
    report = epsilon_for_sets(graph, params, seed_set, seed_set, bundle=bundle, tol=tol)
    return seed_set, seed_set, report


def nash_deviation_check(graph: WeightedDigraph, params: MarketParams,
                         samples: int = 10_000, seed: int = 0,
                         bundle: CentralityBundle | None = None,
                         tol: float = _DEFAULT_TOL) -> float:
    """Largest net-payoff improvement any sampled unilateral deviation achieves
    against the Nash seeding (should be <= solver noise).

    Candidates mix local perturbations of the optimum, global uniform draws,
    and sparse profiles; they are generated by a seeded generator and
    evaluated through the full linear solve in batches, so the check is
    deterministic in (graph, params, samples, seed).
    """
    bundle = _require_bundle(graph, params, bundle, tol)
    solver = DiscountedSolver(graph, params, tol)
    star = params.price * bundle.c_new
    seeding_star = SeedingPair(s_bar=star.copy(), s_under=star.copy())
    net_star = _net_pair(solver, params, seeding_star)

    rng = np.random.default_rng(seed)
    n = graph.n
    scale = params.price * float(bundle.c_new.max())
    matrix = graph.matrix
    ones = np.ones(n)
    r = params.delta * (params.alpha - params.price) / (1.0 - params.delta)
    q_plus = params.delta * (1.0 + params.beta)
    q_minus = params.delta * (1.0 - params.beta)
    p = params.price

    # Whichever firm deviates, its own discounted consumption is (u + v)/2
    # with u from the sum system and v from the difference system taken
    # deviator-minus-opponent, so one evaluation loop serves both firms.
    worst = -np.inf
    for firm_net_star in net_star:
        thirds = samples // 3
        local = np.clip(star[:, None] + 0.25 * scale * rng.standard_normal((n, thirds)),
                        0.0, None)
        uniform = 2.0 * scale * rng.random((n, thirds))
        sparse = 2.0 * scale * rng.random((n, samples - 2 * thirds))
        sparse *= rng.random(sparse.shape) < 0.3
        candidates = np.hstack([local, uniform, sparse])
        for start in range(0, candidates.shape[1], 512):
            block = candidates[:, start:start + 512]
            rhs_sum = (2.0 * r * ones)[:, None] + q_plus * (matrix @ (block + star[:, None]))
            rhs_diff = q_minus * (matrix @ (block - star[:, None]))
            u = _solve_columns(solver, "plus", rhs_sum)
            v = _solve_columns(solver, "minus", rhs_diff)
            y_dev = 0.5 * (u + v)
            net_dev = (p * (block.sum(axis=0) + y_dev.sum(axis=0))
                       - 0.5 * (block ** 2).sum(axis=0))
            worst = max(worst, float((net_dev - firm_net_star).max()))
    return worst


def _net_pair(solver: DiscountedSolver, params: MarketParams,
              seeding: SeedingPair) -> tuple[float, float]:
    gross_a, gross_b = solver.gross_revenues(seeding)
    return (gross_a - 0.5 * float(seeding.s_bar @ seeding.s_bar),
            gross_b - 0.5 * float(seeding.s_under @ seeding.s_under))


def _solve_columns(solver: DiscountedSolver, which: str, rhs: np.ndarray) -> np.ndarray:
    if (solver._lu_plus if which == "plus" else solver._lu_minus) is not None:
        lu = solver._lu_plus if which == "plus" else solver._lu_minus
        return scipy.linalg.lu_solve(lu, rhs)
    out = np.empty_like(rhs)
    for col in range(rhs.shape[1]):
        out[:, col] = solver._solve(which, rhs[:, col])
    return out
