"""Weighted influence digraphs: representation, spectral diagnostics, model
validation, synthetic generators, and edge-list I/O.

Orientation convention: the adjacency entry ``g[i][j]`` is the influence of
agent ``j`` on agent ``i``, so a row sum is an agent's weighted in-degree
(how much it listens) and a column sum its weighted out-degree (how much it
is listened to).  Agent ids are 1-based in every public interface; numpy
vectors elsewhere in the package are 0-based, index ``i`` holding agent
``i + 1``.
"""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components

Edge = tuple[int, int, float]

_DEFAULT_TOL = 1e-10


class GraphError(ValueError):
    """Invalid graph data (ids, weights, duplicates)."""


class EdgeListError(GraphError):
    """Edge-list violation, optionally tied to a file line."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class MalformedLineError(EdgeListError):
    """Line does not parse as a header or an edge record."""


class DuplicateEdgeError(EdgeListError):
    """The same ordered (influenced, influencer) pair appears twice."""


class NegativeWeightError(EdgeListError):
    """Influence weights must be nonnegative."""


class SelfLoopError(EdgeListError):
    """An agent cannot influence itself."""


class AssumptionError(RuntimeError):
    """A model assumption required by the requested operation fails."""

    def __init__(self, message: str, *, rho: float | None = None,
                 bound: float | None = None, report: "ValidationReport | None" = None):
        super().__init__(message)
        self.rho = rho
        self.bound = bound
        self.report = report


class PowerIterationError(RuntimeError):
    """Spectral-radius iteration did not converge within the budget."""

    def __init__(self, message: str, *, estimate: float, cap: float, iterations: int):
        super().__init__(message)
        self.estimate = estimate
        self.cap = cap
        self.iterations = iterations


def _as_readonly(arr: np.ndarray) -> np.ndarray:
    arr = np.ascontiguousarray(arr, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class MarketParams:
    """Market primitives shared by both firms.

    alpha is the stand-alone utility coefficient, price the per-unit price,
    beta the cross-product spillover in [0, 1), delta the discount factor in
    (0, 1).  alpha >= price is required so unseeded consumption stays
    nonnegative.
    """

    alpha: float
    price: float
    beta: float
    delta: float

    def __post_init__(self):
        if not np.isfinite([self.alpha, self.price, self.beta, self.delta]).all():
            raise ValueError("market parameters must be finite")
        if self.price <= 0:
            raise ValueError(f"price must be positive, got {self.price}")
        if not 0 <= self.beta < 1:
            raise ValueError(f"beta must lie in [0, 1), got {self.beta}")
        if not 0 < self.delta < 1:
            raise ValueError(f"delta must lie in (0, 1), got {self.delta}")
        if self.alpha < self.price:
            raise ValueError(
                f"alpha must be at least price (alpha={self.alpha}, price={self.price})")

    @property
    def spectral_bound(self) -> float:
        """Largest admissible spectral radius, 1 / (delta * (1 + beta))."""
        return 1.0 / (self.delta * (1.0 + self.beta))


@dataclass(frozen=True)
class CorePeripheryParams:
    """Core-periphery layout: chi communities of m agents, one role model each.

    Community r occupies agents (r-1)*m+1 .. r*m; its role model is agent r*m.
    Every periphery agent has a single in-edge of weight g from its role
    model, and the role models form a directed cycle of weight g.  m = 1
    degenerates to a plain chi-cycle.
    """

    chi: int
    m: int
    g: float

    def __post_init__(self):
        if self.chi < 2:
            raise ValueError(f"chi must be at least 2, got {self.chi}")
        if self.m < 1:
            raise ValueError(f"m must be at least 1, got {self.m}")
        if not (np.isfinite(self.g) and self.g >= 0):
            raise ValueError(f"g must be a nonnegative real, got {self.g}")

    @property
    def n(self) -> int:
        return self.chi * self.m

    def role_models(self) -> tuple[int, ...]:
        """1-based ids of the role models (one per community)."""
        return tuple(r * self.m for r in range(1, self.chi + 1))


class WeightedDigraph:
    """Immutable weighted digraph over agents 1..n with nonnegative weights.

    Edges are (influenced, influencer, weight) triples with 1-based ids.
    Self-loops and duplicate ordered pairs are rejected.
    """

    __slots__ = ("n", "edges", "_matrix", "_in_deg", "_out_deg", "_rho_cache")

    def __init__(self, n: int, edges: Iterable[Edge] = ()):
        if not isinstance(n, (int, np.integer)) or n < 1:
            raise GraphError(f"node count must be a positive integer, got {n!r}")
        canon: list[Edge] = []
        seen: set[tuple[int, int]] = set()
        for edge in edges:
            try:
                i, j, w = edge
                i = int(i); j = int(j); w = float(w)
            except (TypeError, ValueError) as exc:
                raise GraphError(f"malformed edge {edge!r}") from exc
            if not 1 <= i <= n or not 1 <= j <= n:
                raise GraphError(f"edge ({i}, {j}) uses ids outside 1..{n}")
            if i == j:
                raise SelfLoopError(f"agent {i} cannot influence itself")
            if not (np.isfinite(w) and w >= 0):
                raise NegativeWeightError(f"edge ({i}, {j}) has invalid weight {w!r}")
            if (i, j) in seen:
                raise DuplicateEdgeError(f"duplicate edge ({i}, {j})")
            seen.add((i, j))
            if w > 0:  # zero weight means no influence; keep the matrix sparse
                canon.append((i, j, w))
        canon.sort(key=lambda e: (e[0], e[1]))
        self_set = lambda name, value: object.__setattr__(self, name, value)
        self_set("n", int(n))
        self_set("edges", tuple(canon))
        rows = np.fromiter((e[0] - 1 for e in canon), dtype=np.int64, count=len(canon))
        cols = np.fromiter((e[1] - 1 for e in canon), dtype=np.int64, count=len(canon))
        vals = np.fromiter((e[2] for e in canon), dtype=float, count=len(canon))
        matrix = sp.csr_matrix((vals, (rows, cols)), shape=(n, n))
        matrix.data.setflags(write=False)
        self_set("_matrix", matrix)
        self_set("_in_deg", _as_readonly(np.asarray(matrix.sum(axis=1)).ravel()))
        self_set("_out_deg", _as_readonly(np.asarray(matrix.sum(axis=0)).ravel()))
        self_set("_rho_cache", {})

    def __setattr__(self, name, value):
        raise AttributeError("WeightedDigraph is immutable")

    @classmethod
    def empty(cls, n: int) -> "WeightedDigraph":
        return cls(n, ())

    @classmethod
    def from_matrix(cls, matrix: np.ndarray) -> "WeightedDigraph":
        """Build from a dense n x n array; nonzero (i, j) becomes an edge."""
        arr = np.asarray(matrix, dtype=float)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise GraphError(f"adjacency must be square, got shape {arr.shape}")
        rows, cols = np.nonzero(arr)
        edges = [(int(i) + 1, int(j) + 1, float(arr[i, j])) for i, j in zip(rows, cols)]
        return cls(arr.shape[0], edges)

    @property
    def matrix(self) -> sp.csr_matrix:
        """Sparse adjacency (row = influenced, column = influencer). Do not mutate."""
        return self._matrix

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    @property
    def in_degrees(self) -> np.ndarray:
        """Weighted in-degree per agent (row sums), 0-based."""
        return self._in_deg

    @property
    def out_degrees(self) -> np.ndarray:
        """Weighted out-degree per agent (column sums), 0-based."""
        return self._out_deg

    def in_degree(self, i: int) -> float:
        return float(self._in_deg[_check_id(i, self.n) - 1])

    def out_degree(self, i: int) -> float:
        return float(self._out_deg[_check_id(i, self.n) - 1])

    def to_dense(self) -> np.ndarray:
        return self._matrix.toarray()

    def __eq__(self, other) -> bool:
        if not isinstance(other, WeightedDigraph):
            return NotImplemented
        return self.n == other.n and self.edges == other.edges

    def __hash__(self) -> int:
        return hash((self.n, self.edges))

    def __repr__(self) -> str:
        return f"WeightedDigraph(n={self.n}, edges={self.edge_count})"


def _check_id(i, n: int) -> int:
    if not isinstance(i, (int, np.integer)) or isinstance(i, bool):
        raise GraphError(f"agent id must be an integer, got {i!r}")
    if not 1 <= i <= n:
        raise GraphError(f"agent id {i} outside 1..{n}")
    return int(i)


def row_sum_cap(graph: WeightedDigraph) -> float:
    """Certified upper bound on the spectral radius: min of the largest
    weighted in-degree and the largest weighted out-degree."""
    if graph.edge_count == 0:
        return 0.0
    return float(min(graph.in_degrees.max(), graph.out_degrees.max()))


def _power_iteration(sub: sp.csr_matrix, tol: float, max_iter: int, cap: float) -> float:
    # Shifted iteration keeps the chain aperiodic so the Collatz-Wielandt
    # bracket [min_i (Ax)_i / x_i, max_i (Ax)_i / x_i] closes on the Perron
    # root; the shift cancels out of the returned estimate.
    k = sub.shape[0]
    shift = 0.05 * max(float(np.asarray(sub.sum(axis=1)).max()), 1e-300)
    x = np.ones(k)
    lo = 0.0
    hi = np.inf
    for it in range(1, max_iter + 1):
        y = sub @ x + shift * x
        ratios = y / x
        lo = float(ratios.min())
        hi = float(ratios.max())
        if hi - lo <= 2.0 * tol:
            return 0.5 * (hi + lo) - shift
        x = y / y.sum()
    raise PowerIterationError(
        f"power iteration did not converge in {max_iter} steps "
        f"(bracket [{lo - shift:.6g}, {hi - shift:.6g}], cap {cap:.6g})",
        estimate=0.5 * (hi + lo) - shift, cap=cap, iterations=max_iter)


def spectral_radius(graph: WeightedDigraph, tol: float = _DEFAULT_TOL,
                    max_iter: int = 100_000) -> float:
    """Spectral radius of the influence matrix, accurate to tol.

    Decomposes the graph into strongly connected components (the spectrum is
    the union over the diagonal blocks), runs a shifted power iteration on
    each nontrivial component from an all-ones start, and caps the result by
    the row/column-sum bound.  Acyclic graphs return exactly 0.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    cached = graph._rho_cache.get("rho")
    if cached is not None and cached[0] <= tol:
        return cached[1]
    cap = row_sum_cap(graph)
    if cap == 0.0:
        graph._rho_cache["rho"] = (tol, 0.0)
        return 0.0
    matrix = graph.matrix
    _, labels = connected_components(matrix, directed=True, connection="strong")
    best = 0.0
    order = np.argsort(labels, kind="stable")
    sorted_labels = labels[order]
    boundaries = np.flatnonzero(np.diff(sorted_labels)) + 1
    for members in np.split(order, boundaries):
        if members.size < 2:
            continue  # singleton without self-loop contributes eigenvalue 0
        sub = matrix[members][:, members]
        best = max(best, _power_iteration(sub.tocsr(), tol, max_iter, cap))
    result = float(min(best, cap))
    graph._rho_cache["rho"] = (tol, result)
    return result


@dataclass(frozen=True)
class ValidationCheck:
    name: str
    passed: bool
    detail: str


@dataclass(frozen=True)
class ValidationReport:
    """Outcome of the model-assumption checks for a (graph, params) pair."""

    checks: tuple[ValidationCheck, ...]
    rho: float
    bound: float
    margin: float

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> tuple[ValidationCheck, ...]:
        return tuple(c for c in self.checks if not c.passed)

    def summary(self) -> str:
        lines = [f"{'pass' if c.passed else 'FAIL'} {c.name}: {c.detail}" for c in self.checks]
        return "\n".join(lines)


def validate_assumptions(graph: WeightedDigraph, params: MarketParams,
                         tol: float = _DEFAULT_TOL) -> ValidationReport:
    """Report-only check of the assumptions the closed forms rely on:
    (i) alpha >= price, (ii) spectral radius below 1 / (delta * (1 + beta))
    with an explicit margin, (iii) nonnegative finite weights.
    """
    rho = spectral_radius(graph, tol)
    bound = params.spectral_bound
    margin = bound - rho
    weights_ok = all(np.isfinite(w) and w >= 0 for _, _, w in graph.edges)
    checks = (
        ValidationCheck(
            "alpha_ge_price", params.alpha >= params.price,
            f"alpha={params.alpha:.12g}, price={params.price:.12g}"),
        ValidationCheck(
            "spectral_radius_below_bound", rho < bound,
            f"rho={rho:.12g}, bound={bound:.12g}, margin={margin:.12g}"),
        ValidationCheck("nonnegative_weights", weights_ok,
                        f"{graph.edge_count} edges scanned"),
    )
    return ValidationReport(checks=checks, rho=rho, bound=bound, margin=margin)


def ensure_assumptions(graph: WeightedDigraph, params: MarketParams,
                       tol: float = _DEFAULT_TOL) -> ValidationReport:
    """validate_assumptions, raising AssumptionError when any check fails."""
    report = validate_assumptions(graph, params, tol)
    if not report.passed:
        names = ", ".join(c.name for c in report.failures())
        raise AssumptionError(
            f"model assumptions violated ({names}):\n{report.summary()}",
            rho=report.rho, bound=report.bound, report=report)
    return report


def generate_core_periphery(params: CorePeripheryParams) -> WeightedDigraph:
    """Build the core-periphery graph: every agent ends up with exactly one
    in-edge of weight g, so the spectral radius equals g."""
    chi, m, g = params.chi, params.m, params.g
    edges: list[Edge] = []
    for r in range(1, chi + 1):
        role = r * m
        for i in range((r - 1) * m + 1, r * m):
            edges.append((i, role, g))
    for r in range(1, chi):
        edges.append(((r + 1) * m, r * m, g))
    edges.append((m, chi * m, g))
    return WeightedDigraph(params.n, edges)


def generate_bounded_outdegree_family(n: int, d: int, weight: float,
                                      seed: int) -> WeightedDigraph:
    """Random graph in which every agent influences at most d others, each
    with the same weight, so weighted out-degrees never exceed d * weight.
    Deterministic in (n, d, weight, seed).
    """
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    if d < 0:
        raise ValueError(f"d must be nonnegative, got {d}")
    if d > n - 1:
        raise ValueError(f"d={d} exceeds the {n - 1} available targets")
    if not (np.isfinite(weight) and weight >= 0):
        raise ValueError(f"weight must be a nonnegative real, got {weight}")
    rng = np.random.default_rng(seed)
    edges: list[Edge] = []
    for j in range(1, n + 1):
        k = int(rng.integers(0, d + 1))
        if k == 0:
            continue
        pool = np.delete(np.arange(1, n + 1), j - 1)
        targets = rng.choice(pool, size=k, replace=False)
        for t in np.sort(targets):
            edges.append((int(t), j, weight))
    return WeightedDigraph(n, edges)


def load_edge_list(path: str | Path) -> WeightedDigraph:
    """Parse an edge-list file.

    Format: '#' starts a comment (anywhere in a line); the first content line
    is ``n=<count>``; each following content line is
    ``influenced influencer weight`` (whitespace-separated).  Violations raise
    a distinct error naming the offending line.
    """
    path = Path(path)
    n: int | None = None
    edges: list[Edge] = []
    seen: set[tuple[int, int]] = set()
    with path.open("r", encoding="utf-8") as handle:
        for lineno, raw in enumerate(handle, start=1):
            text = raw.split("#", 1)[0].strip()
            if not text:
                continue
            if n is None:
                if not text.startswith("n="):
                    raise MalformedLineError(
                        f"expected header 'n=<count>', got {text!r}", line=lineno)
                try:
                    n = int(text[2:])
                except ValueError:
                    raise MalformedLineError(
                        f"header count is not an integer: {text!r}", line=lineno) from None
                if n < 1:
                    raise MalformedLineError(
                        f"node count must be positive, got {n}", line=lineno)
                continue
            fields = text.split()
            if len(fields) != 3:
                raise MalformedLineError(
                    f"expected 3 fields (influenced influencer weight), got {len(fields)}",
                    line=lineno)
            try:
                i = int(fields[0]); j = int(fields[1])
            except ValueError:
                raise MalformedLineError(
                    f"agent ids must be integers: {text!r}", line=lineno) from None
            try:
                w = float(fields[2])
            except ValueError:
                raise MalformedLineError(
                    f"weight is not a real number: {fields[2]!r}", line=lineno) from None
            if not 1 <= i <= n or not 1 <= j <= n:
                raise MalformedLineError(
                    f"agent ids ({i}, {j}) outside 1..{n}", line=lineno)
            if i == j:
                raise SelfLoopError(f"agent {i} influences itself", line=lineno)
            if not np.isfinite(w):
                raise MalformedLineError(f"weight {fields[2]!r} is not finite", line=lineno)
            if w < 0:
                raise NegativeWeightError(f"weight {w} is negative", line=lineno)
            if (i, j) in seen:
                raise DuplicateEdgeError(f"duplicate pair ({i}, {j})", line=lineno)
            seen.add((i, j))
            edges.append((i, j, w))
    if n is None:
        raise MalformedLineError("file has no 'n=<count>' header", line=1)
    return WeightedDigraph(n, edges)


def save_edge_list(graph: WeightedDigraph, path: str | Path) -> None:
    """Write the canonical edge-list form (sorted by influenced, influencer).

    Weights use shortest round-trip decimal form, so load(save(g)) == g.
    """
    path = Path(path)
    lines = ["# influenced\tinfluencer\tweight", f"n={graph.n}"]
    for i, j, w in graph.edges:
        lines.append(f"{i}\t{j}\t{w!r}")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
