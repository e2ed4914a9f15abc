"""Command-line interface.

Subcommands: generate, centrality, nash, epsilon, sparsify, simulate,
asr-scan, verify.  Exit codes: 0 success, 1 usage or I/O error, 2 model
assumption failure, 3 verification failure.  All reports embed the resolved
configuration and tool version and are byte-identical across repeated runs.
"""
from __future__ import annotations

import argparse
import sys
import tempfile
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .asr import FamilySpec, analytic_core_periphery, scan_family, write_scan_csv
from .centrality import katz_bonacich, neumann_oracle, neumann_tail_bound, biproduct_centrality
from .dynamics import SeedingPair, simulate, write_trajectory_csv
from .game import (DiscountedSolver, SeedSet, epsilon_for_sets, firm_utility,
                   nash_deviation_check, nash_seeding, restricted_nash_seeding,
                   sparsify, utility_gradient)
from .graph import (AssumptionError, CorePeripheryParams, EdgeListError,
                    GraphError, MarketParams, WeightedDigraph,
                    generate_bounded_outdegree_family, generate_core_periphery,
                    load_edge_list, save_edge_list, validate_assumptions)
from .reportio import write_report


class UsageError(Exception):
    """Bad flags, specs, or input files."""


class VerificationFailure(Exception):
    """One or more cross-checks failed."""


@dataclass(frozen=True)
class RunConfig:
    """Resolved options for a single CLI run, echoed into every report."""

    command: str
    graph: str | None = None
    generate: str | None = None
    family: str | None = None
    schedule: str | None = None
    rule: str = "role_models"
    alpha: float = 2.0
    price: float = 1.0
    beta: float = 0.5
    delta: float = 0.5
    tol: float = 1e-10
    tail_tol: float = 1e-10
    horizon: int | None = None
    epsilon_target: float | None = None
    sets: str | None = None
    sets_bar: str | None = None
    sets_under: str | None = None
    seeding: str = "zero"
    samples: int = 2000
    out: str = "."
    seed: int = 0
    force: bool = False

    def market(self) -> MarketParams:
        return MarketParams(alpha=self.alpha, price=self.price,
                            beta=self.beta, delta=self.delta)

    def as_dict(self) -> dict:
        return asdict(self)


def _parse_kv_spec(spec: str, label: str) -> tuple[str, dict[str, str]]:
    kind, _, rest = spec.partition(":")
    kind = kind.strip().lower()
    fields: dict[str, str] = {}
    if rest.strip():
        for item in rest.split(","):
            key, sep, value = item.partition("=")
            if not sep or not key.strip() or not value.strip():
                raise UsageError(f"bad {label} entry {item!r} in {spec!r} "
                                 f"(expected key=value)")
            fields[key.strip()] = value.strip()
    return kind, fields


def _take(fields: dict[str, str], key: str, convert, spec: str):
    if key not in fields:
        raise UsageError(f"generator spec {spec!r} is missing {key}=")
    try:
        return convert(fields.pop(key))
    except ValueError as exc:
        raise UsageError(f"bad value for {key} in {spec!r}: {exc}") from None


def build_generated_graph(spec: str, seed: int) -> WeightedDigraph:
    kind, fields = _parse_kv_spec(spec, "generator")
    try:
        if kind == "core-periphery":
            chi = _take(fields, "chi", int, spec)
            m = _take(fields, "m", int, spec)
            g = _take(fields, "g", float, spec)
            if fields:
                raise UsageError(f"unknown generator keys {sorted(fields)} in {spec!r}")
            return generate_core_periphery(CorePeripheryParams(chi=chi, m=m, g=g))
        if kind == "bounded-outdegree":
            n = _take(fields, "n", int, spec)
            d = _take(fields, "d", int, spec)
            weight = _take(fields, "weight", float, spec)
            if fields:
                raise UsageError(f"unknown generator keys {sorted(fields)} in {spec!r}")
            return generate_bounded_outdegree_family(n, d, weight, seed=seed)
    except ValueError as exc:
        raise UsageError(f"invalid generator parameters in {spec!r}: {exc}") from None
    raise UsageError(f"unknown generator kind {kind!r} "
                     f"(expected core-periphery or bounded-outdegree)")


def _load_graph(config: RunConfig) -> WeightedDigraph:
    if (config.graph is None) == (config.generate is None):
        raise UsageError("exactly one graph source is required: --graph or --generate")
    if config.graph is not None:
        path = Path(config.graph)
        if not path.exists():
            raise UsageError(f"graph file not found: {path}")
        try:
            return load_edge_list(path)
        except EdgeListError as exc:
            raise UsageError(f"{path}: {exc}") from exc
    return build_generated_graph(config.generate, config.seed)


def _parse_id_list(text: str, n: int, label: str) -> SeedSet:
    raw = text.strip()
    if raw.startswith("@"):
        path = Path(raw[1:])
        if not path.exists():
            raise UsageError(f"{label}: id file not found: {path}")
        raw = path.read_text(encoding="utf-8")
    tokens = raw.replace(",", " ").split()
    try:
        ids = tuple(int(t) for t in tokens)
    except ValueError:
        raise UsageError(f"{label}: ids must be integers, got {text!r}") from None
    try:
        return SeedSet.of(ids, n)
    except (GraphError, ValueError) as exc:
        raise UsageError(f"{label}: {exc}") from None


def _resolve_sets(config: RunConfig, n: int) -> tuple[SeedSet, SeedSet]:
    if config.sets is not None:
        if config.sets_bar is not None or config.sets_under is not None:
            raise UsageError("--sets is exclusive with --sets-bar/--sets-under")
        shared = _parse_id_list(config.sets, n, "--sets")
        return shared, shared
    if config.sets_bar is None or config.sets_under is None:
        raise UsageError("provide --sets, or both --sets-bar and --sets-under")
    return (_parse_id_list(config.sets_bar, n, "--sets-bar"),
            _parse_id_list(config.sets_under, n, "--sets-under"))


def _ensure_out(config: RunConfig) -> Path:
    out = Path(config.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _checked_market(config: RunConfig) -> MarketParams:
    try:
        return config.market()
    except ValueError as exc:
        if "alpha must be at least price" in str(exc):
            raise AssumptionError(str(exc)) from None
        raise UsageError(str(exc)) from None


def _require_assumptions(graph: WeightedDigraph, params: MarketParams,
                         config: RunConfig, out: Path) -> None:
    report = validate_assumptions(graph, params, config.tol)
    if report.passed:
        return
    if config.force:
        write_report({
            "version": __version__,
            "config": config.as_dict(),
            "passed": False,
            "rho": report.rho,
            "bound": report.bound,
            "margin": report.margin,
            "checks": [{"name": c.name, "passed": c.passed, "detail": c.detail}
                       for c in report.checks],
        }, out / "validation.json")
        print(f"assumption failure; diagnostics written to {out / 'validation.json'}",
              file=sys.stderr)
    raise AssumptionError(f"model assumptions violated:\n{report.summary()}",
                          rho=report.rho, bound=report.bound, report=report)


def _seeding_summary(graph: WeightedDigraph, c_new: np.ndarray,
                     seeding: SeedingPair | None) -> str:
    order = np.lexsort((np.arange(graph.n), -c_new))[:10]
    lines = ["top agents by bi-product centrality:"]
    for idx in order:
        line = f"  agent {idx + 1}: c_new={c_new[idx]:.6g}"
        if seeding is not None:
            line += f"  seed_bar={seeding.s_bar[idx]:.6g}  seed_under={seeding.s_under[idx]:.6g}"
        lines.append(line)
    return "\n".join(lines)


def _breakdown_dict(breakdown) -> dict:
    return {
        "gross": breakdown.gross,
        "seeding_cost": breakdown.seeding_cost,
        "net": breakdown.net,
        "baseline": breakdown.baseline,
        "own_term": breakdown.own_term,
        "cross_term": breakdown.cross_term,
    }


def _params_dict(params: MarketParams) -> dict:
    return {"alpha": params.alpha, "price": params.price,
            "beta": params.beta, "delta": params.delta}


def cmd_generate(config: RunConfig) -> int:
    if config.generate is None:
        raise UsageError("generate needs --generate <spec>")
    graph = build_generated_graph(config.generate, config.seed)
    out = _ensure_out(config)
    path = out / "graph.edges"
    save_edge_list(graph, path)
    write_report({
        "version": __version__,
        "config": config.as_dict(),
        "spec": config.generate,
        "n": graph.n,
        "edge_count": graph.edge_count,
        "path": path.name,
    }, out / "generate.json")
    print(f"wrote {path} ({graph.n} agents, {graph.edge_count} edges)")
    return 0


def cmd_centrality(config: RunConfig) -> int:
    graph = _load_graph(config)
    params = _checked_market(config)
    out = _ensure_out(config)
    _require_assumptions(graph, params, config, out)
    bundle = biproduct_centrality(graph, params, config.tol)
    write_report({
        "version": __version__,
        "config": config.as_dict(),
        "n": graph.n,
        "attenuations": list(bundle.attenuations),
        "a": bundle.a,
        "b": bundle.b,
        "c_new": bundle.c_new,
        "c_cross": bundle.c_cross,
        "residuals": list(bundle.residuals),
    }, out / "centrality.json")
    print(_seeding_summary(graph, bundle.c_new, None))
    print(f"wrote {out / 'centrality.json'}")
    return 0


def _equilibrium_report(config: RunConfig, graph: WeightedDigraph,
                        params: MarketParams, seeding: SeedingPair,
                        epsilon: dict | None) -> dict:
    bundle = biproduct_centrality(graph, params, config.tol)
    nash = nash_seeding(graph, params, bundle=bundle, tol=config.tol)
    breakdown_a, breakdown_b = firm_utility(graph, params, seeding,
                                            bundle=bundle, tol=config.tol)
    return {
        "version": __version__,
        "config": config.as_dict(),
        "params": _params_dict(params),
        "nash": {"s_bar": nash.s_bar, "s_under": nash.s_under},
        "seeding": {"s_bar": seeding.s_bar, "s_under": seeding.s_under},
        "utilities": {"firm_a": _breakdown_dict(breakdown_a),
                      "firm_b": _breakdown_dict(breakdown_b)},
        "epsilon": epsilon,
    }


def _epsilon_dict(report) -> dict:
    return {
        "sets": {"bar": list(report.set_bar.members),
                 "under": list(report.set_under.members)},
        "set_sizes": [report.set_bar.size, report.set_under.size],
        "tau_bar": report.tau_bar,
        "tau_under": report.tau_under,
        "epsilon_paper": report.epsilon_paper,
        "epsilon_exact": [report.epsilon_exact_a, report.epsilon_exact_b],
        "exact_defined": [report.epsilon_exact_a is not None,
                          report.epsilon_exact_b is not None],
        "residuals": [report.residual_bar, report.residual_under],
    }


def cmd_nash(config: RunConfig) -> int:
    graph = _load_graph(config)
    params = _checked_market(config)
    out = _ensure_out(config)
    _require_assumptions(graph, params, config, out)
    bundle = biproduct_centrality(graph, params, config.tol)
    seeding = nash_seeding(graph, params, bundle=bundle, tol=config.tol)
    report = _equilibrium_report(config, graph, params, seeding, epsilon=None)
    write_report(report, out / "equilibrium.json")
    print(_seeding_summary(graph, bundle.c_new, seeding))
    print(f"wrote {out / 'equilibrium.json'}")
    return 0


def cmd_epsilon(config: RunConfig) -> int:
    graph = _load_graph(config)
    params = _checked_market(config)
    out = _ensure_out(config)
    _require_assumptions(graph, params, config, out)
    set_bar, set_under = _resolve_sets(config, graph.n)
    bundle = biproduct_centrality(graph, params, config.tol)
    eps = epsilon_for_sets(graph, params, set_bar, set_under,
                           bundle=bundle, tol=config.tol)
    seeding = restricted_nash_seeding(params, bundle, set_bar, set_under)
    report = _equilibrium_report(config, graph, params, seeding,
                                 epsilon=_epsilon_dict(eps))
    write_report(report, out / "equilibrium.json")
    print(_seeding_summary(graph, bundle.c_new, seeding))
    print(f"epsilon_paper={eps.epsilon_paper:.6g} "
          f"(tau_bar={eps.tau_bar:.6g}, tau_under={eps.tau_under:.6g})")
    print(f"wrote {out / 'equilibrium.json'}")
    return 0


def cmd_sparsify(config: RunConfig) -> int:
    if config.epsilon_target is None:
        raise UsageError("sparsify needs --epsilon-target")
    graph = _load_graph(config)
    params = _checked_market(config)
    out = _ensure_out(config)
    _require_assumptions(graph, params, config, out)
    bundle = biproduct_centrality(graph, params, config.tol)
    set_bar, set_under, eps = sparsify(graph, params, config.epsilon_target,
                                       bundle=bundle, tol=config.tol)
    seeding = restricted_nash_seeding(params, bundle, set_bar, set_under)
    write_report({
        "version": __version__,
        "config": config.as_dict(),
        "params": _params_dict(params),
        "epsilon_target": config.epsilon_target,
        "sets": {"bar": list(set_bar.members), "under": list(set_under.members)},
        "set_size": set_bar.size,
        "seeding": {"s_bar": seeding.s_bar, "s_under": seeding.s_under},
        "epsilon": _epsilon_dict(eps),
    }, out / "sparsify.json")
    print(_seeding_summary(graph, bundle.c_new, seeding))
    print(f"selected {set_bar.size} agents; epsilon_paper={eps.epsilon_paper:.6g} "
          f"<= target {config.epsilon_target:.6g}")
    print(f"wrote {out / 'sparsify.json'}")
    return 0


def cmd_simulate(config: RunConfig) -> int:
    graph = _load_graph(config)
    params = _checked_market(config)
    out = _ensure_out(config)
    _require_assumptions(graph, params, config, out)
    if config.seeding == "zero":
        seeding = SeedingPair.zeros(graph.n)
    elif config.seeding == "nash":
        seeding = nash_seeding(graph, params, tol=config.tol)
    elif config.seeding == "restricted":
        bundle = biproduct_centrality(graph, params, config.tol)
        set_bar, set_under = _resolve_sets(config, graph.n)
        seeding = restricted_nash_seeding(params, bundle, set_bar, set_under)
    else:
        raise UsageError(f"unknown --seeding {config.seeding!r} "
                         f"(expected zero, nash, or restricted)")
    trajectory = simulate(graph, params, seeding, horizon=config.horizon,
                          tail_tol=config.tail_tol)
    csv_path = out / "trajectory.csv"
    write_trajectory_csv(trajectory, csv_path)
    write_report({
        "version": __version__,
        "config": config.as_dict(),
        "params": _params_dict(params),
        "horizon": trajectory.horizon,
        "tail_bound": trajectory.tail_bound,
        "seeding": {"s_bar": seeding.s_bar, "s_under": seeding.s_under},
        "discounted_bar": trajectory.discounted_bar,
        "discounted_under": trajectory.discounted_under,
    }, out / "trajectory.json")
    print(f"simulated {trajectory.horizon} periods "
          f"(certified tail bound {trajectory.tail_bound:.3g})")
    print(f"wrote {csv_path} and {out / 'trajectory.json'}")
    return 0


def _parse_rule(text: str):
    if text in ("role-models", "role_models"):
        return "role_models"
    if text.startswith(("top-k:", "top_k:")):
        try:
            return ("top_k", int(text.split(":", 1)[1]))
        except ValueError:
            raise UsageError(f"bad top-k rule {text!r} (expected top-k:<int>)") from None
    raise UsageError(f"unknown rule {text!r} (expected role-models or top-k:<int>)")


def cmd_asr_scan(config: RunConfig) -> int:
    if config.family is None or config.schedule is None:
        raise UsageError("asr-scan needs --family and --schedule")
    kind, fields = _parse_kv_spec(config.family, "family")
    try:
        schedule = tuple(int(t) for t in config.schedule.replace(",", " ").split())
    except ValueError:
        raise UsageError(f"bad --schedule {config.schedule!r}") from None
    params = _checked_market(config)
    try:
        if kind == "core-periphery":
            chi = _take(fields, "chi", int, config.family)
            g = _take(fields, "g", float, config.family)
            spec = FamilySpec(kind="core_periphery", schedule=schedule,
                              market=params, chi=chi, g=g)
        elif kind == "bounded-outdegree":
            d = _take(fields, "d", int, config.family)
            weight = _take(fields, "weight", float, config.family)
            spec = FamilySpec(kind="bounded_outdegree", schedule=schedule,
                              market=params, d=d, weight=weight, seed=config.seed)
        else:
            raise UsageError(f"unknown family kind {kind!r}")
        if fields:
            raise UsageError(f"unknown family keys {sorted(fields)} in {config.family!r}")
        rule = _parse_rule(config.rule)
        result = scan_family(spec, rule=rule, tol=config.tol)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    out = _ensure_out(config)
    write_scan_csv(result, out / "asr_scan.csv")
    write_report({
        "version": __version__,
        "config": config.as_dict(),
        "params": _params_dict(params),
        "family": config.family,
        "schedule": list(schedule),
        "rule": result.rule,
        "verdict": result.verdict,
        "decay_exponent": result.decay_exponent,
        "records": [{
            "size": r.size, "n": r.n,
            "set_size": r.set_size_bar,
            "residual_bar": r.residual_bar,
            "residual_under": r.residual_under,
            "epsilon_paper": r.epsilon_paper,
            "epsilon_exact": [r.epsilon_exact_a, r.epsilon_exact_b],
        } for r in result.records],
    }, out / "asr_verdict.json")
    print(f"verdict: {result.verdict} (decay exponent {result.decay_exponent:.4g})")
    print(f"wrote {out / 'asr_scan.csv'} and {out / 'asr_verdict.json'}")
    return 0


def _verify_graphs(config: RunConfig) -> list[tuple[str, WeightedDigraph, CorePeripheryParams | None]]:
    if config.graph is not None or config.generate is not None:
        graph = _load_graph(config)
        cp = None
        if config.generate is not None and config.generate.startswith("core-periphery"):
            kind, fields = _parse_kv_spec(config.generate, "generator")
            cp = CorePeripheryParams(chi=int(fields["chi"]), m=int(fields["m"]),
                                     g=float(fields["g"]))
        return [("input", graph, cp)]
    cp_params = CorePeripheryParams(chi=3, m=4, g=0.5)
    return [
        ("two-agent-chain", WeightedDigraph(2, [(1, 2, 0.5)]), None),
        ("core-periphery-3x4", generate_core_periphery(cp_params), cp_params),
        ("bounded-outdegree-30", generate_bounded_outdegree_family(30, 2, 0.1, seed=1), None),
        ("isolated-3", WeightedDigraph.empty(3), None),
    ]


def _check(checks: list, graph_name: str, name: str, passed: bool, detail: str) -> None:
    checks.append({"graph": graph_name, "check": name,
                   "passed": bool(passed), "detail": detail})
    print(f"{'PASS' if passed else 'FAIL'}  {graph_name}: {name} ({detail})")


def _verify_one(checks: list, name: str, graph: WeightedDigraph,
                cp: CorePeripheryParams | None, params: MarketParams,
                config: RunConfig, rng: np.random.Generator) -> None:
    bundle = biproduct_centrality(graph, params, config.tol)
    solver = DiscountedSolver(graph, params, config.tol)

    # strictly positive so central differences below stay inside the domain
    seeding = SeedingPair(s_bar=params.price * bundle.c_new * (0.25 + rng.random(graph.n)),
                          s_under=params.price * (0.25 + rng.random(graph.n)))
    trajectory = simulate(graph, params, seeding, tail_tol=config.tail_tol)
    y_bar, y_under = solver.consumption(seeding)
    gap = max(float(np.abs(trajectory.discounted_bar - y_bar).max()),
              float(np.abs(trajectory.discounted_under - y_under).max()))
    _check(checks, name, "simulation_matches_closed_form", gap <= 1e-8,
           f"max gap {gap:.3e}, tail bound {trajectory.tail_bound:.3e}")

    h = 1e-4
    grad = utility_gradient(graph, params, seeding, firm="a", bundle=bundle)
    worst_rel = 0.0
    for idx in range(graph.n):
        bumped_up = seeding.s_bar.copy(); bumped_up[idx] += h
        bumped_dn = seeding.s_bar.copy(); bumped_dn[idx] -= h
        up, _ = firm_utility(graph, params,
                             SeedingPair(bumped_up, seeding.s_under),
                             bundle=bundle, solver=solver)
        dn, _ = firm_utility(graph, params,
                             SeedingPair(bumped_dn, seeding.s_under),
                             bundle=bundle, solver=solver)
        fd = (up.net - dn.net) / (2 * h)
        denom = max(1.0, abs(grad[idx]))
        worst_rel = max(worst_rel, abs(fd - grad[idx]) / denom)
    _check(checks, name, "gradient_matches_finite_differences", worst_rel <= 1e-5,
           f"worst relative gap {worst_rel:.3e} at h={h:g}")

    worst_gain = nash_deviation_check(graph, params, samples=config.samples,
                                      seed=config.seed, bundle=bundle)
    _check(checks, name, "nash_deviations_never_gain", worst_gain <= 1e-9,
           f"best sampled gain {worst_gain:.3e} over {config.samples} deviations")

    worst_oracle = 0.0
    for att in bundle.attenuations:
        terms = 8
        while neumann_tail_bound(graph, att, terms) >= 1e-8:
            terms *= 2
            if terms > 1_000_000:
                raise VerificationFailure("walk-series tail bound will not certify")
        series = neumann_oracle(graph, att, terms)
        katz = katz_bonacich(graph, att, config.tol)
        worst_oracle = max(worst_oracle, float(np.abs(series - katz).max()))
    _check(checks, name, "centrality_matches_walk_series", worst_oracle <= 1e-8,
           f"max gap {worst_oracle:.3e}")

    with tempfile.TemporaryDirectory() as tmp:
        path = Path(tmp) / "roundtrip.edges"
        save_edge_list(graph, path)
        reloaded = load_edge_list(path)
    _check(checks, name, "edge_list_round_trip", reloaded == graph,
           f"{graph.edge_count} edges")

    if cp is not None:
        closed = analytic_core_periphery(cp, params)
        role_idx = np.asarray(cp.role_models()) - 1
        periph_mask = np.ones(graph.n, bool)
        periph_mask[role_idx] = False
        worst = 0.0
        for value, expected in (
                (bundle.a[role_idx], closed.a_role),
                (bundle.b[role_idx], closed.b_role),
                (bundle.c_new[role_idx], closed.c_role),
                (bundle.a[periph_mask], closed.a_periphery),
                (bundle.b[periph_mask], closed.b_periphery)):
            worst = max(worst, float(np.abs(value - expected).max()) / abs(expected))
        _check(checks, name, "analytic_core_periphery_matches_solve", worst <= 1e-10,
               f"worst relative gap {worst:.3e}")


def cmd_verify(config: RunConfig) -> int:
    params = _checked_market(config)
    out = _ensure_out(config)
    checks: list[dict] = []
    rng = np.random.default_rng(config.seed)
    for name, graph, cp in _verify_graphs(config):
        report = validate_assumptions(graph, params, config.tol)
        if not report.passed:
            _require_assumptions(graph, params, config, out)
        _verify_one(checks, name, graph, cp, params, config, rng)
    passed = all(c["passed"] for c in checks)
    write_report({
        "version": __version__,
        "config": config.as_dict(),
        "params": _params_dict(params),
        "checks": checks,
        "passed": passed,
    }, out / "verify.json")
    print(f"{'all checks passed' if passed else 'VERIFICATION FAILED'} "
          f"({sum(c['passed'] for c in checks)}/{len(checks)})")
    if not passed:
        raise VerificationFailure("see verify.json")
    return 0


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="seedgame",
                     description="Two-firm seeding competition on influence networks.")
    parser.add_argument("--version", action="version", version=f"seedgame {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, graph_source=True):
        if graph_source:
            p.add_argument("--graph", help="edge-list file")
            p.add_argument("--generate", help="generator spec, e.g. "
                           "core-periphery:chi=3,m=4,g=0.5 or "
                           "bounded-outdegree:n=10,d=2,weight=0.1")
        p.add_argument("--alpha", type=float, default=2.0)
        p.add_argument("--price", type=float, default=1.0)
        p.add_argument("--beta", type=float, default=0.5)
        p.add_argument("--delta", type=float, default=0.5)
        p.add_argument("--tol", type=float, default=1e-10,
                       help="linear-solve residual tolerance")
        p.add_argument("--out", default=".", help="output directory")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--force", action="store_true",
                       help="on assumption failure, still write diagnostics")

    p = sub.add_parser("generate", help="write a generated graph as an edge list")
    add_common(p, graph_source=False)
    p.add_argument("--generate", required=True, help="generator spec")

    p = sub.add_parser("centrality", help="emit the centrality bundle")
    add_common(p)

    p = sub.add_parser("nash", help="emit the Nash seeding and payoffs")
    add_common(p)

    p = sub.add_parser("epsilon", help="epsilon certificate for given seed sets")
    add_common(p)
    p.add_argument("--sets", help="shared 1-based ids, e.g. 4,8,12 or @file")
    p.add_argument("--sets-bar", help="ids for the first firm")
    p.add_argument("--sets-under", help="ids for the second firm")

    p = sub.add_parser("sparsify", help="smallest greedy set meeting a target epsilon")
    add_common(p)
    p.add_argument("--epsilon-target", type=float, required=True)

    p = sub.add_parser("simulate", help="run the consumption dynamics")
    add_common(p)
    p.add_argument("--horizon", type=int, help="periods to simulate (default: auto)")
    p.add_argument("--tail-tol", type=float, default=1e-10,
                   help="target certified tail bound for the auto horizon")
    p.add_argument("--seeding", default="zero",
                   help="zero, nash, or restricted (with --sets)")
    p.add_argument("--sets", help="ids for --seeding restricted")
    p.add_argument("--sets-bar")
    p.add_argument("--sets-under")

    p = sub.add_parser("asr-scan", help="scan a family for sparse-seeding decay")
    add_common(p, graph_source=False)
    p.add_argument("--family", required=True,
                   help="core-periphery:chi=3,g=0.5 or bounded-outdegree:d=2,weight=0.1")
    p.add_argument("--schedule", required=True, help="sizes, e.g. 10,31,100")
    p.add_argument("--rule", default="role-models",
                   help="role-models or top-k:<int>")

    p = sub.add_parser("verify", help="run the cross-check suite")
    add_common(p)
    p.add_argument("--samples", type=int, default=2000,
                   help="deviation samples per graph")
    p.add_argument("--tail-tol", type=float, default=1e-10)

    return parser


def _config_from_args(args: argparse.Namespace) -> RunConfig:
    fields = {f: getattr(args, f) for f in RunConfig.__dataclass_fields__
              if hasattr(args, f)}
    return RunConfig(**fields)


_COMMANDS = {
    "generate": cmd_generate,
    "centrality": cmd_centrality,
    "nash": cmd_nash,
    "epsilon": cmd_epsilon,
    "sparsify": cmd_sparsify,
    "simulate": cmd_simulate,
    "asr-scan": cmd_asr_scan,
    "verify": cmd_verify,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        config = _config_from_args(args)
        return _COMMANDS[args.command](config)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (EdgeListError, GraphError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except AssumptionError as exc:
        print(f"assumption failure: {exc}", file=sys.stderr)
        return 2
    except VerificationFailure as exc:
        print(f"verification failed: {exc}", file=sys.stderr)
        return 3
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
