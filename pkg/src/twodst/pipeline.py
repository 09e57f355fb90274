"""End-to-end solve: preflight, tree, LP, rounding, verification.

The congestion parameter starts at its analytic value and doubles on LP
infeasibility for a bounded number of retries; that keeps the pipeline
alive on instances where the initial bound is numerically too tight,
and the final value is reported so runs stay attributable.
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field
from typing import Mapping, Optional

from .errors import InfeasibleInstanceError, SolverError
from .graph import DstInstance, max_flow_unit
from .lp_model import (
    DEFAULT_MAX_NONZEROS,
    INFEASIBLE,
    OPTIMAL,
    build_lp,
    congestion_parameter,
)
from .lp_solver import SolverConfig, solution_from_file, solve
from .rounding import RoundingConfig, default_iterations, round_solution
from .shallow_tree import DEFAULT_MAX_NODES, ShallowTreeConfig, build_shallow_tree
from .solution import SolutionSubgraph
from .verify import FeasibilityReport, feasibility_report

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class PipelineConfig:
    depth: int
    seed: int = 0
    beta_multiplier: float = 1.0
    iterations: Optional[int] = None
    samples: Optional[int] = None
    iteration_multiplier: float = 2.0
    prune: bool = False
    beta_retries: int = 4
    max_nodes: int = DEFAULT_MAX_NODES
    max_nonzeros: int = DEFAULT_MAX_NONZEROS
    solver: SolverConfig = field(default=SolverConfig())
    lp_solution_path: Optional[str] = None  # adopt an external LP solution

    def __post_init__(self):
        if self.iteration_multiplier <= 0:
            raise ValueError("iteration_multiplier must be positive")
        if self.beta_retries < 0:
            raise ValueError("beta_retries must be >= 0")


@dataclass(frozen=True)
class PipelineResult:
    solution: SolutionSubgraph
    report: FeasibilityReport
    lp_objective: float
    beta: int
    tree_nodes: int
    timings: Mapping[str, float]

    @property
    def feasible(self) -> bool:
        return self.report.feasible

    @property
    def ratio_vs_lp(self) -> Optional[float]:
        if self.lp_objective > 0:
            return self.solution.cost / self.lp_objective
        return None

    def report_doc(self) -> dict:
        """Flat summary used by the CLI report and the bench CSV."""
        return {
            "lp_objective": self.lp_objective,
            "cost": self.solution.cost,
            "ratio_vs_lp": self.ratio_vs_lp,
            "feasible": self.feasible,
            "beta": self.beta,
            "tree_nodes": self.tree_nodes,
            "iterations": self.solution.meta.get("iterations"),
            "samples": self.solution.meta.get("samples"),
            "timings": dict(self.timings),
        }


def run_pipeline(instance: DstInstance, config: PipelineConfig) -> PipelineResult:
    g = instance.graph
    timings: dict[str, float] = {}
    clock = time.perf_counter

    t0 = clock()
    for t in sorted(instance.terminals):
        value, _ = max_flow_unit(g, instance.root, t)
        if value < 2:
            raise InfeasibleInstanceError(
                f"terminal {t!r} admits only {value} disjoint paths from the root"
            )
    timings["preflight"] = clock() - t0

    t0 = clock()
    tree = build_shallow_tree(
        instance, ShallowTreeConfig(depth=config.depth, max_nodes=config.max_nodes)
    )
    timings["tree"] = clock() - t0
    log.info("tree built: %d nodes, %d edges", tree.num_nodes, tree.num_edges)

    t0 = clock()
    beta = congestion_parameter(config.depth, instance.num_terminals, config.beta_multiplier)
    attempts = 0
    while True:
        model = build_lp(instance, tree, beta, max_nonzeros=config.max_nonzeros)
        if config.lp_solution_path is not None:
            lp = solution_from_file(model, config.lp_solution_path, config.solver)
        else:
            lp = solve(model, config.solver)
        if lp.status == OPTIMAL:
            break
        if lp.status == INFEASIBLE and attempts < config.beta_retries:
            attempts += 1
            beta *= 2
            log.info("LP infeasible, retrying with congestion parameter %d", beta)
            continue
        detail = ""
        if lp.certificate is not None:
            detail = f"; irreducible rows in families {sorted(lp.certificate.families())}"
        raise SolverError(f"LP finished with status {lp.status!r}{detail}")
    timings["lp"] = clock() - t0
    log.info("LP solved: objective %.6f, congestion parameter %d", lp.objective, beta)

    t0 = clock()
    iterations = config.iterations or default_iterations(
        config.depth, g.num_vertices, config.iteration_multiplier
    )
    rounding = RoundingConfig(
        seed=config.seed,
        iterations=iterations,
        samples=config.samples,
        prune_result=config.prune,
    )
    solution = round_solution(instance, tree, lp, rounding)
    timings["round"] = clock() - t0

    t0 = clock()
    report = feasibility_report(instance, solution.edges)
    timings["verify"] = clock() - t0
    log.info("rounded cost %.6f, feasible=%s", solution.cost, report.feasible)

    return PipelineResult(
        solution=solution,
        report=report,
        lp_objective=lp.objective,
        beta=beta,
        tree_nodes=tree.num_nodes,
        timings=timings,
    )


def make_pipeline_solver(config: PipelineConfig):
    """Adapt the pipeline to the reduction solver contract.

    Infeasible instances raise through the preflight check; a rounding
    miss (possible, the loop count only gives high probability) returns
    the infeasible subgraph and is caught by the reduction's own checks.
    """

    def run(instance: DstInstance) -> SolutionSubgraph:
        return run_pipeline(instance, config).solution

    return run
