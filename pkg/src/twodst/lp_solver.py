"""Linear program solving behind a thin stable interface.

The heavy lifting is delegated to scipy's HiGHS backend, which is
deterministic for a fixed model and configuration. Every optimal result
is re-checked against the model's own rows before being returned, so a
wrong answer from the backend cannot slip through silently. Infeasible
models get a certificate: the smallest total relaxation (elastic slacks)
that would make the rows consistent, reported per offending row.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np
from scipy.optimize import linprog
from scipy.sparse import csr_matrix

from .errors import SolverError
from .lp_model import (
    EQ,
    GE,
    INFEASIBLE,
    LE,
    LIMIT,
    OPTIMAL,
    LpModel,
    LpSolution,
    replay_constraints,
    solution_values_from_json,
)


@dataclass(frozen=True)
class SolverConfig:
    feas_tol: float = 1e-9
    opt_tol: float = 1e-9
    max_iterations: Optional[int] = None
    pivot_rule: Optional[str] = None  # backend tie-break strategy id

    def __post_init__(self):
        if self.feas_tol <= 0 or self.opt_tol <= 0:
            raise ValueError("tolerances must be positive")
        if self.max_iterations is not None and self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")


@dataclass(frozen=True)
class InfeasibilityCertificate:
    """Rows that must be relaxed, with the amounts, to restore feasibility."""

    rows: tuple  # (row position, family, relaxation amount)
    total_relaxation: float

    def families(self) -> dict:
        out: dict = {}
        for _, family, amount in self.rows:
            out[family] = out.get(family, 0.0) + amount
        return out


def _split_rows(model: LpModel):
    """Rows as sparse inequality/equality blocks (GE rows negated)."""
    ub_data, ub_rows, ub_cols, b_ub, ub_pos = [], [], [], [], []
    eq_data, eq_rows, eq_cols, b_eq, eq_pos = [], [], [], [], []
    for pos, row in enumerate(model.rows):
        if row.sense == EQ:
            r = len(b_eq)
            for j, c in zip(row.cols, row.coefs):
                eq_rows.append(r)
                eq_cols.append(j)
                eq_data.append(c)
            b_eq.append(row.rhs)
            eq_pos.append(pos)
        else:
            sign = 1.0 if row.sense == LE else -1.0
            r = len(b_ub)
            for j, c in zip(row.cols, row.coefs):
                ub_rows.append(r)
                ub_cols.append(j)
                ub_data.append(sign * c)
            b_ub.append(sign * row.rhs)
            ub_pos.append(pos)
    n = model.num_vars
    a_ub = (
        csr_matrix((ub_data, (ub_rows, ub_cols)), shape=(len(b_ub), n))
        if b_ub
        else None
    )
    a_eq = (
        csr_matrix((eq_data, (eq_rows, eq_cols)), shape=(len(b_eq), n))
        if b_eq
        else None
    )
    return a_ub, np.array(b_ub), ub_pos, a_eq, np.array(b_eq), eq_pos


def _options(config: SolverConfig) -> dict:
    options = {
        "presolve": True,
        "primal_feasibility_tolerance": config.feas_tol,
        "dual_feasibility_tolerance": max(config.opt_tol, 1e-10),
    }
    if config.max_iterations is not None:
        options["maxiter"] = config.max_iterations
    return options


def solve(model: LpModel, config: SolverConfig = SolverConfig()) -> LpSolution:
    a_ub, b_ub, _, a_eq, b_eq, _ = _split_rows(model)
    result = linprog(
        model.objective,
        A_ub=a_ub,
        b_ub=b_ub if a_ub is not None else None,
        A_eq=a_eq,
        b_eq=b_eq if a_eq is not None else None,
        bounds=(0.0, 1.0),
        method="highs",
        options=_options(config),
    )
    if result.status == 0:
        values = np.asarray(result.x, dtype=float)
        violation = replay_constraints(model, values)
        if violation > max(10.0 * config.feas_tol, 1e-8):
            raise SolverError(
                f"backend reported optimal but replay finds violation {violation:.3e}"
            )
        return LpSolution(
            model=model,
            values=values,
            objective=float(result.fun),
            status=OPTIMAL,
            max_violation=violation,
        )
    if result.status == 1:
        return LpSolution(
            model=model,
            values=np.zeros(model.num_vars),
            objective=float("nan"),
            status=LIMIT,
        )
    if result.status == 2:
        certificate = _infeasibility_certificate(model, config)
        return LpSolution(
            model=model,
            values=np.zeros(model.num_vars),
            objective=float("nan"),
            status=INFEASIBLE,
            certificate=certificate,
        )
    raise SolverError(f"backend failure: {result.message}")


def _infeasibility_certificate(
    model: LpModel, config: SolverConfig
) -> InfeasibilityCertificate:
    """Minimize the total elastic slack needed to satisfy all rows.

    Every row gets one slack variable easing it in the violated
    direction (equalities may flex both ways). Rows given positive slack
    at the optimum form the repair set: relaxing each by its amount makes
    the model feasible.
    """
    n = model.num_vars
    k = len(model.rows)
    data, rws, cls = [], [], []
    rhs_ub, rhs_eq = [], []
    ub_meta, eq_rows = [], []
    for pos, row in enumerate(model.rows):
        if row.sense == EQ:
            # two elastic inequalities sharing one slack: |lhs - rhs| <= s
            for sign in (1.0, -1.0):
                r = len(rhs_ub)
                for j, c in zip(row.cols, row.coefs):
                    rws.append(r)
                    cls.append(j)
                    data.append(sign * c)
                rws.append(r)
                cls.append(n + pos)
                data.append(-1.0)
                rhs_ub.append(sign * row.rhs)
                ub_meta.append(pos)
        else:
            sign = 1.0 if row.sense == LE else -1.0
            r = len(rhs_ub)
            for j, c in zip(row.cols, row.coefs):
                rws.append(r)
                cls.append(j)
                data.append(sign * c)
            rws.append(r)
            cls.append(n + pos)
            data.append(-1.0)
            rhs_ub.append(sign * row.rhs)
            ub_meta.append(pos)
    a_ub = csr_matrix((data, (rws, cls)), shape=(len(rhs_ub), n + k))
    cost = np.concatenate([np.zeros(n), np.ones(k)])
    bounds = [(0.0, 1.0)] * n + [(0.0, None)] * k
    result = linprog(
        cost,
        A_ub=a_ub,
        b_ub=np.array(rhs_ub),
        bounds=bounds,
        method="highs",
        options=_options(config),
    )
    if result.status != 0:
        raise SolverError(f"elastic relaxation failed: {result.message}")
    slacks = np.asarray(result.x[n:])
    tol = max(10.0 * config.feas_tol, 1e-8)
    offenders = tuple(
        (pos, model.rows[pos].family, float(slacks[pos]))
        for pos in range(k)
        if slacks[pos] > tol
    )
    return InfeasibilityCertificate(offenders, float(np.sum(slacks)))


def solution_from_file(
    model: LpModel, path, config: SolverConfig = SolverConfig()
) -> LpSolution:
    """Adopt an externally produced solution dump instead of solving."""
    values = solution_values_from_json(model, Path(path).read_text())
    violation = replay_constraints(model, values)
    if violation > max(10.0 * config.feas_tol, 1e-6):
        raise SolverError(
            f"external solution violates the model by {violation:.3e}"
        )
    return LpSolution(
        model=model,
        values=values,
        objective=float(np.dot(model.objective, values)),
        status=OPTIMAL,
        max_violation=violation,
    )
