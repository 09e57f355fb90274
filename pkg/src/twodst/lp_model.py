"""Linear relaxation of the embedded connectivity problem.

Variables, for a graph with edges e and a shallow tree with edges ê and
terminal set S:

* x_e        -- edge bought in the graph
* xh_ê       -- tree edge used by the embedding
* fh_(t,ê)   -- per-terminal flow on the tree, value >= 2 into t's group
* f_(ê,e)    -- graph flow realizing tree edge ê as a path between its
                endpoint labels, of value xh_ê
* ft_(t,ê,e) -- per-terminal share of f_(ê,e), of value fh_(t,ê); at most
                x_e may be used per graph edge across all tree edges, so
                the per-terminal paths are edge disjoint

Constraint families are tagged gst (tree flow), cong (graph flow with
congestion cap beta * x_e), and div (per-terminal copies capped by x_e).
All variables live in [0,1].
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

from .errors import ModelInconsistencyError, SizeLimitError
from .graph import DstInstance
from .shallow_tree import ShallowTree

DEFAULT_MAX_NONZEROS = 2_000_000

LE, EQ, GE = "<=", "=", ">="

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
LIMIT = "limit"


def congestion_parameter(depth: int, num_terminals: int, multiplier: float = 1.0) -> int:
    """Per-graph-edge cap on total tree-edge flow: ceil(mult * 2 * D * h^(1/D)).

    The tiny downward nudge keeps exact powers (e.g. 8^(1/3)) from being
    pushed to the next integer by float noise.
    """
    if depth < 1:
        raise ValueError(f"depth must be >= 1, got {depth}")
    if num_terminals < 1:
        raise ValueError(f"terminal count must be >= 1, got {num_terminals}")
    if multiplier <= 0:
        raise ValueError(f"multiplier must be positive, got {multiplier}")
    value = multiplier * 2.0 * depth * num_terminals ** (1.0 / depth)
    return math.ceil(value - 1e-9)


class VarIndex:
    """Bijection between structured variable keys and dense indices.

    Layout: x block, then xh, then fh (terminal-major), then f (tree-edge
    major), then ft (terminal-major, then tree-edge). Terminals are taken
    in sorted order, so indices are stable for a fixed instance + tree.
    """

    def __init__(self, num_edges: int, num_tree_edges: int, terminals: Sequence):
        self.num_edges = num_edges
        self.num_tree_edges = num_tree_edges
        self.terminals = tuple(sorted(terminals))
        self._tpos = {t: k for k, t in enumerate(self.terminals)}
        m, te, h = num_edges, num_tree_edges, len(self.terminals)
        self._xhat0 = m
        self._fhat0 = m + te
        self._f0 = m + te + h * te
        self._ft0 = self._f0 + te * m
        self.total = self._ft0 + h * te * m

    def x(self, e: int) -> int:
        return e

    def xhat(self, tree_edge: int) -> int:
        return self._xhat0 + tree_edge

    def fhat(self, terminal, tree_edge: int) -> int:
        return self._fhat0 + self._tpos[terminal] * self.num_tree_edges + tree_edge

    def f(self, tree_edge: int, e: int) -> int:
        return self._f0 + tree_edge * self.num_edges + e

    def ft(self, terminal, tree_edge: int, e: int) -> int:
        return (
            self._ft0
            + self._tpos[terminal] * self.num_tree_edges * self.num_edges
            + tree_edge * self.num_edges
            + e
        )

    def name(self, index: int) -> str:
        m, te = self.num_edges, self.num_tree_edges
        if index < self._xhat0:
            return f"x_{index}"
        if index < self._fhat0:
            return f"xh_{index - self._xhat0}"
        if index < self._f0:
            k, ehat = divmod(index - self._fhat0, te)
            return f"fh_{self.terminals[k]}_{ehat}"
        if index < self._ft0:
            ehat, e = divmod(index - self._f0, m)
            return f"f_{ehat}_{e}"
        k, rest = divmod(index - self._ft0, te * m)
        ehat, e = divmod(rest, m)
        return f"ft_{self.terminals[k]}_{ehat}_{e}"

    def names(self) -> list[str]:
        return [self.name(i) for i in range(self.total)]


class FlatVarIndex:
    """Name-only index for models re-imported from an export."""

    def __init__(self, names: Sequence[str]):
        self._names = tuple(names)
        self.total = len(self._names)

    def name(self, index: int) -> str:
        return self._names[index]

    def names(self) -> list[str]:
        return list(self._names)


@dataclass(frozen=True)
class LpRow:
    cols: tuple[int, ...]
    coefs: tuple[float, ...]
    sense: str
    rhs: float
    family: str


@dataclass(frozen=True)
class LpModel:
    var_index: object
    objective: np.ndarray
    rows: tuple[LpRow, ...]
    beta: Optional[float]

    @property
    def num_vars(self) -> int:
        return self.var_index.total

    def nonzeros(self) -> int:
        return sum(len(r.cols) for r in self.rows)

    def family_rows(self, family: str) -> list[LpRow]:
        return [r for r in self.rows if r.family == family]


@dataclass(frozen=True)
class LpSolution:
    model: LpModel
    values: np.ndarray
    objective: float
    status: str
    max_violation: float = 0.0
    certificate: Optional[object] = None

    # structured accessors; only valid when the model carries a VarIndex
    def x(self, e: int) -> float:
        return float(self.values[self.model.var_index.x(e)])

    def xhat(self, tree_edge: int) -> float:
        return float(self.values[self.model.var_index.xhat(tree_edge)])

    def fhat(self, terminal, tree_edge: int) -> float:
        return float(self.values[self.model.var_index.fhat(terminal, tree_edge)])

    def f(self, tree_edge: int, e: int) -> float:
        return float(self.values[self.model.var_index.f(tree_edge, e)])

    def ft(self, terminal, tree_edge: int, e: int) -> float:
        return float(self.values[self.model.var_index.ft(terminal, tree_edge, e)])


def projected_nonzeros(instance: DstInstance, tree: ShallowTree) -> int:
    """Exact nonzero count of the model, from degree sums alone."""
    g = instance.graph
    m = g.num_edges
    te = tree.num_edges
    h = instance.num_terminals
    deg = {v: len(g.in_edges(v)) + len(g.out_edges(v)) for v in g.vertices}
    total_deg = 2 * m

    count = 2 * h * te  # fh <= xh
    for t in tree.groups:
        group = tree.groups[t]
        for node in range(1, tree.num_nodes):
            if node not in group:
                count += 1 + len(tree.children[node])  # conservation row
        count += len(group)  # the >= 2 row
    count += 2 * te * m  # f <= x
    per_edge = 0
    for ehat in range(te):
        u, v = tree.edge_endpoints_labels(ehat)
        per_edge += len(g.out_edges(u)) + 1  # source out = xh
        per_edge += len(g.in_edges(u))  # source in = 0 (skipped if empty)
        per_edge += total_deg - deg[u] - deg[v]  # conservation elsewhere
    count += per_edge
    count += m * (te + 1)  # congestion cap
    count += 2 * h * te * m  # ft <= f
    count += h * per_edge  # per-terminal flow rows (fh column counts like xh)
    count += h * m * (te + 1)  # divergence cap
    return count


def build_lp(
    instance: DstInstance,
    tree: ShallowTree,
    beta: float,
    max_nonzeros: int = DEFAULT_MAX_NONZEROS,
) -> LpModel:
    g = instance.graph
    m = g.num_edges
    te = tree.num_edges
    idx = VarIndex(m, te, instance.terminals)

    projected = projected_nonzeros(instance, tree)
    if projected > max_nonzeros:
        raise SizeLimitError("model would be too large", projected, max_nonzeros)

    rows: list[LpRow] = []

    def emit(cols, coefs, sense, rhs, family):
        if not cols:
            return
        rows.append(LpRow(tuple(cols), tuple(coefs), sense, float(rhs), family))

    # tree flow per terminal
    for t in idx.terminals:
        group = tree.groups[t]
        for ehat in range(te):
            emit([idx.fhat(t, ehat), idx.xhat(ehat)], [1.0, -1.0], LE, 0.0, "gst")
        for node in range(1, tree.num_nodes):
            if node in group:
                continue
            cols = [idx.fhat(t, node - 1)]
            coefs = [1.0]
            for child in tree.children[node]:
                cols.append(idx.fhat(t, child - 1))
                coefs.append(-1.0)
            emit(cols, coefs, EQ, 0.0, "gst")
        in_edges = tree.group_in_edges(t)
        emit([idx.fhat(t, ehat) for ehat in in_edges], [1.0] * len(in_edges), GE, 2.0, "gst")

    # graph flow realizing each tree edge
    for ehat in range(te):
        for e in range(m):
            emit([idx.f(ehat, e), idx.x(e)], [1.0, -1.0], LE, 0.0, "cong")
    for ehat in range(te):
        u, v = tree.edge_endpoints_labels(ehat)
        cols = [idx.f(ehat, e) for e in g.out_edges(u)] + [idx.xhat(ehat)]
        coefs = [1.0] * (len(cols) - 1) + [-1.0]
        emit(cols, coefs, EQ, 0.0, "cong")
        cols = [idx.f(ehat, e) for e in g.in_edges(u)]
        emit(cols, [1.0] * len(cols), EQ, 0.0, "cong")
        for w in sorted(g.vertices, key=str):
            if w == u or w == v:
                continue
            cols = [idx.f(ehat, e) for e in g.in_edges(w)]
            coefs = [1.0] * len(cols)
            cols += [idx.f(ehat, e) for e in g.out_edges(w)]
            coefs += [-1.0] * (len(cols) - len(coefs))
            emit(cols, coefs, EQ, 0.0, "cong")
    for e in range(m):
        cols = [idx.f(ehat, e) for ehat in range(te)] + [idx.x(e)]
        coefs = [1.0] * te + [-float(beta)]
        emit(cols, coefs, LE, 0.0, "cong")

    # per-terminal disjointness
    for t in idx.terminals:
        for ehat in range(te):
            for e in range(m):
                emit([idx.ft(t, ehat, e), idx.f(ehat, e)], [1.0, -1.0], LE, 0.0, "div")
        for ehat in range(te):
            u, v = tree.edge_endpoints_labels(ehat)
            cols = [idx.ft(t, ehat, e) for e in g.out_edges(u)] + [idx.fhat(t, ehat)]
            coefs = [1.0] * (len(cols) - 1) + [-1.0]
            emit(cols, coefs, EQ, 0.0, "div")
            cols = [idx.ft(t, ehat, e) for e in g.in_edges(u)]
            emit(cols, [1.0] * len(cols), EQ, 0.0, "div")
            for w in sorted(g.vertices, key=str):
                if w == u or w == v:
                    continue
                cols = [idx.ft(t, ehat, e) for e in g.in_edges(w)]
                coefs = [1.0] * len(cols)
                cols += [idx.ft(t, ehat, e) for e in g.out_edges(w)]
                coefs += [-1.0] * (len(cols) - len(coefs))
                emit(cols, coefs, EQ, 0.0, "div")
        for e in range(m):
            cols = [idx.ft(t, ehat, e) for ehat in range(te)] + [idx.x(e)]
            coefs = [1.0] * te + [-1.0]
            emit(cols, coefs, LE, 0.0, "div")

    objective = np.zeros(idx.total)
    objective[:m] = g.costs

    model = LpModel(idx, objective, tuple(rows), float(beta))
    built = model.nonzeros()
    if built != projected:
        raise ModelInconsistencyError(
            f"nonzero projection {projected} disagrees with built count {built}"
        )
    return model


def drop_family(model: LpModel, family: str) -> LpModel:
    """Same model without one constraint family (diagnostics only)."""
    kept = tuple(r for r in model.rows if r.family != family)
    return LpModel(model.var_index, model.objective, kept, model.beta)


def replay_constraints(model: LpModel, values: np.ndarray) -> float:
    """Max violation of any row or bound at the given point.

    Independent of the solver: walks the stored rows directly.
    """
    if len(values) != model.num_vars:
        raise ValueError(
            f"expected {model.num_vars} values, got {len(values)}"
        )
    worst = max(
        float(np.max(-values, initial=0.0)),
        float(np.max(values - 1.0, initial=0.0)),
    )
    for row in model.rows:
        lhs = float(sum(c * values[j] for j, c in zip(row.cols, row.coefs)))
        if row.sense == LE:
            v = lhs - row.rhs
        elif row.sense == GE:
            v = row.rhs - lhs
        else:
            v = abs(lhs - row.rhs)
        if v > worst:
            worst = v
    return worst


def _format_terms(cols, coefs, name_of) -> str:
    parts = []
    for j, c in zip(cols, coefs):
        sign = "-" if c < 0 else "+"
        parts.append(f"{sign} {abs(c)!r} {name_of(j)}")
    joined = " ".join(parts)
    return joined[2:] if joined.startswith("+ ") else joined


def export_lp(model: LpModel) -> str:
    """Plain-text interchange form; byte-identical for identical models."""
    name_of = model.var_index.name
    counters: dict[str, int] = {}
    lines = [
        f"\\ variables: {model.num_vars}",
        f"\\ rows: {len(model.rows)}",
        "Minimize",
        " obj: " + (_format_terms(*_objective_terms(model), name_of) or "0"),
        "Subject To",
    ]
    for row in model.rows:
        k = counters.get(row.family, 0)
        counters[row.family] = k + 1
        sense = row.sense if row.sense != EQ else "="
        lines.append(
            f" {row.family}_{k}: {_format_terms(row.cols, row.coefs, name_of)} "
            f"{sense} {row.rhs!r}"
        )
    lines.append("Bounds")
    for j in range(model.num_vars):
        lines.append(f" 0 <= {name_of(j)} <= 1")
    lines.append("End")
    return "\n".join(lines) + "\n"


def _objective_terms(model: LpModel):
    cols = [j for j in range(model.num_vars) if model.objective[j] != 0.0]
    return cols, [float(model.objective[j]) for j in cols]


_TERM_RE = re.compile(r"([+-])?\s*([0-9.eE+-]+)\s+([A-Za-z_][\w]*)")


def _parse_terms(expr: str) -> dict[str, float]:
    out: dict[str, float] = {}
    pos = 0
    expr = expr.strip()
    while pos < len(expr):
        match = _TERM_RE.match(expr, pos)
        if not match:
            raise ValueError(f"cannot parse term at: {expr[pos:pos+30]!r}")
        sign, coef, name = match.groups()
        value = float(coef) * (-1.0 if sign == "-" else 1.0)
        out[name] = out.get(name, 0.0) + value
        pos = match.end()
        while pos < len(expr) and expr[pos] == " ":
            pos += 1
    return out


def parse_lp(text: str) -> LpModel:
    """Re-import the subset of the LP interchange format that export_lp
    writes: one row per line, named rows, [0,1] bounds."""
    section = None
    objective_terms: dict[str, float] = {}
    raw_rows: list[tuple[str, dict, str, float]] = []
    names: list[str] = []
    seen: set[str] = set()

    def note_names(terms):
        for n in terms:
            if n not in seen:
                seen.add(n)
                names.append(n)

    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("\\"):
            continue
        lowered = line.lower()
        if lowered in ("minimize", "subject to", "bounds", "end"):
            section = lowered
            continue
        if section == "minimize":
            _, _, expr = line.partition(":")
            objective_terms.update(_parse_terms(expr))
            note_names(objective_terms)
        elif section == "subject to":
            label, _, rest = line.partition(":")
            for sense in (LE, GE, "="):
                lhs, found, rhs = rest.partition(f" {sense} ")
                if found:
                    terms = _parse_terms(lhs)
                    note_names(terms)
                    family = label.strip().rsplit("_", 1)[0]
                    raw_rows.append((family, terms, sense, float(rhs)))
                    break
            else:
                raise ValueError(f"row without relation: {line!r}")
        elif section == "bounds":
            match = re.match(r"0\s*<=\s*([\w]+)\s*<=\s*1$", line)
            if not match:
                raise ValueError(f"unsupported bound line: {line!r}")
            note_names({match.group(1): 0.0})

    index = FlatVarIndex(names)
    pos = {n: j for j, n in enumerate(names)}
    objective = np.zeros(index.total)
    for n, c in objective_terms.items():
        objective[pos[n]] = c
    rows = tuple(
        LpRow(
            tuple(pos[n] for n in terms),
            tuple(terms[n] for n in terms),
            EQ if sense == "=" else sense,
            rhs,
            family,
        )
        for family, terms, sense, rhs in raw_rows
    )
    return LpModel(index, objective, rows, None)


def solution_to_json(solution: LpSolution) -> str:
    doc = {
        "objective": solution.objective,
        "status": solution.status,
        "values": {
            solution.model.var_index.name(j): float(solution.values[j])
            for j in range(solution.model.num_vars)
        },
    }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def solution_values_from_json(model: LpModel, text: str) -> np.ndarray:
    """Escape hatch: accept an externally produced solution dump."""
    doc = json.loads(text)
    given = doc["values"] if "values" in doc else doc
    values = np.zeros(model.num_vars)
    missing = []
    for j in range(model.num_vars):
        name = model.var_index.name(j)
        if name in given:
            values[j] = float(given[name])
        else:
            missing.append(name)
    if missing:
        raise ValueError(f"solution dump lacks {len(missing)} variables, e.g. {missing[0]}")
    extras = set(given) - {model.var_index.name(j) for j in range(model.num_vars)}
    if extras:
        raise ValueError(f"solution dump has unknown variables, e.g. {sorted(extras)[0]}")
    return values
