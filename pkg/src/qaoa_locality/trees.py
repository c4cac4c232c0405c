"""The canonical regular tree around one edge, and expectations on it.

For degree d and radius p the canonical tree is two complete (d-1)-ary
trees of height p whose roots are joined by the middle edge. Its size is
2 * sum_{k=0..p} (d-1)^k vertices, each inner vertex has degree d, and
the leaves have degree 1. For an edge of a d-regular graph whose
radius-p edge ball is a tree, that ball is exactly this tree, so the
middle-edge expectation computed here is the per-edge building block for
whole-ensemble predictions.
"""
from __future__ import annotations

from dataclasses import dataclass

from .errors import InputError, ResourceError
from .graphs import Graph, Neighborhood
from .qaoa import (
    DEFAULT_QUBIT_CAP,
    CostModel,
    QaoaParams,
    expect_edge,
    run_qaoa,
)

__all__ = [
    "CanonicalTree",
    "TreeExpectation",
    "tree_vertex_count",
    "build_canonical_tree",
    "tree_expectation",
    "neighborhood_expectation",
    "predicted_ensemble_cost",
]


@dataclass
class CanonicalTree:
    """The tree graph plus its middle edge and per-vertex depths."""

    d: int
    p: int
    graph: Graph
    middle_edge: int
    depth_of: list[int]


@dataclass
class TreeExpectation:
    """Middle-edge expectation of the canonical tree at one angle schedule."""

    model: CostModel
    d: int
    p: int
    params: QaoaParams
    initial: str
    value: float


def tree_vertex_count(d: int, p: int) -> int:
    return 2 * sum((d - 1) ** k for k in range(p + 1))


def build_canonical_tree(
    d: int, p: int, qubit_cap: int = DEFAULT_QUBIT_CAP
) -> CanonicalTree:
    """Build the canonical tree with breadth-first vertex numbering.

    Endpoint A is 0 and endpoint B is 1; then A's children, B's children,
    and so on level by level, so the numbering (and the edge list) is the
    same every time.
    """
    if d < 2:
        raise InputError("degree must be at least 2")
    if p < 0:
        raise InputError("radius must be nonnegative")
    size = tree_vertex_count(d, p)
    if size > qubit_cap:
        raise ResourceError(
            f"canonical tree at d={d}, p={p} needs {size} qubits, "
            f"above the cap of {qubit_cap}"
        )
    edges = [(0, 1)]
    depths = [0, 0]
    frontier = [0, 1]
    nxt = 2
    for level in range(1, p + 1):
        grown = []
        for parent in frontier:
            for _ in range(d - 1):
                edges.append((parent, nxt))
                depths.append(level)
                grown.append(nxt)
                nxt += 1
        frontier = grown
    graph = Graph.from_edges(size, edges)
    middle = graph.edges.index((0, 1))
    return CanonicalTree(d, p, graph, middle, depths)


def tree_expectation(
    d: int,
    p: int,
    model: CostModel,
    params: QaoaParams,
    initial: str = "plus",
    qubit_cap: int = DEFAULT_QUBIT_CAP,
) -> TreeExpectation:
    """Simulate the circuit on the canonical tree; return the middle-edge
    expectation. ``params`` must have exactly p layers."""
    if params.p != p:
        raise InputError(f"parameter depth {params.p} must equal the radius {p}")
    tree = build_canonical_tree(d, p, qubit_cap)
    state = run_qaoa(tree.graph, model, params, initial, qubit_cap)
    value = expect_edge(state, tree.graph.edges[tree.middle_edge], model)
    return TreeExpectation(model, d, p, params, initial, value)


def neighborhood_expectation(
    nb: Neighborhood,
    model: CostModel,
    params: QaoaParams,
    initial: str = "plus",
    qubit_cap: int = DEFAULT_QUBIT_CAP,
) -> float:
    """Middle-edge expectation simulated on an extracted neighborhood alone.

    For product initial states, gates outside the radius-p ball of an edge
    cancel out of that edge's expectation, so this equals the full-graph
    expectation of the middle edge whenever the radius matches the depth.
    """
    state = run_qaoa(nb.subgraph, model, params, initial, qubit_cap)
    return expect_edge(state, nb.subgraph.edges[nb.middle_edge], model)


def predicted_ensemble_cost(n: int, d: int, tree_value: float) -> float:
    """Leading-order predicted total cost over the ensemble: (n*d/2) * value.

    The remainder is a finite-size correction that this package never
    estimates numerically; reports carry it as the boolean flag
    ``finite_size_correction_unquantified`` instead.
    """
    return 0.5 * n * d * float(tree_value)
