"""Synthetic metric spaces with known geometry.

Sphere, dense Erdős–Rényi graph and Poincaré-disk spaces reproduce the
synthetic comparison of tree-likeness; random tree metrics and random
dendrogram ultrametrics serve as zero-hyperbolicity oracles.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Literal

import networkx as nx
import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator
from scipy.cluster.hierarchy import cophenet
from scipy.sparse.csgraph import csgraph_from_dense, floyd_warshall as _scipy_floyd_warshall
from scipy.spatial.distance import squareform

from treelike_geometry.core_types import DistanceMatrix, EmbeddingSet, check_seed
from treelike_geometry.distances import build_distance_matrix
from treelike_geometry.errors import InvalidInputError
from treelike_geometry.rng import CounterStream, Stream

logger = logging.getLogger(__name__)

SyntheticKind = Literal["sphere", "dense_graph", "poincare_disk", "tree_metric", "ultrametric"]

TREE_EDGE_RANGE = (0.1, 2.0)


class SyntheticSpec(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: SyntheticKind
    n: int = Field(default=50, ge=1)
    dim: int = Field(default=10, ge=2)
    p: float = Field(default=0.8, gt=0.0, le=1.0)
    seed: int = Field(default=42, ge=0, lt=2**64)

    @model_validator(mode="after")
    def _check_size(self) -> SyntheticSpec:
        minimum = {"tree_metric": 4, "ultrametric": 3, "dense_graph": 2}.get(self.kind, 1)
        if self.n < minimum:
            raise ValueError(f"{self.kind} needs n >= {minimum}, got {self.n}")
        return self


@dataclass(frozen=True)
class TreeFixture:
    matrix: DistanceMatrix
    cherries: frozenset[tuple[int, int]]
    tree: nx.Graph


def sample_sphere(n: int, dim: int, seed: int) -> EmbeddingSet:
    """Gaussian rows normalized onto the unit sphere in ``dim`` dimensions."""
    if dim < 2 or n < 1:
        raise InvalidInputError(f"sphere needs dim >= 2 and n >= 1, got n={n}, dim={dim}")
    stream = CounterStream(seed, Stream.SPHERE)
    counters = np.arange(n * dim, dtype=np.uint64)
    rows = stream.normal(counters).reshape(n, dim)
    draw = 1
    while True:
        norms = np.linalg.norm(rows, axis=1)
        zero = np.flatnonzero(norms == 0.0)
        if not zero.size:
            break
        for row in zero:
            rows[row] = stream.normal(counters[row * dim : (row + 1) * dim], draw)
        draw += 1
    return EmbeddingSet(rows=rows / norms[:, None])


def sample_poincare_disk(n: int, seed: int) -> EmbeddingSet:
    """Points ``(r cos θ, r sin θ)`` with r uniform in [0, 1) and θ uniform in [0, 2π)."""
    if n < 1:
        raise InvalidInputError(f"disk needs n >= 1, got {n}")
    stream = CounterStream(seed, Stream.DISK)
    counters = np.arange(n, dtype=np.uint64)
    radius = stream.uniform(counters, 0)
    theta = 2.0 * np.pi * stream.uniform(counters, 1)
    rows = np.column_stack((radius * np.cos(theta), radius * np.sin(theta)))
    return EmbeddingSet(rows=rows)


def floyd_warshall(adjacency: np.ndarray) -> DistanceMatrix:
    """All-pairs shortest paths of a symmetric weight matrix (``inf`` marks no edge).

    Pairs left unreachable get the sentinel distance ``n``.
    """
    adjacency = np.asarray(adjacency, dtype=np.float64)
    if adjacency.ndim != 2 or adjacency.shape[0] != adjacency.shape[1]:
        raise InvalidInputError(f"adjacency must be square, got shape {adjacency.shape}")
    if not np.array_equal(adjacency, adjacency.T):
        raise InvalidInputError("adjacency must be symmetric")
    if np.any(np.diag(adjacency) != 0.0):
        raise InvalidInputError("adjacency must have a zero diagonal")
    n = adjacency.shape[0]
    graph = csgraph_from_dense(adjacency, null_value=np.inf)
    paths = _scipy_floyd_warshall(graph, directed=False)
    paths[np.isinf(paths)] = float(n)
    np.fill_diagonal(paths, 0.0)
    return DistanceMatrix.from_condensed(
        paths[np.triu_indices(n, k=1)], n, "graph_shortest_path"
    )


def sample_dense_graph(
    n: int, p: float = 0.8, seed: int = 42, *, adjacency: np.ndarray | None = None
) -> DistanceMatrix:
    """Shortest-path metric of an Erdős–Rényi G(n, p) graph with unit edges.

    ``adjacency`` (0/1 matrix) replaces the random graph, for deterministic cases.
    """
    if adjacency is None:
        if n < 2 or not 0.0 < p <= 1.0:
            raise InvalidInputError(f"dense graph needs n >= 2 and p in (0, 1], got n={n}, p={p}")
        graph = nx.gnp_random_graph(n, p, seed=check_seed(seed))
    else:
        graph = nx.from_numpy_array(np.asarray(adjacency))
    weights = nx.to_numpy_array(graph, nodelist=range(graph.number_of_nodes()), weight=None, nonedge=np.inf)
    np.fill_diagonal(weights, 0.0)
    logger.debug("G(%d, %.3f): %d edges", graph.number_of_nodes(), p, graph.number_of_edges())
    return floyd_warshall(weights)


def path_distance_matrix(tree: nx.Graph, leaves: list[int]) -> DistanceMatrix:
    """Weighted path lengths between ``leaves`` of ``tree``."""
    lengths = dict(nx.all_pairs_dijkstra_path_length(tree, weight="weight"))
    n = len(leaves)
    i, j = np.triu_indices(n, k=1)
    condensed = np.array([lengths[leaves[a]][leaves[b]] for a, b in zip(i, j)], dtype=np.float64)
    return DistanceMatrix.from_condensed(condensed, n, "graph_shortest_path")


def cherries_of(tree: nx.Graph, leaves: list[int]) -> frozenset[tuple[int, int]]:
    """Pairs of leaves (by position in ``leaves``) attached to the same node."""
    position = {leaf: index for index, leaf in enumerate(leaves)}
    pairs = set()
    for node in tree.nodes:
        attached = sorted(position[v] for v in tree.neighbors(node) if v in position)
        pairs.update((a, b) for idx, a in enumerate(attached) for b in attached[idx + 1 :])
    return frozenset(pairs)


def tree_metric_fixture(n_leaves: int, seed: int) -> TreeFixture:
    """Random unrooted binary tree with edge weights uniform in [0.1, 2].

    Leaves are nodes ``0..n_leaves-1``. Starting from a three-leaf star, each
    new leaf subdivides a uniformly chosen edge.
    """
    if n_leaves < 4:
        raise InvalidInputError(f"tree fixture needs at least 4 leaves, got {n_leaves}")
    stream = CounterStream(seed, Stream.TREE)
    low, high = TREE_EDGE_RANGE
    counter = 0

    def weight() -> float:
        nonlocal counter
        value = low + (high - low) * float(stream.uniform(counter)[0])
        counter += 1
        return value

    tree = nx.Graph()
    hub = n_leaves
    next_internal = n_leaves + 1
    for leaf in range(3):
        tree.add_edge(hub, leaf, weight=weight())
    for leaf in range(3, n_leaves):
        edges = sorted(tuple(sorted(edge)) for edge in tree.edges)
        u, v = edges[int(stream.integers(counter, 0, len(edges))[0])]
        counter += 1
        tree.remove_edge(u, v)
        middle = next_internal
        next_internal += 1
        tree.add_edge(u, middle, weight=weight())
        tree.add_edge(middle, v, weight=weight())
        tree.add_edge(middle, leaf, weight=weight())

    leaves = list(range(n_leaves))
    return TreeFixture(
        matrix=path_distance_matrix(tree, leaves),
        cherries=cherries_of(tree, leaves),
        tree=tree,
    )


def ultrametric_fixture(n: int, seed: int) -> DistanceMatrix:
    """Cophenetic distances of a random dendrogram with strictly increasing merge heights."""
    if n < 3:
        raise InvalidInputError(f"ultrametric fixture needs n >= 3, got {n}")
    stream = CounterStream(seed, Stream.ULTRAMETRIC)
    active = list(range(n))
    sizes = {leaf: 1 for leaf in range(n)}
    linkage = np.empty((n - 1, 4), dtype=np.float64)
    height = 0.0
    for step in range(n - 1):
        first = active.pop(int(stream.integers(3 * step, 0, len(active))[0]))
        second = active.pop(int(stream.integers(3 * step + 1, 0, len(active))[0]))
        height += 0.1 + float(stream.uniform(3 * step + 2)[0])
        cluster = n + step
        sizes[cluster] = sizes[first] + sizes[second]
        linkage[step] = (min(first, second), max(first, second), height, sizes[cluster])
        active.append(cluster)
    condensed = cophenet(linkage)
    return DistanceMatrix(
        entries=squareform(condensed), metric_tag="graph_shortest_path", validated=True
    )


def generate(spec: SyntheticSpec) -> EmbeddingSet | DistanceMatrix:
    if spec.kind == "sphere":
        return sample_sphere(spec.n, spec.dim, spec.seed)
    if spec.kind == "poincare_disk":
        return sample_poincare_disk(spec.n, spec.seed)
    if spec.kind == "dense_graph":
        return sample_dense_graph(spec.n, spec.p, spec.seed)
    if spec.kind == "tree_metric":
        return tree_metric_fixture(spec.n, spec.seed).matrix
    return ultrametric_fixture(spec.n, spec.seed)


def space_distance_matrix(spec: SyntheticSpec) -> DistanceMatrix:
    """Distance matrix of a synthetic space; disk points use the Poincaré metric."""
    space = generate(spec)
    if isinstance(space, DistanceMatrix):
        return space
    kind = "poincare" if spec.kind == "poincare_disk" else "euclidean"
    return build_distance_matrix(space, kind)
