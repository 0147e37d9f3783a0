"""Brute-force diamond lattices: explicit graphs and exhaustive path enumeration.

Everything here is deliberately naive. The lattice is built as a directed
graph by literally replacing bonds, trajectories are enumerated as vertex
paths from the south pole to the north pole, and averages are plain means
over those paths. It serves as an oracle for the recursions elsewhere in the
package and is only meant for tiny instances.
"""

import math
from dataclasses import dataclass
from functools import cached_property

import networkx as nx
import numpy as np
from scipy.special import logsumexp

from .errors import DomainError, ResourceError
from .model import StandardGaussian, combine_children, log_m
from .walks import path_count

PATH_BUDGET = 10**6


@dataclass(frozen=True)
class DiamondLattice:
    """Level-``n`` diamond with ``b`` branches of ``s`` bonds per replacement.

    The wall always follows branch 0. Wall bond ``i`` (0-based) joins the wall
    vertices ``d_i`` and ``d_{i+1}``.
    """

    b: int
    s: int
    n: int
    graph: nx.DiGraph
    wall_vertices: tuple

    @property
    def source(self):
        return self.wall_vertices[0]

    @property
    def sink(self):
        return self.wall_vertices[-1]

    @property
    def n_wall_bonds(self):
        return self.s**self.n

    @cached_property
    def paths(self):
        """Every source-to-sink path, each as a tuple of vertices."""
        expected, _ = path_count(self.b, self.s, self.n)
        if expected is None or expected > PATH_BUDGET:
            raise ResourceError(
                f"{self.b, self.s, self.n} lattice has more than {PATH_BUDGET} trajectories"
            )
        return [tuple(p) for p in nx.all_simple_paths(self.graph, self.source, self.sink)]

    @cached_property
    def wall_incidence(self):
        """0/1 matrix: row = trajectory, column = wall bond it uses."""
        hits = np.zeros((len(self.paths), self.n_wall_bonds), dtype=np.int8)
        for row, path in enumerate(self.paths):
            for u, v in zip(path[:-1], path[1:]):
                w = self.graph.edges[u, v]["wall"]
                if w is not None:
                    hits[row, w] = 1
        return hits


def build_lattice(b, s, n):
    """Replace every bond ``n`` times by ``b`` parallel chains of ``s`` bonds."""
    if b < 2 or s < 2 or n < 0:
        raise DomainError(f"need b, s >= 2 and n >= 0, got b={b}, s={s}, n={n}")
    _, log_count = path_count(b, s, n)
    if log_count > math.log(PATH_BUDGET):
        raise ResourceError(f"lattice ({b}, {s}, {n}) exceeds the trajectory budget")
    edges = [(0, 1, 0)]  # (tail, head, wall index or None)
    next_vertex = 2
    for _ in range(n):
        new_edges = []
        for tail, head, wall in edges:
            for branch in range(b):
                chain = [tail]
                for _ in range(s - 1):
                    chain.append(next_vertex)
                    next_vertex += 1
                chain.append(head)
                for j in range(s):
                    on_wall = wall is not None and branch == 0
                    new_edges.append((chain[j], chain[j + 1], wall * s + j if on_wall else None))
        edges = new_edges
    graph = nx.DiGraph()
    wall_edges = {}
    for tail, head, wall in edges:
        graph.add_edge(tail, head, wall=wall)
        if wall is not None:
            wall_edges[wall] = (tail, head)
    wall_vertices = [wall_edges[0][0]] + [wall_edges[i][1] for i in range(s**n)]
    return DiamondLattice(b, s, n, graph, tuple(wall_vertices))


def enumerate_partition(lattice, disorder, params, law=None):
    """``log R_n`` as the uniform average over all trajectories of
    ``exp(sum of visited wall-bond energies)``.

    ``disorder`` holds one ``omega`` per wall bond; bond energies are
    ``beta * omega + h - log M(beta)`` with ``M`` taken from ``law``
    (standard Gaussian by default).
    """
    omega = np.asarray(disorder, dtype=float)
    if omega.shape != (lattice.n_wall_bonds,):
        raise DomainError(f"need {lattice.n_wall_bonds} disorder values, got {omega.shape}")
    law = StandardGaussian() if law is None else law
    energies = params.beta * omega + (params.h - log_m(law, params.beta))
    return enumerate_partition_from_energies(lattice, energies)


def enumerate_partition_from_energies(lattice, energies):
    """Same as ``enumerate_partition`` with the bond energies given directly."""
    x = np.asarray(energies, dtype=float)
    visited = lattice.wall_incidence @ x
    return float(logsumexp(visited) - math.log(len(lattice.paths)))


def enumerate_escape_probability(lattice):
    """Fraction of trajectories that use no wall bond."""
    misses = ~lattice.wall_incidence.any(axis=1)
    return float(misses.sum()) / len(lattice.paths)


def enumerate_crossing_probability(lattice, k, j0):
    """Probability that the walk goes through the ``j0``-th wall k-subdiamond
    (1-based) and uses no wall bond outside it."""
    if not 0 <= k <= lattice.n:
        raise DomainError(f"need 0 <= k <= n, got k={k}")
    n_sub = lattice.s ** (lattice.n - k)
    if not 1 <= j0 <= n_sub:
        raise DomainError(f"j0 must be in [1, {n_sub}], got {j0}")
    width = lattice.s**k
    lo, hi = (j0 - 1) * width, j0 * width
    entry, exit_ = lattice.wall_vertices[lo], lattice.wall_vertices[hi]
    inc = lattice.wall_incidence
    outside = np.concatenate([inc[:, :lo], inc[:, hi:]], axis=1).any(axis=1)
    count = 0
    for row, path in enumerate(lattice.paths):
        if not outside[row] and entry in path and exit_ in path:
            count += 1
    return count / len(lattice.paths)


def recursion_log_partition(energies, b, s):
    """Fold leaf log-weights level by level with the one-step map."""
    level = [float(x) for x in energies]
    while len(level) > 1:
        level = [combine_children(level[i : i + s], b, s) for i in range(0, len(level), s)]
    return level[0]
