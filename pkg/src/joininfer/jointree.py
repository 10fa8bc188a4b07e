"""Left-join path generation over the accepted IND graph.

Tables are nodes; accepted INDs are directed edges from the FK-holding
table to the key-holding table. Roots are the most-referenced tables; for
each root, reachable dimension tables are visited longest-path-first, the
best simple path (maximum product of hop scores) is kept, and hops of the
losing alternatives are discarded from further consideration so later
selections cannot close a cycle.

Sink tables with several incoming references ("blackhole" shapes) get
synthetic reverse edges so they are usable as traversal starting points.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Iterator, Optional

from .ind import InclusionDependency

log = logging.getLogger(__name__)

DEFAULT_MAX_HOPS = 8
DEFAULT_BLACKHOLE_MIN_IN = 2


@dataclass(frozen=True)
class JoinEdge:
    from_table: str
    to_table: str
    ind_id: str
    score: float
    synthetic: bool = False

    @property
    def key(self) -> tuple[str, str, str]:
        return (self.from_table, self.to_table, self.ind_id)


@dataclass
class JoinGraph:
    nodes: set[str] = field(default_factory=set)
    edges: list[JoinEdge] = field(default_factory=list)

    def out_edges(self, table: str) -> list[JoinEdge]:
        return sorted(
            (e for e in self.edges if e.from_table == table),
            key=lambda e: e.key,
        )

    def in_degree(self, table: str, include_synthetic: bool = True) -> int:
        return sum(
            1
            for e in self.edges
            if e.to_table == table and (include_synthetic or not e.synthetic)
        )

    def out_degree(self, table: str) -> int:
        return sum(1 for e in self.edges if e.from_table == table)


@dataclass
class JoinPath:
    root: str
    hops: list[JoinEdge]
    combined_score: float
    topo_order: list[str]

    def to_dict(self) -> dict:
        return {
            "root": self.root,
            "combined_score": self.combined_score,
            "topo_order": self.topo_order,
            "hops": [
                {
                    "from": h.from_table,
                    "to": h.to_table,
                    "ind": h.ind_id,
                    "score": h.score,
                    "synthetic": h.synthetic,
                }
                for h in self.hops
            ],
        }


def build_graph(final_inds: list[InclusionDependency]) -> JoinGraph:
    graph = JoinGraph()
    for ind in final_inds:
        graph.nodes.add(ind.fk[0])
        graph.nodes.add(ind.pk[0])
        graph.edges.append(
            JoinEdge(
                from_table=ind.fk[0],
                to_table=ind.pk[0],
                ind_id=ind.id,
                score=ind.score,
            )
        )
    graph.edges.sort(key=lambda e: e.key)
    return graph


def _find_cycle(graph: JoinGraph) -> Optional[list[JoinEdge]]:
    """Return the edges of some directed cycle, or None."""
    color: dict[str, int] = {}
    stack: list[JoinEdge] = []
    result: Optional[list[JoinEdge]] = None

    def visit(node: str) -> bool:
        nonlocal result
        color[node] = 1
        for edge in graph.out_edges(node):
            if color.get(edge.to_table, 0) == 1:
                start = edge.to_table
                cyc = [edge]
                for e in reversed(stack):
                    cyc.append(e)
                    if e.from_table == start:
                        break
                result = list(reversed(cyc))
                return True
            if color.get(edge.to_table, 0) == 0:
                stack.append(edge)
                if visit(edge.to_table):
                    return True
                stack.pop()
        color[node] = 2
        return False

    for node in sorted(graph.nodes):
        if color.get(node, 0) == 0 and visit(node):
            return result
    return None


def break_cycles(graph: JoinGraph) -> JoinGraph:
    """Drop the lowest-score edge of each cycle until the graph is a DAG."""
    while True:
        cycle = _find_cycle(graph)
        if cycle is None:
            return graph
        victim = min(cycle, key=lambda e: (e.score, e.key))
        log.warning(
            "cyclic IND graph: dropping lowest-score edge %s (score %.3f)",
            victim.ind_id,
            victim.score,
        )
        graph.edges.remove(victim)


def detect_blackholes(graph: JoinGraph, min_in_degree: int = DEFAULT_BLACKHOLE_MIN_IN) -> JoinGraph:
    """Add synthetic reverse edges from referenced-only sinks to their referrers."""
    synthetic = []
    for node in sorted(graph.nodes):
        if graph.out_degree(node) == 0 and graph.in_degree(node) >= min_in_degree:
            for edge in sorted(
                (e for e in graph.edges if e.to_table == node and not e.synthetic),
                key=lambda e: e.key,
            ):
                synthetic.append(
                    JoinEdge(
                        from_table=node,
                        to_table=edge.from_table,
                        ind_id=edge.ind_id,
                        score=edge.score,
                        synthetic=True,
                    )
                )
    graph.edges.extend(synthetic)
    graph.edges.sort(key=lambda e: e.key)
    return graph


def _simple_paths(
    graph: JoinGraph,
    start: str,
    goal: str,
    excluded: set[tuple[str, str, str]],
    max_hops: int,
) -> Iterator[list[JoinEdge]]:
    """All simple paths start -> goal avoiding excluded edges, DFS order."""
    path: list[JoinEdge] = []
    visited = {start}
    truncated = False

    def dfs(node: str) -> Iterator[list[JoinEdge]]:
        nonlocal truncated
        if node == goal and path:
            yield list(path)
            return
        if len(path) >= max_hops:
            truncated = True
            return
        for edge in graph.out_edges(node):
            if edge.key in excluded or edge.to_table in visited:
                continue
            visited.add(edge.to_table)
            path.append(edge)
            yield from dfs(edge.to_table)
            path.pop()
            visited.remove(edge.to_table)

    yield from dfs(start)
    if truncated:
        log.warning("path enumeration from %s truncated at %d hops", start, max_hops)


def longest_path_length(
    graph: JoinGraph,
    start: str,
    goal: str,
    excluded: set[tuple[str, str, str]] | None = None,
    max_hops: int = DEFAULT_MAX_HOPS,
) -> Optional[int]:
    """Length (in hops) of the longest simple path, or None if unreachable."""
    if start == goal:
        return 0
    best = None
    for p in _simple_paths(graph, start, goal, excluded or set(), max_hops):
        if best is None or len(p) > best:
            best = len(p)
    return best


def _reachable(graph: JoinGraph, root: str, excluded: set[tuple[str, str, str]]) -> set[str]:
    seen = {root}
    frontier = [root]
    while frontier:
        node = frontier.pop()
        for edge in graph.out_edges(node):
            if edge.key in excluded or edge.to_table in seen:
                continue
            seen.add(edge.to_table)
            frontier.append(edge.to_table)
    return seen - {root}


def generate_join_paths(
    final_inds: list[InclusionDependency],
    blackhole_min_in: int = DEFAULT_BLACKHOLE_MIN_IN,
    max_hops: int = DEFAULT_MAX_HOPS,
    all_tables: list[str] | None = None,
) -> list[JoinPath]:
    """Best-score join paths per (root, dimension) with cycle-safe discards.

    Roots are the left-most tables: those holding at least one foreign key,
    ranked by how many they hold. Blackhole tables qualify through their
    synthetic reverse edges, but those edges do not count toward ranking,
    so augmentation cannot inflate a root. Dimensions already covered by an
    earlier, longer selected path under the same root are not emitted
    again. Tables that neither reference nor are referenced come out as
    singleton paths.
    """
    graph = build_graph(final_inds)
    break_cycles(graph)
    detect_blackholes(graph, blackhole_min_in)

    fk_count: dict[str, int] = {}
    for edge in graph.edges:
        key = edge.from_table
        fk_count.setdefault(key, 0)
        if not edge.synthetic:
            fk_count[key] += 1
    roots = sorted(fk_count, key=lambda t: (-fk_count[t], t))

    paths: list[JoinPath] = []
    for root in roots:
        discarded: set[tuple[str, str, str]] = set()
        covered: set[str] = set()
        dims = sorted(
            _reachable(graph, root, discarded),
            key=lambda d: (-(longest_path_length(graph, root, d, set(), max_hops) or 0), d),
        )
        for dim in dims:
            if dim in covered:
                continue
            alternatives = list(_simple_paths(graph, root, dim, discarded, max_hops))
            if not alternatives:
                continue
            best_path = None
            best_score = 0.0
            for p in alternatives:
                score = 1.0
                for hop in p:
                    score *= hop.score
                if (
                    best_path is None
                    or score > best_score
                    or (
                        score == best_score
                        and [h.to_table for h in p] < [h.to_table for h in best_path]
                    )
                ):
                    best_score = score
                    best_path = p
            assert best_path is not None
            paths.append(
                JoinPath(
                    root=root,
                    hops=best_path,
                    combined_score=best_score,
                    topo_order=[root] + [h.to_table for h in best_path],
                )
            )
            covered.update(h.to_table for h in best_path)
            best_keys = {h.key for h in best_path}
            for p in alternatives:
                for hop in p:
                    if hop.key not in best_keys:
                        discarded.add(hop.key)

    involved = {e.from_table for e in graph.edges} | {e.to_table for e in graph.edges}
    for table in sorted(all_tables or []):
        if table not in involved:
            paths.append(JoinPath(root=table, hops=[], combined_score=1.0, topo_order=[table]))
    return paths
