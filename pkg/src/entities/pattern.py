"""
Pattern sets on a finite index set.

A Pattern is a symmetric, reflexive relation on {0, ..., n-1}: the positivity
domains on which partially defined Schur multipliers live. This module holds
chordality testing (maximum cardinality search with a chordless-cycle
witness), clique trees, minimum-degree fill-in and the one-entry-at-a-time
completion ordering.
"""

import logging
from dataclasses import dataclass
from itertools import combinations
from typing import Dict, FrozenSet, Iterable, List, Sequence, Set, Tuple

import networkx as nx

from src.entities.errors import DomainError, NotChordalError

logger = logging.getLogger(__name__)

Pair = Tuple[int, int]


@dataclass(frozen=True)
class Pattern:
    n: int
    pairs: FrozenSet[Pair]

    def __post_init__(self):
        pairs = frozenset((int(x), int(y)) for x, y in self.pairs)
        object.__setattr__(self, "pairs", pairs)
        out_of_range = sorted(p for p in pairs if not (0 <= p[0] < self.n and 0 <= p[1] < self.n))
        missing = [x for x in range(self.n) if (x, x) not in pairs]
        asymmetric = sorted((y, x) for x, y in pairs if (y, x) not in pairs)
        if out_of_range or missing or asymmetric:
            raise DomainError(missing, asymmetric, out_of_range)

    @classmethod
    def full(cls, n: int) -> "Pattern":
        return cls(n, frozenset((x, y) for x in range(n) for y in range(n)))

    @classmethod
    def diagonal(cls, n: int) -> "Pattern":
        return cls(n, frozenset((x, x) for x in range(n)))

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Pair]) -> "Pattern":
        """Build a pattern from undirected edges, adding mirrors and the diagonal."""
        pairs = {(x, x) for x in range(n)}
        for x, y in edges:
            pairs.add((x, y))
            pairs.add((y, x))
        return cls(n, frozenset(pairs))

    def __contains__(self, pair: Pair) -> bool:
        return pair in self.pairs

    @property
    def is_full(self) -> bool:
        return len(self.pairs) == self.n * self.n

    def edges(self) -> List[Pair]:
        """Off-diagonal pairs with x < y, sorted."""
        return sorted((x, y) for x, y in self.pairs if x < y)

    def missing_pairs(self) -> List[Pair]:
        """Unspecified pairs with x < y, sorted."""
        return [(x, y) for x, y in combinations(range(self.n), 2) if (x, y) not in self.pairs]

    def neighbors(self, x: int) -> Set[int]:
        return {y for y in range(self.n) if y != x and (x, y) in self.pairs}

    def adjacency(self) -> Dict[int, Set[int]]:
        adj = {x: set() for x in range(self.n)}
        for x, y in self.pairs:
            if x != y:
                adj[x].add(y)
        return adj

    def with_edges(self, edges: Iterable[Pair]) -> "Pattern":
        pairs = set(self.pairs)
        for x, y in edges:
            pairs.add((x, y))
            pairs.add((y, x))
        return Pattern(self.n, frozenset(pairs))

    def to_graph(self) -> nx.Graph:
        """Undirected simple graph view (diagonal dropped)."""
        g = nx.Graph()
        g.add_nodes_from(range(self.n))
        g.add_edges_from(self.edges())
        return g

    def inflate(self, m: int) -> "Pattern":
        """
        The pattern on m copies of X: ((i,x),(j,y)) is in it iff (x,y) is in self.

        Index (i, x) maps to i * n + x. Chordality is preserved.
        """
        n = self.n
        pairs = frozenset((i * n + x, j * n + y)
                          for x, y in self.pairs for i in range(m) for j in range(m))
        return Pattern(m * n, pairs)


def validate_positivity_domain(n: int, raw_pairs: Iterable[Sequence[int]]) -> Pattern:
    """
    Validate raw pairs as a positivity domain without repairing them.

    Args:
        n: Size of the index set
        raw_pairs: Iterable of (x, y) index pairs

    Returns:
        Pattern: the validated pattern

    Raises:
        DomainError: listing missing diagonal points, unmirrored pairs and
            out-of-range indices
    """
    return Pattern(n, frozenset((int(p[0]), int(p[1])) for p in raw_pairs))


@dataclass(frozen=True)
class ChordalityVerdict:
    chordal: bool
    order: Tuple[int, ...] = ()  # perfect elimination ordering when chordal
    cycle: Tuple[int, ...] = ()  # chordless cycle of length >= 4 otherwise

    def __bool__(self) -> bool:
        return self.chordal


@dataclass(frozen=True)
class CliqueTree:
    cliques: Tuple[FrozenSet[int], ...]
    tree_edges: Tuple[Pair, ...]
    order: Tuple[int, ...]

    def separator(self, edge: Pair) -> FrozenSet[int]:
        i, j = edge
        return self.cliques[i] & self.cliques[j]


def maximum_cardinality_search(p: Pattern) -> List[int]:
    """Visit order of MCS; ties go to the lowest vertex index."""
    adj = p.adjacency()
    weight = [0] * p.n
    visited = [False] * p.n
    visit = []
    for _ in range(p.n):
        best = -1
        for v in range(p.n):
            if not visited[v] and (best < 0 or weight[v] > weight[best]):
                best = v
        visited[best] = True
        visit.append(best)
        for u in adj[best]:
            if not visited[u]:
                weight[u] += 1
    return visit


def _is_perfect_elimination_ordering(adj: Dict[int, Set[int]], order: Sequence[int]) -> bool:
    position = {v: i for i, v in enumerate(order)}
    for v in order:
        later = [u for u in adj[v] if position[u] > position[v]]
        for a, b in combinations(later, 2):
            if b not in adj[a]:
                return False
    return True


def _chordless_cycle(p: Pattern) -> List[int]:
    """
    Find a chordless cycle of length >= 4.

    Scans triples (v, a, b) with a, b non-adjacent neighbours of v and looks
    for a shortest a-b path avoiding v and v's other neighbours; such a path
    closes a chordless cycle through v.
    """
    adj = p.adjacency()
    g = p.to_graph()
    for v in range(p.n):
        for a, b in combinations(sorted(adj[v]), 2):
            if b in adj[a]:
                continue
            blocked = (adj[v] | {v}) - {a, b}
            allowed = [u for u in range(p.n) if u not in blocked]
            sub = g.subgraph(allowed)
            if nx.has_path(sub, a, b):
                path = nx.shortest_path(sub, a, b)
                return [v] + list(path)
    return []


def is_chordal(p: Pattern) -> ChordalityVerdict:
    """
    Decide chordality of a pattern.

    Returns:
        ChordalityVerdict: a perfect elimination ordering (the reversed MCS
        visit order) or a chordless cycle witness
    """
    order = list(reversed(maximum_cardinality_search(p)))
    if _is_perfect_elimination_ordering(p.adjacency(), order):
        return ChordalityVerdict(chordal=True, order=tuple(order))
    cycle = _chordless_cycle(p)
    logger.debug("pattern on %d points is not chordal, witness %s", p.n, cycle)
    return ChordalityVerdict(chordal=False, cycle=tuple(cycle))


def _require_chordal(p: Pattern) -> ChordalityVerdict:
    verdict = is_chordal(p)
    if not verdict.chordal:
        raise NotChordalError(list(verdict.cycle))
    return verdict


def _running_intersection_holds(cliques: Sequence[FrozenSet[int]], tree: nx.Graph, n: int) -> bool:
    for v in range(n):
        holders = [i for i, c in enumerate(cliques) if v in c]
        if holders and not nx.is_connected(tree.subgraph(holders)):
            return False
    return True


def clique_tree(p: Pattern) -> CliqueTree:
    """
    Maximal cliques of a chordal pattern joined by a tree with the running
    intersection property.

    The tree is a maximum-weight spanning tree of the clique intersection
    graph (weight = size of intersection, zero-weight edges included so that
    disconnected patterns still give a tree).

    Raises:
        NotChordalError: if the pattern is not chordal
    """
    verdict = _require_chordal(p)
    cliques = sorted(nx.chordal_graph_cliques(p.to_graph()), key=lambda c: tuple(sorted(c)))

    weighted = nx.Graph()
    weighted.add_nodes_from(range(len(cliques)))
    for i, j in combinations(range(len(cliques)), 2):
        weighted.add_edge(i, j, weight=len(cliques[i] & cliques[j]))
    tree = nx.maximum_spanning_tree(weighted, algorithm="kruskal")

    if not _running_intersection_holds(cliques, tree, p.n):
        raise AssertionError("clique tree violates the running intersection property")

    edges = tuple(sorted((min(i, j), max(i, j)) for i, j in tree.edges()))
    return CliqueTree(cliques=tuple(cliques), tree_edges=edges, order=verdict.order)


def fill_in(p: Pattern) -> Tuple[Pattern, List[Pair]]:
    """
    Chordal supergraph by minimum-degree elimination.

    Heuristic, not minimum fill. Chordal input is returned unchanged.

    Returns:
        Tuple of (chordal pattern, sorted list of added pairs x < y)
    """
    if is_chordal(p).chordal:
        return p, []

    adj = p.adjacency()
    remaining = set(range(p.n))
    added: Set[Pair] = set()
    while remaining:
        v = min(remaining, key=lambda u: (len(adj[u] & remaining), u))
        nbrs = sorted(adj[v] & remaining)
        for a, b in combinations(nbrs, 2):
            if b not in adj[a]:
                adj[a].add(b)
                adj[b].add(a)
                added.add((a, b))
        remaining.remove(v)

    added_pairs = sorted(added)
    filled = p.with_edges(added_pairs)
    logger.info("fill-in added %d pairs", len(added_pairs))
    return filled, added_pairs


@dataclass(frozen=True)
class PlannedFill:
    x: int
    y: int
    separator: Tuple[int, ...]


def completion_plan(p: Pattern) -> List[PlannedFill]:
    """
    Order the unspecified pairs so that every intermediate pattern is chordal.

    At each step the first clique-tree edge (Ci, Cj) of the current pattern is
    used: x = min(Ci \\ S), y = min(Cj \\ S) with S = Ci & Cj. S separates x
    from y, so adding (x, y) keeps the pattern chordal and S is exactly the
    common neighbourhood of x and y.

    Raises:
        NotChordalError: if the pattern is not chordal
    """
    _require_chordal(p)
    current = p
    plan = []
    while not current.is_full:
        tree = clique_tree(current)
        i, j = tree.tree_edges[0]
        sep = tree.cliques[i] & tree.cliques[j]
        a = min(tree.cliques[i] - sep)
        b = min(tree.cliques[j] - sep)
        x, y = min(a, b), max(a, b)
        plan.append(PlannedFill(x=x, y=y, separator=tuple(sorted(sep))))
        current = current.with_edges([(x, y)])
    return plan


def completion_sequence(p: Pattern) -> List[Pair]:
    return [(f.x, f.y) for f in completion_plan(p)]


def maximal_chordal_subpattern(p: Pattern) -> Pattern:
    """Greedy chordal subpattern: edges kept in lexicographic order while chordal."""
    current = Pattern.diagonal(p.n)
    for edge in p.edges():
        candidate = current.with_edges([edge])
        if is_chordal(candidate).chordal:
            current = candidate
    return current
