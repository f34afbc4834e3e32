import unittest
from itertools import combinations

import networkx as nx
import numpy as np

from src.entities.errors import DomainError, NotChordalError
from src.entities.pattern import (Pattern, clique_tree, completion_plan, completion_sequence, fill_in,
                                  is_chordal, maximal_chordal_subpattern, maximum_cardinality_search,
                                  validate_positivity_domain)


def cycle(n):
    return Pattern.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def random_pattern(n, p, rng):
    edges = [(x, y) for x, y in combinations(range(n), 2) if rng.random() < p]
    return Pattern.from_edges(n, edges)


def has_chordless_cycle(p):
    """Brute force: some vertex set of size >= 4 induces a cycle."""
    g = p.to_graph()
    for size in range(4, p.n + 1):
        for subset in combinations(range(p.n), size):
            sub = g.subgraph(subset)
            if all(deg == 2 for _, deg in sub.degree()) and nx.is_connected(sub):
                return True
    return False


def is_peo(p, order):
    adj = p.adjacency()
    position = {v: i for i, v in enumerate(order)}
    for v in order:
        later = [u for u in adj[v] if position[u] > position[v]]
        if any(b not in adj[a] for a, b in combinations(later, 2)):
            return False
    return True


class TestPatternValidation(unittest.TestCase):
    def test_missing_diagonal(self):
        with self.assertRaises(DomainError) as ctx:
            validate_positivity_domain(2, [(0, 0), (0, 1), (1, 0)])
        self.assertEqual(ctx.exception.missing_diagonal, [1])

    def test_unmirrored_pair(self):
        with self.assertRaises(DomainError) as ctx:
            validate_positivity_domain(2, [(0, 0), (1, 1), (0, 1)])
        self.assertEqual(ctx.exception.asymmetric_pairs, [(1, 0)])

    def test_out_of_range(self):
        with self.assertRaises(DomainError) as ctx:
            validate_positivity_domain(2, [(0, 0), (1, 1), (0, 2), (2, 0)])
        self.assertIn((0, 2), ctx.exception.out_of_range)

    def test_constructors(self):
        self.assertTrue(Pattern.full(3).is_full)
        self.assertEqual(Pattern.diagonal(3).edges(), [])
        p = Pattern.from_edges(3, [(1, 0), (1, 2)])
        self.assertEqual(p.edges(), [(0, 1), (1, 2)])
        self.assertEqual(p.missing_pairs(), [(0, 2)])
        self.assertEqual(sorted(p.to_graph().edges()), [(0, 1), (1, 2)])

    def test_inflate(self):
        p = Pattern.from_edges(3, [(0, 1), (1, 2)])
        q = p.inflate(2)
        self.assertEqual(q.n, 6)
        self.assertEqual(len(q.pairs), 4 * len(p.pairs))
        self.assertIn((0 * 3 + 0, 1 * 3 + 1), q)
        self.assertNotIn((0 * 3 + 0, 1 * 3 + 2), q)
        self.assertTrue(is_chordal(q).chordal)


class TestChordality(unittest.TestCase):
    def setUp(self):
        self.rng = np.random.default_rng(3)

    def test_path_is_chordal(self):
        verdict = is_chordal(Pattern.from_edges(3, [(0, 1), (1, 2)]))
        self.assertTrue(verdict)
        self.assertEqual(sorted(verdict.order), [0, 1, 2])

    def test_cycle_witness(self):
        for n in (4, 5, 6):
            verdict = is_chordal(cycle(n))
            self.assertFalse(verdict)
            self.assertEqual(sorted(verdict.cycle), list(range(n)))

    def test_complete_and_empty(self):
        self.assertTrue(is_chordal(Pattern.full(5)))
        self.assertTrue(is_chordal(Pattern.diagonal(5)))

    def test_mcs_tie_break_is_lowest_index(self):
        self.assertEqual(maximum_cardinality_search(Pattern.diagonal(4)), [0, 1, 2, 3])

    def test_against_brute_force(self):
        for _ in range(120):
            n = int(self.rng.integers(1, 8))
            p = random_pattern(n, float(self.rng.uniform(0.2, 0.8)), self.rng)
            verdict = is_chordal(p)
            self.assertEqual(verdict.chordal, not has_chordless_cycle(p))
            if verdict.chordal:
                self.assertTrue(is_peo(p, verdict.order))
            else:
                c = list(verdict.cycle)
                self.assertGreaterEqual(len(c), 4)
                sub = p.to_graph().subgraph(c)
                self.assertEqual(sub.number_of_edges(), len(c))
                for a, b in zip(c, c[1:] + c[:1]):
                    self.assertIn((a, b), p)


class TestCliqueTree(unittest.TestCase):
    def setUp(self):
        self.rng = np.random.default_rng(4)

    def test_path(self):
        tree = clique_tree(Pattern.from_edges(3, [(0, 1), (1, 2)]))
        self.assertEqual([sorted(c) for c in tree.cliques], [[0, 1], [1, 2]])
        self.assertEqual(len(tree.tree_edges), 1)
        self.assertEqual(tree.separator(tree.tree_edges[0]), frozenset({1}))

    def test_complete_graph(self):
        tree = clique_tree(Pattern.full(4))
        self.assertEqual([sorted(c) for c in tree.cliques], [[0, 1, 2, 3]])
        self.assertEqual(tree.tree_edges, ())

    def test_star(self):
        tree = clique_tree(Pattern.from_edges(4, [(0, 1), (0, 2), (0, 3)]))
        self.assertEqual([sorted(c) for c in tree.cliques], [[0, 1], [0, 2], [0, 3]])
        self.assertEqual(len(tree.tree_edges), 2)

    def test_isolated_points_are_singleton_cliques(self):
        tree = clique_tree(Pattern.from_edges(4, [(1, 2)]))
        self.assertEqual([sorted(c) for c in tree.cliques], [[0], [1, 2], [3]])
        self.assertEqual(len(tree.tree_edges), 2)

    def test_cliques_are_the_maximal_ones(self):
        for _ in range(20):
            p, _ = fill_in(random_pattern(int(self.rng.integers(2, 10)), 0.4, self.rng))
            expected = sorted(sorted(c) for c in nx.find_cliques(p.to_graph()))
            self.assertEqual([sorted(c) for c in clique_tree(p).cliques], expected)

    def test_rejects_cycle(self):
        with self.assertRaises(NotChordalError):
            clique_tree(cycle(4))

    def test_running_intersection_on_random_chordal(self):
        for _ in range(40):
            n = int(self.rng.integers(2, 10))
            p, _ = fill_in(random_pattern(n, 0.35, self.rng))
            tree = clique_tree(p)
            graph = nx.Graph()
            graph.add_nodes_from(range(len(tree.cliques)))
            graph.add_edges_from(tree.tree_edges)
            self.assertTrue(nx.is_tree(graph))
            for x, y in p.pairs:
                self.assertTrue(any(x in c and y in c for c in tree.cliques))
            for v in range(n):
                holders = [i for i, c in enumerate(tree.cliques) if v in c]
                self.assertTrue(nx.is_connected(graph.subgraph(holders)))


class TestFillIn(unittest.TestCase):
    def setUp(self):
        self.rng = np.random.default_rng(9)

    def test_chordal_input_unchanged(self):
        p = Pattern.from_edges(3, [(0, 1), (1, 2)])
        filled, added = fill_in(p)
        self.assertEqual(filled, p)
        self.assertEqual(added, [])

    def test_four_cycle(self):
        filled, added = fill_in(cycle(4))
        self.assertEqual(len(added), 1)
        self.assertTrue(is_chordal(filled))

    def test_five_cycle_matches_minimum_fill(self):
        c5 = cycle(5)
        best = None
        for size in range(len(c5.missing_pairs()) + 1):
            if any(is_chordal(c5.with_edges(extra)).chordal
                   for extra in combinations(c5.missing_pairs(), size)):
                best = size
                break
        filled, added = fill_in(c5)
        self.assertEqual(best, 2)
        self.assertEqual(len(added), best)
        self.assertTrue(is_chordal(filled))

    def test_random_supergraph(self):
        for _ in range(40):
            p = random_pattern(int(self.rng.integers(2, 10)), 0.4, self.rng)
            filled, added = fill_in(p)
            self.assertTrue(is_chordal(filled))
            self.assertTrue(p.pairs <= filled.pairs)
            self.assertEqual(len(filled.edges()), len(p.edges()) + len(added))


class TestCompletionOrder(unittest.TestCase):
    def setUp(self):
        self.rng = np.random.default_rng(12)

    def test_path(self):
        self.assertEqual(completion_sequence(Pattern.from_edges(3, [(0, 1), (1, 2)])), [(0, 2)])

    def test_full_pattern_has_nothing_to_fill(self):
        self.assertEqual(completion_sequence(Pattern.full(3)), [])

    def test_every_step_stays_chordal(self):
        for _ in range(30):
            p, _ = fill_in(random_pattern(int(self.rng.integers(2, 9)), 0.3, self.rng))
            current = p
            plan = completion_plan(p)
            self.assertEqual(sorted((s.x, s.y) for s in plan), p.missing_pairs())
            for step in plan:
                common = current.neighbors(step.x) & current.neighbors(step.y)
                self.assertEqual(set(step.separator), common)
                current = current.with_edges([(step.x, step.y)])
                self.assertTrue(is_chordal(current))
            self.assertTrue(current.is_full)

    def test_rejects_non_chordal(self):
        with self.assertRaises(NotChordalError):
            completion_sequence(cycle(4))

    def test_maximal_chordal_subpattern(self):
        sub = maximal_chordal_subpattern(cycle(4))
        self.assertEqual(sub.edges(), [(0, 1), (0, 3), (1, 2)])
        self.assertTrue(is_chordal(sub))


if __name__ == '__main__':
    unittest.main()
