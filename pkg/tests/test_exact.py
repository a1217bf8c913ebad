import itertools

import networkx as nx
import pytest

from ksl.exact import chromatic_number, independence_number, max_clique_size


def masks(graph: nx.Graph) -> list[int]:
    out = [0] * graph.number_of_nodes()
    for u, v in graph.edges():
        out[u] |= 1 << v
        out[v] |= 1 << u
    return out


def brute_alpha(graph):
    nodes = list(graph)
    for k in range(len(nodes), 0, -1):
        for sub in itertools.combinations(nodes, k):
            if not any(graph.has_edge(a, b) for a, b in itertools.combinations(sub, 2)):
                return k
    return 0


@pytest.mark.parametrize(
    "graph, alpha, chi",
    [
        (nx.cycle_graph(5), 2, 3),
        (nx.complete_graph(6), 1, 6),
        (nx.petersen_graph(), 4, 3),
        (nx.complete_bipartite_graph(3, 4), 4, 2),
        (nx.empty_graph(4), 4, 1),
    ],
)
def test_known_graphs(graph, alpha, chi):
    m = masks(graph)
    assert independence_number(m) == alpha
    assert chromatic_number(m) == chi


@pytest.mark.parametrize("seed", range(8))
def test_random_graphs_against_brute_force(seed):
    g = nx.gnp_random_graph(11, 0.4, seed=seed)
    m = masks(g)
    assert independence_number(m) == brute_alpha(g)
    assert max_clique_size(m) == max(len(c) for c in nx.find_cliques(g))


def test_loops():
    m = [0b011, 0b001, 0]  # vertex 0 has a loop
    assert independence_number(m) == 2
    with pytest.raises(ValueError):
        chromatic_number(m)
