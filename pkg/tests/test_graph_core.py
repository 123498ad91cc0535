import random

import pytest

from bipmatch.graph_core import (BipartiteGraph, Matching, S_ID, T_ID, augment,
                                 core_of_well_structured, left_id, parse_graph_text,
                                 residual_graph, right_id, validate_well_structured,
                                 write_graph_text)
from conftest import residual_of_random


def edge_pairs(h):
    return {(h.g.tail[e], h.g.head[e]) for e in h.g.live_edges()}


def test_residual_single_unmatched_edge():
    g = BipartiteGraph(1, 1, ((0, 0),))
    h = residual_graph(g, Matching())
    u, v = left_id(g, 0), right_id(g, 0)
    assert edge_pairs(h) == {(S_ID, u), (u, v), (v, T_ID)}


def test_residual_single_matched_edge():
    g = BipartiteGraph(1, 1, ((0, 0),))
    h = residual_graph(g, Matching([(0, 0)]))
    u, v = left_id(g, 0), right_id(g, 0)
    assert edge_pairs(h) == {(v, u)}
    (eid,) = h.g.live_edges()
    assert h.special[eid]


def test_residual_two_by_two_half_matched():
    # edges a-x, b-y with (a,x) matched: expect (x,a), (s,b), (b,y), (y,t)
    g = BipartiteGraph(2, 2, ((0, 0), (1, 1)))
    h = residual_graph(g, Matching([(0, 0)]))
    a, b = left_id(g, 0), left_id(g, 1)
    x, y = right_id(g, 0), right_id(g, 1)
    assert edge_pairs(h) == {(x, a), (S_ID, b), (b, y), (y, T_ID)}
    assert validate_well_structured(h) == []


def test_residual_rejects_invalid_matching():
    g = BipartiteGraph(2, 2, ((0, 0), (0, 1)))
    with pytest.raises(ValueError):
        Matching([(0, 0), (0, 1)])
    with pytest.raises(ValueError):
        residual_graph(g, Matching([(1, 0)]))  # pair is not an edge


def test_augment_single_path():
    g = BipartiteGraph(1, 1, ((0, 0),))
    m = augment(g, Matching(), [[S_ID, left_id(g, 0), right_id(g, 0), T_ID]])
    assert m.pairs == {(0, 0)}


def test_augment_alternating_path():
    # 2x2 complete-ish: edges a-v, u-v, u-b with (u,v) matched;
    # augmenting path s,a,v,u,b,t yields {(a,v),(u,b)}
    g = BipartiteGraph(2, 2, ((0, 0), (1, 0), (1, 1)))
    m0 = Matching([(1, 0)])
    a, u = left_id(g, 0), left_id(g, 1)
    v, b = right_id(g, 0), right_id(g, 1)
    m1 = augment(g, m0, [[S_ID, a, v, u, b, T_ID]])
    assert m1.pairs == {(0, 0), (1, 1)}
    assert len(m1) == 2


def test_augment_empty_is_identity():
    g = BipartiteGraph(2, 2, ((0, 0), (1, 1)))
    m0 = Matching([(0, 0)])
    m1 = augment(g, m0, [])
    assert m1.pairs == m0.pairs


def test_augment_rejects_shared_internal_vertex():
    g = BipartiteGraph(2, 1, ((0, 0), (1, 0)))
    v = right_id(g, 0)
    with pytest.raises(ValueError):
        augment(g, Matching(), [
            [S_ID, left_id(g, 0), v, T_ID],
            [S_ID, left_id(g, 1), v, T_ID],
        ])


def test_augment_rejects_missing_edge():
    g = BipartiteGraph(1, 1, ((0, 0),))
    with pytest.raises(ValueError):
        augment(g, Matching([(0, 0)]), [[S_ID, left_id(g, 0), right_id(g, 0), T_ID]])


def test_validate_flags_bipartite_violation():
    g = BipartiteGraph(2, 1, ((0, 0),))
    h = residual_graph(g, Matching())
    h.add_edge(left_id(g, 0), left_id(g, 1))
    report = validate_well_structured(h)
    assert any("bipartite" in msg for msg in report)


def test_validate_flags_parallel_copy_bound():
    g = BipartiteGraph(1, 1, ((0, 0),))
    h = residual_graph(g, Matching([(0, 0)]))
    u, v = left_id(g, 0), right_id(g, 0)
    h.size_m = 8  # allows at most log2(8)-1 = 2 parallel copies
    for _ in range(4):
        h.add_edge(v, u, special=True)
    report = validate_well_structured(h)
    assert any("parallel copies" in msg for msg in report)


def test_validate_flags_degree_violations():
    g = BipartiteGraph(2, 2, ((0, 0), (1, 1)))
    h = residual_graph(g, Matching([(0, 0), (1, 1)]))
    # second special partner for the same R vertex
    h.add_edge(right_id(g, 0), left_id(g, 1), special=True)
    report = validate_well_structured(h)
    assert any("several partners" in msg or "out-degree" in msg for msg in report)


def test_round_trip_augment_keeps_structure():
    rng = random.Random(5)
    for _ in range(25):
        g, m, h = residual_of_random(rng, rng.randint(2, 9), rng.randint(2, 9), 0.4)
        assert validate_well_structured(h) == []
        # find one augmenting path by BFS, if any
        parent = {S_ID: None}
        stack = [S_ID]
        while stack:
            x = stack.pop(0)
            for eid in h.g.out_live(x):
                y = h.g.head[eid]
                if y not in parent:
                    parent[y] = x
                    stack.append(y)
        if T_ID not in parent:
            continue
        path = [T_ID]
        while path[-1] != S_ID:
            path.append(parent[path[-1]])
        path.reverse()
        m2 = augment(g, m, [path])
        h2 = residual_graph(g, m2)
        assert validate_well_structured(h2) == []
        assert len(m2) == len(m) + 1


def test_edge_disjoint_paths_are_internally_vertex_disjoint():
    rng = random.Random(9)
    for _ in range(20):
        g, m, h = residual_of_random(rng, rng.randint(3, 8), rng.randint(3, 8), 0.5)
        # greedily peel edge-disjoint s-t paths
        used = set()
        paths = []
        while True:
            parent = {S_ID: None}
            queue = [S_ID]
            while queue:
                x = queue.pop(0)
                for eid in h.g.out_live(x):
                    if eid in used:
                        continue
                    y = h.g.head[eid]
                    if y not in parent:
                        parent[y] = (x, eid)
                        queue.append(y)
            if T_ID not in parent:
                break
            path = []
            cur = T_ID
            while cur != S_ID:
                prev, eid = parent[cur]
                path.append(eid)
                cur = prev
            used |= set(path)
            verts = [h.g.tail[e] for e in reversed(path)] + [T_ID]
            paths.append(verts)
        internal = [v for p in paths for v in p[1:-1]]
        assert len(internal) == len(set(internal))


def test_core_of_well_structured_collapses_parallels():
    g = BipartiteGraph(1, 1, ((0, 0),))
    h = residual_graph(g, Matching([(0, 0)]))
    u, v = left_id(g, 0), right_id(g, 0)
    h.add_edge(v, u, special=True)
    core, ids = core_of_well_structured(h)
    assert core.live_m == 1
    assert ids == [u, v]


def test_graph_text_round_trip():
    g = BipartiteGraph(3, 2, ((0, 0), (1, 1), (2, 0)))
    text = write_graph_text(g)
    g2 = parse_graph_text(text)
    assert g2.n_left == 3 and g2.n_right == 2
    assert set(g2.edges) == set(g.edges)


def test_graph_text_comments_and_errors():
    ok = "c hello\np bm 2 2 1\ne 1 2\n"
    g = parse_graph_text(ok)
    assert g.edges == ((0, 1),)
    for bad in ("e 1 1\np bm 1 1 1\n",          # edge before problem line
                "p bm 1 1 1\ne 2 1\n",          # out of range
                "p bm 1 1 2\ne 1 1\n",          # declared count mismatch
                "q zz\n"):
        with pytest.raises(ValueError):
            parse_graph_text(bad)
