import numpy as np
import pytest

from oracles import enumerate_min_cut
from scribblemix.expansion import ExpansionConfig, SeedSet
from scribblemix.graphcut import SeedError, graph_cut, min_cut
from scribblemix.slic import SuperpixelMap


def test_two_node_hand_case():
    # cheapest cut: node 0 with the source, node 1 with the sink, pay the
    # crossing edge (1.0) only
    flow, side = min_cut(2, np.array([5.0, 0.0]), np.array([0.0, 3.0]), [(0, 1, 1.0)])
    assert flow == 1.0
    assert side.tolist() == [True, False]


def test_min_cut_matches_enumeration_float():
    rng = np.random.Generator(np.random.PCG64(20))
    for trial in range(30):
        n = int(rng.integers(2, 9))
        src = rng.uniform(0.0, 2.0, n)
        snk = rng.uniform(0.0, 2.0, n)
        edges = []
        for i in range(n):
            for j in range(i + 1, n):
                if rng.random() < 0.6:
                    edges.append((i, j, float(rng.uniform(0.05, 1.5))))
        flow, side = min_cut(n, src, snk, edges)
        best = enumerate_min_cut(n, src, snk, edges)
        assert abs(flow - best) <= 1e-9, f"trial {trial}: {flow} vs {best}"


def test_min_cut_dyadic_exact():
    rng = np.random.Generator(np.random.PCG64(21))
    for _ in range(10):
        n = int(rng.integers(2, 8))
        src = rng.integers(0, 2048, n) / 1024.0
        snk = rng.integers(0, 2048, n) / 1024.0
        edges = [
            (i, j, float(rng.integers(1, 2048)) / 1024.0)
            for i in range(n)
            for j in range(i + 1, n)
            if rng.random() < 0.7
        ]
        flow, _ = min_cut(n, src, snk, edges)
        assert flow == enumerate_min_cut(n, src, snk, edges)


def test_min_cut_side_cost_equals_flow():
    # max-flow equals the cost of the cut its residual reachability induces
    rng = np.random.Generator(np.random.PCG64(22))
    for _ in range(10):
        n = int(rng.integers(2, 10))
        src = rng.uniform(0.0, 2.0, n)
        snk = rng.uniform(0.0, 2.0, n)
        edges = [
            (i, j, float(rng.uniform(0.05, 1.0)))
            for i in range(n)
            for j in range(i + 1, n)
            if rng.random() < 0.5
        ]
        flow, side = min_cut(n, src, snk, edges)
        cost = sum(snk[i] if side[i] else src[i] for i in range(n))
        cost += sum(w for i, j, w in edges if side[i] != side[j])
        assert abs(cost - flow) <= 1e-9


def _toy_superpixels():
    """A 4x4 image split into four 2x2 blocks: 0 and 1 dark, 2 and 3 bright."""
    labels = np.zeros((4, 4), dtype=np.int32)
    labels[:2, 2:] = 1
    labels[2:, :2] = 2
    labels[2:, 2:] = 3
    centers = np.array(
        [
            [0.5, 0.5, 20.0, 0.0, 0.0],
            [0.5, 2.5, 22.0, 0.0, 0.0],
            [2.5, 0.5, 80.0, 0.0, 0.0],
            [2.5, 2.5, 82.0, 0.0, 0.0],
        ]
    )
    mean_color = centers[:, 2:]
    adjacency = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]
    return SuperpixelMap(labels=labels, centers=centers, adjacency=adjacency, mean_color=mean_color)


def test_graph_cut_separates_dark_from_bright():
    sp = _toy_superpixels()
    seeds = SeedSet(foreground=[(0, 0)], background=[(3, 3)])
    cfg = ExpansionConfig(b1=2.0, b2=4.0, n_slic=4)
    y_c = graph_cut(sp, seeds, cfg)
    assert np.all(y_c[:2, :] == 1.0)  # both dark blocks join the seeded road
    assert np.all(y_c[2:, :] == 0.0)


def test_graph_cut_hard_seeds_override_color():
    sp = _toy_superpixels()
    # seed a bright block (cluster 2, bottom-left) as road: INF terminal
    # link must pin it despite its color matching the background
    seeds = SeedSet(foreground=[(0, 0), (2, 0)], background=[(3, 3)])
    cfg = ExpansionConfig(b1=2.0, b2=4.0, n_slic=4)
    y_c = graph_cut(sp, seeds, cfg)
    assert np.all(y_c[2:, :2] == 1.0)
    assert np.all(y_c[2:, 2:] == 0.0)


def test_graph_cut_seed_conflict_foreground_wins():
    sp = _toy_superpixels()
    seeds = SeedSet(foreground=[(0, 0)], background=[(0, 1), (3, 3)])  # (0,1) in cluster 0 too
    cfg = ExpansionConfig(b1=2.0, b2=4.0, n_slic=4)
    y_c = graph_cut(sp, seeds, cfg)
    assert np.all(y_c[:2, :2] == 1.0)


def test_graph_cut_requires_both_seed_kinds():
    sp = _toy_superpixels()
    cfg = ExpansionConfig(b1=2.0, b2=4.0, n_slic=4)
    with pytest.raises(SeedError):
        graph_cut(sp, SeedSet(foreground=[(0, 0)], background=[]), cfg)
    with pytest.raises(SeedError):
        graph_cut(sp, SeedSet(foreground=[], background=[(3, 3)]), cfg)


def test_graph_cut_matches_enumeration_with_seeds():
    """The returned labeling minimizes the energy over all assignments that
    respect the hard seeds."""
    rng = np.random.Generator(np.random.PCG64(23))
    for _ in range(5):
        k = 6
        # one row of 6 clusters over a 2x6 image
        labels = np.repeat(np.arange(k, dtype=np.int32)[None, :], 2, axis=0)
        centers = np.column_stack(
            [
                np.full(k, 0.5),
                np.arange(k, dtype=np.float64),
                rng.uniform(0, 100, k),
                rng.uniform(-20, 20, k),
                rng.uniform(-20, 20, k),
            ]
        )
        sp = SuperpixelMap(
            labels=labels,
            centers=centers,
            adjacency=[(i, i + 1) for i in range(k - 1)],
            mean_color=centers[:, 2:].copy(),
        )
        seeds = SeedSet(foreground=[(0, 0)], background=[(0, 5)])
        cfg = ExpansionConfig(b1=2.0, b2=4.0, n_slic=4, gc_lambda=2.0)
        y_c = graph_cut(sp, seeds, cfg)
        got = [y_c[0, i] for i in range(k)]

        colors = sp.mean_color
        mu_fg = colors[0]
        mu_bg = colors[5]
        d_fg = np.sqrt(((colors - mu_fg) ** 2).sum(axis=1))
        d_bg = np.sqrt(((colors - mu_bg) ** 2).sum(axis=1))
        sigma = float(
            np.mean([np.sqrt(((colors[i] - colors[j]) ** 2).sum()) for i, j in sp.adjacency])
        )
        pair = {
            (i, j): cfg.gc_lambda * np.exp(-((colors[i] - colors[j]) ** 2).sum() / (2 * sigma**2))
            for i, j in sp.adjacency
        }

        def energy(assign):
            e = 0.0
            for i in range(k):
                if i == 0 or i == 5:
                    continue
                e += d_fg[i] if assign[i] else d_bg[i]
            e += sum(w for (i, j), w in pair.items() if assign[i] != assign[j])
            return e

        import itertools

        best = min(
            energy(a)
            for a in itertools.product([0, 1], repeat=k)
            if a[0] == 1 and a[5] == 0
        )
        assert abs(energy(got) - best) <= 1e-9
