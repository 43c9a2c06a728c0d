import numpy as np
from scipy import ndimage

from scribblemix.expansion import ExpansionConfig, SeedSet
from scribblemix.slic import rgb_to_lab, slic


def _random_case(seed: int, h: int = 36, w: int = 36):
    rng = np.random.Generator(np.random.PCG64(seed))
    img = rng.random((h, w, 3))
    n_fg = int(rng.integers(1, 5))
    n_bg = int(rng.integers(1, 5))
    pts = {(int(rng.integers(0, h)), int(rng.integers(0, w))) for _ in range(n_fg + n_bg)}
    pts = sorted(pts)
    seeds = SeedSet(foreground=pts[:n_fg], background=pts[n_fg:])
    cfg = ExpansionConfig(b1=2.0, b2=4.0, n_slic=16, slic_iterations=4)
    return img, seeds, cfg


def test_rgb_to_lab_reference_colors():
    # standard CIELAB coordinates of sRGB primaries under D65
    lab = rgb_to_lab(np.array([[[1.0, 1.0, 1.0], [0.0, 0.0, 0.0], [1.0, 0.0, 0.0]]]))
    white, black, red = lab[0]
    assert abs(white[0] - 100.0) < 1e-6 and abs(white[1]) < 1e-6 and abs(white[2]) < 1e-6
    assert np.allclose(black, 0.0, atol=1e-9)
    assert np.allclose(red, [53.2408, 80.0925, 67.2032], atol=5e-3)


def test_full_coverage_and_valid_ids():
    for seed in range(5):
        img, seeds, cfg = _random_case(seed)
        sp = slic(img, seeds, cfg)
        k = sp.centers.shape[0]
        assert sp.labels.min() >= 0 and sp.labels.max() < k
        # every cluster id owns at least one pixel
        assert len(np.unique(sp.labels)) == k


def test_per_cluster_connectivity():
    for seed in range(5):
        img, seeds, cfg = _random_case(seed)
        sp = slic(img, seeds, cfg)
        for lab in np.unique(sp.labels):
            _, n = ndimage.label(sp.labels == lab, structure=np.ones((3, 3), dtype=int))
            assert n == 1, f"cluster {lab} split into {n} components"


def test_deterministic_bitwise():
    img, seeds, cfg = _random_case(42)
    a = slic(img, seeds, cfg)
    b = slic(img, seeds, cfg)
    assert np.array_equal(a.labels, b.labels)
    assert np.array_equal(a.centers, b.centers)
    assert a.adjacency == b.adjacency


def test_adjacency_pairs_sorted_and_touching():
    img, seeds, cfg = _random_case(7)
    sp = slic(img, seeds, cfg)
    assert sp.adjacency == sorted(sp.adjacency)
    for i, j in sp.adjacency:
        assert i < j
        # the two clusters really touch (8-connectivity)
        a = np.argwhere(sp.labels == i)
        b = np.argwhere(sp.labels == j)
        d = np.abs(a[:, None, :] - b[None, :, :]).max(axis=2).min()
        assert d == 1


def test_uniform_image_keeps_grid_structure():
    img = np.full((32, 32, 3), 0.5)
    seeds = SeedSet(foreground=[(16, 16)], background=[(2, 2)])
    cfg = ExpansionConfig(b1=2.0, b2=4.0, n_slic=16, slic_iterations=4)
    sp = slic(img, seeds, cfg)
    k = sp.centers.shape[0]
    assert k >= 4
    sizes = np.bincount(sp.labels.ravel(), minlength=k)
    assert sizes.min() > 0
    # uniform color: pure spatial k-means, no cluster should dominate
    assert sizes.max() <= 32 * 32 // 2


def test_mean_color_matches_pixelwise_average():
    img, seeds, cfg = _random_case(9)
    sp = slic(img, seeds, cfg)
    lab = rgb_to_lab(img)
    for cid in range(sp.centers.shape[0]):
        sel = sp.labels == cid
        want = lab[sel].mean(axis=0)
        assert np.allclose(sp.mean_color[cid], want, atol=1e-9)
