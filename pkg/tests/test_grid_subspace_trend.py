import numpy as np
import pytest
import scipy.linalg

from lebsolve import grid, subspace
from lebsolve.grid import GridField
from lebsolve.trend import assess


# --- grid ----------------------------------------------------------------------

def test_gridfield_validation():
    lo, hi, res = grid.centered_box(1.0, 8, 2)
    with pytest.raises(ValueError, match="power of two"):
        GridField(lo, hi, np.zeros((1, 8, 6)))
    with pytest.raises(ValueError, match="finite"):
        GridField(lo, hi, np.full((1, 8, 8), np.nan))
    with pytest.raises(ValueError, match="hi > lo"):
        GridField(hi, lo, np.zeros((1, 8, 8)))


def test_centered_box_origin_is_node():
    lo, hi, res = grid.centered_box(2.0, 16, 3)
    for c in grid.node_coords(lo, hi, res):
        assert np.any(c == 0.0)


def test_norms_of_constant_field():
    lo, hi, res = grid.centered_box(1.0, 16, 2)
    f = GridField(lo, hi, np.full((2,) + res, 3.0 + 4.0j))
    # |f| = sqrt(2) * 5 everywhere on a box of area 4
    assert f.lp_norm(np.inf) == pytest.approx(5 * np.sqrt(2))
    assert f.lp_norm(2) == pytest.approx(5 * np.sqrt(2) * 2)
    assert f.lp_norm(1) == pytest.approx(5 * np.sqrt(2) * 4)
    np.testing.assert_allclose(f.integral(), [(3 + 4j) * 4] * 2)


def test_wavenumbers_differentiate_exactly():
    lo, hi, res = np.zeros(2), np.full(2, 2 * np.pi), (16, 16)
    k = grid.wavevector_grid(lo, hi, res)
    x = grid.mesh(lo, hi, res)
    u = np.sin(3 * x[1])[None]
    du = grid.physical(1j * k[1] * grid.spectral(u))
    np.testing.assert_allclose(du[0].real, 3 * np.cos(3 * x[1]), atol=1e-12)


def test_embed_keeps_nodes_and_values():
    lo, hi, res = grid.centered_box(1.0, 8, 2)
    f = grid.from_function(lambda x: x[0] + 2 * x[1], lo, hi, res)
    big = grid.embed(f, 4)
    assert big.resolution == (32, 32) and big.padding_factor == 4
    np.testing.assert_allclose(big.spacing, f.spacing)
    np.testing.assert_allclose(big.integral(), f.integral())
    back = grid.restrict(big, f.lo, f.resolution)
    np.testing.assert_array_equal(back.samples, f.samples)


def test_padded_box_rejects_misalignment():
    with pytest.raises(ValueError):
        grid.padded_box([0, 0], [1, 1], (1, 1), 2)
    with pytest.raises(ValueError):
        grid.padded_box([0, 0], [1, 1], (8, 8), 0)


def test_aliasing_fraction():
    lo, hi, res = np.zeros(2), np.full(2, 2 * np.pi), (32, 32)
    x = grid.mesh(lo, hi, res)
    assert grid.aliasing_fraction(np.cos(2 * x[0])[None]) < 1e-28
    assert grid.aliasing_fraction(np.cos(15 * x[0])[None]) == pytest.approx(1.0)


# --- subspace --------------------------------------------------------------------

def test_range_and_null_bases():
    rng = np.random.default_rng(0)
    a = rng.standard_normal((5, 2)) @ rng.standard_normal((2, 4))
    r = subspace.range_basis(a, 1e-10)
    n = subspace.null_basis(a, 1e-10)
    assert r.shape == (5, 2) and n.shape == (4, 2)
    np.testing.assert_allclose(a @ n, 0, atol=1e-12)
    assert subspace.same_subspace(r, scipy.linalg.orth(a), 1e-10)


def test_intersection_of_planes():
    e = np.eye(3)
    xy, yz = e[:, :2], e[:, 1:]
    inter = subspace.intersect(xy, yz, 1e-10)
    assert inter.shape[1] == 1
    assert abs(abs(inter[1, 0]) - 1) < 1e-12


def test_intersect_all_stops_at_zero():
    e = np.eye(3)
    out = subspace.intersect_all([e[:, :1], e[:, 1:2], e[:, 2:]], 1e-10)
    assert out.shape == (3, 0)


def test_principal_cosines_known_angle():
    t = 0.3
    u = np.array([[1.0], [0.0]])
    v = np.array([[np.cos(t)], [np.sin(t)]])
    assert subspace.principal_cosines(u, v)[0] == pytest.approx(np.cos(t))
    assert not subspace.same_subspace(u, v, 1e-6)


# --- trend ---------------------------------------------------------------------

def test_trend_kinds():
    c = [1, 0.1, 0.01, 0.001]
    assert assess(c, [1, 10, 100, 1000]).kind == "power"
    assert assess(c, [1, 3.3, 5.6, 7.9]).kind == "log"
    assert assess(c, [1, 1.5, 1.6, 1.61]).kind == "bounded"
    assert assess(c, [1, 2, np.inf, 3]).kind == "infinite"
    assert not assess([1, 2], [1, 5]).divergent
