import warnings

import numpy as np
import pytest

from ncvharm.corpus import random_atom, random_gridfn, random_matrix, random_mean_zero
from ncvharm.czo import (
    BandMultiplicationKernel,
    ConstantKernel,
    HilbertKernel,
    PoissonGrid,
    RotatedKernel,
    apply_kernel,
    apply_to_decomposition,
    cz_atom_check,
    g_h1_check,
    hormander_constant,
    kernel_bilinear_form,
    kernel_from_config,
    l2_operator_norm,
    littlewood_paley_g,
    mollified_kernel,
    poisson_kernel_mass,
    smoothed_apply,
)
from ncvharm.gridfn import Grid, GridFn, Interval, Mollifier, convolve, right_multiply, weighted_l2_norm
from ncvharm.hardy import CDecomposition, c_decompose
from ncvharm.matalg import schatten_norm

GAUSS20 = np.polynomial.legendre.leggauss(20)


def test_hormander_hilbert_anchor():
    est = hormander_constant(HilbertKernel(1), 2.0)
    assert est.c_lambda == pytest.approx(np.log(3.0), abs=1e-4)
    assert est.tail_certified


def test_hormander_constant_kernel_zero():
    est = hormander_constant(ConstantKernel(np.eye(2), band=0.5), 2.0)
    assert est.c_lambda == 0.0


def test_hormander_rotated_matches_hilbert():
    est = hormander_constant(RotatedKernel(2), 2.0)
    assert est.c_lambda <= np.log(3.0) + 1e-4


def test_hormander_rejects_small_lambda():
    with pytest.raises(ValueError):
        hormander_constant(HilbertKernel(1), 0.5)


def test_hormander_monotone_in_samples():
    k = HilbertKernel(1)
    a = hormander_constant(k, 2.0, pair_samples=4)
    b = hormander_constant(k, 2.0, pair_samples=12)
    assert b.c_lambda >= a.c_lambda * (1 - 1e-9)


def test_apply_kernel_modularity(rng):
    g = Grid(-2.0, 1 / 16, 64)
    f = random_gridfn(rng, g, 2)
    h = random_matrix(rng, 2)
    k = HilbertKernel(2)
    a = apply_kernel(k, right_multiply(f, h), 0.05)
    b = right_multiply(apply_kernel(k, f, 0.05), h)
    assert np.abs(a.values - b.values).max() < 1e-12 * np.abs(b.values).max()


def test_apply_kernel_odd_symmetry():
    # Hilbert transform of an even indicator is odd about its center
    g = Grid(-2.0, 1 / 16, 64)
    vals = np.zeros((64, 1, 1), dtype=complex)
    i0, i1 = g.index_of(-0.5), g.index_of(0.5)
    vals[i0:i1] = 1.0
    f = GridFn(g, vals)
    out = apply_kernel(HilbertKernel(1), f, 1 / 64).values[:, 0, 0].real
    assert np.abs(out + out[::-1]).max() < 1e-6


def test_apply_kernel_requires_truncation(rng):
    g = Grid(0.0, 0.25, 8)
    f = random_gridfn(rng, g, 1)
    with pytest.raises(ValueError, match="truncation"):
        apply_kernel(HilbertKernel(1), f, 0.0)


def test_separated_supports_kernel_representation(rng):
    # (tau o int)(g T f) against an independent double-quadrature oracle
    gf = Grid(0.0, 1 / 16, 16)
    gg = Grid(2.0, 1 / 16, 16)
    f = random_gridfn(rng, gf, 2)
    g = random_gridfn(rng, gg, 2)
    kern = HilbertKernel(2)
    lhs = kernel_bilinear_form(kern, f, g, 0.05)
    nodes, wts = GAUSS20
    ef = gf.edges()
    rhs = 0.0 + 0.0j
    h = 1 / 16
    for c in range(16):
        x = gg.origin + (c + 0.5) * h
        acc = np.zeros((2, 2), dtype=complex)
        for d in range(16):
            mid = 0.5 * (ef[d] + ef[d + 1])
            half = 0.5 * h
            ys = mid + half * nodes
            kvals = 1.0 / (x - ys)
            acc += half * np.dot(wts, kvals) * f.values[d]
        rhs += h * np.trace(acc @ g.values[c])
    assert abs(lhs - rhs) < 1e-8 * max(abs(rhs), 1.0)


def test_l2_norm_zero_kernel(rng):
    probe = Grid(-1.0, 0.25, 8)
    z = ConstantKernel(np.zeros((2, 2)))
    assert l2_operator_norm(z, 0.0, probe) == 0.0


def test_l2_norm_band_multiplier():
    w = lambda x: 2.0 + np.sin(x)
    k = BandMultiplicationKernel(w, eps=0.02)
    probe = Grid(-3.0, 1 / 32, 192)
    nrm = l2_operator_norm(k, 0.0, probe)
    assert nrm == pytest.approx(3.0, rel=0.05)


def test_l2_norm_hilbert_approaches_pi():
    probe = Grid(-16.0, 1 / 16, 512)
    vals = []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        for delta in (0.4, 0.2, 0.1):
            vals.append(l2_operator_norm(HilbertKernel(1), delta, probe))
    assert all(b >= a for a, b in zip(vals, vals[1:]))
    assert all(v < np.pi for v in vals)
    assert (np.pi - vals[-1]) / np.pi < 0.02


def test_mollified_constant_kernel_fixed_point(rng):
    c = ConstantKernel(random_matrix(rng, 2))
    km = mollified_kernel(c, 8, 0.0)
    for x, y in [(2.0, 0.0), (0.05, 0.0)]:  # separated and in-band
        assert np.abs(km.eval(x, y) - c.matrix).max() < 1e-10


def test_mollified_rate_and_seam(rng):
    k = HilbertKernel(1)
    delta = 1 / 32
    for m in (4, 8, 16):
        km = mollified_kernel(k, m, delta)
        err = abs(km.eval(1.3, 0.3)[0, 0] - 1.0)
        assert err <= 0.32 / m**2
    km = mollified_kernel(k, 8, delta)
    # pairing and separated evaluations agree near the dispatch boundary
    for x in np.linspace(0.9, 1.1, 5) * km.band_radius:
        p = km._pairing_value(float(x), km._field(0.0))[0, 0]
        s = km._separated_value(float(x), 0.0)[0, 0]
        assert abs(p - s) < 2e-3 * abs(s)


def test_mollified_lipschitz_bound(rng):
    k = HilbertKernel(1)
    km = mollified_kernel(k, 8, 1 / 32)
    coef = km.lipschitz_coefficient(np.pi)
    for _ in range(200):
        y = float(rng.uniform(-1, 1))
        d = float(10 ** rng.uniform(np.log10(0.3 / 8), np.log10(3.0 / 8)))
        x = y + float(rng.uniform(-3, 3))
        lhs = schatten_norm(km.diff_eval(x, y, y + d), np.inf)
        assert lhs <= coef * d * (1 + 1e-6)


def test_mollified_sup_bound():
    km = mollified_kernel(HilbertKernel(1), 8, 1 / 32)
    xs = np.linspace(-0.6, 0.6, 13)
    sup = max(abs(km.eval(float(x), 0.0)[0, 0]) for x in xs)
    assert sup <= km.sup_bound(np.pi)


def test_smoothed_apply_converges(rng):
    k = HilbertKernel(1)
    delta = 1 / 32
    g = Grid(-2.0, 1 / 128, 512)
    from ncvharm.corpus import smooth_profile

    f = smooth_profile(rng, g, 1, blocks=8, smoothing=(2, 2, 4))
    tf = apply_kernel(k, f, delta, f.grid)
    ntf = weighted_l2_norm(tf)
    ratios = []
    for m in (4, 8, 16, 32):
        tm = smoothed_apply(k, f, delta, m)
        ratios.append(weighted_l2_norm(tm - tf.resampled(tm.grid)) / ntf)
    assert all(b <= a + 1e-12 for a, b in zip(ratios, ratios[1:]))
    assert ratios[-1] < 0.05


def test_cz_atom_check_zero_kernel(rng):
    g = Grid(-2.0, 1 / 16, 64)
    atom = random_atom(rng, g, 2)
    z = ConstantKernel(np.zeros((2, 2)))
    rep = cz_atom_check(z, 0.0, atom, 2.0, t_norm=1.0, c_lambda=1.0)
    assert rep.total == 0.0 and rep.total_ok


def test_cz_atom_check_bounds(rng):
    g = Grid(-2.0, 1 / 32, 128)
    delta = 1 / 64
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        probe = Grid(-8.0, 1 / 32, 512)
        t_h = l2_operator_norm(HilbertKernel(2), delta, probe)
        t_r = l2_operator_norm(RotatedKernel(2), delta, probe)
    c2 = float(np.log(3.0))
    for _ in range(20):
        atom = random_atom(rng, g, 2, max_cells=64)
        for kern, tn in ((HilbertKernel(2), t_h), (RotatedKernel(2), t_r)):
            rep = cz_atom_check(kern, delta, atom, 2.0, tn, c2)
            assert rep.near_ok and rep.far_ok and rep.total_ok


def test_rotated_kernel_noncommuting_witness():
    k = RotatedKernel(2)
    a = k.eval(0.3, 0.1)
    b = k.eval(1.1, 0.7)
    assert schatten_norm(a @ b - b @ a, np.inf) > 1e-3


def test_apply_to_decomposition_empty_and_single(rng):
    g = Grid(-2.0, 1 / 16, 64)
    kern = HilbertKernel(2)
    dec = CDecomposition([], g)
    out, rep = apply_to_decomposition(kern, 1 / 32, dec, 2.0, 1.0, 1.0)
    assert np.abs(out.values).max() == 0.0 and rep.ok
    atom = random_atom(rng, g, 2)
    dec1 = CDecomposition([(1.0 + 0.0j, atom)], g)
    out1, _ = apply_to_decomposition(kern, 1 / 32, dec1, 2.0, np.pi, np.log(3.0))
    direct = right_multiply(apply_kernel(kern, atom.b, 1 / 32, out1.grid), atom.h)
    assert np.abs(out1.values - direct.values).max() < 1e-12 * np.abs(direct.values).max()


def test_decomposition_independence(rng):
    from ncvharm.gridfn import l1_l1_norm

    g = Grid(-2.0, 1 / 16, 64)
    f = random_mean_zero(rng, g, 2)
    dec_a = c_decompose(f)
    bump = random_mean_zero(rng, g, 2)
    dec_b = CDecomposition(
        c_decompose(f - bump, center_to_mean_zero=True).terms
        + c_decompose(bump, center_to_mean_zero=True).terms,
        dec_a.target_grid,
    )
    kern = HilbertKernel(2)
    out_a, _ = apply_to_decomposition(kern, 1 / 32, dec_a, 2.0, np.pi, np.log(3.0))
    out_b, _ = apply_to_decomposition(kern, 1 / 32, dec_b, 2.0, np.pi, np.log(3.0))
    common = out_a.grid.extended(out_b.grid.origin, out_b.grid.end)
    diff = l1_l1_norm(out_a.resampled(common) - out_b.resampled(common))
    assert diff < 1e-6 * max(dec_a.coefficient_sum, dec_b.coefficient_sum)


def test_poisson_grid_validation():
    with pytest.raises(ValueError):
        PoissonGrid.log_spaced(0.0, 1.0, 8)
    with pytest.raises(ValueError):
        PoissonGrid(np.array([1.0, 0.5]), np.array([1.0, 1.0]))


def test_poisson_mass_exact():
    for y in (0.01, 0.37, 5.0):
        cuts = np.linspace(-10, 10, 41)
        assert poisson_kernel_mass(y, cuts) == pytest.approx(1.0, abs=1e-12)


def test_littlewood_paley_zero_and_paths(rng):
    g = Grid(-2.0, 1 / 16, 64)
    pg = PoissonGrid.default_for(g)
    lp0 = littlewood_paley_g(GridFn.zero(g, 2), pg)
    assert lp0.l1_norm == 0.0
    f = random_gridfn(rng, g, 2)
    direct = littlewood_paley_g(f, pg)
    via = littlewood_paley_g(f, pg, via_kernel=True)
    assert np.abs(direct.matrix_field.values - via.matrix_field.values).max() < 1e-6
    # the scalar output is the pointwise operator norm of the matrix field
    c = 10
    assert direct.scalar.values[c, 0, 0].real == pytest.approx(
        schatten_norm(direct.matrix_field.values[c], np.inf), rel=1e-12
    )


def test_littlewood_paley_refinement_stable():
    g = Grid(-2.0, 1 / 16, 64)
    pg = PoissonGrid.default_for(g)
    vals = np.zeros((64, 1, 1), dtype=complex)
    vals[g.index_of(0.0):g.index_of(1.0)] = 1.0
    vals[g.index_of(1.0):g.index_of(2.0)] = -1.0
    lp = littlewood_paley_g(GridFn(g, vals), pg, check_refinement=True)
    assert lp.refinement_gap < 0.01


def test_g_h1_ratio_scale_invariant(rng):
    g = Grid(-2.0, 1 / 16, 64)
    pg = PoissonGrid.default_for(g)
    atom = random_atom(rng, g, 2, max_cells=48)
    r1 = g_h1_check(CDecomposition([(1.0 + 0.0j, atom)], g), pg).ratio
    r2 = g_h1_check(CDecomposition([(2.0 + 0.0j, atom)], g), pg).ratio
    assert r1 == pytest.approx(r2, rel=1e-10)
    assert g_h1_check(CDecomposition([], g), pg).ratio == 0.0


def test_kernel_from_config():
    k = kernel_from_config({"tag": "hilbert", "dim": 2})
    assert isinstance(k, HilbertKernel) and k.dim == 2
    km = kernel_from_config(
        {"tag": "mollified", "m": 4, "delta": 0.05, "parent": {"tag": "rotated", "dim": 2}}
    )
    assert km.m == 4 and isinstance(km.parent, RotatedKernel)
    pk = kernel_from_config({"tag": "poisson_gradient", "y0": 0.5, "component": "y"})
    assert pk.y0 == 0.5
    with pytest.raises(ValueError, match="unknown kernel"):
        kernel_from_config({"tag": "nope"})
