import json

import numpy as np
import pytest

from ncvharm.bmo import bmo_norm, garnett_truncate, oscillation
from ncvharm.corpus import random_garnett_input, random_gridfn, random_matrix
from ncvharm.gridfn import Grid, GridFn, Interval, integrate, interval_mean


def step_pm_one():
    g = Grid(0.0, 1.0, 2)
    return GridFn(g, np.array([1.0, -1.0], dtype=complex))


def test_oscillation_constant_zero(rng):
    g = Grid(-1.0, 0.25, 8)
    a = random_matrix(rng, 2)
    f = GridFn.constant(g, a)
    # the square root turns an eps-size moment defect into sqrt(eps)
    assert oscillation(f, Interval(-0.5, 1.0)) <= 1e-7 * np.abs(a).max()


def test_oscillation_pm_one():
    f = step_pm_one()
    assert oscillation(f, Interval(0, 2)) == pytest.approx(1.0, abs=1e-14)
    # brute-force refined oracle: mean 0, mean square 1 on a 64-point grid
    xs = (np.arange(64) + 0.5) / 32.0
    vals = np.where(xs < 1.0, 1.0, -1.0)
    oracle = np.sqrt(np.mean(vals**2) - np.mean(vals) ** 2)
    assert oscillation(f, Interval(0, 2)) == pytest.approx(oracle, abs=1e-12)


def test_oscillation_row_is_adjoint_column(rng):
    g = Grid(-1.0, 0.25, 8)
    f = random_gridfn(rng, g, 3)
    I = Interval(-0.75, 0.5)
    assert oscillation(f, I, "column") == oscillation(f.pointwise_adjoint(), I, "row")
    assert oscillation(f, I, "row") == oscillation(f.pointwise_adjoint(), I, "column")


def test_bmo_norm_example():
    f = step_pm_one()
    rep = bmo_norm(f, "column", "aligned_all")
    assert rep.norm == pytest.approx(1.0, abs=1e-14)
    assert (rep.argmax_interval.a, rep.argmax_interval.b) == (0.0, 2.0)
    assert rep.intervals_scanned == 3


def test_bmo_norm_constant_zero(rng):
    g = Grid(0.0, 0.5, 8)
    a = random_matrix(rng, 2)
    f = GridFn.constant(g, a)
    assert bmo_norm(f).norm <= 1e-7 * np.abs(a).max()


def naive_oracle(f, side):
    v = f.values if side == "column" else np.conj(np.swapaxes(f.values, 1, 2))
    best = 0.0
    n = v.shape[0]
    for i in range(n):
        for j in range(i + 1, n + 1):
            seg = v[i:j]
            mean = seg.mean(axis=0)
            msq = np.einsum("cki,ckj->cij", np.conj(seg), seg).sum(axis=0) / (j - i)
            m2 = msq - np.conj(mean.T) @ mean
            top = np.linalg.eigvalsh(0.5 * (m2 + np.conj(m2.T)))[-1]
            best = max(best, float(top))
    return np.sqrt(max(best, 0.0))


def test_bmo_matches_naive_oracle(rng):
    g = Grid(-2.0, 1 / 16, 64)
    for side in ("column", "row"):
        f = random_gridfn(rng, g, 2)
        fast = bmo_norm(f, side, "aligned_all").norm
        slow = naive_oracle(f, side)
        assert fast == pytest.approx(slow, rel=1e-10)


def test_bmo_family_monotone_and_windows(rng):
    g = Grid(-1.0, 1 / 8, 16)
    f = random_gridfn(rng, g, 2)
    aligned = bmo_norm(f, "column", "aligned_all")
    dyadic = bmo_norm(f, "column", "dyadic")
    shifted = bmo_norm(f, "column", "windows", windows=3)
    assert dyadic.norm <= aligned.norm * (1 + 1e-12)
    assert shifted.norm >= aligned.norm * (1 - 1e-12)
    assert shifted.intervals_scanned > aligned.intervals_scanned


def test_bmo_invariances(rng):
    g = Grid(-1.0, 1 / 8, 16)
    f = random_gridfn(rng, g, 2)
    base = bmo_norm(f).norm
    # adding a constant
    shifted = f.shifted_mean(random_matrix(rng, 2))
    assert bmo_norm(shifted).norm == pytest.approx(base, rel=1e-11)
    # translating the grid origin
    g2 = Grid(3.0, 1 / 8, 16)
    assert bmo_norm(GridFn(g2, f.values)).norm == pytest.approx(base, rel=1e-12)
    # absolute homogeneity
    z = -2.5 + 1.0j
    assert bmo_norm(f.scaled(z)).norm == pytest.approx(abs(z) * base, rel=1e-11)


def test_nested_interval_comparison(rng):
    g = Grid(0.0, 0.25, 16)
    f = random_gridfn(rng, g, 2)
    J = Interval(0.0, 4.0)
    for (a, b) in [(0.0, 1.0), (1.0, 3.0), (0.25, 0.75)]:
        I = Interval(a, b)
        lhs = oscillation(f, I)
        rhs = np.sqrt(J.length / I.length) * oscillation(f, J)
        assert lhs <= rhs * (1 + 1e-10)


def test_garnett_constant_input_gives_zero(rng):
    g = Grid(-8.0, 0.25, 64)
    a = random_matrix(rng, 2)
    phi = GridFn.constant(g, a)
    psi = garnett_truncate(phi, Interval(-1.5, 1.5))
    assert np.abs(psi.values).max() <= 1e-14 * np.abs(a).max()


def test_garnett_ladder_against_direct_oracle(rng):
    # phi supported inside J: psi restricted to each reflected piece must be
    # the recomputed mean of (phi - phi_J) over the matching inner piece
    g = Grid(-6.0, 0.25, 48)
    J = Interval(-3.0, 3.0)  # 24 cells = 3 * 2^3, so K = 3
    vals = np.zeros((48, 2, 2), dtype=complex)
    i0, i1 = g.index_of(J.a), g.index_of(J.b)
    vals[i0:i1] = (
        rng.standard_normal((i1 - i0, 2, 2)) + 1j * rng.standard_normal((i1 - i0, 2, 2))
    )
    phi = GridFn(g, vals)
    psi = garnett_truncate(phi, J)
    mean_j = interval_mean(phi, J)

    def mean_over(a, b):
        return integrate(phi, Interval(a, b)) / (b - a) - mean_j

    # inner ladder at the right edge b = 3: pieces of widths 1, 1/2 and the
    # lumped 2h tail, each at distance |piece| from the edge
    pieces = [(1.0, 2.0), (2.0, 2.5), (2.5, 3.0)]
    for (a, b) in pieces:
        ra, rb = 3.0 + (3.0 - b), 3.0 + (3.0 - a)
        want = mean_over(a, b)
        k0, k1 = psi.grid.index_of(ra), psi.grid.index_of(rb)
        got = psi.values[k0:k1]
        assert np.abs(got - want).max() < 1e-12
    # mirrored ladder at the left edge a = -3
    for (a, b) in [(-2.0, -1.0), (-2.5, -2.0), (-3.0, -2.5)]:
        ra, rb = -3.0 + (-3.0 - b), -3.0 + (-3.0 - a)
        want = mean_over(a, b)
        k0, k1 = psi.grid.index_of(ra), psi.grid.index_of(rb)
        assert np.abs(psi.values[k0:k1] - want).max() < 1e-12


def test_garnett_exactness_and_bound(rng):
    for _ in range(10):
        phi, J = random_garnett_input(rng, 2)
        psi = garnett_truncate(phi, J)
        mean_j = interval_mean(phi, J)
        i0, i1 = psi.grid.index_of(J.a), psi.grid.index_of(J.b)
        j0, j1 = phi.grid.index_of(J.a), phi.grid.index_of(J.b)
        assert np.abs(psi.values[i0:i1] - (phi.values[j0:j1] - mean_j)).max() == 0.0
        three = J.scaled(3.0)
        e = psi.grid.edges()
        outside = (e[1:] <= three.a + 1e-12) | (e[:-1] >= three.b - 1e-12)
        if outside.any():
            assert np.abs(psi.values[outside]).max() == 0.0
        ratio = bmo_norm(psi).norm / bmo_norm(phi).norm
        assert ratio <= 2.0 * np.sqrt(6.0) * (1 + 1e-9)


def test_garnett_misaligned_rejected(rng):
    g = Grid(-8.0, 0.25, 64)
    phi = random_gridfn(rng, g, 2)
    with pytest.raises(ValueError, match="misaligned"):
        garnett_truncate(phi, Interval(-1.4, 1.5))
    with pytest.raises(ValueError, match="misaligned"):
        garnett_truncate(phi, Interval(-1.25, 1.25))  # 10 cells, not 3*2^K


def test_bmo_report_json(rng):
    g = Grid(0.0, 0.5, 8)
    f = random_gridfn(rng, g, 2)
    rep = bmo_norm(f, "row")
    data = json.loads(rep.dumps())
    assert data["side"] == "row"
    assert data["norm"] == rep.norm
    assert data["argmax"] == [rep.argmax_interval.a, rep.argmax_interval.b]
    assert data["intervals_scanned"] == rep.intervals_scanned
