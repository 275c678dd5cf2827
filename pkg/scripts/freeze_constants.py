"""Measure the frozen regression constants on the reference corpora.

Run from the repo root; paste the measured values into
``src/ncvharm/frozen.py`` with a little headroom and update the provenance
notes there.  The corpora here must match the suite constructions.
"""

import time
import warnings

import numpy as np

from ncvharm import corpus
from ncvharm.czo import (
    HilbertKernel,
    PoissonGrid,
    g_h1_check,
    hormander_constant,
    l2_operator_norm,
    mollified_kernel,
)
from ncvharm.gridfn import Grid, Weight, weighted_l2_norm
from ncvharm.hardy import CDecomposition, meyer_decompose, mollify_residual_atom
from ncvharm.suites import (
    CZ_PROBE,
    DIM_CYCLE,
    MOLLIFIED_DELTA,
    MOLLIFIED_MS,
    lp_corpus_grid,
    meyer_corpus_grid,
)

SEED = 0


def rng(*stream):
    return np.random.default_rng([SEED, *stream])


def measure_meyer_c_emp():
    grid = meyer_corpus_grid()
    worst = 0.0
    for k in range(100):
        dim = DIM_CYCLE[k % 3]
        f = corpus.random_mean_zero(rng(500 + k), grid, dim)
        terms, _ = meyer_decompose(f)
        ratio = sum(lam for lam, _, _ in terms) / weighted_l2_norm(f, Weight.POISSON_UP)
        worst = max(worst, ratio)
    return worst


def measure_lp_c():
    grid = lp_corpus_grid()
    pg = PoissonGrid.default_for(grid, count=48)
    worst = 0.0
    for k in range(200):
        atom = corpus.random_atom(rng(160, k), grid, 2, max_cells=48)
        dec = CDecomposition([(1.0 + 0.0j, atom)], grid)
        worst = max(worst, g_h1_check(dec, pg).ratio)
    return worst


def measure_c_prime():
    parent = HilbertKernel(1)
    worst = 0.0
    for m in MOLLIFIED_MS:
        km = mollified_kernel(parent, m, MOLLIFIED_DELTA)
        est = hormander_constant(km, 4.0, pair_samples=8, x_extent=2e3,
                                 gap_range=(0.02 / m, 2.0))
        print(f"  m={m}: C'_4 = {est.c_lambda:.6f}")
        worst = max(worst, est.c_lambda)
    return worst


def measure_hilbert_norm():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        vals = []
        for delta in (0.4, 0.2, 0.1):
            probe = Grid(-16.0, 1.0 / 16.0, 512)
            vals.append(l2_operator_norm(HilbertKernel(1), delta, probe))
        print(f"  delta ladder: {[f'{v:.5f}' for v in vals]}")
    return vals[-1]


def measure_residual_n_star():
    grid = Grid(-2.0, 1.0 / 32.0, 128)
    n = 4
    while n <= 1 << 16:
        worst = 0.0
        for k in range(20):
            atom = corpus.random_atom(rng(910, k), grid, 2, max_cells=64)
            if n < 2.0 / atom.interval.length:
                worst = np.inf
                break
            lam, _ = mollify_residual_atom(atom, n)
            worst = max(worst, lam)
        if worst < 1e-3:
            return n
        n *= 2
    return None


def measure_mollified_rate():
    parent = HilbertKernel(1)
    worst = 0.0
    for m in MOLLIFIED_MS:
        km = mollified_kernel(parent, m, MOLLIFIED_DELTA)
        err = abs(km.eval(1.3, 0.3)[0, 0] - 1.0)
        worst = max(worst, err * m * m)
    return worst


def main():
    for name, fn in [
        ("meyer_c_emp", measure_meyer_c_emp),
        ("lp_c", measure_lp_c),
        ("hormander_c4_mollified", measure_c_prime),
        ("hilbert_l2_norm", measure_hilbert_norm),
        ("mollify_residual_n_star", measure_residual_n_star),
        ("mollified_rate_c", measure_mollified_rate),
    ]:
        t0 = time.time()
        value = fn()
        print(f"{name} = {value}  ({time.time() - t0:.1f}s)")


if __name__ == "__main__":
    main()
