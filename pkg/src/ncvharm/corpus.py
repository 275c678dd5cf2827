"""Seeded random inputs for the experiment suites and the test oracle runs.

Everything is driven by ``numpy.random.default_rng`` so a fixed seed gives
bit-identical corpora across runs and platforms.
"""

from __future__ import annotations

import numpy as np

from .gridfn import Grid, GridFn, Interval, Mollifier, convolve, interval_mean, weighted_l2_norm
from .hardy import CAtom
from .matalg import schatten_norm


def random_matrix(rng: np.random.Generator, dim: int, scale: float = 1.0) -> np.ndarray:
    return scale * (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim)))


def random_psd(rng: np.random.Generator, dim: int) -> np.ndarray:
    c = random_matrix(rng, dim)
    return np.conj(c.T) @ c


def random_gridfn(rng: np.random.Generator, grid: Grid, dim: int, scale: float = 1.0) -> GridFn:
    vals = scale * (
        rng.standard_normal((grid.num_cells, dim, dim))
        + 1j * rng.standard_normal((grid.num_cells, dim, dim))
    )
    return GridFn(grid, vals)


def random_mean_zero(rng: np.random.Generator, grid: Grid, dim: int) -> GridFn:
    f = random_gridfn(rng, grid, dim)
    return f.shifted_mean(interval_mean(f, Interval(grid.origin, grid.end)))


def random_aligned_interval(rng: np.random.Generator, grid: Grid, min_cells: int = 2) -> Interval:
    n = grid.num_cells
    i = int(rng.integers(0, n - min_cells + 1))
    j = int(rng.integers(i + min_cells, n + 1))
    h = grid.cell_width
    return Interval(grid.origin + i * h, grid.origin + j * h)


def random_atom(
    rng: np.random.Generator,
    grid: Grid,
    dim: int,
    max_cells: int | None = None,
    saturation: tuple[float, float] = (0.3, 1.0),
) -> CAtom:
    """A valid c-atom on a random grid-aligned interval.

    The profile is exactly mean-zero by construction and its L2 norm is a
    random fraction of the allowed 1/sqrt(|I|).
    """
    n = grid.num_cells
    cap = n if max_cells is None else min(max_cells, n)
    i = int(rng.integers(0, n - 2 + 1))
    j = int(rng.integers(i + 2, min(i + cap, n) + 1))
    h = grid.cell_width
    I = Interval(grid.origin + i * h, grid.origin + j * h)
    vals = np.zeros((n, dim, dim), dtype=np.complex128)
    vals[i:j] = rng.standard_normal((j - i, dim, dim)) + 1j * rng.standard_normal((j - i, dim, dim))
    mean = vals[i:j].mean(axis=0)
    vals[i:j] -= mean
    b = GridFn(grid, vals)
    norm = weighted_l2_norm(b)
    if norm == 0.0:
        vals[i, 0, 0] = 1.0
        vals[j - 1, 0, 0] = -1.0
        b = GridFn(grid, vals)
        norm = weighted_l2_norm(b)
    frac = float(rng.uniform(*saturation))
    b = b.scaled(frac / (norm * np.sqrt(I.length)))
    hmat = random_matrix(rng, dim)
    hmat = hmat / schatten_norm(hmat, 2.0)
    return CAtom(b, hmat, I)


def random_garnett_input(
    rng: np.random.Generator, dim: int, h: float = 0.25, k_max: int = 3
) -> tuple[GridFn, Interval]:
    """A random function and an aligned interval J with 3 * 2^K cells."""
    k = int(rng.integers(1, k_max + 1))
    j_cells = 3 * 2**k
    margin = int(rng.integers(2, 10))
    n = j_cells + 2 * margin
    origin = -0.5 * n * h
    grid = Grid(origin, h, n)
    phi = random_gridfn(rng, grid, dim)
    a = origin + margin * h
    return phi, Interval(a, a + j_cells * h)


def smooth_profile(
    rng: np.random.Generator,
    grid: Grid,
    dim: int,
    blocks: int = 16,
    smoothing: tuple[int, ...] = (2, 2),
) -> GridFn:
    """A blocky random profile mollified into a C1 function of moderate slope."""
    n = grid.num_cells
    reps = max(n // blocks, 1)
    base = np.repeat(rng.standard_normal((blocks, dim, dim)), reps, axis=0)[:n]
    base = base + 1j * np.repeat(rng.standard_normal((blocks, dim, dim)), reps, axis=0)[:n]
    f = GridFn(grid, base.astype(np.complex128))
    for m in smoothing:
        f = convolve(f, Mollifier(m))
    return f
