"""Matrix-valued step functions on a uniform grid, with exact integration.

A ``GridFn`` is piecewise constant on ``num_cells`` cells of width
``cell_width`` starting at ``origin`` and identically zero outside that
window.  Every integral in this module (interval means, weighted norms,
mollifier convolution) is evaluated with closed-form antiderivatives, so step
functions carry no quadrature error at all.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .matalg import adjoint, as_matrix, schatten_norm, sqrt_psd

ALIGN_TOL = 1e-9  # alignment acceptance, in units of one cell


@dataclass(frozen=True)
class Grid:
    origin: float
    cell_width: float
    num_cells: int

    def __post_init__(self):
        if not (self.cell_width > 0.0):
            raise ValueError("cell_width must be positive")
        if self.num_cells < 1:
            raise ValueError("num_cells must be >= 1")

    @property
    def end(self) -> float:
        return self.origin + self.num_cells * self.cell_width

    def edges(self) -> np.ndarray:
        return self.origin + self.cell_width * np.arange(self.num_cells + 1)

    def centers(self) -> np.ndarray:
        return self.origin + self.cell_width * (np.arange(self.num_cells) + 0.5)

    def coordinate(self, x: float) -> float:
        """Position of x in cell units from the origin."""
        return (x - self.origin) / self.cell_width

    def is_aligned(self, x: float) -> bool:
        c = self.coordinate(x)
        return abs(c - round(c)) <= ALIGN_TOL

    def index_of(self, x: float) -> int:
        """Nearest cell-edge index for an aligned coordinate."""
        c = self.coordinate(x)
        k = round(c)
        if abs(c - k) > ALIGN_TOL:
            raise ValueError(f"coordinate {x} is not on a cell boundary")
        return int(k)

    def extended(self, a: float, b: float) -> "Grid":
        """Smallest grid with the same lattice whose window covers [a, b]."""
        h = self.cell_width
        lo = int(np.floor((a - self.origin) / h + ALIGN_TOL))
        hi = int(np.ceil((b - self.origin) / h - ALIGN_TOL))
        lo = min(lo, 0)
        hi = max(hi, self.num_cells)
        return Grid(self.origin + lo * h, h, hi - lo)

    def compatible(self, other: "Grid") -> bool:
        """Same cell width and a common lattice."""
        if abs(self.cell_width - other.cell_width) > ALIGN_TOL * self.cell_width:
            return False
        return self.is_aligned(other.origin)


@dataclass(frozen=True)
class Interval:
    a: float
    b: float

    def __post_init__(self):
        if not (self.b > self.a):
            raise ValueError("degenerate interval")

    @property
    def length(self) -> float:
        return self.b - self.a

    @property
    def center(self) -> float:
        return 0.5 * (self.a + self.b)

    def grid_aligned(self, grid: Grid) -> bool:
        return grid.is_aligned(self.a) and grid.is_aligned(self.b)

    def scaled(self, factor: float) -> "Interval":
        """Concentric interval with length scaled by ``factor``."""
        half = 0.5 * factor * self.length
        return Interval(self.center - half, self.center + half)


class Weight:
    """Integration weights with exact cell antiderivatives."""

    UNIT = "unit"
    POISSON_UP = "poisson_up"      # w(t) = 1 + t^2
    POISSON_DOWN = "poisson_down"  # w(t) = 1 / (1 + t^2)

    ALL = (UNIT, POISSON_UP, POISSON_DOWN)

    @staticmethod
    def primitive(tag: str, t: np.ndarray) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        if tag == Weight.UNIT:
            return t
        if tag == Weight.POISSON_UP:
            return t + t**3 / 3.0
        if tag == Weight.POISSON_DOWN:
            return np.arctan(t)
        raise ValueError(f"unknown weight tag {tag!r}")

    @staticmethod
    def cell_integrals(tag: str, grid: Grid) -> np.ndarray:
        e = grid.edges()
        p = Weight.primitive(tag, e)
        return p[1:] - p[:-1]


class GridFn:
    """Piecewise-constant matrix-valued function; immutable after construction."""

    __slots__ = ("grid", "values", "dim")

    def __init__(self, grid: Grid, values: np.ndarray):
        values = np.ascontiguousarray(values, dtype=np.complex128)
        if values.ndim == 1:
            values = values[:, None, None]
        if values.ndim != 3 or values.shape[1] != values.shape[2]:
            raise ValueError(f"values must have shape (N, n, n), got {values.shape}")
        if values.shape[0] != grid.num_cells:
            raise ValueError("values length does not match num_cells")
        if not np.all(np.isfinite(values.view(np.float64))):
            raise ValueError("GridFn has non-finite entries")
        values.flags.writeable = False
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "dim", values.shape[1])

    def __setattr__(self, name, value):
        raise AttributeError("GridFn is immutable")

    @classmethod
    def zero(cls, grid: Grid, dim: int) -> "GridFn":
        return cls(grid, np.zeros((grid.num_cells, dim, dim), dtype=np.complex128))

    @classmethod
    def constant(cls, grid: Grid, matrix) -> "GridFn":
        m = as_matrix(matrix)
        return cls(grid, np.broadcast_to(m, (grid.num_cells,) + m.shape).copy())

    def with_values(self, values: np.ndarray) -> "GridFn":
        return GridFn(self.grid, values)

    def pointwise_adjoint(self) -> "GridFn":
        return GridFn(self.grid, adjoint(self.values))

    def __add__(self, other: "GridFn") -> "GridFn":
        if not self.grid.compatible(other.grid):
            raise ValueError("grids are not lattice-compatible")
        g = self.grid.extended(other.grid.origin, other.grid.end)
        out = np.zeros((g.num_cells, self.dim, self.dim), dtype=np.complex128)
        for f in (self, other):
            k = g.index_of(f.grid.origin)
            out[k:k + f.grid.num_cells] += f.values
        return GridFn(g, out)

    def __sub__(self, other: "GridFn") -> "GridFn":
        return self + other.scaled(-1.0)

    def scaled(self, c: complex) -> "GridFn":
        return GridFn(self.grid, c * self.values)

    def shifted_mean(self, matrix) -> "GridFn":
        """Subtract a constant matrix on the window (values only; zero outside stays zero)."""
        m = as_matrix(matrix)
        return GridFn(self.grid, self.values - m)

    def restricted(self, interval: Interval) -> "GridFn":
        """Multiply by the indicator of a grid-aligned interval."""
        i = max(0, self.grid.index_of(interval.a))
        j = min(self.grid.num_cells, self.grid.index_of(interval.b))
        out = np.zeros_like(self.values)
        if j > i:
            out[i:j] = self.values[i:j]
        return GridFn(self.grid, out)

    def resampled(self, grid: Grid) -> "GridFn":
        """Exact re-indexing onto a lattice-compatible covering grid."""
        if not self.grid.compatible(grid):
            raise ValueError("grids are not lattice-compatible")
        k = grid.index_of(self.grid.origin)
        if k < 0 or k + self.grid.num_cells > grid.num_cells:
            raise ValueError("target grid does not cover this function")
        out = np.zeros((grid.num_cells, self.dim, self.dim), dtype=np.complex128)
        out[k:k + self.grid.num_cells] = self.values
        return GridFn(grid, out)


def _overlap_lengths(grid: Grid, interval: Interval) -> np.ndarray:
    """Length of overlap of each cell with the interval (fractional end cells)."""
    e = grid.edges()
    lo = np.maximum(e[:-1], interval.a)
    hi = np.minimum(e[1:], interval.b)
    return np.clip(hi - lo, 0.0, None)


def integrate(f: GridFn, interval: Interval | None = None) -> np.ndarray:
    """Exact integral of f over the line or over an interval."""
    if interval is None:
        w = np.full(f.grid.num_cells, f.grid.cell_width)
    else:
        w = _overlap_lengths(f.grid, interval)
    return np.einsum("c,cij->ij", w, f.values)


def interval_mean(f: GridFn, interval: Interval) -> np.ndarray:
    return integrate(f, interval) / interval.length


def second_moment(f: GridFn, interval: Interval, side: str = "column") -> np.ndarray:
    """Exact ``integral over I of f*f`` (column) or ``f f*`` (row)."""
    w = _overlap_lengths(f.grid, interval)
    v = f.values
    if side == "column":
        return np.einsum("c,cki,ckj->ij", w, np.conj(v), v)
    if side == "row":
        return np.einsum("c,cik,cjk->ij", w, v, np.conj(v))
    raise ValueError(f"side must be 'column' or 'row', got {side!r}")


def weighted_l2_norm(f: GridFn, weight: str = Weight.UNIT) -> float:
    """(integral of w(t) ||f(t)||_{S2}^2 dt)^(1/2) with exact cell weight integrals."""
    wi = Weight.cell_integrals(weight, f.grid)
    sq = np.einsum("cij,cij->c", np.conj(f.values), f.values).real
    return float(np.sqrt(max(np.dot(wi, sq), 0.0)))


def gram_matrix(f: GridFn, weight: str = Weight.UNIT, side: str = "column") -> np.ndarray:
    """Q = integral of w(t) f(t)*f(t) dt (column) or w(t) f(t)f(t)* (row)."""
    wi = Weight.cell_integrals(weight, f.grid)
    v = f.values
    if side == "column":
        return np.einsum("c,cki,ckj->ij", wi, np.conj(v), v)
    if side == "row":
        return np.einsum("c,cik,cjk->ij", wi, v, np.conj(v))
    raise ValueError(f"side must be 'column' or 'row', got {side!r}")


def column_norm(f: GridFn, p: float, weight: str = Weight.UNIT) -> float:
    """|| (integral w f*f)^(1/2) ||_{Sp}; the square function enters the algebra first."""
    return schatten_norm(sqrt_psd(gram_matrix(f, weight, "column")), p)


def row_norm(f: GridFn, p: float, weight: str = Weight.UNIT) -> float:
    return column_norm(f.pointwise_adjoint(), p, weight)


def right_multiply(f: GridFn, h) -> GridFn:
    m = as_matrix(h)
    if m.shape[0] != f.dim:
        raise ValueError(f"dimension mismatch: function dim {f.dim}, factor {m.shape}")
    return GridFn(f.grid, f.values @ m)


def l1_l1_norm(f: GridFn) -> float:
    """integral of ||f(t)||_{S1} dt, the L1(L1) norm, exact for step functions."""
    return f.grid.cell_width * sum(schatten_norm(v, 1.0) for v in f.values)


def integral_trace_product(f: GridFn, g: GridFn, right=None) -> complex:
    """Exact ``integral of tr(f(t) g(t) right) dt`` for two step functions.

    Walks the merged cell breakpoints, so the grids need not share a lattice.
    """
    if f.dim != g.dim:
        raise ValueError("dimension mismatch")
    r = as_matrix(right) if right is not None else None
    ef, eg = f.grid.edges(), g.grid.edges()
    cuts = np.union1d(ef, eg)
    lo = max(ef[0], eg[0])
    hi = min(ef[-1], eg[-1])
    cuts = cuts[(cuts >= lo - 1e-15) & (cuts <= hi + 1e-15)]
    total = 0.0 + 0.0j
    for left, rightpt in zip(cuts[:-1], cuts[1:]):
        seg = rightpt - left
        if seg <= 0:
            continue
        mid = 0.5 * (left + rightpt)
        ci = int((mid - f.grid.origin) / f.grid.cell_width)
        cj = int((mid - g.grid.origin) / g.grid.cell_width)
        if not (0 <= ci < f.grid.num_cells and 0 <= cj < g.grid.num_cells):
            continue
        prod = f.values[ci] @ g.values[cj]
        if r is not None:
            prod = prod @ r
        total += seg * np.trace(prod)
    return complex(total)


class Mollifier:
    """Polynomial bump phi(x) = (15/16)(1-x^2)^2 on (-1,1), dilated to scale m.

    phi is even, continuous, supported in (-1,1) with unit integral; the
    dilation is phi_m(x) = m phi(m x) with support (-1/m, 1/m).  The first
    and second antiderivatives are closed-form, which keeps convolution
    against step functions exact.
    """

    __slots__ = ("m",)

    L2_NORM = np.sqrt(5.0 / 7.0)          # ||phi||_2
    DERIV_SUP = 5.0 * np.sqrt(3.0) / 6.0  # ||phi'||_inf

    def __init__(self, m: int):
        if m < 1:
            raise ValueError("mollifier scale must be a positive integer")
        self.m = int(m)

    @property
    def support_radius(self) -> float:
        return 1.0 / self.m

    def __call__(self, x):
        u = self.m * np.asarray(x, dtype=float)
        inside = np.abs(u) < 1.0
        v = np.where(inside, (15.0 / 16.0) * (1.0 - u * u) ** 2, 0.0)
        return self.m * v

    def cdf(self, x):
        """integral of phi_m from -infinity to x; exact polynomial."""
        u = np.clip(self.m * np.asarray(x, dtype=float), -1.0, 1.0)
        return (15.0 / 16.0) * (u - 2.0 * u**3 / 3.0 + u**5 / 5.0) + 0.5

    def cdf2(self, x):
        """Second antiderivative of phi_m, zero at -1/m; exact polynomial."""
        x = np.asarray(x, dtype=float)
        u = np.clip(self.m * x, -1.0, 1.0)
        core = (15.0 / 16.0) * (u * u / 2.0 - u**4 / 6.0 + u**6 / 30.0 - 11.0 / 30.0) + (u + 1.0) / 2.0
        # Outside the support the antiderivative continues linearly: 0 on the
        # left, x on the right (total mass one).
        return np.where(x >= 1.0 / self.m, x, core / self.m)

    def windowed_mass(self, lo: float, hi: float) -> float:
        """||phi_m chi_[lo,hi]||_1 exactly."""
        return float(self.cdf(hi) - self.cdf(lo))


def convolve(f: GridFn, mol: Mollifier, window: tuple[float, float] | None = None) -> GridFn:
    """Cell-averaged mollification phi_m * f (windowed kernel if requested).

    The output grid is widened by ceil(1/(m h)) cells on each side; each output
    cell holds the exact average of (phi_m * f) over the cell, computed from
    the closed-form second antiderivative.  The projection onto cell averages
    is an L2 contraction and preserves the total integral exactly.
    """
    g = f.grid
    h = g.cell_width
    pad = int(np.ceil(1.0 / (mol.m * h)))
    out_grid = Grid(g.origin - pad * h, h, g.num_cells + 2 * pad)

    # Double integral of phi_m over [x0,x1] x [s0,s1] via the second
    # antiderivative B: for the windowed kernel phi_m chi_[lo,hi] the first
    # antiderivative is A(t) = cdf(clip(t)) - cdf(lo) and B integrates A.
    if window is None:
        def B(t):
            return mol.cdf2(t)
    else:
        lo, hi = window
        c_lo = float(mol.cdf(lo))
        a_hi = float(mol.cdf(hi)) - c_lo
        b_lo = float(mol.cdf2(lo))
        b_hi = float(mol.cdf2(hi)) - b_lo - c_lo * (hi - lo)

        def B(t):
            t = np.asarray(t, dtype=float)
            tc = np.clip(t, lo, hi)
            mid = mol.cdf2(tc) - b_lo - c_lo * (tc - lo)
            return np.where(t <= lo, 0.0, np.where(t >= hi, b_hi + a_hi * (t - hi), mid))

    oe = out_grid.edges()
    ie = g.edges()
    # kernel weight of input cell d on output cell c:
    #   (1/h) * [B(x1-s0) - B(x1-s1) - B(x0-s0) + B(x0-s1)]
    x0 = oe[:-1][:, None]
    x1 = oe[1:][:, None]
    s0 = ie[:-1][None, :]
    s1 = ie[1:][None, :]
    w = (B(x1 - s0) - B(x1 - s1) - B(x0 - s0) + B(x0 - s1)) / h
    out = np.einsum("cd,dij->cij", w, f.values)
    return GridFn(out_grid, out)


# --- JSON serialization -------------------------------------------------

def matrix_to_json(m: np.ndarray) -> list:
    """Row-major [re, im] pairs, binary64."""
    m = as_matrix(m)
    return [[float(z.real), float(z.imag)] for z in m.reshape(-1)]


def matrix_from_json(data: list, dim: int) -> np.ndarray:
    flat = np.array([complex(re, im) for re, im in data], dtype=np.complex128)
    if flat.size != dim * dim:
        raise ValueError("matrix entry count does not match dim")
    return flat.reshape(dim, dim)


def gridfn_to_json(f: GridFn) -> dict:
    return {
        "grid": {
            "origin": f.grid.origin,
            "cell_width": f.grid.cell_width,
            "num_cells": f.grid.num_cells,
        },
        "dim": f.dim,
        "values": [matrix_to_json(v) for v in f.values],
    }


def gridfn_from_json(data: dict) -> GridFn:
    g = data["grid"]
    grid = Grid(float(g["origin"]), float(g["cell_width"]), int(g["num_cells"]))
    dim = int(data["dim"])
    values = np.stack([matrix_from_json(v, dim) for v in data["values"]])
    return GridFn(grid, values)


def save_gridfn(f: GridFn, path) -> None:
    with open(path, "w") as fh:
        json.dump(gridfn_to_json(f), fh)


def load_gridfn(path) -> GridFn:
    with open(path) as fh:
        return gridfn_from_json(json.load(fh))
