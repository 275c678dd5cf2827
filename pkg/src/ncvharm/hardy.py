"""c-atoms, atomic decompositions and the duality pairing with BMO.

A c-atom is a product a = b h where the profile b is supported on an interval
I with zero mean and L2 norm at most 1/sqrt(|I|), and h is a matrix with unit
Hilbert-Schmidt norm.  Holder's inequality then gives ||a||_{L1(L1)} <= 1.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .gridfn import (
    Grid,
    GridFn,
    Interval,
    Mollifier,
    Weight,
    convolve,
    gram_matrix,
    gridfn_from_json,
    gridfn_to_json,
    integral_trace_product,
    integrate,
    interval_mean,
    l1_l1_norm,
    matrix_from_json,
    matrix_to_json,
    right_multiply,
    second_moment,
    weighted_l2_norm,
)
from .matalg import adjoint, schatten_norm, sqrt_psd

MEAN_TOL = 1e-10
NORM_SLACK = 1e-12
H_TOL = 1e-12
SUPPORT_TOL = 1e-10  # relative acceptance for externally supplied atoms


@dataclass(frozen=True)
class CAtom:
    b: GridFn
    h: np.ndarray
    interval: Interval

    def as_function(self) -> GridFn:
        return right_multiply(self.b, self.h)

    def to_json(self) -> dict:
        return {
            "I": [self.interval.a, self.interval.b],
            "h": matrix_to_json(self.h),
            "b": gridfn_to_json(self.b),
        }

    @classmethod
    def from_json(cls, data: dict) -> "CAtom":
        b = gridfn_from_json(data["b"])
        h = matrix_from_json(data["h"], b.dim)
        return cls(b, h, Interval(float(data["I"][0]), float(data["I"][1])))


@dataclass(frozen=True)
class AtomReport:
    valid: bool
    support_ok: bool
    mean_ok: bool
    norm_slack: float        # ||b||_2 * sqrt(|I|); condition (3) holds iff <= 1
    h_norm: float
    l1_norm: float           # ||b h||_{L1(L1)}, Holder bound says <= 1
    mean_defect: float


def validate_atom(atom: CAtom) -> AtomReport:
    """Check the three atom conditions and the Holder L1 bound, report slack."""
    b, I = atom.b, atom.interval
    g = b.grid
    # support: any cell not entirely inside I must vanish
    e = g.edges()
    tol = 1e-12 * g.cell_width
    outside = (e[1:] > I.b + tol) | (e[:-1] < I.a - tol)
    scale = float(np.abs(b.values).max()) if b.values.size else 0.0
    mass_out = float(np.abs(b.values[outside]).max()) if outside.any() else 0.0
    support_ok = mass_out <= SUPPORT_TOL * max(scale, 1e-300)

    norm_b = weighted_l2_norm(b, Weight.UNIT)
    mean_defect = schatten_norm(integrate(b, I), 2.0)
    mean_ok = mean_defect <= MEAN_TOL * max(norm_b * I.length, 1e-300)

    norm_slack = norm_b * np.sqrt(I.length)
    h_norm = schatten_norm(atom.h, 2.0)
    l1 = l1_l1_norm(atom.as_function())
    valid = (
        support_ok
        and mean_ok
        and norm_slack <= 1.0 + NORM_SLACK
        and abs(h_norm - 1.0) <= H_TOL
    )
    return AtomReport(valid, support_ok, mean_ok, float(norm_slack), h_norm, l1, float(mean_defect))


def factorize_column(f: GridFn) -> tuple[GridFn, np.ndarray]:
    """Polar-type factorization f = F beta with ||F||_2 ||beta||_2 = ||f||_{L1(M;L2c)}.

    G is the square root of the gram matrix of f, beta = G^(1/2), and F
    multiplies f on the right by the pseudo-inverse square root of G, so the
    product recovers f on the range of the gram matrix exactly.
    """
    q = gram_matrix(f, Weight.UNIT, "column")
    if schatten_norm(q, np.inf) == 0.0:
        raise ValueError("zero function")
    g = sqrt_psd(q)
    beta = sqrt_psd(g)
    f_vals = f.values @ sqrt_psd(g, pseudo_inverse=True)
    return GridFn(f.grid, f_vals), beta


@dataclass(frozen=True)
class AnnulusRecord:
    j: int
    r: float                 # 2 x weighted-L2 content of the annulus
    integral: np.ndarray     # I_j
    tail: np.ndarray         # S_j = sum of I_k for k >= j
    lam: float


@dataclass(frozen=True)
class DecompositionTrace:
    records: list[AnnulusRecord] = field(default_factory=list)

    @property
    def s0_defect(self) -> float:
        if not self.records:
            return 0.0
        return schatten_norm(self.records[0].tail, 2.0)


def meyer_decompose(
    f: GridFn, mean_tol: float = MEAN_TOL
) -> tuple[list[tuple[float, GridFn, Interval]], DecompositionTrace]:
    """Split a mean-zero f into weighted L2-atoms over dyadic annuli around 0.

    The annulus pieces f_j = f on {2^(j-1) < |x| <= 2^j} (f_0 on |x| <= 1) are
    perturbed by telescoping constants on the balls {|x| <= 2^(j+1)} and
    {|x| <= 2^j} so each profile has zero mean; normalizing on the interval
    [-2^(j+1), 2^(j+1)] gives atoms whose finite sum reconstructs f exactly.

    The grid lattice must contain the dyadic boundaries +-2^j up to the
    smallest ball covering the support.
    """
    norm_f = weighted_l2_norm(f, Weight.UNIT)
    total = integrate(f)
    if schatten_norm(total, 2.0) > mean_tol * max(norm_f, 1e-300):
        raise ValueError("not mean-zero")
    if norm_f == 0.0:
        return [], DecompositionTrace([])

    g = f.grid
    extent = max(abs(g.origin), abs(g.end))
    j_max = 0
    while 2.0**j_max < extent - 1e-12:
        j_max += 1

    for j in range(j_max + 2):
        if not g.is_aligned(2.0**j) or not g.is_aligned(-(2.0**j)):
            raise ValueError(
                f"grid lattice does not contain the dyadic boundary 2^{j}; "
                "decomposition needs +-2^j on cell edges"
            )

    centers = g.centers()
    pieces = []
    for j in range(j_max + 1):
        if j == 0:
            mask = np.abs(centers) <= 1.0
        else:
            mask = (np.abs(centers) > 2.0 ** (j - 1)) & (np.abs(centers) <= 2.0**j)
        vals = np.where(mask[:, None, None], f.values, 0.0)
        pieces.append(GridFn(g, vals))

    integrals = [integrate(p) for p in pieces]
    tails = [np.zeros_like(integrals[0]) for _ in range(j_max + 2)]
    for j in range(j_max, -1, -1):
        tails[j] = tails[j + 1] + integrals[j]

    terms: list[tuple[float, GridFn, Interval]] = []
    records: list[AnnulusRecord] = []
    for j in range(j_max + 1):
        radius = 2.0 ** (j + 1)
        atom_grid = g.extended(-radius, radius)
        raw = pieces[j].resampled(atom_grid).values.copy()
        ac = atom_grid.centers()
        inner = np.abs(ac) <= 2.0**j
        outer = np.abs(ac) <= radius
        raw[outer] += tails[j + 1] * 2.0 ** -(j + 2)
        raw[inner] -= tails[j] * 2.0 ** -(j + 1)
        prof = GridFn(atom_grid, raw)
        norm = weighted_l2_norm(prof, Weight.UNIT)
        lam = norm * np.sqrt(2.0 * radius)
        wann = weighted_l2_norm(pieces[j], Weight.POISSON_UP)
        records.append(AnnulusRecord(j, 2.0 * wann, integrals[j], tails[j], float(lam)))
        if lam > 0.0:
            terms.append((float(lam), prof.scaled(1.0 / lam), Interval(-radius, radius)))
    return terms, DecompositionTrace(records)


@dataclass(frozen=True)
class CDecomposition:
    terms: list[tuple[complex, CAtom]]
    target_grid: Grid

    @property
    def coefficient_sum(self) -> float:
        return float(sum(abs(lam) for lam, _ in self.terms))

    def reconstruct(self) -> GridFn:
        dim = self.terms[0][1].b.dim if self.terms else 1
        out = GridFn.zero(self.target_grid, dim)
        for lam, atom in self.terms:
            out = out + atom.as_function().scaled(lam)
        return out

    def to_json(self) -> dict:
        return {
            "target_grid": {
                "origin": self.target_grid.origin,
                "cell_width": self.target_grid.cell_width,
                "num_cells": self.target_grid.num_cells,
            },
            "terms": [
                {"lambda": [complex(lam).real, complex(lam).imag], "atom": atom.to_json()}
                for lam, atom in self.terms
            ],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json())

    @classmethod
    def from_json(cls, data: dict) -> "CDecomposition":
        tg = data["target_grid"]
        grid = Grid(float(tg["origin"]), float(tg["cell_width"]), int(tg["num_cells"]))
        terms = [
            (complex(t["lambda"][0], t["lambda"][1]), CAtom.from_json(t["atom"]))
            for t in data["terms"]
        ]
        return cls(terms, grid)

    @classmethod
    def loads(cls, text: str) -> "CDecomposition":
        return cls.from_json(json.loads(text))


def c_decompose(f: GridFn, center_to_mean_zero: bool = False) -> CDecomposition:
    """Factorize f = F beta, Meyer-decompose F, and package valid c-atoms.

    One global factorization keeps the coefficient bookkeeping: all atoms
    share the normalized right factor h = beta/||beta||_2 and the profile
    coefficients absorb ||beta||_2.
    """
    if center_to_mean_zero:
        window = Interval(f.grid.origin, f.grid.end)
        f = f.shifted_mean(interval_mean(f, window))
    norm_f = weighted_l2_norm(f, Weight.UNIT)
    if norm_f == 0.0:
        return CDecomposition([], f.grid)
    big_f, beta = factorize_column(f)
    beta_norm = schatten_norm(beta, 2.0)
    h = beta / beta_norm
    terms, _ = meyer_decompose(big_f)
    out = [(complex(lam * beta_norm), CAtom(prof, h, iv)) for lam, prof, iv in terms]
    grid = out[-1][1].b.grid if out else f.grid
    return CDecomposition(out, grid.extended(f.grid.origin, f.grid.end))


@dataclass(frozen=True)
class MoleculeReport:
    value: float          # (int ||f||^2 (1 + |x-x0|^2/d^2))^(1/2)
    bound: float          # d^(-1/2)
    ratio: float
    mean_defect: float
    passes: bool


def molecule_check(f: GridFn, x0: float, d: float) -> MoleculeReport:
    """Molecule normalization test around x0 at width d, by exact cell moments."""
    if not d > 0.0:
        raise ValueError("molecule width must be positive")
    e = f.grid.edges() - x0
    # integral over each cell of (1 + (x - x0)^2 / d^2)
    cell_w = (e[1:] - e[:-1]) + (e[1:] ** 3 - e[:-1] ** 3) / (3.0 * d * d)
    sq = np.einsum("cij,cij->c", np.conj(f.values), f.values).real
    value = float(np.sqrt(max(np.dot(cell_w, sq), 0.0)))
    bound = d**-0.5
    norm_f = weighted_l2_norm(f, Weight.UNIT)
    mean_defect = schatten_norm(integrate(f), 2.0)
    mean_ok = mean_defect <= MEAN_TOL * max(norm_f * (f.grid.end - f.grid.origin), 1e-300)
    passes = value <= bound * (1.0 + 1e-12) and mean_ok
    return MoleculeReport(value, bound, value / bound, float(mean_defect), passes)


def duality_pair(phi: GridFn, atom: CAtom) -> complex:
    """Classical pairing integral of tr(phi(t) b(t) h) dt, exact cell sum."""
    if phi.dim != atom.b.dim:
        raise ValueError("dimension mismatch")
    return integral_trace_product(phi, atom.b, atom.h)


def extremal_atom(phi: GridFn, I: Interval) -> CAtom:
    """The c-atom on I whose pairing with phi attains the row oscillation.

    With Q the second moment of (phi - phi_I) chi_I (row side) and
    (sigma^2, v) its top eigenpair, the profile
    b = (phi - phi_I)* v w* / (sigma sqrt(|I|)) and right factor h = w v*
    give ``<phi, b h> = oscillation(phi, I, row)``; the fixed unit vector w
    cancels inside the trace, so the pairing value depends only on v.
    """
    g = phi.grid
    if not I.grid_aligned(g):
        raise ValueError("extremal atom needs a grid-aligned interval")
    mean = interval_mean(phi, I)
    centered = phi.shifted_mean(mean).restricted(I)
    q = second_moment(centered, Interval(g.origin, g.end), "row")
    q = 0.5 * (q + adjoint(q))
    w_eig, u = np.linalg.eigh(q)
    sigma2 = float(w_eig[-1])
    l2sq = weighted_l2_norm(centered, Weight.UNIT) ** 2
    if sigma2 <= 1e-26 * max(l2sq, 1e-300):
        raise ValueError("flat on I")
    v = u[:, -1]
    sigma = np.sqrt(sigma2)
    n = phi.dim
    w = np.zeros(n, dtype=np.complex128)
    w[0] = 1.0
    b_vals = adjoint(centered.values) @ np.outer(v, np.conj(w)) / (sigma * np.sqrt(I.length))
    h = np.outer(w, np.conj(v))
    return CAtom(GridFn(g, b_vals), h, I)


def _snap_out(grid: Grid, a: float, b: float) -> Interval:
    """Smallest lattice-aligned interval containing [a, b]."""
    h = grid.cell_width
    lo = grid.origin + np.floor((a - grid.origin) / h + 1e-9) * h
    hi = grid.origin + np.ceil((b - grid.origin) / h - 1e-9) * h
    return Interval(float(lo), float(hi))


def mollify_residual_atom(atom: CAtom, n: int) -> tuple[float, CAtom]:
    """phi_n * a - a as lambda_n times a c-atom supported on (a snapped) 2I.

    Requires n >= 2/|I| so that the smoothing stays inside the doubled
    interval.
    """
    if n < 2.0 / atom.interval.length:
        raise ValueError("mollifier scale too small for the doubled interval")
    mol = Mollifier(n)
    smoothed = convolve(atom.b, mol)
    diff = smoothed - atom.b.resampled(smoothed.grid)
    support = _snap_out(diff.grid, *_concentric(atom.interval, 2.0))
    lam = weighted_l2_norm(diff, Weight.UNIT) * np.sqrt(support.length)
    if lam == 0.0:
        return 0.0, CAtom(diff, atom.h, support)
    return float(lam), CAtom(diff.scaled(1.0 / lam), atom.h, support)


def _concentric(I: Interval, factor: float) -> tuple[float, float]:
    half = 0.5 * factor * I.length
    return I.center - half, I.center + half


def mollify_atom(atom: CAtom, n: int) -> tuple[list[tuple[float, CAtom]], float | None]:
    """Smooth an atom by the bump at scale n, staying inside the atomic class.

    Part one cuts (-1/n, 1/n) into pieces shorter than |I|; the windowed
    convolutions of b are atoms up to the weights 2 ||phi_n chi_piece||_1,
    which sum to exactly 2, and the weighted combination reconstructs
    phi_n * a.  Part two (only for n >= 2/|I|) returns the coefficient
    lambda_n = sqrt(|2I|) ||phi_n * b - b||_2 of the residual atom; for
    smaller n the residual is omitted (None).
    """
    if n < 1:
        raise ValueError("mollifier scale must be positive")
    mol = Mollifier(n)
    b, h, I = atom.b, atom.h, atom.interval
    radius = 1.0 / n
    pieces = max(1, int(np.ceil(2.0 * radius / I.length)))
    if 2.0 * radius / pieces >= I.length:
        pieces += 1
    cuts = np.linspace(-radius, radius, pieces + 1)

    combination: list[tuple[float, CAtom]] = []
    for k in range(pieces):
        lo, hi = float(cuts[k]), float(cuts[k + 1])
        mass = mol.windowed_mass(lo, hi)
        bk = convolve(b, mol, window=(lo, hi))
        support = _snap_out(bk.grid, I.a + lo, I.b + hi)
        combination.append((2.0 * mass, CAtom(bk.scaled(1.0 / (2.0 * mass)), h, support)))

    residual = None
    if n >= 2.0 / I.length:
        residual, _ = mollify_residual_atom(atom, n)
    return combination, residual
