"""Numerical laboratory for operator-valued BMO/Hardy theory on the line.

Matrix-valued step functions with exact integration, column/row BMO norms,
atomic Hardy-space decompositions, and truncated Calderon-Zygmund operators
with their endpoint estimates as executable inequalities.
"""

from .bmo import BmoReport, bmo_norm, garnett_truncate, oscillation
from .czo import (
    BandMultiplicationKernel,
    ConstantKernel,
    HilbertKernel,
    HormanderEstimate,
    Kernel,
    MollifiedKernel,
    PoissonGrid,
    RotatedKernel,
    apply_kernel,
    apply_to_decomposition,
    cz_atom_check,
    g_h1_check,
    hormander_constant,
    kernel_from_config,
    l2_operator_norm,
    littlewood_paley_g,
    mollified_kernel,
    smoothed_apply,
)
from .gridfn import (
    Grid,
    GridFn,
    Interval,
    Mollifier,
    Weight,
    column_norm,
    convolve,
    gridfn_from_json,
    gridfn_to_json,
    integrate,
    interval_mean,
    l1_l1_norm,
    load_gridfn,
    right_multiply,
    row_norm,
    save_gridfn,
    weighted_l2_norm,
)
from .hardy import (
    CAtom,
    CDecomposition,
    c_decompose,
    duality_pair,
    extremal_atom,
    factorize_column,
    meyer_decompose,
    molecule_check,
    mollify_atom,
    validate_atom,
)
from .matalg import adjoint, schatten_norm, sqrt_psd, trace

__version__ = "0.1.0"
