"""Lattice Yang-Mills-Higgs model with gauge group SU(2) x U(1)."""

from .core import (
    GaugeAlgebraField,
    Tangent,
    YMHState,
    almost_complex_j,
    covariant_d0,
    covariant_phi,
    curvature,
    displace,
    energy_terms,
    eom_rhs,
    evolve,
    gauge_matrix,
    hamiltonian,
    inf_gauge_action,
    momentum_map,
    momentum_map_formula,
    potential_gradient,
    step_leapfrog,
    symplectic_form,
    tangent_inner,
    total_charge,
)
from .gauss import (
    CoulombSplit,
    GaussSplit,
    ReducedU1Point,
    coulomb_split,
    faddeev_popov,
    gauss_split,
    k_momentum,
    k_rotate,
    solve_gauss_dense,
)
from .gws import (
    GaugeField,
    GaussResiduals,
    GWSFields,
    apply_gauge,
    darboux_pairing,
    from_gws,
    gauss_gws_residual,
    hamiltonian_singular,
    mass_crosscheck,
    masses,
    reassemble,
    to_gws,
    unitary_gauge,
)
from .presets import PRESETS, make_preset
