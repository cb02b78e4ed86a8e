"""Two-level atom in a mean-field ferromagnetic lattice.

The package solves the self-consistent magnetization of a Heisenberg
ferromagnet in an applied field, reduces the atom dynamics to its unit-cell
spin bath, and provides pure-dephasing, level-transition, and two-atom
entanglement observables, each cross-validated against brute-force evolution
of the full cell.

Units: J = k_B = hbar = 1 throughout.
"""

from .dephasing import (
    AtomParams,
    DephasingResult,
    coherence_series,
    conditional_hamiltonians,
    dephasing_factor,
    dephasing_rate,
)
from .entanglement import (
    ConcurrenceSeries,
    PairState,
    closed_form_pair_x,
    closed_form_pair_z,
    concurrence,
    concurrence_series,
    detect_death_revival,
    has_revival,
    pair_state,
    xi_factors,
)
from .meanfield import (
    CellPartition,
    FieldVector,
    GapEquationError,
    LatticeSpec,
    MeanFieldSolution,
    ThermalPoint,
    cell_partition,
    curie_temperature,
    effective_field,
    free_energy,
    gap_rhs,
    solve_gap,
)
from .oracle import (
    FullCellModel,
    full_cell_model,
    full_evolve,
    full_evolve_series,
    grid_minimize_free_energy,
    model_from_mean_field,
    pair_cell_model,
    pair_evolve,
    pair_evolve_series,
)
from .spinops import (
    SpectralDecomposition,
    SpinMagnitude,
    SpinOperatorSet,
    evolve_unitary,
    hermitian_spectral,
    multiplicity,
    multiplicity_oracle,
    sector_spins,
    spin_matrices,
    thermal_state,
)
from .transitions import (
    AtomChannel,
    MDiscriminant,
    SectorBlock,
    build_sectors,
    channel_series,
    channel_tomography,
    coherence_factor_z,
    evolve_atom,
    evolve_atom_series,
    excited_population_x,
    excited_population_z,
    m_discriminants,
    psi_factor,
    sector_normalizer,
)

__version__ = "0.1.0"
