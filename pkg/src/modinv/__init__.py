"""Modular data, modular-invariant search, nimreps and chiral sector arithmetic.

The package is organized around exact integer data (fusion tensors, mass
matrices, branching coefficients) produced from double-precision modular
S/T matrices by tolerance-checked rounding.
"""

from .core import (
    Label,
    FusionRing,
    ModularData,
    su2_modular_data,
    su2_fusion_closed_form,
    sun_modular_data,
    ising_modular_data,
    ising_fusion_ring,
    cyclic_group_modular_data,
    modular_data_from_twists,
    verlinde_fusion,
    check_modular,
    modular_data_to_json,
    modular_data_from_json,
)
from .search import (
    MassMatrix,
    CommutantBasis,
    commutant_basis,
    enumerate_invariants,
    verify_invariant,
    permutation_criterion,
    su2_ade_catalog,
    su2_invariant_matrix,
    su3_named_invariants,
)
from .nimrep import (
    AdeGraph,
    NimRepFamily,
    ade_graph,
    fused_adjacencies,
    spectrum_vs_diagonal,
    graphs_isomorphic,
    identify_ade,
)
from .graph_algebra import (
    EigenGauge,
    GraphFusion,
    eigen_gauge,
    graph_structure_constants,
    positivity_report,
)
from .chiral import (
    BranchingData,
    SectorDecomposition,
    gram_matrix,
    decompose_gram,
    branching_data,
    verify_factorization,
    chiral_indices,
    sector_counts,
    chiral_table,
    full_system_dodd,
)
from .dot import GraphDocument, GraphVertex, emit_dot

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
