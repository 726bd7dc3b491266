"""Decoders and Monte Carlo tools for tetrahedral 3D color codes."""

__version__ = "0.1.0"

from .code import (CodeConstructionError, CodeSpec, TetrahedralCode, boundary_bulk_ratio, build_honeycomb,
                   carve_tetrahedral_code, validate_code)
from .gf2 import (BitMatrix, Membership, PauliType, gf2_rank, gf2_solve, min_logical_weight,
                  stabilizer_membership)
from .lattice import (Chain, Color, DualLattice, Vertex, boundary_project, edge_label, link_surface,
                      restrict_syndrome_by_sweep_color, star, twice_restricted_graph)
from .noise_sim import (NoiseModel, RunStats, estimate_crossing, logical_failure, run_trials,
                        sample_iid_error, sweep_probabilities)
from .xdecoder import (DecodeOutcome, FailureStage, LiftConfig, decode_x, extract_x_syndrome,
                       lift_vertex_naive, lift_vertex_peel, sweep_find_faces)
from .zdecoder import (Matching, MatchingProblem, build_matching_graph, decode_z, extract_z_syndrome,
                       mwpm_exact, pairs_to_edge_chain)

__all__ = [
    "CodeConstructionError", "CodeSpec", "TetrahedralCode", "boundary_bulk_ratio", "build_honeycomb",
    "carve_tetrahedral_code", "validate_code", "BitMatrix", "Membership", "PauliType", "gf2_rank",
    "gf2_solve", "min_logical_weight", "stabilizer_membership", "Chain", "Color", "DualLattice", "Vertex",
    "boundary_project", "edge_label", "link_surface", "restrict_syndrome_by_sweep_color", "star",
    "twice_restricted_graph", "NoiseModel", "RunStats", "estimate_crossing", "logical_failure", "run_trials",
    "sample_iid_error", "sweep_probabilities", "DecodeOutcome", "FailureStage", "LiftConfig", "decode_x",
    "extract_x_syndrome", "lift_vertex_naive", "lift_vertex_peel", "sweep_find_faces", "Matching",
    "MatchingProblem", "build_matching_graph", "decode_z", "extract_z_syndrome", "mwpm_exact",
    "pairs_to_edge_chain",
]
