"""Median graphs, wallings and cuts on finite graphs, with tree extraction and end flows."""

__version__ = "0.1.0"

from .errors import (CapExceededError, CertificationError, ContractError, DisconnectedError, GraphFormatError,
                     InvalidVertexError, InvariantViolation, NotMedianError, PocsetError, TreeDecompositionError,
                     TreelikeError)
from .graph import Graph, boundaries, components, disjoint_union, interval, is_convex
from .median import MedianGraph, as_median, check_median, cone, convex_hull, gate_projection, median
from .hyperplanes import (HalfSpace, cube_embedding, halfspace_system, halfspaces, hyperplane_adjacency, nested,
                          separate_convex, separating_halfspaces, successors)
from .pocset import (Pocset, Walling, dual_median_graph, orientations, roundtrip_graph, roundtrip_pocset,
                     validate_pocset, wall_dual)
from .cuts import CutFamily, all_radial_cuts, brute_force_cuts, connectify, radial_cuts
from .treedec import TreeDecomposition, heuristic_treedec, prune_skeleton, shrink_bags, treedec_cuts, validate
from .tree_extract import (extract_spanning_tree, leaf_prune, oneended_fer_witness, oneended_fer_witness_rank,
                           verify_quasi_isometry)
from .end_flow import (EndTarget, FlowForest, a_set, e_n_sequence, flow_forest, make_window, t_u_root,
                       t_u_step)
from .generators import generate
from .io import export_dot, read_graph
from .pipeline import run_pipeline

__all__ = [name for name in dir() if not name.startswith("_")]
