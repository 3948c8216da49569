"""Exact flow-tree coefficients, tropical multiplicities and DT invariants of quivers."""
from .dt import AttractorData, DTResult, F_per_tree, F_total, reconstruct_dt
from .exactlin import INFINITE, IntMatrix, Sublattice, smith_normal_form
from .flowtree import (
    LabeledTree,
    PerturbationSpec,
    enumerate_attractor_trees,
    enumerate_binary_trees,
    limit_tree,
    run_flow,
)
from .quiver import Quiver, SkewForm, skew_form_from_quiver
from .tropical import FaceType, gluing_cokernel, k_coefficient, log_gw, product_formula, psi_cokernel

__version__ = "0.1.0"
