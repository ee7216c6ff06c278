"""Blob-algebra representations, Baxterized R/K matrices and open-chain transfer matrices."""
from .algebra import (AlgebraParams, ChargeTower, LocalRep, QGroupRep, boundary_charge,
                      boundary_element, make_params, qgroup_rep, tower, twin_rep, xxz_rep)
from .baxter import LaxFactory, sample_lambdas, sample_pairs
from .report import CheckReport, emit_report, parse_json_lines
from .tensor import (SiteLayout, act_on, comm_residual, embed, eq_residual, kron, leg_permute,
                     permutation, scalar_fit)
from .transfer import DoubleRow

__version__ = "0.1.0"

__all__ = [
    "AlgebraParams", "ChargeTower", "LocalRep", "QGroupRep", "boundary_charge",
    "boundary_element", "make_params", "qgroup_rep", "tower", "twin_rep", "xxz_rep",
    "LaxFactory", "sample_lambdas", "sample_pairs",
    "CheckReport", "emit_report", "parse_json_lines",
    "SiteLayout", "act_on", "comm_residual", "embed", "eq_residual", "kron", "leg_permute",
    "permutation", "scalar_fit",
    "DoubleRow",
]
