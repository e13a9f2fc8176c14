"""injregions: injective-region decisions for grid tensor families.

A library and CLI that decides whether an n-dimensional grid is an
injective region for a family of local tensors, finds minimal injective
regions under the componentwise grid order, and computes the
quantum-Wielandt injectivity length of matrix families -- with a
brute-force oracle and an exact certification path alongside the fast
floating-point engine.
"""

from .contraction import (Assignment, BoundarySubspace, BruteForceResult,
                          ResourceLimitError, brute_force_span,
                          contract_assignment, sweep_span)
from .families import TensorFamily, recombine
from .familyio import (FamilyFormatError, family_hash, read_family,
                       write_family)
from .generators import FamilyRecipe, SplitMix64, generate
from .grids import (GeneralGrid, GridSpec, OutgoingEdge, edge_counts,
                    is_subgrid, outgoing_order, parse_grid_spec, square_grid)
from .injectivity import (FrontierResult, InjectivityReport, MpsLengthReport,
                          Witness, check_region, minimal_injective_regions,
                          mps_injectivity_length, reduce_family, verify_witness,
                          wielandt_cap, witness)
from .linalg import (FloatEngine, RationalEngine, add_to_basis,
                     determinant_exact, make_engine, rank)
from .scalars import GaussianRational
from .tensors import (AxisOrder, DenseTensor, ShapeMismatchError, contract_pair,
                      flatten, tensor_product)

__version__ = "0.1.0"

__all__ = [
    "Assignment", "AxisOrder", "BoundarySubspace", "BruteForceResult",
    "DenseTensor", "FamilyFormatError", "FamilyRecipe", "FloatEngine",
    "FrontierResult", "GaussianRational", "GeneralGrid", "GridSpec",
    "InjectivityReport", "MpsLengthReport", "OutgoingEdge", "RationalEngine",
    "ResourceLimitError", "ShapeMismatchError", "SplitMix64", "TensorFamily",
    "Witness", "add_to_basis", "brute_force_span", "check_region",
    "contract_assignment", "contract_pair", "determinant_exact", "edge_counts",
    "family_hash", "flatten", "generate", "is_subgrid", "make_engine",
    "minimal_injective_regions", "mps_injectivity_length", "outgoing_order",
    "parse_grid_spec", "rank", "read_family", "recombine", "reduce_family",
    "square_grid", "sweep_span", "tensor_product", "verify_witness",
    "wielandt_cap", "witness", "write_family",
]
