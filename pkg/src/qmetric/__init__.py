"""Numerical workbench for finite-dimensional quantum metric geometry.

Operator seminorms on matrix operator systems and their amplifications,
Monge-Kantorovich state distances, finite-dimensional approximation
certification, and external products of spectral triples.
"""

__version__ = "0.1.0"

from .config import TOL, Tolerances
from .errors import (ConfigInvalid, DimensionMismatch, EmptySpace,
                     HypothesisFailed, InvalidWeight, IrrationalTheta,
                     NotHermitian, ParityMismatch, QmetricError,
                     SolverDidNotConverge, UnsupportedKind)
from .linalg import (HermitianEigenResult, clifford_generators, commutator,
                     direct_sum, hermitian_eigen, kron, operator_norm)
from .opsys import (AmplifiedElement, OperatorSystem, TensorSystem, UcpMap,
                    apply_ucp_right, forget_subdivisions, quotient_norm,
                    sample_ucp, scalar_element, ucp_ensemble)
from .seminorms import (AxiomReport, LinearSeminorm, MaxSeminorm,
                        SeminormFamily, action_family, check_axioms,
                        commutator_family, entrywise_bounds_check,
                        max_seminorm, metric_family, stabilized_family,
                        tensor_lift, tensor_seminorm_exact,
                        tensor_seminorm_sampled)
from .solvers import SolverReport
from .triples import (LipschitzTriple, ProductTriple, check_product_inequality,
                      check_square_law, external_product,
                      product_seminorm_factorization, stabilize)
from .metrics import (ApproxPair, FiniteMetricSpace, MkProblem,
                      approximation_defect, build_partition_approximation,
                      certify_finite_diameter_via_norm, covering_diagnostic,
                      finite_diameter_constant, identity_pair, mk_distance,
                      slice_map, tensor_factor_slice_bound, tensor_pair,
                      tensor_product_certification)
from .models import (GroupActionModel, TorusAlgebra, TorusPolynomial,
                     check_action_vs_dirac, fuzzy_dirac_triple)
