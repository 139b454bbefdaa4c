"""Metallic structures, slant and semi-slant submanifolds, and numerical checks of their identities."""

__version__ = "0.1.0"

from .errors import (ConfigError, DegeneratePointError, DomainError, EvaluationError, InputError, MetallicError,
                     ParseError, StructureError)
from .metallic import (GOLDEN, Branch, Kind, MetallicParams, ProjectorPair, StructureOperator, metallic_from_product,
                       metallic_number, products_from_metallic, projectors, random_metallic, validate_structure)
from .expr import Expression, Jet2, eval_gradient, eval_jet, eval_value, parse, to_source
from .sampling import SamplingPlan, Tolerances
from .report import Check, VerificationReport
from .immersion import FrameData, Immersion, NormalVector, TangentVector, frame_at, split
from .fields import ChartVectorField, chart_bracket
from .induced import (InducedMaps, SigmaStructure, StructureField, induced_maps, sigma_structure, sigma_residuals,
                      verify_theorem1)
from .slant import (AngleReport, DistributionSpec, SlantClass, pointwise_angle_relation, semi_slant_check,
                    slant_distribution_lambda, slant_test, theorem_angle_relation, wirtinger_angle_F,
                    wirtinger_angle_J)
from .extrinsic import (ExtrinsicData, LocalPatch, NormalField, covariant_N, covariant_n, covariant_T, covariant_t,
                        extrinsic_at, induced_connection, integrability_checks, mixed_geodesic_check,
                        verify_bracket_props, verify_derivative_props)
from .scenario import Scenario, builtin_example1, builtin_example2, load_scenario, run_suite, scenario_from_dict
