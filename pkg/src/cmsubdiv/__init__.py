"""Subdivision of curves in metric spaces driven by binary averages."""

from .core import (TOL, AxiomReport, ElementSequence, FunctionCurve, LabeledSequence,
                   MetricPropertyReport, ParamGrid, Space, check_average_axioms,
                   check_metric_property, delta, piecewise_average, refine_parameters,
                   sup_distance)
from .errors import (CapabilityError, ContractError, DegenerateTangentError, DomainError,
                     GeodesicError, InsufficientDataError, NumericalError, SubdivisionError,
                     UndefinedDeltaError)
from .schemes import SCHEMES, Scheme, SubdivisionRun, linear_mask, make_scheme, subdivide
from .spaces import SPACES, make_space

__version__ = "0.1.0"
