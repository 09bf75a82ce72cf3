"""First-hitting-time distribution of a lazy random walk on the non-negative integers."""
from . import _backend
from .core import (
    CapacityError,
    DivergentMoment,
    DomainError,
    HopProbabilities,
    NegativeProbability,
    NonTerminatingSeries,
    ParameterError,
    RuinError,
    SimplexViolation,
    validate,
)
from .exact import Method, PmfQuery, PmfValue, pmf, pmf_at, pmf_via_2f1
from .oracles import dp_grid, pmf_integral
from .montecarlo import EmpiricalPmf, empirical_pmf
from .moments import mean, mgf, moment_poly, total_ruin_probability, variance
from .asymptotics import asymptotic_pmf, inverse_gaussian_density, inverse_gaussian_mass

__version__ = "0.1.0"
backend = _backend.name

__all__ = [
    "CapacityError", "DivergentMoment", "DomainError", "HopProbabilities",
    "NegativeProbability", "NonTerminatingSeries", "ParameterError", "RuinError",
    "SimplexViolation", "validate", "Method", "PmfQuery", "PmfValue", "pmf",
    "pmf_at", "pmf_via_2f1", "dp_grid", "pmf_integral", "EmpiricalPmf",
    "empirical_pmf", "mean", "mgf", "moment_poly", "total_ruin_probability",
    "variance", "asymptotic_pmf", "inverse_gaussian_density",
    "inverse_gaussian_mass", "backend",
]
