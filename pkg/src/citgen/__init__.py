"""Constrained combinatorial interaction test generation."""

from .model import ModelError, ParameterSpace, hamming_distance, t_tuples_of
from .parser import ModelFile, ParseError, parse_model
from .constraints import (
    DerivationCapExceeded,
    ForbiddenTupleSet,
    Unsatisfiable,
    close_tuples,
)
from .coverage import CombinationMatrix, build_matrix
from .generator import GeneratorConfig, GenerationResult, generate
from .oracle import OracleReport, enumerate_coverable_tuples, verify_suite

__all__ = [
    "CombinationMatrix",
    "DerivationCapExceeded",
    "ForbiddenTupleSet",
    "GenerationResult",
    "GeneratorConfig",
    "ModelError",
    "ModelFile",
    "OracleReport",
    "ParameterSpace",
    "ParseError",
    "Unsatisfiable",
    "build_matrix",
    "close_tuples",
    "enumerate_coverable_tuples",
    "generate",
    "hamming_distance",
    "parse_model",
    "t_tuples_of",
    "verify_suite",
]

__version__ = "0.1.0"
