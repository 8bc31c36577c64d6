"""Haar-random states and unitaries on SO, SU and Sp: sampling, moments, concentration,
complexity and statistical-query bounds."""
from .errors import (ConfigError, ContractError, DomainError, HaarLabError, InvalidDimensionError,
                     InvalidParameterError, NotNormalizedError, ResourceError)
from .groups import GroupElement, GroupId, PureState, sample_group_element, sample_matrices, sample_states
from .numerics import FieldTag, RngStream

__version__ = "0.1.0"

__all__ = [
    "ConfigError", "ContractError", "DomainError", "HaarLabError", "InvalidDimensionError",
    "InvalidParameterError", "NotNormalizedError", "ResourceError", "GroupElement", "GroupId",
    "PureState", "sample_group_element", "sample_matrices", "sample_states", "FieldTag", "RngStream",
]
