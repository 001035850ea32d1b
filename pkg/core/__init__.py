# core/__init__.py
"""
Core modules for the summability index toolkit
"""

__version__ = '0.1.0'

from .bound_calculator import IndexQuery, BoundResult, aggregate_bounds
from .constructions import MultilinearForm, VectorFamily
from .norm_estimator import NormEstimate, NormEstimator

__all__ = ['IndexQuery', 'BoundResult', 'aggregate_bounds', 'MultilinearForm', 'VectorFamily',
           'NormEstimate', 'NormEstimator', '__version__']
