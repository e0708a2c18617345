"""
API Routers for the PolSAR Classifier Registry
"""

from . import analysis, registry

__all__ = ['analysis', 'registry']
