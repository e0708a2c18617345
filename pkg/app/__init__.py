"""
PolSAR Classification Toolkit
Coherency matrices, speckle filtering, H/A/alpha decomposition and supervised
Wishart / SVM classification of fully polarimetric SAR rasters
"""

__version__ = "1.0.0"
