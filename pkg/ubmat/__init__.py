"""
ubmat: uniform-block covariance matrices.

Coordinate algebra in O(K^3 + p) time, a dense reference path, estimation,
information tests with F-mixture null laws, and Monte Carlo studies.
"""

__version__ = "1.0.0"
