# Unweighted column selection for spectral graph sparsification.
__version__ = "0.1.0"
