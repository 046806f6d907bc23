"""Rule induction with PCA and ARD feature selection, benchmarked under MCAR missingness."""

__version__ = "0.1.0"
