"""Order-preserving Bayesian optimization with ranking-loss surrogates."""

__version__ = "0.1.0"
