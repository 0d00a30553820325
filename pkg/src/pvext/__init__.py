"""Regularized pairings of |f|^(2 alpha) (log|f|^2)^q f^(-N): cutoff principal
values, finite parts and continuation through Bernstein functional equations."""

__version__ = "0.1.0"
