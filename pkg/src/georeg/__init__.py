"""Regularized computation of ill-posed algebraic problems."""
