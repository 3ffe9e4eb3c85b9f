"""Verification pipeline for the Thue family X(X - F_n Y)(X - 2^n Y) - Y^3 = +-1."""

__version__ = "0.1.0"
