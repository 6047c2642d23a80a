"""Numerical lab for roots of random polynomials near the unit circle."""
