"""
Saturated NLS Toolkit

Ground states, linearized spectra, bifurcation points and solution branches
of the saturated nonlinear Schrödinger system.
"""

__version__ = "0.1.0"
