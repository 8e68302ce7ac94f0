"""
dS QFT Lab - Backend Application

Numerical verification of the free scalar field on two-dimensional de Sitter space.
"""

__version__ = "0.1.0"
