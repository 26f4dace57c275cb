"""Feasibility simulator for a two-ion trapped-ion electric-field gradiometer.

Binding-induced dipole changes in a sample produce a differential field
across a two-ion crystal; spin-dependent-force loops turn that field into
a spin phase. The subpackages cover the chain end to end: electrostatics,
crystal mechanics, analytic transduction, a numerical protocol oracle,
noise models and the feasibility arithmetic built on top of them.
"""

__version__ = "0.1.0"
