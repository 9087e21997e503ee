# spinvac/operations/__init__.py

"""
Numerical engines.

Modules:
- geometry: polarization bases, angular sums, mode sets, golden-rule rate.
- kernel: finite-time memory kernels and their large-time replacements.
- markovian: closed-form spin relaxation and precession.
- shift: cutoff-regularized radiative frequency shifts.
- exact: spin (x) truncated photon modes, evolved as a pure state.
- radiation: local and regulated spectral radiation-reaction fields.
"""
