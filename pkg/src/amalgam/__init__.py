"""Weighted amalgam spaces on sampled functions.

Modules: :mod:`~amalgam.grid` (sampling and quadrature),
:mod:`~amalgam.weights` (Muckenhoupt quantities), :mod:`~amalgam.spaces`
(norms), :mod:`~amalgam.operators`, :mod:`~amalgam.harness` (empirical
suites) and :mod:`~amalgam.cli`.
"""
__version__ = "0.1.0"
