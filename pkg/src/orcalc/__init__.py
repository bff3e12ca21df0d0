"""Operator-range calculus for finite-dimensional selfadjoint operators."""
