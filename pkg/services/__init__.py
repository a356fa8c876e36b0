"""Numerical and I/O services for the analyzer"""
