"""Data models for chains, spectra and reports"""
