"""Figures and tables from fairsched simulation output files."""

__version__ = "0.1.0"
