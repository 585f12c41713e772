"""Exact simulation of quantum batteries charged by K-regular stabilizer Hamiltonians."""

__version__ = "0.1.0"
