"""Fucik spectrum of the one-dimensional Neumann problem with indefinite weights."""
