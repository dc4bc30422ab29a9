"""Exact and asymptotic enumeration of series-parallel graphs carrying
distinguished spanning trees and forests."""

__version__ = "0.1.0"
