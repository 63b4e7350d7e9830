"""Small saturating sets in PG(R, q), their covering codes and bounds."""

__version__ = "0.1.0"
