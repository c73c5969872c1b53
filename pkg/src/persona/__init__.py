"""Lexical-semantic feature pipelines for Big-Five personality classification."""

__version__ = "0.1.0"
