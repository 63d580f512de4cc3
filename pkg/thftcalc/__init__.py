"""
THFT one-loop weight calculator
"""

__version__ = "1.0.0"
