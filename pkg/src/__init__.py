"""
penloss: material penetration loss from stepped-frequency sweeps

Turns LOS/NLOS vector network analyzer sweeps into per-frequency penetration
loss, fits linear models and compares them with the TR 38.901 formulas.
"""

__version__ = "1.0.0"
__author__ = "penloss Team"
