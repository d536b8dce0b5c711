"""
Computation layers
"""
