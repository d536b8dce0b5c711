"""
Configuration and error hierarchy
"""
