"""
Forested Links Shared Package
Contains the core utilities and the mathematical service layer.
"""
