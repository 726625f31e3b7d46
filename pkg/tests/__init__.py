"""
Tests for the saturated NLS toolkit
"""
