"""
Command-line interface for the summability index toolkit
"""
