"""
Result accumulation and CSV helpers.
"""
