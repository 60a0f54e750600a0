"""
Console output of the command-line tools.
"""
