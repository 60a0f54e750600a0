"""
Monte-Carlo scenarios, QAM mapping and run configuration.
"""
