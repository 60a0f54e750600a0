"""
GFDM waveform toolkit.
"""

__version__ = "0.3.0"
