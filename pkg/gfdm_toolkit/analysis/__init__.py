"""
Closed-form MSE predictions, spectra, PAPR and complexity counts.
"""
