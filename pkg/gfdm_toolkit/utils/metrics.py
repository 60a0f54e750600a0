"""
Error statistics accumulated over simulated blocks.
"""

import logging
from typing import Any, Dict, Optional

import numpy as np

from gfdm_toolkit.core.errors import InvalidInputError

# Set up logging
logger = logging.getLogger(__name__)


class ErrorAccumulator:
    """
    Accumulates per-symbol squared errors and symbol errors for one SNR point.
    """

    def __init__(self, K: int, M: int):
        """
        Initialize the accumulator.

        Args:
            K: Subcarriers
            M: Subsymbols
        """
        self.shape = (K, M)

        # Sum of |d_hat - d|^2 per (k, m)
        self.squared_errors = np.zeros(self.shape)

        # Detection errors
        self.symbol_errors = 0
        self.symbols = 0
        self.blocks = 0

        # Running sum of a per-block reference quantity (e.g. a predicted MSE)
        self.reference_sum = 0.0
        self.reference_count = 0

        self.metrics = {}

    def add_block(self, squared_errors: np.ndarray, symbol_errors: int, reference: Optional[float] = None) -> None:
        """
        Add one block's errors.

        Args:
            squared_errors: K x M squared estimation errors
            symbol_errors: Number of wrongly detected symbols in the block
            reference: Optional per-block reference value to average
        """
        squared_errors = np.asarray(squared_errors, dtype=float)
        if squared_errors.shape != self.shape:
            raise InvalidInputError(f"Expected {self.shape} errors, got {squared_errors.shape}")
        self.squared_errors += squared_errors
        self.symbol_errors += int(symbol_errors)
        self.symbols += squared_errors.size
        self.blocks += 1
        if reference is not None:
            self.reference_sum += float(reference)
            self.reference_count += 1

    def merge(self, other: "ErrorAccumulator") -> None:
        """
        Fold another accumulator's totals into this one.

        Args:
            other: Accumulator with the same shape
        """
        if other.shape != self.shape:
            raise InvalidInputError(f"Cannot merge {other.shape} statistics into {self.shape}")
        self.squared_errors += other.squared_errors
        self.symbol_errors += other.symbol_errors
        self.symbols += other.symbols
        self.blocks += other.blocks
        self.reference_sum += other.reference_sum
        self.reference_count += other.reference_count

    @property
    def per_symbol_mse(self) -> np.ndarray:
        """Empirical sigma^2_{k,m}."""
        if self.blocks == 0:
            return np.full(self.shape, np.nan)
        return self.squared_errors / self.blocks

    @property
    def reference_mean(self) -> float:
        """Average of the per-block reference values (NaN if none)."""
        if self.reference_count == 0:
            return float("nan")
        return self.reference_sum / self.reference_count

    def calculate_metrics(self) -> Dict[str, Any]:
        """
        Calculate summary metrics.

        Returns:
            Dictionary of metrics
        """
        if self.blocks == 0:
            self.metrics = {
                "mse": float("nan"),
                "ser": float("nan"),
                "relative_spread": float("nan"),
                "blocks": 0,
            }
            return self.metrics

        per_symbol = self.per_symbol_mse
        mse = float(per_symbol.mean())
        spread = float(np.max(np.abs(per_symbol - mse)) / mse) if mse > 0 else 0.0

        self.metrics = {
            "mse": mse,
            "ser": self.symbol_errors / self.symbols,
            "relative_spread": spread,
            "blocks": self.blocks,
        }
        return self.metrics

    def to_dict(self) -> Dict[str, Any]:
        """Convert totals to dictionary."""
        return {
            "squared_errors": self.squared_errors.tolist(),
            "symbol_errors": self.symbol_errors,
            "symbols": self.symbols,
            "blocks": self.blocks,
            "reference_sum": self.reference_sum,
            "reference_count": self.reference_count,
        }

    def __str__(self) -> str:
        """
        Return string representation of the metrics.

        Returns:
            String representation
        """
        if not self.metrics:
            self.calculate_metrics()

        return (
            f"Error Metrics:\n"
            f"  MSE: {self.metrics['mse']:.4e}\n"
            f"  SER: {self.metrics['ser']:.4e}\n"
            f"  Relative Spread: {self.metrics['relative_spread']:.2%}\n"
            f"  Blocks: {self.metrics['blocks']}"
        )
