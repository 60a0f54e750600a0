"""
Rich console summaries printed by the command-line tools.
"""

import logging
from typing import Any, Dict, Iterable, Optional

import numpy as np
import pandas as pd
from rich import box
from rich.console import Console
from rich.panel import Panel
from rich.table import Table
from rich.text import Text

# Set up logging
logger = logging.getLogger(__name__)

COLOR_SCHEME = {
    "panel_border": "rgb(114,137,218)",
    "title": "rgb(255,255,255)",
    "positive": "rgb(67,181,129)",
    "negative": "rgb(240,71,71)",
    "neutral": "rgb(255,204,77)",
    "snr": "rgb(114,137,218)",
    "value": "rgb(255,204,77)",
    "theory": "rgb(67,181,129)",
    "label": "rgb(220,221,222)",
}

# Relative gap between empirical and predicted MSE that is still shown as a match
MATCH_TOLERANCE = 0.03


def _fmt(value: float, spec: str = ".4e") -> str:
    if value is None or (isinstance(value, float) and np.isnan(value)):
        return "[dim]n/a[/dim]"
    return format(value, spec)


class ConsoleReport:
    """
    Renders result, complexity, OOB and PAPR tables.
    """

    def __init__(self, console: Optional[Console] = None):
        """
        Initialize the report.

        Args:
            console: Console to print to (a new one by default)
        """
        self.console = console or Console()

    def _panel(self, table: Table, title: str) -> Panel:
        return Panel(
            table,
            title=title,
            border_style=COLOR_SCHEME["panel_border"],
            box=box.ROUNDED,
        )

    def _table(self) -> Table:
        return Table(
            title_style=f"bold {COLOR_SCHEME['title']}",
            border_style=COLOR_SCHEME["panel_border"],
            box=box.SIMPLE_HEAD,
        )

    def results_panel(self, frame: pd.DataFrame, title: str = "Simulation Results") -> Panel:
        """
        Render a simulation result table.

        Args:
            frame: ResultTable.to_frame() output

        Returns:
            Panel holding one row per SNR point
        """
        table = self._table()
        table.add_column("SNR [dB]", style=COLOR_SCHEME["snr"], justify="right")
        table.add_column("MSE", style=COLOR_SCHEME["value"], justify="right")
        table.add_column("Theory", style=COLOR_SCHEME["theory"], justify="right")
        table.add_column("Gap", justify="right")
        table.add_column("SER", justify="right")
        table.add_column("Spread", style=COLOR_SCHEME["label"], justify="right")

        for row in frame.itertuples(index=False):
            theory = row.theoretical_mse
            if np.isnan(theory) or theory <= 0:
                gap = Text("n/a", style="dim")
            else:
                relative = row.empirical_mse / theory - 1.0
                style = COLOR_SCHEME["positive"] if abs(relative) <= MATCH_TOLERANCE else COLOR_SCHEME["negative"]
                gap = Text(f"{relative:+.2%}", style=style)
            table.add_row(
                f"{row.snr_db:.1f}",
                _fmt(row.empirical_mse),
                _fmt(theory),
                gap,
                _fmt(row.empirical_ser, ".3e"),
                _fmt(row.relative_spread, ".2%"),
            )

        if frame.empty:
            table.add_row("", "[dim]No results[/dim]", "", "", "", "")
        return self._panel(table, title)

    def complexity_panel(self, frame: pd.DataFrame) -> Panel:
        """
        Render complex multiplications per implementation (rows) and M (columns).

        Args:
            frame: complexity_table() output
        """
        wide = frame.pivot_table(index=["stage", "implementation"], columns="M", values="cms", aggfunc="first")
        table = self._table()
        table.add_column("Stage", style="bold", justify="left")
        table.add_column("Implementation", style=COLOR_SCHEME["label"], justify="left")
        for M in wide.columns:
            table.add_column(f"M={M}", style=COLOR_SCHEME["value"], justify="right")

        for (stage, impl), values in wide.iterrows():
            cells = ["-" if np.isnan(v) else f"{int(v):,}" for v in values]
            table.add_row(stage, impl, *cells)
        K = int(frame["K"].iloc[0]) if not frame.empty else 0
        return self._panel(table, f"Complex Multiplications (K={K})")

    def oob_panel(self, leakage: Dict[str, float], n_gc: int) -> Panel:
        """
        Render OOB leakage per waveform, lowest first.

        Args:
            leakage: Waveform name -> leakage in dB
            n_gc: Guard subcarriers used for the out-of-band region
        """
        table = self._table()
        table.add_column("Waveform", style="bold", justify="left")
        table.add_column("OOB [dB]", style=COLOR_SCHEME["value"], justify="right")
        for name, value in sorted(leakage.items(), key=lambda item: item[1]):
            table.add_row(name, f"{value:.1f}")
        return self._panel(table, f"Out-of-Band Leakage (N_gc={n_gc})")

    def papr_panel(self, thresholds_db: Iterable[float], ccdf: Iterable[float]) -> Panel:
        """Render a PAPR CCDF."""
        table = self._table()
        table.add_column("PAPR0 [dB]", style=COLOR_SCHEME["snr"], justify="right")
        table.add_column("P(PAPR > PAPR0)", style=COLOR_SCHEME["value"], justify="right")
        for threshold, prob in zip(thresholds_db, ccdf):
            table.add_row(f"{threshold:.1f}", f"{prob:.4e}")
        return self._panel(table, "PAPR CCDF")

    def summary_panel(self, entries: Dict[str, Any], title: str = "Run") -> Panel:
        """Key-value summary of a run."""
        table = self._table()
        table.add_column("Setting", style="bold", justify="left")
        table.add_column("Value", style=COLOR_SCHEME["label"], justify="left")
        for key, value in entries.items():
            table.add_row(str(key), str(value))
        return self._panel(table, title)

    def show(self, panel: Panel) -> None:
        """Print a panel."""
        self.console.print(panel)
