from .render import (PlotSpec, RateReport, RenderResult, SchemaError, SummaryTable,
                     annotation_text, load_rate_report, load_summary, render_decay_plot)

__version__ = "0.1.0"
