"""render_decay_plot command line front end."""

from __future__ import annotations

import argparse
import sys

from .render import PlotSpec, SchemaError, render_decay_plot


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="render_decay_plot",
                                     description="render a log-log KRR error decay figure")
    parser.add_argument("--summary", required=True, help="summary.csv from a krrlab run")
    parser.add_argument("--rate", required=True, help="rate_report.txt from the same run")
    parser.add_argument("--out", required=True, help="output image path (png, pdf, svg)")
    parser.add_argument("--title", default="KRR error decay")
    parser.add_argument("--xlabel", default="sample size n")
    parser.add_argument("--ylabel", default="L2 error")
    args = parser.parse_args(argv)
    spec = PlotSpec(summary_path=args.summary, rate_report_path=args.rate,
                    output_path=args.out, title=args.title, xlabel=args.xlabel,
                    ylabel=args.ylabel)
    try:
        result = render_decay_plot(spec)
    except (SchemaError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(f"wrote {result.output_path} ({result.width_px}x{result.height_px}), {result.annotation}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
