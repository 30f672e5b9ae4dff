"""cavphase-plot: render one figure type from a cavphase output file.

    cavphase-plot <figure-type> <input.csv> [-o out.png] [--summary summary.json]

With no --summary flag, a summary.json sitting next to the input is used
when present (it supplies critical-line, outline and metric annotations).
"""

import argparse
import os
import sys

from . import readers
from .render import RENDERERS


def main(argv=None):
    parser = argparse.ArgumentParser(prog="cavphase-plot", description=__doc__)
    parser.add_argument("figure", choices=sorted(RENDERERS))
    parser.add_argument("input", help="CSV artifact written by the cavphase CLI")
    parser.add_argument("-o", "--output", default=None,
                        help="image path (default: input name with .png)")
    parser.add_argument("--summary", default=None,
                        help="run summary.json for overlays/annotations")
    args = parser.parse_args(argv)

    out = args.output or os.path.splitext(args.input)[0] + ".png"
    summary_path = args.summary
    if summary_path is None:
        candidate = os.path.join(os.path.dirname(args.input) or ".", "summary.json")
        if os.path.exists(candidate):
            summary_path = candidate
    summary = None
    if summary_path is not None:
        try:
            summary = readers.read_summary(summary_path)
        except readers.SchemaError as err:
            print(f"error: {err}", file=sys.stderr)
            return 2
    try:
        RENDERERS[args.figure](args.input, out, summary=summary)
    except readers.SchemaError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    except FileNotFoundError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    print(out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
