"""Figure rendering CLI: render --kind <k> --in <dir> --out <file>.

Exit codes: 0 success, 1 bad arguments or unparseable inputs.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .io import ParseError
from .render import KINDS, FigureJob, render


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="ktn-figures", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("render", help="render one figure from a run directory")
    p.add_argument("--kind", required=True, choices=KINDS)
    p.add_argument("--in", dest="input_dir", required=True)
    p.add_argument("--out", required=True)
    args = parser.parse_args(argv)

    try:
        job = FigureJob(Path(args.input_dir), args.kind, Path(args.out))
        render(job)
    except (ParseError, ValueError, OSError) as exc:
        print(f"render error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
