#!/usr/bin/env python3
"""Run the full verification and write timestamped reports.

Equivalent to `qnls run all`; kept as a script entry for experiment-style
usage alongside the other studies in this directory.
"""

import sys

from qnls.cli import main

if __name__ == "__main__":
    sys.exit(main(["run", "all", *sys.argv[1:]]))
