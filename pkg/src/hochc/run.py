#!/usr/bin/env python
"""Entry point of the ``hochc`` command.

Subcommands read a problem file, run one of the procedures on it and exit
with 0 (sat), 1 (unsat), 2 (unknown) or 3 (error).
"""

import sys

from hochc.horn.commands import run


def main() -> None:
    """Run the command line and exit with its status."""
    sys.exit(run())


if __name__ == "__main__":
    main()
