#!/usr/bin/env python
"""Command-line utility for word-series computations."""
import sys


def main():
    """Run a wordseries command and exit with its status."""
    from wordseries.cli import main as run

    sys.exit(run(sys.argv[1:]))


if __name__ == '__main__':
    main()
