#!/usr/bin/env python3
"""
Main file to run the tool.

'python index.py relabel --input data.csv' fits a relabeling on your local
machine; 'python index.py --help' lists the subcommands.
"""
import sys

from monorelabel.cli import run


if __name__ == '__main__':
    sys.exit(run(sys.argv[1:]))
