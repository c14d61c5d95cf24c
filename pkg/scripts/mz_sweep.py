#!/usr/bin/env python3
"""Sweep the Mach-Zehnder phase and print the counter probabilities as CSV.

Equivalent to: qesim sweep mz_two_bs --steps 64
"""
import sys

from qesim.cli import main

if __name__ == "__main__":
    sys.exit(main(["sweep", "mz_two_bs", "--steps", "64", *sys.argv[1:]]))
