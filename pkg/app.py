"""
Main entry point - runs the command line interface from cli.py
"""
import sys

from cli import main

if __name__ == "__main__":
    sys.exit(main())
