"""
Entry point for running multicast-forecast as a module.

Usage:
    python -m multicast_forecast forecast --input data.csv --horizon 24 --output pred.csv
"""

from .cli import main

if __name__ == "__main__":
    main()
