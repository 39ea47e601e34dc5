"""
Entry point a riga di comando del simulatore.
"""

import sys

from src.cli.commands import main


if __name__ == "__main__":
    sys.exit(main())
