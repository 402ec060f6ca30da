# Version: v1.0
"""
nilmoore command-line entry point.

All logic lives in the nilmoore/ package. Run with: python moore.py --help
"""

import sys

from nilmoore.cli import main

if __name__ == "__main__":
    sys.exit(main())
