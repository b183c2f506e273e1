"""Entry point for running as python -m opdp."""

import sys

from opdp.cli import main

if __name__ == "__main__":
    sys.exit(main())
