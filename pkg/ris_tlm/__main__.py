"""
Entry point for running the tool as a module.

This allows running: python -m ris_tlm

:copyright: (c) 2025 by the ris-tlm contributors.
:license: MPL-2.0, see LICENSE for more details.
"""

import sys

from . import main

if __name__ == "__main__":
    sys.exit(main())
