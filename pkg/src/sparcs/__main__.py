"""Module execution entry point: ``python -m sparcs`` behaves like ``sparcs``."""

import sys

from .cli import main

sys.exit(main())
