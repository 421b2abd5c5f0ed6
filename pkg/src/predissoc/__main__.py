"""Entry point so ``python -m predissoc config.cfg [command]`` works."""

import sys

from .runner import main

if __name__ == "__main__":
    sys.exit(main())
