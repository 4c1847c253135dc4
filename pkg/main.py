#!/usr/bin/env python3
"""
packlab
Symplectic ball packing invariants from the command line
"""

import sys

from cli import run


def main() -> int:
    """Main function"""
    return run(sys.argv[1:])


if __name__ == "__main__":
    sys.exit(main())
