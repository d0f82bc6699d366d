#!/usr/bin/env python3
"""
Entry point for the surrogate toolkit command line.
Usage: python run.py <subcommand> [options]   (see python run.py --help)
"""

import sys
from pathlib import Path

from dotenv import load_dotenv

project_root = Path(__file__).parent
sys.path.insert(0, str(project_root))

load_dotenv()

if __name__ == "__main__":
    from src.harness.cli import main

    sys.exit(main())
