"""
Main entry point
Runs the PolSAR pipeline command line (see `python3 main.py --help`)
"""

import sys

# Load .env before importing app modules; app.settings reads the environment at import
from dotenv import load_dotenv
load_dotenv()

from app import cli


if __name__ == "__main__":
    sys.exit(cli.main())
