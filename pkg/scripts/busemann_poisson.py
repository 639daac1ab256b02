#!/usr/bin/env python3
"""
Busemann-Poisson Toolkit
Entry point script for transform values, norm tables and verification runs
"""

import sys
import os

# Add src directory to Python path
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..'))

from src.reporting.cli import main

if __name__ == "__main__":
    sys.exit(main())
