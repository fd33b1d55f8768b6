#!/usr/bin/env python3
"""
EvoNash - Entry Point
Walk-forward evolutionary meta-game allocation engine (command line)
"""

import os
import sys

# Add the app_code directory to Python path
sys.path.insert(0, os.path.join(os.path.dirname(__file__), 'app_code'))

from evonash.cli import main

if __name__ == '__main__':
    sys.exit(main())
