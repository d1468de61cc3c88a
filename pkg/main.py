"""
semihilbert-lab - Huvudprogram
Kommandoradsverktyg för kompositionsoperatorer på semi-Hilbertrum.
"""

import sys

from src.cli import main

if __name__ == "__main__":
    sys.exit(main())
