"""
matchex/app.py  —  matching complexes, Morse schedules, integral homology

    python app.py verify all
    python app.py homology --graph kn --n 5
    python app.py morse run --graph knn --n 3 --schedule knn
"""
import sys
from pathlib import Path

ROOT = Path(__file__).parent
sys.path.insert(0, str(ROOT))

from src.cli import main

if __name__ == "__main__":
    sys.exit(main())
