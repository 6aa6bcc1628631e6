"""
poisson-deform launcher
Runs the CLI with src/ on the import path, e.g.

    python poisson_deform.py milnor -f corpus/fermat3.json
"""
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent / "src"))

from cli.main import main  # noqa: E402

if __name__ == "__main__":
    sys.exit(main())
