"""Run the acceptance suite and print one verdict line per criterion."""
import subprocess
import sys
from pathlib import Path

root = Path(__file__).resolve().parent.parent
sys.exit(subprocess.call([sys.executable, "-m", "pytest", "-q", "-p", "no:cacheprovider",
                          str(root / "tests" / "test_acceptance.py"), *sys.argv[1:]], cwd=root))
