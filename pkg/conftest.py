import sys
from pathlib import Path

# allow running the tests from a fresh checkout without installing
try:
    import cavitylink  # noqa: F401
except ImportError:
    sys.path.insert(0, str(Path(__file__).parent / "src"))
