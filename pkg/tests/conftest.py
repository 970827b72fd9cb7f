import sys
from pathlib import Path

# allow running the suite from a source checkout without installing
try:
    import qveil  # noqa: F401
except ImportError:
    sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))
