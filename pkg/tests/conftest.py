import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from lcnhcc.lcn import MergedLcn  # noqa: E402


@pytest.fixture
def two_triangles():
    return MergedLcn({
        ("a", "b"): 10, ("a", "c"): 10, ("b", "c"): 10,
        ("d", "e"): 1, ("d", "f"): 1, ("e", "f"): 1,
    })
