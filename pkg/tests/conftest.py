import sys
from pathlib import Path

import pytest

project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))


@pytest.fixture
def tmp_artifacts(tmp_path):
    out = tmp_path / "artifacts"
    out.mkdir()
    return out
