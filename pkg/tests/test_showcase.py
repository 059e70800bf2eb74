"""The larger demonstration configurations stay valid end to end."""
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "scripts"))

import showcase  # noqa: E402


def test_diamond_grid_weave(tmp_path):
    written = showcase.build(tmp_path)
    assert [p.name for p in written] == ["diamond25.svg", "quincunx5.svg"]
    for p in written:
        text = p.read_text()
        assert text.startswith("<svg") and text.rstrip().endswith("</svg>")
        assert "<path" in text


def test_grid_shape():
    grid = showcase.diamond_grid_25()
    assert len(grid) == 25
    quin = showcase.quincunx_5()
    assert len(quin) == 5
