from pathlib import Path

import pytest
from streamlit.testing.v1 import AppTest

EXPLORER = Path(__file__).resolve().parents[1] / "treelike_geometry" / "explorer.py"


@pytest.fixture
def app() -> AppTest:
    app = AppTest.from_file(str(EXPLORER), default_timeout=60)
    app.run()
    return app


def test_explorer_renders(app):
    assert not app.exception
    assert app.title[0].value == "🌳 Tree-likeness explorer"
    assert app.sidebar.selectbox[0].value == "euclidean"


def test_explorer_builds_small_table(app):
    app.number_input(key="table_n").set_value(6)
    app.number_input(key="table_dim").set_value(3)
    app.number_input(key="table_seeds").set_value(1)
    app.button[0].click().run()
    assert not app.exception
    assert any("smallest δ" in block.value for block in app.markdown)
