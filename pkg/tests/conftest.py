import json
from pathlib import Path

import pytest

import odeseries.config as cfg

REPO = Path(__file__).resolve().parent.parent
PAPER_CONFIG = REPO / "configs" / "paper-example.json"


@pytest.fixture(scope="session")
def paper_config_obj():
    return json.loads(PAPER_CONFIG.read_text())


@pytest.fixture(scope="session")
def paper_run():
    """Parsed paper-example config, its grid and fundamental table."""
    rc = cfg.load_run_config(PAPER_CONFIG)
    grid, table = cfg.build_table(rc)
    return rc, grid, table
