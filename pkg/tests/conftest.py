import json
from pathlib import Path

import pytest

from quietvoyage import pipeline
from quietvoyage.fixtures import build_strait_cache, write_fixture_tree
from quietvoyage.scenario import parse_scenario


@pytest.fixture(scope="session")
def fixture_dir(tmp_path_factory) -> Path:
    """Freshly generated copy of the bundled synthetic fixtures."""
    d = tmp_path_factory.mktemp("fixtures")
    write_fixture_tree(d)
    return d


@pytest.fixture(scope="session")
def strait_cfg(fixture_dir):
    """Single-mammal strait scenario with its TL cache and surrogate built."""
    cfg = parse_scenario(fixture_dir / "strait_m1.json")
    build_strait_cache(cfg.tl_cache_dir, fixture_dir)
    pipeline.fit_rbf(cfg)
    return cfg


@pytest.fixture(scope="session")
def quick_scenario_path(fixture_dir, strait_cfg) -> Path:
    """Reduced-effort clone of the strait scenario for CLI/API round trips."""
    raw = json.loads((fixture_dir / "strait_m1.json").read_text())
    raw["ga_population"] = 60
    raw["ga_max_generations"] = 12
    raw["planner_batch_size"] = 60
    raw["planner_max_batches"] = 2
    path = fixture_dir / "strait_m1_quick.json"
    path.write_text(json.dumps(raw, indent=2) + "\n")
    return path
