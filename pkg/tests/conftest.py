# tests/conftest.py
"""
Shared fixtures: a throwaway configuration file and artifact directory.
"""

import pytest

from config.settings import Config

TEST_CONFIG = """
[numerics]
ascent_restarts = 4
bruteforce_resolution = 32

[experiments]
workers = 1

[output]
directory = {output_dir}
format = json

[logging]
level = WARNING

[scenario:diagonal-m2]
n_grid = 2,4,8,16
"""


@pytest.fixture
def output_dir(tmp_path):
    return tmp_path / 'artifacts'


@pytest.fixture
def config_path(tmp_path, output_dir):
    path = tmp_path / 'config.ini'
    path.write_text(TEST_CONFIG.format(output_dir=output_dir))
    return str(path)


@pytest.fixture
def tmp_config(config_path):
    return Config(config_path)


@pytest.fixture(autouse=True)
def fixed_timestamps(monkeypatch):
    monkeypatch.setenv('SOURCE_DATE_EPOCH', '1700000000')
    monkeypatch.delenv('SUMMABILITY_MAX_COEFFICIENTS', raising=False)
