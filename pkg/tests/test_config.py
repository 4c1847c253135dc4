import os

import pytest

from utils.config import THREADS_ENV_VAR, ConfigError, PacklabConfig, load_config, resolve_threads


@pytest.mark.parametrize("raw,expected", [("1", 1), (" 8 ", 8), ("32", 32)])
def test_resolve_threads(raw, expected):
    assert resolve_threads({THREADS_ENV_VAR: raw}) == expected


def test_resolve_threads_default():
    assert resolve_threads({}) == (os.cpu_count() or 1)
    assert resolve_threads({THREADS_ENV_VAR: ""}) == (os.cpu_count() or 1)


@pytest.mark.parametrize("raw", ["0", "-2", "two", "1.5"])
def test_resolve_threads_rejects(raw):
    with pytest.raises(ConfigError, match=THREADS_ENV_VAR):
        resolve_threads({THREADS_ENV_VAR: raw})


def test_load_config_defaults():
    config = load_config(env={THREADS_ENV_VAR: "3"})
    assert config.threads == 3
    assert config.output_format == "json"
    assert config.c1_max == 20
    assert config.coeff_max == 10
    assert config.effective_log_level() == "WARNING"


def test_load_config_file(tmp_path):
    path = tmp_path / "packlab.yaml"
    path.write_text("output_format: table\nlog_level: debug\ncoeff_max: 4\nthreads: 2\n", encoding="utf-8")
    config = load_config(str(path), env={})
    assert config.output_format == "table"
    assert config.effective_log_level() == "DEBUG"
    assert config.coeff_max == 4
    assert config.threads == 2


def test_quiet_overrides_log_level():
    config = PacklabConfig(log_level="DEBUG", quiet=True)
    assert config.effective_log_level() == "ERROR"


def test_unknown_keys_are_ignored(tmp_path):
    path = tmp_path / "packlab.yaml"
    path.write_text("colour: blue\n", encoding="utf-8")
    assert load_config(str(path), env={}).output_format == "json"


@pytest.mark.parametrize(
    "content",
    [
        "output_format: xml\n",
        "log_level: loud\n",
        "threads: 0\n",
        "coeff_max: three\n",
        "c1_max: 1\n",
        "- a list\n",
        "key: [unclosed\n",
    ],
)
def test_bad_config_files(tmp_path, content):
    path = tmp_path / "packlab.yaml"
    path.write_text(content, encoding="utf-8")
    with pytest.raises(ConfigError):
        load_config(str(path), env={})


def test_missing_config_file(tmp_path):
    with pytest.raises(ConfigError, match="Cannot read"):
        load_config(str(tmp_path / "absent.yaml"), env={})
