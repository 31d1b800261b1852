import logging

from tvbkit import config
from tvbkit.logging_setup import setup_file_logging


def test_env_helpers(monkeypatch):
    monkeypatch.setenv("TVBKIT_TEST_INT", "7")
    monkeypatch.setenv("TVBKIT_TEST_BAD", "seven")
    monkeypatch.setenv("TVBKIT_TEST_FLAG", "yes")
    assert config._int("TVBKIT_TEST_INT", 1) == 7
    assert config._int("TVBKIT_TEST_BAD", 1) == 1
    assert config._bool("TVBKIT_TEST_FLAG", False) is True
    assert config._bool("TVBKIT_TEST_UNSET", True) is True


def test_defaults():
    s = config.Settings()
    assert s.SCHEMA == "tvbkit.report/1"
    assert s.THREADS >= 1


def test_file_logging(tmp_path):
    path = setup_file_logging(str(tmp_path / "logs"), "debug")
    logging.getLogger("tvbkit.test").debug("hello")
    for h in logging.getLogger().handlers:
        h.flush()
    assert path.startswith(str(tmp_path))
    assert "hello" in open(path, encoding="utf-8").read()
    setup_file_logging(str(tmp_path / "logs"), "not-a-level")
    assert len(logging.getLogger().handlers) == 1
    assert logging.getLogger().level == logging.INFO
