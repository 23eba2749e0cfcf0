import json
import logging
from types import SimpleNamespace

import pytest

from icdiag.core import config, logging as core_logging


# ---------- config.py ----------

def test_get_bool_int_and_float(monkeypatch):
    monkeypatch.setenv("BOOL_TRUE", "yes")
    monkeypatch.setenv("BOOL_FALSE", "no")
    assert config._get_bool("BOOL_TRUE") is True
    assert config._get_bool("BOOL_FALSE") is False
    assert config._get_bool("MISSING_BOOL", True) is True

    monkeypatch.setenv("INT_OK", "42")
    monkeypatch.setenv("INT_BAD", "oops")
    assert config._get_int("INT_OK", 1) == 42
    assert config._get_int("INT_BAD", 1) == 1

    monkeypatch.setenv("FLOAT_OK", "0.05")
    monkeypatch.setenv("FLOAT_BAD", "x")
    assert config._get_float("FLOAT_OK", 0.01) == 0.05
    assert config._get_float("FLOAT_BAD", 0.01) == 0.01


def test_settings_defaults(monkeypatch):
    for var in ("ICDIAG_THREADS", "ICDIAG_DEFAULT_SEED", "ICDIAG_DEFAULT_SAMPLES", "ICDIAG_GRID"):
        monkeypatch.delenv(var, raising=False)
    s = config.Settings()
    assert s.APP_NAME == "icdiag"
    assert s.ICDIAG_THREADS == 1
    assert s.DEFAULT_SEED == 42
    assert s.DEFAULT_SAMPLES == 100_000
    assert s.DEFAULT_GRID == 400


def test_settings_from_env(monkeypatch):
    monkeypatch.setenv("ICDIAG_THREADS", "0")
    monkeypatch.setenv("ICDIAG_DEFAULT_SEED", "7")
    monkeypatch.setenv("ICDIAG_GRID", "1")
    monkeypatch.setenv("CORS_ALLOW_ORIGINS", "http://a.com,http://b.com")
    s = config.Settings()
    # bornes basses appliquées
    assert s.ICDIAG_THREADS == 1
    assert s.DEFAULT_GRID == 2
    assert s.DEFAULT_SEED == 7
    assert "http://a.com" in s.CORS_ALLOW_ORIGINS


# ---------- logging.py ----------

def test_context_filter_sets_run_id():
    f = core_logging.ContextFilter("svc")
    record = logging.LogRecord("n", logging.INFO, "", 1, "msg", (), None)
    core_logging.set_run_id("abc")
    try:
        assert f.filter(record)
        assert record.run_id == "abc"
        assert record.service == "svc"
    finally:
        core_logging.set_run_id(None)


def test_new_run_id_is_hex():
    rid = core_logging.new_run_id()
    try:
        assert len(rid) == 32
        assert core_logging.get_run_id() == rid
    finally:
        core_logging.set_run_id(None)


def test_json_formatter_keeps_extra_fields():
    rec = logging.LogRecord("n", logging.INFO, "", 1, "sweep finished", (), None)
    rec.sweep = "polygonal"
    rec.min_slack = 0.25
    rec.unrelated = "dropped"
    out = json.loads(core_logging.JsonFormatter().format(rec))
    assert out["msg"] == "sweep finished"
    assert out["sweep"] == "polygonal"
    assert out["min_slack"] == 0.25
    assert "unrelated" not in out


def test_plain_formatter():
    rec = logging.LogRecord("n", logging.INFO, "", 1, "hello", (), None)
    rec.run_id = "rid"
    rec.service = "svc"
    out = core_logging.PlainFormatter("%(message)s").format(rec)
    assert "hello" in out
    assert "service=svc" in out
    assert "run=rid" in out


def test_setup_logging_plain_and_json(tmp_path, monkeypatch):
    root = logging.getLogger()
    monkeypatch.setattr(root, "_configured", False, raising=False)
    monkeypatch.setattr(config.settings, "LOG_DIR", str(tmp_path))
    monkeypatch.setattr(config.settings, "LOG_FORMAT", "plain")
    monkeypatch.setattr(config.settings, "LOG_TO_FILE", True)
    monkeypatch.setattr(config.settings, "LOG_ENABLE_CONSOLE", False)

    core_logging.setup_logging()
    assert getattr(root, "_configured", False) is True
    assert (tmp_path / config.settings.LOG_FILE).exists()

    # Appel idempotent
    before = list(root.handlers)
    core_logging.setup_logging()
    assert root.handlers == before
    for name in (None, core_logging.ACCESS_LOGGER_NAME, "uvicorn", "uvicorn.error"):
        lg = logging.getLogger(name)
        for h in list(lg.handlers):
            h.close()
        lg.handlers.clear()


@pytest.mark.asyncio
async def test_access_log_middleware_success():
    class DummyRequest:
        method = "GET"
        url = SimpleNamespace(path="/x")
        client = SimpleNamespace(host="1.2.3.4")
        headers = {"user-agent": "UA"}

    async def call_next(req):
        return SimpleNamespace(status_code=200, headers={})

    resp = await core_logging.access_log_middleware(DummyRequest(), call_next)
    assert resp.headers["X-Request-ID"]
    # Le run_id est remis à zéro après la requête
    assert core_logging.get_run_id() is None


@pytest.mark.asyncio
async def test_access_log_middleware_exception():
    class DummyRequest:
        method = "GET"
        url = SimpleNamespace(path="/err")
        client = SimpleNamespace(host="1.2.3.4")
        headers = {"user-agent": "UA"}

    async def call_next(req):
        raise RuntimeError("boom")

    with pytest.raises(RuntimeError):
        await core_logging.access_log_middleware(DummyRequest(), call_next)
    assert core_logging.get_run_id() is None
