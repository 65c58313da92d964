import json
import os
from importlib.resources import files

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

SLOW = os.environ.get("MORIDREAM_SLOW", "") not in ("", "0")
slow = pytest.mark.skipif(not SLOW, reason="set MORIDREAM_SLOW=1 for the long fixtures")


def load_fixture(name: str) -> dict:
    return json.loads(files("moridream.data").joinpath(f"{name}.json").read_text())


def fixture_path(name: str) -> str:
    return str(files("moridream.data").joinpath(f"{name}.json"))


@pytest.fixture(scope="session")
def spaces():
    from moridream.mds import mds_from_spacefile

    cache = {}

    def get(name):
        if name not in cache:
            cache[name] = mds_from_spacefile(load_fixture(name))
        return cache[name]

    return get


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(results, key=int):
        status, doc = results[n]
        terminalreporter.write_line(f"criterion {n}: {status}  {doc}")
