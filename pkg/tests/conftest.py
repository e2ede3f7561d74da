import json
from pathlib import Path

import pytest

from dgforms.forms import eval_form_expr
from dgforms.hecke import hecke_required_prec
from dgforms.tseries import TSeries

GOLDEN = Path(__file__).parent / "golden"

# certified Hecke output below t^200 needs this much input precision
BIG = {3: hecke_required_prec(200, 3), 5: hecke_required_prec(200, 5)}

_criteria = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion number")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or report.when not in ("setup", "call"):
        return
    n = marker.args[0]
    ok = report.passed and _criteria.get(n, True)
    if report.when == "setup" and report.passed:
        return
    _criteria[n] = ok


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_criteria):
        terminalreporter.write_line(f"criterion {n}: {'PASS' if _criteria[n] else 'FAIL'}")


def load_golden_series(name, q=3, prec=32):
    return TSeries.from_json_obj(json.loads((GOLDEN / f"q{q}_{name}_prec{prec}.json").read_text()))


@pytest.fixture(scope="session")
def big_forms():
    """Eigenforms at the precision needed for certified Hecke output below t^200."""
    cache = {}

    def get(name, q=3):
        key = (name, q)
        if key not in cache:
            cache[key] = eval_form_expr(name, BIG[q], q)
        return cache[key]

    return get
