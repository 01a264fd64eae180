import numpy as np
import pytest

from twinbeam.dispersion import InteractionConfig, MaterialDispersion, load_material
from twinbeam.scenario import Scenario

_ACCEPTANCE = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, text): acceptance criterion exercised by the test")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    if report.when == "call" or (report.when == "setup" and not report.passed):
        n, text = marker.args
        ok = report.passed and not hasattr(report, "wasxfail")
        entry = _ACCEPTANCE.setdefault(n, {"text": text, "tests": []})
        entry["tests"].append((item.name, ok))


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_ACCEPTANCE):
        entry = _ACCEPTANCE[n]
        failed = [name for name, ok in entry["tests"] if not ok]
        status = "PASS" if not failed else "FAIL"
        line = f"criterion {n:>2}: {status}  {entry['text']}"
        if failed:
            line += f"  [failing: {', '.join(failed)}]"
        terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def lnb():
    return load_material("ln_congruent_e")


@pytest.fixture(scope="session")
def ppln_counter():
    return InteractionConfig(lambda_p=771e-9, lambda_s=1542e-9, crystal_length=0.01, geometry="counter")


@pytest.fixture(scope="session")
def ppln_co():
    return InteractionConfig(lambda_p=771e-9, lambda_s=1542e-9, crystal_length=0.01, geometry="co")


@pytest.fixture(scope="session")
def default_scenario():
    return Scenario()


@pytest.fixture
def const_medium():
    def make(n=2.0):
        return MaterialDispersion("const", "constant", (n,), (200.0e-9, 5000.0e-9))
    return make


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
