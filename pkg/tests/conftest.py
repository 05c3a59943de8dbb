import pytest
from hypothesis import HealthCheck, settings

from hetcoop.model import ThresholdVector, reference_network

settings.register_profile("default", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture
def cfg():
    return reference_network()


@pytest.fixture
def T_ref(cfg):
    return ThresholdVector.from_radii(cfg, (500.0, 150.0))


_ACCEPTANCE: list[str] = []


@pytest.fixture
def record():
    """Collects one PASS/FAIL line per acceptance criterion for the terminal summary."""
    def _record(number: int, title: str, ok: bool, detail: str) -> None:
        line = f"ACCEPTANCE {number} [{'PASS' if ok else 'FAIL'}] {title}: {detail}"
        _ACCEPTANCE.append(line)
        print(line)
    return _record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
