import numpy as np
import pytest

from maverick import ProductState, SiteDistribution, random_site

_CRITERIA = []


@pytest.fixture
def criterion(request):
    """Record a pass/fail line for the acceptance summary."""

    def record(number, title, ok, detail=""):
        _CRITERIA.append((number, title, bool(ok), detail))
        assert ok, f"criterion {number} ({title}) failed: {detail}"

    return record


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number, title, ok, detail in sorted(_CRITERIA):
        verdict = "PASS" if ok else "FAIL"
        terminalreporter.write_line(f"[{verdict}] {number}. {title} {detail}".rstrip())


def qubit(p1):
    return SiteDistribution.from_probabilities([1.0 - p1, p1])


def random_product_state(rng, max_sites=16, dims=(2, 4), max_total=2**20):
    while True:
        N = int(rng.integers(1, max_sites + 1))
        d = rng.integers(dims[0], dims[1] + 1, size=N)
        if np.prod(d) <= max_total:
            return ProductState(tuple(random_site(rng, int(k)) for k in d))
