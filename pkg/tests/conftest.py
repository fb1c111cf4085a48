import numpy as np
import pytest

from gqp.group_core import GroupElement, ModelKind, ModelParams

ALL_MODELS = list(ModelKind)


@pytest.fixture
def params():
    # generic values: every term of every cocycle is active
    return ModelParams(0.7, r=0.05, mu=0.2, beta=0.5, omega=1.3)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_elements(rng, n):
    t, p, x = rng.uniform(-2, 2, (3, n))
    z = rng.uniform(0.5, 2, n)
    return [GroupElement(*v) for v in zip(t, p, x, z)]


ACCEPTANCE_LINES = []


class Criterion:
    """Collects measured-vs-tolerance parts and prints one verdict line."""

    def __init__(self, number, title):
        self.number, self.title, self.parts = number, title, []

    def check(self, label, measured, tol):
        self.parts.append((label, float(measured), float(tol), bool(measured <= tol)))

    def require(self, label, ok):
        self.parts.append((label, None, None, bool(ok)))

    @property
    def passed(self):
        return bool(self.parts) and all(p[3] for p in self.parts)

    def finish(self):
        def fmt(label, m, t, ok):
            if m is None:
                return f"{label} {'ok' if ok else 'violated'}"
            return f"{label} {m:.3g} <= {t:g}" + ("" if ok else " (exceeded)")
        line = (f"{'PASS' if self.passed else 'FAIL'} criterion {self.number:>2} {self.title}: "
                + "; ".join(fmt(*p) for p in self.parts))
        print(line)
        ACCEPTANCE_LINES.append(line)
        assert self.passed, line


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2])):
            terminalreporter.write_line(line)
