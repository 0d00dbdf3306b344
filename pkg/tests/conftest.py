import numpy as np
import pytest

from latenthealth import pipeline
from latenthealth.vae import TrainConfig


@pytest.fixture(scope="session")
def synth_ds():
    return pipeline.synthetic_dataset(200, seed=0)


@pytest.fixture(scope="session")
def trained(synth_ds):
    """A VAE trained at desk scale (100 epochs) plus its fitted monitor."""
    params, history = pipeline.train_vae(synth_ds, TrainConfig(epochs=100, seed=0))
    monitor = pipeline.fit_monitor(params, synth_ds, "euclidean")
    return params, history, monitor


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


_ACCEPTANCE: list[str] = []


@pytest.fixture
def verdict():
    """Record one acceptance line and assert on it."""
    def check(criterion: str, ok: bool, detail: str, skipped: bool = False):
        status = "SKIP" if skipped else ("PASS" if ok else "FAIL")
        line = f"[{status}] {criterion}: {detail}"
        _ACCEPTANCE.append(line)
        print(line)
        if skipped:
            pytest.skip(detail)
        assert ok, line
    return check


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE:
            terminalreporter.write_line(line)
