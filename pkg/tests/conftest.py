import pytest

import hapticloop as hl


@pytest.fixture(scope="session")
def cfg():
    return hl.DeviceConfig()


@pytest.fixture(scope="session", autouse=True)
def warm_kernels(cfg):
    # compile the jitted kernels once so per-test timing stays meaningful
    gesture = hl.parse_gesture("0 10 0.5\n0.01 10 0.5\n")
    hl.run_scenario(cfg, gesture, None, 0)


@pytest.fixture(scope="session")
def table(cfg, warm_kernels):
    runner = hl.LoopSettleRunner(cfg, seed=0)
    return hl.run_calibration(runner, cfg.calibration_grid())
