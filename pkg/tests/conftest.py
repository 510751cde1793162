import pytest

from nomaiot.config import NetworkConfig, dbm_to_watt


def make_cfg(M=2, tau=0.5, Pg_dBm=0.0, Pu_dBm=None, m=None, **kw):
    """Scenario helper: powers in dBm (None switches a tier off)."""
    P_g = 0.0 if Pg_dBm is None else dbm_to_watt(Pg_dBm)
    P_u = 0.0 if Pu_dBm is None else dbm_to_watt(Pu_dBm)
    cfg = NetworkConfig(P_g=P_g, P_u=P_u, **kw).with_devices(M).with_tau(tau)
    return cfg.replace(m=tuple(m) if m is not None else (1,) * M)


@pytest.fixture
def cfg_factory():
    return make_cfg


# Acceptance verdicts are collected here and echoed in the terminal summary.
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
