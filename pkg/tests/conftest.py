import pytest

import fringecal as fc

# shared end-to-end scenario: the barrel lens every integration test uses
LAM = 5e-7
DIMS = (512, 512)
F0 = 0.0625


@pytest.fixture(scope="session")
def lens():
    return fc.RadialModel.division(LAM)


@pytest.fixture(scope="session")
def barrel_frames(lens):
    """Noiseless distorted captures of the four templates."""
    return fc.render_template_set(lens, DIMS, f0=F0)


@pytest.fixture(scope="session")
def barrel_profile(barrel_frames):
    """Profile measured by the full pipeline from the shared captures."""
    wrapped = fc.four_step_phase(*barrel_frames, row=DIMS[1] // 2)
    return fc.build_profile(fc.smooth_cubic(fc.unwrap_1d(wrapped)), DIMS)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """One visible PASS/FAIL line per acceptance criterion."""
    outcomes = {}
    for key in ("passed", "failed", "error"):
        for report in terminalreporter.stats.get(key, []):
            nodeid = getattr(report, "nodeid", "")
            if "test_acceptance.py" not in nodeid:
                continue
            if getattr(report, "when", "call") not in ("call", "setup"):
                continue
            if getattr(report, "when", "call") == "setup" and report.passed:
                continue
            name = nodeid.split("::")[-1]
            outcomes[name] = "PASS" if report.passed else "FAIL"
    if not outcomes:
        return
    terminalreporter.write_sep("-", "acceptance criteria")
    for name in sorted(outcomes):
        stem = name.removeprefix("test_criterion_")
        number, _, title = stem.partition("_")
        terminalreporter.write_line(
            f"{outcomes[name]}  criterion {number}: {title.replace('_', ' ')}"
        )
