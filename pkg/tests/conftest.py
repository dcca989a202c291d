import os

import pytest
from hypothesis import HealthCheck, settings

from oagwb.groups import GroupSpec, make_group

settings.register_profile(
    "default", deadline=None, max_examples=60, derandomize=True,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

SPECS = {
    "freelex3": GroupSpec.free_lex(3),
    "locallex2": GroupSpec.local_lex(2),
    "locallex3": GroupSpec.local_lex(3),
    "polymod22": GroupSpec.poly_mod(2, 2),
    "polypart": GroupSpec.poly_part([(2, 2), (3, 1)]),
}


@pytest.fixture(params=sorted(SPECS))
def any_group(request):
    return make_group(SPECS[request.param])


@pytest.fixture
def seven_two():
    """Every cell constrained by 4."""
    return make_group(GroupSpec.poly_part([(2, 2), (2, 2), (2, 2)]))


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import summary_lines
    except ImportError:
        return
    lines = summary_lines()
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
