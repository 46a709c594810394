import pytest

from sbrbench.corpus import from_sequences

A, B, C, D = 0, 1, 2, 3

# criterion label -> (passed, detail); filled by test_acceptance.py
ACCEPTANCE = {}


@pytest.fixture
def toy():
    """s1=[a,b,c], s2=[a,b,d], s3=[b,c,d], ending on days 0, 1, 2."""
    return from_sequences([[A, B, C], [A, B, D], [B, C, D]])


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for label in sorted(ACCEPTANCE, key=lambda s: int(s.split(".")[0])):
        status, detail = ACCEPTANCE[label]
        terminalreporter.write_line(f"{status:<5} {label}  {detail}")
