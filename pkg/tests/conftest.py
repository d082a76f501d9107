import pytest

from permgrid.perm import Permutation

GRIDDED16 = Permutation([1, 9, 12, 11, 13, 7, 10, 14, 8, 2, 3, 15, 16, 6, 4, 5])
H_MEMBER21 = Permutation([6, 9, 10, 14, 15, 12, 16, 13, 11, 8, 17, 18, 7, 4, 5, 19, 1, 20, 3, 2, 21])
D_MEMBER22 = Permutation([4, 14, 17, 16, 18, 12, 15, 19, 13, 6, 7, 20, 21, 11, 8, 10, 9, 1, 3, 5, 22, 2])

H_COUNTS = [1, 2, 6, 21, 79, 311, 1265, 5275, 22431, 96900, 424068, 1876143]
D_COUNTS = [1, 2, 6, 22, 88, 366, 1556, 6720, 29396, 129996, 580276, 2611290]


@pytest.fixture
def h_member21():
    return H_MEMBER21


@pytest.fixture
def d_member22():
    return D_MEMBER22


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import REPORT

    if REPORT:
        terminalreporter.section("acceptance criteria")
        for line in sorted(REPORT, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
