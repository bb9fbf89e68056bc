import math

import mpmath
import pytest


@pytest.fixture(scope="session")
def golden_theta_mp():
    with mpmath.workdps(60):
        return (mpmath.sqrt(5) - 1) / 2


def fibonacci_word(n_letters: int) -> list[int]:
    """Letters of the fixed point of a -> ab, b -> a, with a = 1 and b = 0."""
    w = [1]
    while len(w) < n_letters:
        w = [x for c in w for x in ((1, 0) if c == 1 else (1,))]
    return w[:n_letters]


def frac_indicator_mp(theta, rho, n, dps=60):
    with mpmath.workdps(dps):
        x = mpmath.mpf(n) * theta + rho
        f = x - mpmath.floor(x)
        return 1 if f >= 1 - theta else 0


def free_closed_form(E, init, n):
    """Oracle for V = 0: u(n) = A cos(nk) + B sin(nk), 2 cos k = E."""
    k = math.acos(E / 2)
    A = init[0]
    B = (init[1] - A * math.cos(k)) / math.sin(k)
    return A * math.cos(n * k) + B * math.sin(n * k)


ACCEPTANCE_LINES: dict[int, str] = {}


def record_criterion(number: int, passed: bool, detail: str) -> str:
    line = f"criterion {number:2d}: {'PASS' if passed else 'FAIL'}  {detail}"
    ACCEPTANCE_LINES[number] = line
    print(line)
    return line


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[k])
