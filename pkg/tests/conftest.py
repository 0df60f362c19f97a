import math

import mpmath as mp
import pytest


def mp_mittag_leffler(a, b, r, digits=30):
    """E_{a,b}(-r) by the power series in extended precision (r^{1/a} <= 80)."""
    x = float(r) ** (1.0 / a)
    if x > 80:
        raise ValueError("series reference is too expensive here; use mp_ml_asymptotic")
    with mp.workdps(int(digits + 10 + x / 1.5)):
        am, bm, z = mp.mpf(a), mp.mpf(b), -mp.mpf(r)
        s, t, k = mp.mpf(0), mp.mpf(1), 0
        while True:
            term = t * mp.rgamma(am * k + bm)
            s += term
            if k > 10 and a * k > 3 * x + 20 and abs(term) < mp.mpf(10) ** (-digits - 5):
                break
            t *= z
            k += 1
        return float(s)


def mp_ml_asymptotic(a, b, r, terms=60):
    """E_{a,b}(-r) for large r: algebraic expansion plus saddle terms, 40 digits."""
    with mp.workdps(40):
        am, bm, rm = mp.mpf(a), mp.mpf(b), mp.mpf(r)
        s = -mp.fsum((-rm) ** (-k) * mp.rgamma(bm - am * k) for k in range(1, terms + 1))
        if a > 1:
            w = rm ** (1 / am) * mp.expjpi(1 / am)
            s += 2 / am * mp.re(w ** (1 - bm) * mp.exp(w))
        return float(s)


def gaussian(d, t, x):
    return (4 * math.pi * t) ** (-d / 2) * math.exp(-x * x / (4 * t))


def poisson(d, t, x):
    return math.gamma((d + 1) / 2) * math.pi ** (-(d + 1) / 2) * t * (t * t + x * x) ** (-(d + 1) / 2)


@pytest.fixture
def ml_reference():
    return mp_mittag_leffler


ACCEPTANCE_LINES = []


def record(number, ok, detail):
    line = f"{'PASS' if ok else 'FAIL'} #{number}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split("#")[1].split(":")[0])):
            terminalreporter.write_line(line)
