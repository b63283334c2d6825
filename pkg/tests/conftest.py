import os
import random
from collections import deque

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "default", deadline=None, max_examples=60, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

# lines appended by the acceptance suite, echoed in the terminal summary
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def acceptance_report():
    def record(number, ok, detail):
        line = f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)

    return record


# ---------------------------------------------------------------------------
# independent oracles on plain tuples (no polyforge code involved)


def t_compose(p, q):
    """p then q, as tuples."""
    return tuple(q[x] for x in p)


def t_inverse(p):
    inv = [0] * len(p)
    for i, x in enumerate(p):
        inv[x] = i
    return tuple(inv)


def t_closure(gens):
    """Every element of <gens> by naive breadth-first search."""
    ident = tuple(range(len(gens[0])))
    seen = {ident}
    queue = deque([ident])
    while queue:
        e = queue.popleft()
        for g in gens:
            h = t_compose(e, g)
            if h not in seen:
                seen.add(h)
                queue.append(h)
    return seen


def t_order(p):
    ident = tuple(range(len(p)))
    k, q = 1, tuple(p)
    while q != ident:
        q = t_compose(q, p)
        k += 1
    return k


def random_tuple_perm(rng: random.Random, degree):
    pts = list(range(degree))
    rng.shuffle(pts)
    return tuple(pts)
