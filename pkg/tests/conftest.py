import numpy as np
import pytest

from divgrad import DivergenceParams, FamilyParams, LogParams, make_params

DATA = __import__("pathlib").Path(__file__).parent / "data"

# PASS/FAIL lines from test_acceptance.py, repeated in the terminal summary
ACCEPTANCE = []

# deformed logarithms exercised everywhere, covering a > b, a < b and a or b = 1
LOGS = {
    "natural": LogParams.natural_log(),
    "tsallis2": make_params(FamilyParams("tsallis", t=2.0)),
    "tsallis0.5": make_params(FamilyParams("tsallis", t=0.5)),
    "kaniadakis0.3": make_params(FamilyParams("kaniadakis", K=0.3)),
    "kaniadakis-0.4": make_params(FamilyParams("kaniadakis", K=-0.4)),
    "abe1.5": make_params(FamilyParams("abe", z=1.5)),
    "gamma0.2": make_params(FamilyParams("gamma", gamma=0.2)),
    "kls": make_params(FamilyParams("kls", r=0.1, K=0.3)),
}
DEFORMED = {k: v for k, v in LOGS.items() if not v.natural}

# one representative parameter per sign case
CASES = [
    ("alpha", DivergenceParams(alpha=0.4)),
    ("alpha", DivergenceParams(alpha=1.7)),
    ("alpha", DivergenceParams(alpha=-0.6)),
    ("beta", DivergenceParams(beta=0.4)),
    ("beta", DivergenceParams(beta=1.7)),
    ("beta", DivergenceParams(beta=-0.6)),
    ("alphabeta", DivergenceParams(alpha=1.5, beta=1.5)),  # *1
    ("alphabeta", DivergenceParams(alpha=0.8, beta=0.7)),  # *2
    ("alphabeta", DivergenceParams(alpha=0.3, beta=0.4)),  # *4
    ("alphabeta", DivergenceParams(alpha=-0.5, beta=2.0)),  # *1bis
    ("alphabeta", DivergenceParams(alpha=-0.5, beta=1.3)),  # *3bis
    ("alphabeta", DivergenceParams(alpha=-0.5, beta=0.7)),  # *4bis
    ("GH", DivergenceParams(alpha=0.35)),
    ("AG", DivergenceParams(alpha=0.35)),
    ("AH", DivergenceParams(alpha=0.35)),
    ("F", DivergenceParams(alpha=0.35)),
    ("F", DivergenceParams(alpha=0.0)),
    ("G", DivergenceParams(alpha=0.35)),
    ("dual_kl", DivergenceParams()),
]


def case_id(case):
    fam, dp = case
    bits = [f"{k}={v:g}" for k, v in (("a", dp.alpha), ("b", dp.beta)) if v is not None]
    return "-".join([fam] + bits)


def random_pair(rng, n=8, lo=0.1, hi=10.0):
    return rng.uniform(lo, hi, n), rng.uniform(lo, hi, n)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def load_fixture():
    H = np.loadtxt(DATA / "H.csv", delimiter=",")
    y = np.loadtxt(DATA / "y.txt")
    x_true = np.loadtxt(DATA / "x_true.txt")
    return H, y, x_true


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE):
            terminalreporter.write_line(line)
