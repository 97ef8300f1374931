import pytest
from hypothesis import HealthCheck, settings

from elpp import GCI, Atomic, Exists, KnowledgeBase, Nominal, parse_kb

settings.register_profile(
    "default", deadline=None, suppress_health_check=[HealthCheck.too_slow], max_examples=60,
)
settings.load_profile("default")

# Acceptance results, printed at the end of the session as one line per criterion.
ACCEPTANCE: dict = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[key])


NOMINAL_TEXT = """\
concept X A B
role r1
individual b c
axiom X <= {b}
axiom X <= {c}
axiom A <= (exists r1 . X)
"""


@pytest.fixture
def nominal_kb() -> KnowledgeBase:
    return KnowledgeBase.build(
        [GCI(Atomic("X"), Nominal("b")), GCI(Atomic("X"), Nominal("c")),
         GCI(Atomic("A"), Exists("r1", Atomic("X")))],
        concepts=["B"],
    )


@pytest.fixture
def nominal_text() -> str:
    return NOMINAL_TEXT


@pytest.fixture
def chain_kb() -> KnowledgeBase:
    return parse_kb("concept P W Z\naxiom P <= W\naxiom W <= Z\n")
