import pytest


@pytest.fixture(scope="session")
def corpus_outcomes():
    """Full-plan corpus run, shared by the invariant and acceptance suites."""
    from paramin import runner

    return {oc.case_id: oc for oc in runner.run_examples()}
