from hypothesis import HealthCheck, settings

settings.register_profile("spanners", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("spanners")


def pytest_terminal_summary(terminalreporter):
    from tests import test_acceptance

    if test_acceptance.RESULTS:
        terminalreporter.section("acceptance criteria")
        for number in sorted(test_acceptance.RESULTS):
            terminalreporter.write_line(test_acceptance.RESULTS[number])
