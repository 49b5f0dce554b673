import hypothesis
import numpy as np
import pytest

hypothesis.settings.register_profile(
    "default", max_examples=25, deadline=None,
    suppress_health_check=[hypothesis.HealthCheck.too_slow])
hypothesis.settings.load_profile("default")


@pytest.fixture
def rng():
    return np.random.default_rng(0)


@pytest.fixture(scope="session")
def su2():
    from genricci.liealg import build_su, rescale_metric
    return rescale_metric(build_su(2), -1.0)


@pytest.fixture(scope="session")
def su3():
    from genricci.liealg import build_su, rescale_metric
    return rescale_metric(build_su(3), -1.0)


@pytest.fixture(scope="session")
def so32():
    from genricci.liealg import build_so, rescale_metric
    return rescale_metric(build_so(3, 2), 1.0)


@pytest.fixture(scope="session")
def su2_double():
    from genricci.liealg import build_su, double, rescale_metric, split_su_u1block
    return double(rescale_metric(build_su(2), -1.0), 0.0, split_su_u1block(2))


def graded_double(algebra_name: str, c: float):
    """Doubles of the three shipped coset algebras, keyed by name."""
    from genricci.liealg import (build_so, build_su, double, rescale_metric,
                                 split_so_last, split_su_so, split_su_u1block)
    if algebra_name == "su2":
        return double(rescale_metric(build_su(2), -1.0), c, split_su_u1block(2))
    if algebra_name == "su3":
        return double(rescale_metric(build_su(3), -1.0), c, split_su_so(3))
    if algebra_name == "so32":
        return double(rescale_metric(build_so(3, 2), 1.0), c, split_so_last(3, 2))
    raise KeyError(algebra_name)
