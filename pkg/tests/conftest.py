import itertools

import pytest

from ifl import AgreementFn, FrameworkParams
from ifl.errors import ValidationError


def small_param_battery(min_sets: int = 50) -> list[FrameworkParams]:
    """Valid parameter sets small enough for exhaustive enumeration.

    Spans degenerate mixtures (p_d in {0, 1}), zero capacity, and pool
    sizes up to 8.
    """
    battery = []
    for p_d, c, t_d, t_r, n_d, n_r in itertools.product(
            (0.0, 0.3, 0.5, 0.7, 1.0), (0, 2, 4, 6),
            (3, 5, 8), (4, 8), (1, 2, 3), (1, 3)):
        try:
            battery.append(FrameworkParams(p_d=p_d, c=c, t_d=t_d, t_r=t_r,
                                           n_d=n_d, n_r=n_r))
        except ValidationError:
            continue
    assert len(battery) >= min_sets
    return battery


ZETA_FAMILIES = (
    AgreementFn("constant", 0.9),
    AgreementFn("proportional", 2.0),
    AgreementFn("step", 2.0, 0.8),
)


@pytest.fixture(scope="session")
def battery():
    return small_param_battery()


@pytest.fixture(scope="session")
def zeta_families():
    return ZETA_FAMILIES
