from fractions import Fraction

import pytest

from ifl import (AgreementFn, FrameworkParams, enum_accuracy, enum_agreement,
                 expected_accuracy, expected_agreement, q_components)
from ifl.errors import EnumerationSizeError
from ifl.exhaustive import accuracy_enum_size, agreement_enum_size

TINY = FrameworkParams(p_d=1.0, c=4, t_d=4, t_r=4, n_d=1, n_r=1)


class TestEnumAccuracy:
    def test_tiny_case_hand_value(self):
        # datum has 1 of 4 dominant features, model holds 2: the datum's
        # feature lands in the model's pair for 3 of the 6 pairs
        assert enum_accuracy(TINY) == Fraction(3, 4)

    def test_full_coverage(self):
        p = FrameworkParams(p_d=1.0, c=6, t_d=3, t_r=3, n_d=1, n_r=1)
        assert enum_accuracy(p) == 1

    def test_matches_closed_form_exactly(self, battery):
        for p in battery:
            assert enum_accuracy(p) == expected_accuracy(p, exact=True)

    def test_size_guard(self):
        huge = FrameworkParams(p_d=0.5, c=20, t_d=40, t_r=40, n_d=5, n_r=5)
        with pytest.raises(EnumerationSizeError) as err:
            enum_accuracy(huge)
        assert err.value.size == accuracy_enum_size(huge)
        assert err.value.size > 10_000_000


class TestEnumAgreement:
    def test_tiny_case_certain_agreement(self):
        assert enum_agreement(TINY, AgreementFn("constant", 1.0)) == Fraction(3, 4)

    def test_half_zeta_reduction(self, battery):
        z = AgreementFn("constant", 0.5)
        for p in battery[::7]:
            qc = q_components(p, exact=True)
            assert enum_agreement(p, z) == Fraction(1, 2) + Fraction(1, 2) * qc.q1

    def test_matches_closed_form_exactly(self, battery, zeta_families):
        for p in battery[::2]:
            for z in zeta_families:
                assert enum_agreement(p, z) == expected_agreement(p, z, exact=True)

    def test_size_guard(self):
        huge = FrameworkParams(p_d=0.5, c=12, t_d=30, t_r=30, n_d=3, n_r=3)
        with pytest.raises(EnumerationSizeError):
            enum_agreement(huge, AgreementFn("constant", 0.9))
        assert agreement_enum_size(huge) > 10_000_000
