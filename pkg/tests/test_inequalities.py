import itertools
import math

import numpy as np
import pytest

from entsig import (
    DensityMatrix,
    MeasurementSetting,
    ProductObservable,
    ardehali,
    expectation,
    fidelity_with_pure,
    generic_inequality,
    ghz_fidelity_formula,
    inequality_from_json_dict,
    inequality_to_json_dict,
    lhv_bound_bruteforce,
    mermin,
    outcome_probabilities,
    pauli,
    standard_observable,
    variance,
    violation,
    witness_violation,
)
from conftest import random_density

SQRT2 = math.sqrt(2.0)


def slow_lhv_maximum(ineq):
    """Independent oracle: pure-python enumeration over deterministic models.

    Uses only the setting labels and the coefficient of the all-plus outcome
    (the term sign), evaluating sum_s c_s * prod_k a[(k, label)] directly.
    """
    n = ineq.n_qubits
    pairs = sorted({(k, s.observables[k].label) for s in ineq.settings for k in range(n)})
    best = -math.inf
    for choice in itertools.product((1, -1), repeat=len(pairs)):
        a = dict(zip(pairs, choice))
        total = 0.0
        for s_idx, s in enumerate(ineq.settings):
            c = ineq.outcome_coeffs[s_idx][0]  # all-plus outcome carries the term sign
            total += c * math.prod(a[(k, s.observables[k].label)] for k in range(n))
        best = max(best, total)
    return best


class TestMermin:
    def test_eight_settings(self, mermin4):
        assert mermin4.n_settings == 8

    def test_xxyy_coefficient_is_minus_one(self, mermin4):
        idx = mermin4.setting_index("XXYY")
        # outcome 0 is the all-plus outcome, whose coefficient is the term sign
        assert mermin4.outcome_coeffs[idx][0] == pytest.approx(-1.0, abs=1e-12)

    def test_xxxx_and_yyyy_signs(self, mermin4):
        assert mermin4.outcome_coeffs[mermin4.setting_index("XXXX")][0] == pytest.approx(1.0)
        assert mermin4.outcome_coeffs[mermin4.setting_index("YYYY")][0] == pytest.approx(1.0)

    def test_ghz_expectation_is_eight(self, rho_ghz4, mermin4):
        assert expectation(rho_ghz4, mermin4.operator) == pytest.approx(8.0, abs=1e-9)

    def test_lhv_bound(self, mermin4):
        assert mermin4.lhv_bound == pytest.approx(4.0, abs=1e-12)

    def test_all_terms_stabilize_ghz(self, ghz4, mermin4):
        # every setting operator has zero variance on GHZ_4
        for s_idx, setting in enumerate(mermin4.settings):
            u = setting.basis
            term_op = (u * mermin4.outcome_coeffs[s_idx]) @ u.conj().T
            assert variance(ghz4, term_op) < 1e-12

    def test_unsupported_size(self):
        with pytest.raises(ValueError):
            mermin(5)


class TestArdehali:
    def test_sixteen_settings(self, ardehali4):
        assert ardehali4.n_settings == 16

    def test_xxyb_sign(self, ardehali4):
        idx = ardehali4.setting_index("XXYB")
        assert ardehali4.outcome_coeffs[idx][0] == pytest.approx(1 / SQRT2, abs=1e-12)

    def test_xxya_sign(self, ardehali4):
        idx = ardehali4.setting_index("XXYA")
        assert ardehali4.outcome_coeffs[idx][0] == pytest.approx(-1 / SQRT2, abs=1e-12)

    def test_last_party_measures_a_and_b(self, ardehali4):
        last = {s.observables[3].label for s in ardehali4.settings}
        assert last == {"A", "B"}

    def test_ghz_expectation_is_eight(self, rho_ghz4, ardehali4):
        assert expectation(rho_ghz4, ardehali4.operator) == pytest.approx(8.0, abs=1e-9)

    def test_lhv_bound(self, ardehali4):
        assert ardehali4.lhv_bound == pytest.approx(2 * SQRT2, abs=1e-12)

    def test_contains_non_stabilizer_terms(self, ghz4, ardehali4):
        variances = []
        for s_idx, setting in enumerate(ardehali4.settings):
            u = setting.basis
            term_op = (u * ardehali4.outcome_coeffs[s_idx]) @ u.conj().T
            variances.append(variance(ghz4, term_op))
        assert max(variances) > 1e-3


class TestGenericInequality:
    def build_two_qubit(self, alpha, beta, gamma):
        z, i = pauli("Z"), pauli("I")
        setting = MeasurementSetting((z, z))
        terms = [
            ProductObservable(alpha, (z, z)),
            ProductObservable(beta, (z, i)),
            ProductObservable(gamma, (i, z)),
        ]
        return generic_inequality(terms, [setting], [0, 0, 0], lhv_bound=1.0)

    def test_correlation_coefficients(self):
        a, b, g = 0.7, -0.2, 1.1
        ineq = self.build_two_qubit(a, b, g)
        assert np.allclose(
            ineq.outcome_coeffs[0],
            [a + b + g, -a + b - g, -a - b + g, a - b - g],
            atol=1e-12,
        )

    def test_single_zz_term_gives_parity(self):
        z = pauli("Z")
        ineq = generic_inequality(
            [ProductObservable(1.0, (z, z))], [MeasurementSetting((z, z))], [0], lhv_bound=1.0
        )
        assert np.allclose(ineq.outcome_coeffs[0], [1, -1, -1, 1], atol=1e-12)

    def test_identity_term_is_constant_shift(self):
        z, i = pauli("Z"), pauli("I")
        ineq = generic_inequality(
            [ProductObservable(0.4, (i, i))], [MeasurementSetting((z, z))], [0], lhv_bound=1.0
        )
        assert np.allclose(ineq.outcome_coeffs[0], [0.4] * 4, atol=1e-12)

    def test_non_diagonal_term_rejected(self):
        z, x = pauli("Z"), pauli("X")
        with pytest.raises(ValueError, match="not diagonal"):
            generic_inequality(
                [ProductObservable(1.0, (x, z))], [MeasurementSetting((z, z))], [0], lhv_bound=1.0
            )

    def test_operator_matches_coefficients(self, rng):
        ineq = self.build_two_qubit(0.3, 0.5, -0.8)
        for _ in range(5):
            rho = random_density(rng, 2)
            via_counts = float(ineq.outcome_coeffs[0] @ outcome_probabilities(rho, ineq.settings[0]))
            assert via_counts == pytest.approx(expectation(rho, ineq.operator), abs=1e-10)


class TestLHVBruteForce:
    def test_mermin4_bound(self, mermin4):
        assert lhv_bound_bruteforce(mermin4) == pytest.approx(4.0, abs=1e-9)

    def test_ardehali4_bound(self, ardehali4):
        assert lhv_bound_bruteforce(ardehali4) == pytest.approx(2 * SQRT2, abs=1e-9)

    def test_mermin6_matches_slow_enumeration(self):
        m6 = mermin(6)
        assert m6.lhv_bound == pytest.approx(slow_lhv_maximum(m6), abs=1e-9)
        assert m6.lhv_bound == pytest.approx(8.0, abs=1e-9)

    def test_ardehali6_matches_slow_enumeration(self):
        a6 = ardehali(6)
        assert a6.lhv_bound == pytest.approx(slow_lhv_maximum(a6), abs=1e-9)
        assert a6.lhv_bound == pytest.approx(4 * SQRT2, abs=1e-9)

    def test_ardehali4_against_slow_enumeration(self, ardehali4):
        assert lhv_bound_bruteforce(ardehali4) == pytest.approx(
            slow_lhv_maximum(ardehali4), abs=1e-12
        )

    def test_too_many_observables_per_party(self):
        x, y, z = pauli("X"), pauli("Y"), pauli("Z")
        terms = [ProductObservable(1.0, (o, o)) for o in (x, y, z)]
        settings = [MeasurementSetting((o, o)) for o in (x, y, z)]
        ineq = generic_inequality(terms, settings, [0, 1, 2], lhv_bound=3.0)
        with pytest.raises(ValueError, match="more than two"):
            lhv_bound_bruteforce(ineq)


class TestViolation:
    def test_ghz_mermin(self, rho_ghz4, mermin4):
        assert violation(rho_ghz4, mermin4) == pytest.approx(4.0, abs=1e-9)

    def test_ghz_ardehali(self, rho_ghz4, ardehali4):
        assert violation(rho_ghz4, ardehali4) == pytest.approx(8 - 2 * SQRT2, abs=1e-9)

    def test_maximally_mixed_mermin(self, mermin4):
        mixed = DensityMatrix.maximally_mixed(4)
        assert violation(mixed, mermin4) == pytest.approx(-4.0, abs=1e-10)


class TestWitness:
    def test_ghz_on_projector_witness(self, rho_ghz4, witness4):
        assert witness_violation(rho_ghz4, witness4) == pytest.approx(0.5, abs=1e-12)

    def test_product_state_sits_on_boundary(self, witness4):
        amp = np.zeros(16, dtype=complex)
        amp[0] = 1.0
        rho = DensityMatrix(4, np.outer(amp, amp.conj()))
        assert witness_violation(rho, witness4) == pytest.approx(0.0, abs=1e-12)

    def test_maximally_mixed(self, witness4):
        mixed = DensityMatrix.maximally_mixed(4)
        assert witness_violation(mixed, witness4) == pytest.approx(-(0.5 - 1 / 16), abs=1e-12)


class TestOutcomeProbabilities:
    def test_ghz_in_zzzz(self, rho_ghz4):
        z = pauli("Z")
        p = outcome_probabilities(rho_ghz4, MeasurementSetting((z, z, z, z)))
        expected = np.zeros(16)
        expected[0] = expected[15] = 0.5
        assert np.allclose(p, expected, atol=1e-12)

    def test_ghz_in_xxxx(self, rho_ghz4, mermin4):
        p = outcome_probabilities(rho_ghz4, mermin4.settings[0])
        parity = np.array([(-1) ** bin(o).count("1") for o in range(16)])
        assert np.allclose(p[parity == 1], 1 / 8, atol=1e-12)
        assert np.allclose(p[parity == -1], 0.0, atol=1e-15)

    def test_maximally_mixed_uniform(self, mermin4):
        mixed = DensityMatrix.maximally_mixed(4)
        for setting in mermin4.settings:
            assert np.allclose(outcome_probabilities(mixed, setting), 1 / 16, atol=1e-12)

    def test_sums_to_one(self, rng, ardehali4):
        rho = random_density(rng, 4)
        for setting in ardehali4.settings[:4]:
            p = outcome_probabilities(rho, setting)
            assert p.sum() == pytest.approx(1.0, abs=1e-10)
            assert np.all(p >= 0)


class TestOperatorCoefficientConsistency:
    @pytest.mark.parametrize("builder", [mermin, ardehali])
    def test_twenty_random_states(self, builder, rng):
        ineq = builder(4)
        for _ in range(20):
            rho = random_density(rng, 4)
            total = 0.0
            for s_idx, setting in enumerate(ineq.settings):
                p = outcome_probabilities(rho, setting)
                total += float(ineq.outcome_coeffs[s_idx] @ p)
            assert total == pytest.approx(expectation(rho, ineq.operator), abs=1e-10)


class TestGHZFidelityFormula:
    def test_pure_ghz(self, rho_ghz4):
        assert ghz_fidelity_formula(rho_ghz4) == pytest.approx(1.0, abs=1e-12)

    def test_maximally_mixed(self):
        assert ghz_fidelity_formula(DensityMatrix.maximally_mixed(4)) == pytest.approx(
            1 / 16, abs=1e-12
        )

    def test_operator_identity_entrywise(self, ghz4, mermin4):
        lhs = np.zeros((16, 16), dtype=complex)
        lhs[0, 0] = lhs[15, 15] = 0.5
        lhs += mermin4.operator / 16.0
        assert np.max(np.abs(lhs - ghz4.projector())) < 1e-12

    def test_matches_direct_fidelity_on_random_states(self, rng, ghz4):
        for _ in range(50):
            rho = random_density(rng, 4)
            assert ghz_fidelity_formula(rho) == pytest.approx(
                fidelity_with_pure(rho, ghz4), abs=1e-10
            )

    def test_wrong_qubit_count(self):
        with pytest.raises(ValueError):
            ghz_fidelity_formula(DensityMatrix.maximally_mixed(3))


class TestSerialization:
    @pytest.mark.parametrize("builder", [mermin, ardehali])
    def test_round_trip(self, builder, rng):
        ineq = builder(4)
        rebuilt = inequality_from_json_dict(inequality_to_json_dict(ineq))
        assert rebuilt.name == ineq.name
        assert rebuilt.lhv_bound == pytest.approx(ineq.lhv_bound, abs=1e-12)
        assert [s.label for s in rebuilt.settings] == [s.label for s in ineq.settings]
        assert np.allclose(rebuilt.outcome_coeffs, ineq.outcome_coeffs, atol=1e-12)
        rho = random_density(rng, 4)
        assert expectation(rho, rebuilt.operator) == pytest.approx(
            expectation(rho, ineq.operator), abs=1e-10
        )

    def test_malformed_rejected(self):
        with pytest.raises(ValueError):
            inequality_from_json_dict({"name": "x"})

    def test_standard_observable_labels(self):
        a = standard_observable("A").matrix
        b = standard_observable("B").matrix
        x, y = pauli("X").matrix, pauli("Y").matrix
        assert np.allclose(a, (x + y) / SQRT2, atol=1e-15)
        assert np.allclose(b, (x - y) / SQRT2, atol=1e-15)
        with pytest.raises(ValueError):
            standard_observable("C")
