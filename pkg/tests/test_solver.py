"""Quantization condition: phase evaluation, root solving, spectra."""

import dataclasses
import json
import math

import pytest
from scipy.special import beta

import dunham.solver as sv
from dunham.config import DEFAULT_CONFIG
from dunham.errors import SpectrumError

QUARTIC_B0_AT_1 = 0.5 * beta(0.25, 1.5)  # real-axis action of sqrt(1 - x^4)


def req(V, K, order, **kw):
    return sv.QuantizationRequest(V=V, K=K, order=order, **kw)


class TestTotalPhase:
    def test_harmonic_ground_state_phase_is_zero(self, ho):
        # B_0(1) = pi/2 cancels the Maslov term exactly at the K=0 level
        assert sv.total_phase(req(ho, 0, 0), 1.0) == pytest.approx(0.0, abs=1e-11)

    def test_harmonic_third_level(self, ho):
        # at E = 7 every higher correction vanishes: phase = 7pi/2 - pi/2
        phase = sv.total_phase(req(ho, 3, 3), 7.0)
        assert phase == pytest.approx(3.0 * math.pi, abs=1e-8)

    def test_quartic_leading_phase(self, quartic):
        phase = sv.total_phase(req(quartic, 0, 0), 1.0)
        assert phase == pytest.approx(QUARTIC_B0_AT_1 - math.pi / 2.0, abs=1e-10)

    def test_numeric_maslov_agrees_with_analytic(self, quartic):
        analytic = sv.total_phase(req(quartic, 0, 1), 2.0)
        numeric = sv.total_phase(req(quartic, 0, 1, use_analytic_maslov=False), 2.0)
        assert numeric == pytest.approx(analytic, abs=1e-10)

    def test_odd_numeric_inclusion_changes_nothing(self, quartic):
        cfg = dataclasses.replace(DEFAULT_CONFIG, include_odd_numeric=True)
        with_odd = sv.total_phase(req(quartic, 0, 2), 2.0, cfg)
        without = sv.total_phase(req(quartic, 0, 2), 2.0)
        assert with_odd == pytest.approx(without, abs=1e-9)


class TestQuantize:
    @pytest.mark.parametrize("K", range(6))
    def test_harmonic_levels_exact(self, ho, K):
        res = sv.quantize(req(ho, K, 2))
        assert res.E == pytest.approx(2 * K + 1, abs=1e-8)
        assert abs(res.residual) < 1e-10
        assert res.actions[0] > 0

    def test_harmonic_order_independence(self, ho):
        energies = [sv.quantize(req(ho, 2, N)).E for N in (0, 1, 2, 3)]
        for e in energies[1:]:
            assert e == pytest.approx(energies[0], abs=1e-8)

    def test_quartic_ground_leading_order_closed_form(self, quartic):
        res = sv.quantize(req(quartic, 0, 0))
        expected = (0.5 * math.pi / QUARTIC_B0_AT_1) ** (4.0 / 3.0)
        assert res.E == pytest.approx(expected, rel=1e-9)

    def test_invalid_requests(self, ho):
        with pytest.raises(ValueError):
            req(ho, -1, 0)
        with pytest.raises(ValueError):
            req(ho, 0, -1)

    def test_determinism_bit_identical(self, quartic):
        a = sv.quantize(req(quartic, 1, 2))
        b = sv.quantize(req(quartic, 1, 2))
        assert a.E == b.E
        assert a.actions == b.actions
        assert a.residual == b.residual

    def test_seed_override(self, ho):
        cfg = dataclasses.replace(DEFAULT_CONFIG, bracket_seed=40.0)
        res = sv.quantize(req(ho, 1, 0), cfg)
        assert res.E == pytest.approx(3.0, abs=1e-8)

    def test_bracket_cap_exhaustion(self, ho):
        cfg = dataclasses.replace(DEFAULT_CONFIG, bracket_seed=1e6,
                                  bracket_expansion_cap=3)
        with pytest.raises(sv.NoSolutionError):
            sv.quantize(req(ho, 0, 0), cfg)

    def test_truncation_diagnostics_quartic(self, quartic):
        res = sv.quantize(req(quartic, 3, 2))
        # increments shrink through order 2 here: no divergence warning
        assert res.optimal_truncation_index == 2
        assert not res.warnings


class TestTruncationDiagnostics:
    def test_leading_only(self):
        assert sv.truncation_diagnostics((3.2,)) == (0, ())

    def test_shrinking_tail_is_clean(self):
        idx, warns = sv.truncation_diagnostics((5.0, -0.1, 0.01, -0.001))
        assert idx == 3 and not warns

    def test_growing_tail_warns(self):
        idx, warns = sv.truncation_diagnostics((5.0, -0.1, 0.01, 0.5))
        assert idx == 2
        assert warns and "optimal truncation" in warns[0]

    def test_vanishing_corrections_count_as_converged(self):
        # the harmonic oscillator shape: every increment is numerical noise
        idx, warns = sv.truncation_diagnostics((5.0, 1e-15, -1e-16, 1e-15))
        assert idx == 3 and not warns


class TestSpectrum:
    def test_harmonic_spectrum(self, ho):
        results = sv.spectrum(ho, 3, 2)
        assert [round(r.E, 8) for r in results] == [1.0, 3.0, 5.0]
        assert [r.K for r in results] == [0, 1, 2]

    def test_quartic_leading_order_spectrum(self, quartic):
        results = sv.spectrum(quartic, 2, 0)
        for K, r in enumerate(results):
            expected = ((K + 0.5) * math.pi / QUARTIC_B0_AT_1) ** (4.0 / 3.0)
            assert r.E == pytest.approx(expected, rel=1e-9)

    def test_strictly_increasing(self, quartic):
        results = sv.spectrum(quartic, 4, 1)
        energies = [r.E for r in results]
        assert all(b > a for a, b in zip(energies, energies[1:]))

    def test_zero_levels_rejected(self, ho):
        with pytest.raises(ValueError):
            sv.spectrum(ho, 0, 1)

    def test_shifted_well_matches_offset_harmonic(self):
        from dunham.potential import parse_potential

        V = parse_potential("x^2 - 2*x + 5")  # (x-1)^2 + 4
        results = sv.spectrum(V, 3, 2)
        assert [round(r.E, 8) for r in results] == [5.0, 7.0, 9.0]

    def test_asymmetric_quartic_tracks_oracle(self):
        import dunham.oracle as orc
        from dunham.potential import parse_potential

        V = parse_potential("x^4 - x^3 + x^2")
        results = sv.spectrum(V, 3, 2)
        ref = orc.eigensolve(V, 3)
        rels = [abs(r.E - e) / e for r, e in zip(results, ref.eigenvalues)]
        # second-order truncation error shrinks fast with K
        assert rels[2] < rels[1] < rels[0]
        assert rels[2] < 1e-4

    def test_partial_failure_collects(self, ho, monkeypatch):
        calls = {}
        original = sv.quantize

        def flaky(request, cfg=DEFAULT_CONFIG):
            if request.K == 1:
                raise sv.NoSolutionError("synthetic failure")
            return original(request, cfg)

        monkeypatch.setattr(sv, "quantize", flaky)
        with pytest.raises(SpectrumError) as err:
            sv.spectrum(ho, 3, 0)
        assert sorted(err.value.failures) == [1]
        assert [r.K for r in err.value.results] == [0, 2]


class TestSerialization:
    def test_json_fields(self, ho):
        res = sv.quantize(req(ho, 1, 1))
        doc = json.loads(json.dumps(sv.result_to_json(res)))
        assert set(doc) == {
            "K", "order", "E", "residual", "actions",
            "optimal_truncation_index", "warnings",
        }
        assert doc["K"] == 1 and len(doc["actions"]) == 2

    def test_csv_layout(self, ho):
        results = sv.spectrum(ho, 2, 1)
        text = sv.results_to_csv(results)
        lines = text.strip().splitlines()
        assert lines[0] == "K,E,residual,B_0,B_2,optimal_truncation_index"
        assert len(lines) == 3
        assert lines[1].startswith("0,")
