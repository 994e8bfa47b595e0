import numpy as np
import pytest

from spbk import (
    AdditiveTruth,
    BiasInputs,
    DomainError,
    DomainMap,
    QUARTIC,
    RegressionSample,
    asymptotic_constants,
    confidence_band,
    default_grid,
    fit_pilot,
    full_fit,
    normalize,
    oracle_component,
    pilot_component_at,
    plugin_bandwidth,
    pseudo_responses,
    spbk_component,
    nw_at_points,
)
from spbk.pilot import choose_knot_count
from spbk.simulate import McConfig, generate_sample, true_components_ex1


def _sine_sample(n, noise, seed=0, d=1):
    rng = np.random.default_rng(seed)
    x = rng.uniform(0, 1, size=(n, d))
    y = 1.0 + np.sin(2 * np.pi * x[:, 0])
    if d > 1:
        y = y + np.cos(np.pi * x[:, 1])
    y = y + noise * rng.standard_normal(n)
    return RegressionSample(y, x)


class TestPseudoResponses:
    def test_single_axis_is_demeaned_response(self):
        s = _sine_sample(80, 0.1)
        pilot = fit_pilot(s, 4)
        np.testing.assert_allclose(
            pseudo_responses(s, pilot, 0), s.y - s.y.mean(), atol=1e-12
        )

    def test_zero_components_give_demeaned_response(self):
        s = _sine_sample(100, 0.0, d=2)
        pilot = fit_pilot(RegressionSample(np.full(100, 2.0), s.x), 3)
        pseudo = pseudo_responses(RegressionSample(s.y, s.x), pilot, 1)
        # the constant-response pilot has identically zero components but its
        # own c_hat; rebuild with the target responses
        np.testing.assert_allclose(pseudo, s.y - 2.0, atol=1e-10)

    def test_axis_out_of_range(self):
        s = _sine_sample(40, 0.1)
        pilot = fit_pilot(s, 3)
        with pytest.raises(DomainError):
            pseudo_responses(s, pilot, 1)


class TestSpbkComponent:
    def test_oracle_equality_when_truth_is_pilot(self):
        # degenerate case: supplying the pilot's own components as "truth"
        # makes the two smoothers' inputs identical
        s = _sine_sample(150, 0.3, seed=3, d=2)
        pilot = fit_pilot(s, 4)
        truth = AdditiveTruth(
            components=tuple(
                (lambda u, a=a: pilot_component_at(pilot, a, u)) for a in range(2)
            ),
            constant=pilot.c_hat,
        )
        h = 0.2
        for a in range(2):
            mine = spbk_component(s, pilot, a, h=h)
            orc = oracle_component(s, truth, a, h=h)
            np.testing.assert_array_equal(mine.values, orc.values)

    def test_missing_grid_points_flagged_not_fatal(self):
        rng = np.random.default_rng(5)
        x = np.concatenate([rng.uniform(0, 0.4, 60), rng.uniform(0.8, 1.0, 40)])[:, None]
        y = np.sin(3 * x[:, 0]) + 0.1 * rng.standard_normal(100)
        s = RegressionSample(y, x)
        pilot = fit_pilot(s, 3)
        fit = spbk_component(s, pilot, 0, h=0.05)
        gap = (fit.grid > 0.5) & (fit.grid < 0.7)
        assert np.isnan(fit.values[gap]).all()
        assert fit.defined.any()

    def test_interior_mask_matches_bandwidth(self):
        s = _sine_sample(120, 0.2, seed=6)
        pilot = fit_pilot(s, 3)
        fit = spbk_component(s, pilot, 0, h=0.23)
        np.testing.assert_array_equal(
            fit.interior, (fit.grid >= 0.23) & (fit.grid <= 0.77)
        )

    def test_constant_shift_absorbed_by_c_hat(self):
        s = _sine_sample(130, 0.2, seed=7, d=2)
        shifted = RegressionSample(s.y + 11.0, s.x)
        p1, p2 = fit_pilot(s, 4), fit_pilot(shifted, 4)
        assert abs(p2.c_hat - p1.c_hat - 11.0) < 1e-10
        for a in range(2):
            f1 = spbk_component(s, p1, a, h=0.2)
            f2 = spbk_component(shifted, p2, a, h=0.2)
            good = f1.defined
            np.testing.assert_allclose(f1.values[good], f2.values[good], atol=1e-10)

    def test_noise_free_error_shrinks_with_n(self):
        sups = {}
        for n in (200, 1000):
            s = _sine_sample(n, 0.01, seed=8)
            pilot = fit_pilot(s, choose_knot_count(n, 1, 0.5))
            fit = spbk_component(s, pilot, 0)
            good = fit.defined & fit.interior
            truth = np.sin(2 * np.pi * fit.grid[good])
            truth = truth - np.mean(np.sin(2 * np.pi * s.x[:, 0]))
            sups[n] = np.max(np.abs(fit.values[good] - truth))
        assert sups[1000] < sups[200]
        assert sups[1000] < 0.2


class TestAsymptoticConstants:
    def test_zero_derivatives_zero_bias(self):
        c = asymptotic_constants(
            0.5, lambda x: 0.0, lambda x: 0.0, lambda x: 1.0, lambda x: 0.0,
            lambda x: 1.0,
        )
        assert c.b == 0.0

    def test_uniform_density_variance_factor(self):
        sigma0 = 0.7
        c = asymptotic_constants(
            0.3, lambda x: 1.0, lambda x: 0.0, lambda x: 1.0, lambda x: 0.0,
            lambda x: sigma0**2,
        )
        np.testing.assert_allclose(c.v2, (5.0 / 7.0) * sigma0**2, rtol=1e-12)

    def test_curvature_only_bias(self):
        c = asymptotic_constants(
            0.5, lambda x: 0.0, lambda x: 14.0, lambda x: 1.0, lambda x: 0.0,
            lambda x: 1.0,
        )
        np.testing.assert_allclose(c.b, 1.0, rtol=1e-12)

    def test_vanishing_density_rejected(self):
        with pytest.raises(DomainError):
            asymptotic_constants(
                0.5, lambda x: 0.0, lambda x: 0.0, lambda x: 0.0, lambda x: 0.0,
                lambda x: 1.0,
            )


class TestConfidenceBands:
    def test_bands_only_on_interior(self):
        s = _sine_sample(300, 0.3, seed=9)
        pilot = fit_pilot(s, 5)
        fit = full_fit(s, pilot)
        banded = confidence_band(fit.components[0], s, fit)
        has_band = ~np.isnan(banded.band_lo)
        assert has_band.any()
        assert not has_band[~banded.interior].any()
        good = has_band
        assert np.all(banded.band_lo[good] <= banded.values[good] + 1e-12)
        assert np.all(banded.values[good] <= banded.band_hi[good] + 1e-12)

    def test_zero_residuals_zero_width(self):
        rng = np.random.default_rng(10)
        x = rng.uniform(0, 1, size=(120, 1))
        s = RegressionSample(np.full(120, 3.0), x)
        pilot = fit_pilot(s, 3)
        fit = full_fit(s, pilot, h_per_axis=[0.25])
        banded = confidence_band(fit.components[0], s, fit)
        good = ~np.isnan(banded.band_lo)
        assert good.any()
        np.testing.assert_allclose(
            banded.band_hi[good] - banded.band_lo[good], 0.0, atol=1e-10
        )

    def test_width_scales_with_confidence_level(self):
        s = _sine_sample(400, 0.4, seed=11)
        pilot = fit_pilot(s, 5)
        fit = full_fit(s, pilot)
        b95 = confidence_band(fit.components[0], s, fit, level=0.95)
        b99 = confidence_band(fit.components[0], s, fit, level=0.99)
        good = ~np.isnan(b95.band_lo)
        w95 = (b95.band_hi - b95.band_lo)[good]
        w99 = (b99.band_hi - b99.band_lo)[good]
        # ratio of normal quantiles: z_{0.005} / z_{0.025} = 2.5758 / 1.9600
        np.testing.assert_allclose(w99 / w95, 2.5758293 / 1.9599640, rtol=1e-6)

    def test_analytic_bias_mode_shifts_center(self):
        s = _sine_sample(400, 0.3, seed=12)
        pilot = fit_pilot(s, 5)
        fit = full_fit(s, pilot, h_per_axis=[0.15])
        bias = BiasInputs(
            m_prime=lambda x: 2 * np.pi * np.cos(2 * np.pi * x),
            m_double_prime=lambda x: -(2 * np.pi) ** 2 * np.sin(2 * np.pi * x),
            f=lambda x: 1.0,
            f_prime=lambda x: 0.0,
        )
        plain = confidence_band(fit.components[0], s, fit)
        shifted = confidence_band(fit.components[0], s, fit, bias=bias)
        good = ~np.isnan(plain.band_lo) & ~np.isnan(shifted.band_lo)
        h2 = fit.components[0].h.h ** 2
        expect = QUARTIC.mu2_k * (-(2 * np.pi) ** 2 * np.sin(2 * np.pi * fit.components[0].grid[good]) / 2.0) * h2
        np.testing.assert_allclose(
            shifted.band_lo[good] - plain.band_lo[good], -expect, rtol=1e-8, atol=1e-12
        )

    def test_halfwidth_shrinks_at_root_nh_rate(self):
        # quadrupling n shrinks the median half-width by about 4^(-2/5)
        widths = {}
        for n in (250, 1000):
            med = []
            for rep in range(8):
                s = _sine_sample(n, 0.5, seed=100 + rep)
                pilot = fit_pilot(s, choose_knot_count(n, 1, 0.5))
                fit = full_fit(s, pilot)
                banded = confidence_band(fit.components[0], s, fit)
                good = ~np.isnan(banded.band_lo)
                med.append(np.median((banded.band_hi - banded.band_lo)[good]))
            widths[n] = np.median(med)
        ratio = widths[1000] / widths[250]
        assert abs(ratio - 4 ** (-0.4)) < 0.2 * 4 ** (-0.4)


class TestFullFit:
    def test_single_axis_consistency(self):
        s = _sine_sample(200, 0.2, seed=13)
        pilot = fit_pilot(s, 4)
        fit = full_fit(s, pilot)
        comp = fit.components[0]
        good = comp.defined
        pred = fit.predict(comp.grid[good][:, None])
        np.testing.assert_allclose(pred, fit.c_hat + comp.values[good], atol=1e-12)

    def test_constant_data(self):
        rng = np.random.default_rng(14)
        s = RegressionSample(np.full(150, 5.0), rng.uniform(0, 1, size=(150, 2)))
        pilot = fit_pilot(s, 3)
        fit = full_fit(s, pilot, h_per_axis=[0.25, 0.25])
        pred = fit.predict(rng.uniform(0.25, 0.75, size=(40, 2)))
        np.testing.assert_allclose(pred, 5.0, atol=1e-8)

    def test_prediction_ase_improves_with_n(self):
        truth = true_components_ex1(0.5)
        dmap = DomainMap([-2.58] * 3, [2.58] * 3)
        err = {}
        for n in (100, 500):
            errs = []
            for rep in range(10):
                cfg = McConfig(example="ex1", n=n, sigma0=0.5, replications=1, seed=55)
                raw = generate_sample(cfg, rep)
                unit, oob = normalize(raw, dmap)
                used = unit.select(~oob)
                pilot = fit_pilot(used, choose_knot_count(n, 3, 0.5))
                fit = full_fit(used, pilot)
                pred = fit.predict(used.x)
                m_true = truth.constant + truth.values_at(raw.x[~oob]).sum(axis=1)
                errs.append(np.mean((pred - m_true) ** 2))
            err[n] = np.median(errs)
        assert err[500] < err[100]


def test_cheating_error_decreases_with_n():
    # the gap between the feasible and the benchmark smoother narrows in n
    truth = true_components_ex1(0.5)
    dmap = DomainMap([-2.58] * 3, [2.58] * 3)
    grid = default_grid(101)
    meds = []
    for n in (100, 500, 1000):
        sups = []
        for rep in range(100):
            cfg = McConfig(example="ex1", n=n, sigma0=0.5, replications=1, seed=77)
            raw = generate_sample(cfg, rep)
            unit, oob = normalize(raw, dmap)
            used = unit.select(~oob)
            pilot = fit_pilot(used, choose_knot_count(n, 3, 0.5))
            xs = used.x[:, 0]
            pseudo = pseudo_responses(used, pilot, 0)
            h = plugin_bandwidth(xs, pseudo)
            t_unit = truth.to_unit(dmap)
            others = t_unit.components[1](used.x[:, 1]) + t_unit.components[2](used.x[:, 2])
            oracle_resp = used.y - t_unit.constant - others
            sv, sd = nw_at_points(xs, pseudo, h, grid)
            ov, od = nw_at_points(xs, oracle_resp, h, grid)
            keep = (grid >= h.h) & (grid <= 1 - h.h) & sd & od
            sups.append(np.max(np.abs(sv[keep] - ov[keep])))
        meds.append(np.median(sups))
    assert meds[0] > meds[1] > meds[2]


def test_spbk_fit_serialization_round_trip():
    s = _sine_sample(150, 0.2, seed=15)
    pilot = fit_pilot(s, 4)
    fit = full_fit(s, pilot)
    banded = confidence_band(fit.components[0], s, fit)
    rows = banded.to_csv_rows()
    assert len(rows) == len(banded.grid)
    x, value, lo, hi, interior = rows[50]
    assert x == banded.grid[50]
    assert interior in (0, 1)
    doc = banded.to_dict()
    assert doc["axis"] == 0 and len(doc["values"]) == len(banded.grid)
