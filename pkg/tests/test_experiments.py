import numpy as np
import pytest

from fockladder.experiments import (
    THREADS_ENV_VAR,
    band_panels,
    default_fluxes,
    entropy_scan,
    find_mu_max,
    finite_size_extrapolation,
    fit_inverse_size,
    ground_record,
    interaction_scan,
    scan_flux,
    scan_threads,
)
from fockladder.floquet import SystemParams
from fockladder.meanfield import critical_flux

XI = 0.5


class TestScanThreads:
    def test_default_is_single_thread(self, monkeypatch):
        monkeypatch.delenv(THREADS_ENV_VAR, raising=False)
        assert scan_threads() == 1

    def test_reads_positive_integer(self, monkeypatch):
        monkeypatch.setenv(THREADS_ENV_VAR, "4")
        assert scan_threads() == 4

    @pytest.mark.parametrize("bad", ["abc", "0", "-2", "1.5"])
    def test_rejects_invalid_values(self, monkeypatch, bad):
        monkeypatch.setenv(THREADS_ENV_VAR, bad)
        with pytest.raises(ValueError, match=THREADS_ENV_VAR):
            scan_threads()


class TestScanFlux:
    def test_single_zero_flux_point(self):
        records = scan_flux(8, mu=0.0, xi=XI, phi_grid=[0.0])
        assert len(records) == 1
        assert records[0].jc_numeric == pytest.approx(0.0, abs=1e-10)
        assert records[0].jc_analytic == 0.0

    def test_records_ordered_and_consistent(self):
        grid = np.linspace(0.1, 1.2, 7)
        records = scan_flux(8, mu=0.0, xi=XI, phi_grid=grid)
        assert [r.params.phi for r in records] == pytest.approx(list(grid))
        for record in records:
            assert record.params.n == 8
            assert record.params.xi == XI

    def test_rejects_descending_grid(self):
        with pytest.raises(ValueError, match="ascending"):
            scan_flux(8, mu=0.0, xi=XI, phi_grid=[0.5, 0.4])

    def test_rejects_grid_outside_domain(self):
        with pytest.raises(ValueError, match="outside"):
            scan_flux(8, mu=0.0, xi=XI, phi_grid=[0.5, 2.0])

    def test_thread_pool_matches_serial(self):
        grid = np.linspace(0.0, 1.5, 11)
        serial = scan_flux(8, mu=0.2, xi=XI, phi_grid=grid, threads=1)
        pooled = scan_flux(8, mu=0.2, xi=XI, phi_grid=grid, threads=3)
        for a, b in zip(serial, pooled):
            assert a.jc_numeric == b.jc_numeric
            assert a.jc_analytic == b.jc_analytic


class TestGroundRecord:
    def test_pairs_numeric_with_analytic(self):
        record = ground_record(SystemParams(n=20, mu=0.0, xi=XI, phi=0.4))
        assert record.jc_numeric == pytest.approx(record.jc_analytic, rel=0.15)
        assert record.entropy_numeric is not None
        assert record.entropy_analytic == 0.0

    def test_analytic_fields_none_outside_domain(self):
        record = ground_record(SystemParams(n=8, mu=0.0, xi=XI, phi=-0.4))
        assert record.jc_analytic is None
        assert record.entropy_analytic is None

    def test_entropy_analytic_none_at_zero_flux(self):
        record = ground_record(SystemParams(n=8, mu=0.0, xi=XI, phi=0.0))
        assert record.jc_analytic == 0.0
        assert record.entropy_analytic is None


class TestEntropyScan:
    def test_rejects_zero_flux(self):
        with pytest.raises(ValueError, match="outside"):
            entropy_scan(8, XI, phi_grid=[0.0, 0.5])

    def test_entropy_grows_across_transition(self):
        phi_c = critical_flux(XI)
        records = entropy_scan(20, XI, phi_grid=[phi_c - 0.3, phi_c + 0.3])
        assert records[1].entropy_numeric > records[0].entropy_numeric

    def test_vanishes_toward_zero_flux(self):
        records = entropy_scan(20, XI, phi_grid=[0.01])
        assert records[0].entropy_numeric == pytest.approx(0.0, abs=1e-3)


class TestInteractionScan:
    def test_rejects_small_grid(self):
        with pytest.raises(ValueError, match="at least 3"):
            interaction_scan(8, XI, mu_grid=[-0.5, 0.0], phi_grid=[0.3, 0.6])

    def test_rejects_descending_grid(self):
        with pytest.raises(ValueError, match="ascending"):
            interaction_scan(8, XI, mu_grid=[0.0, -0.2, -0.4], phi_grid=[0.3, 0.6])

    def test_rows_are_interaction_ordered_triples(self):
        grid = np.linspace(-0.5, -0.2, 4)
        rows = interaction_scan(8, XI, mu_grid=grid, phi_grid=np.linspace(0.0, 1.5, 9))
        assert [row[0] for row in rows] == pytest.approx(list(grid))
        for _, peak_phi, peak_jc in rows:
            assert 0.0 <= peak_phi <= np.pi / 2.0
            assert peak_jc > 0.0


class TestFindMuMax:
    def test_boundary_maximum_reports_wider_bracket(self):
        with pytest.raises(ValueError, match="widen the mu bracket"):
            find_mu_max(
                8, XI, mu_grid=np.linspace(-0.2, 0.1, 4),
                phi_grid=np.linspace(0.0, 1.5, 9),
            )

    def test_coarse_and_fine_interaction_grids_agree(self):
        # The refined maximum must not depend on the starting grid
        # resolution beyond one coarse step.
        phi_grid = np.linspace(0.0, np.pi / 2.0, 31)
        coarse_grid = np.linspace(-0.6, 0.1, 11)
        coarse, _ = find_mu_max(20, XI, mu_grid=coarse_grid, phi_grid=phi_grid)
        fine, _ = find_mu_max(
            20, XI, mu_grid=np.linspace(-0.6, 0.1, 71), phi_grid=phi_grid
        )
        assert abs(coarse - fine) < coarse_grid[1] - coarse_grid[0]


class TestFitInverseSize:
    def test_recovers_exact_line(self):
        points = [(0.05, 0.6), (0.025, 0.35), (0.01, 0.2)]
        fit = fit_inverse_size(points)
        assert fit.slope == pytest.approx(10.0, abs=1e-9)
        assert fit.intercept == pytest.approx(0.1, abs=1e-10)
        assert fit.r_squared == pytest.approx(1.0, abs=1e-12)

    def test_rejects_too_few_points(self):
        with pytest.raises(ValueError, match="at least 3"):
            fit_inverse_size([(0.1, 1.0), (0.2, 2.0)])

    def test_rejects_duplicate_abscissas(self):
        with pytest.raises(ValueError, match="degenerate"):
            fit_inverse_size([(0.1, 1.0), (0.1, 2.0), (0.2, 3.0)])


class TestFiniteSizeExtrapolation:
    def test_rejects_duplicate_sizes(self):
        with pytest.raises(ValueError, match="duplicate"):
            finite_size_extrapolation(ns=(20, 20, 40))

    def test_rejects_too_few_sizes(self):
        with pytest.raises(ValueError, match="at least 3"):
            finite_size_extrapolation(ns=(20, 40))


class TestBandPanels:
    def test_default_fluxes_bracket_transition(self):
        phi_c = critical_flux(XI)
        np.testing.assert_allclose(
            default_fluxes(XI), (0.5 * phi_c, phi_c, 1.5 * phi_c), atol=1e-15
        )

    def test_panel_shapes_and_ordering(self):
        n_bosons = 20
        panels = band_panels(n_bosons, XI, flux_list=[0.3, 0.9])
        assert len(panels) == 2
        panel = panels[1]
        size = n_bosons + 1
        assert panel.thetas.shape == (size,)
        assert panel.density.shape == (2, 2 * size, size)
        assert panel.ground_density.shape == (2, size)
        assert np.all(panel.e_lower <= panel.e_upper)
        assert np.all(np.diff(panel.quasienergies) >= 0)
        assert panel.ground_quasienergy == panel.quasienergies[0]

    def test_eigenstate_phase_density_parseval(self):
        n_bosons = 12
        panel = band_panels(n_bosons, XI, flux_list=[0.7])[0]
        totals = panel.density.sum(axis=(0, 2)) / (n_bosons + 1)
        np.testing.assert_allclose(totals, 1.0, atol=1e-10)

    def test_rejects_empty_flux_list(self):
        with pytest.raises(ValueError, match="empty"):
            band_panels(8, XI, flux_list=[])
