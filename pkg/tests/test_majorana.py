import math

import numpy as np
import pytest

from conftest import multiset_distance
from nhkitaev import majorana, spectral, model
from nhkitaev.model import ModelParams
from nhkitaev.numerics import eig_complex

ZERO_MODE_CASES = [(1.0, 2.0, 0.0), (1.0, 1.5, 0.5), (1.0, 0.5, 0.5)]


class TestLattice:
    def test_hermitian_when_balanced(self):
        for lam in (0.0, 1.0, 0.37):
            M = majorana.build_majorana(ModelParams(J=1.0, delta_a=0.8, delta_b=0.8, N=4), lam).matrix
            assert np.allclose(M, M.conj().T)

    def test_dimension_and_kappas(self):
        lat = majorana.build_majorana(ModelParams(J=1.0, delta_a=1.5, delta_b=0.5, N=6))
        assert lat.dimension == 24
        assert lat.kappa_plus == pytest.approx(1.0) and lat.kappa_minus == pytest.approx(0.0)

    def test_open_ladder_decouples_ends(self):
        M = majorana.build_majorana(ModelParams(J=1.0, delta_a=1.2, delta_b=0.3, N=4), 1.0).matrix
        first = [majorana.site_index(1, s, 4) for s in "AB"]
        last = [majorana.site_index(8, s, 4) for s in "AB"]
        assert not np.any(M[np.ix_(first, last)]) and not np.any(M[np.ix_(last, first)])

    def test_requires_mu_zero(self):
        with pytest.raises(ValueError):
            majorana.build_majorana(ModelParams(mu=0.1))


class TestSpectrum:
    def test_matches_eigensolver_n16(self):
        p = ModelParams(J=1.0, delta_a=1.7, delta_b=0.2, N=16)
        lw = eig_complex(majorana.build_majorana(p).matrix, left=False).values
        assert multiset_distance(majorana.ladder_spectrum(p), lw) <= 1e-10

    def test_real_when_balanced(self):
        p = ModelParams(J=1.0, delta_a=0.9, delta_b=0.9, N=8)
        assert np.all(majorana.ladder_spectrum(p).imag == 0)
        lw = np.linalg.eigvals(majorana.build_majorana(p).matrix)
        assert np.abs(lw.imag).max() <= 1e-10

    def test_flat_band(self):
        p = ModelParams(J=1.0, delta_a=1.6, delta_b=0.4, N=8)
        assert np.allclose(np.abs(majorana.ladder_spectrum(p).real), 0.5)

    def test_quarter_of_quasiparticle_energies(self):
        # K = k / 2 maps the ladder values onto eps / 4
        p = ModelParams(J=1.0, delta_a=1.9, delta_b=-0.2, N=8)
        ladder = majorana.ladder_spectrum(p).reshape(p.N, 4)
        for m in range(1, p.N):
            k = 2 * math.pi * m / p.N
            if k >= math.pi:
                continue
            eps = [spectral.quasiparticle_energy(p, k, b) / 4 for b in spectral.BANDS]
            assert multiset_distance(ladder[m], eps) <= 1e-12


class TestLadderEnergy:
    def test_flat_band_is_minus_N(self):
        for d in (0.0, 0.4, 1.7):
            e = majorana.ladder_ground_energy(ModelParams(J=1.0, N=32).with_imbalance(d))
            assert e.closed_form == pytest.approx(-32.0, abs=1e-12)
            assert e.numeric == pytest.approx(-32.0, abs=1e-12)

    def test_ellipse(self):
        p = ModelParams(J=1.0, delta_a=3.0, delta_b=1.0, N=512)
        e = majorana.ladder_ground_energy(p)
        assert e.eccentricity == pytest.approx(math.sqrt(3) / 2)
        assert e.relative_error <= 1e-3

    def test_improves_with_N(self):
        errs = [majorana.ladder_ground_energy(ModelParams(J=1.0, delta_a=2.5, delta_b=0.3, N=N)).relative_error
                for N in (2, 4, 8)]
        assert errs[0] > errs[1] > errs[2] or errs[2] <= 1e-12

    def test_imbalance_independence(self):
        vals = [majorana.ladder_ground_energy(ModelParams(J=1.0, N=64).with_(delta_a=2.0, delta_b=1.0)
                                              .with_imbalance(d)).numeric for d in (0.0, 0.5, 1.0, 2.0)]
        assert max(vals) - min(vals) <= 1e-10

    def test_eig_method_agrees(self):
        p = ModelParams(J=1.0, delta_a=2.5, delta_b=0.5, N=16)
        a = majorana.ladder_ground_energy(p, "closed").numeric
        b = majorana.ladder_ground_energy(p, "eig").numeric
        assert a == pytest.approx(b, abs=1e-10)

    def test_bad_method(self):
        with pytest.raises(ValueError):
            majorana.ladder_ground_energy(ModelParams(), "series")


class TestResonance:
    def test_values(self):
        r = majorana.resonance(ModelParams(J=1.0, delta_a=2.0, delta_b=0.0, N=4))
        assert r.gamma == pytest.approx(2 * math.sqrt(2) - 3, abs=1e-15)
        assert r.beta == pytest.approx(1 - math.sqrt(2), abs=1e-15)
        assert r.lambda_minus == pytest.approx(1 - r.gamma ** 4, abs=1e-15)
        assert r.lambda_minus == pytest.approx(0.9991334, abs=1e-6)

    def test_balanced(self):
        r = majorana.resonance(ModelParams(J=1.0, delta_a=0.5, delta_b=0.5, N=4))
        assert r.gamma == pytest.approx(-1 / 3, abs=1e-15) and r.beta == 0.0

    def test_singular(self):
        with pytest.raises(ValueError):
            majorana.resonance(ModelParams(J=1.0, delta_a=2.0, delta_b=0.5))

    def test_large_N_saturates(self):
        r = majorana.resonance(ModelParams(J=1.0, delta_a=2.0, delta_b=0.0, N=1024))
        assert r.lambda_minus == 1.0 and r.lambda_plus == -math.inf

    def test_lambda_minus_converges_geometrically(self):
        gammas = []
        for N in (4, 8, 16):
            r = majorana.resonance(ModelParams(J=1.0, delta_a=1.5, delta_b=0.5, N=N))
            gammas.append(abs(1 - r.lambda_minus))
            assert abs(1 - r.lambda_minus) == pytest.approx(abs(r.gamma) ** N, rel=1e-12)


class TestZeroModes:
    @pytest.mark.parametrize("J,da,db", ZERO_MODE_CASES)
    @pytest.mark.parametrize("N", [4, 8, 16])
    @pytest.mark.parametrize("branch", ["minus", "plus"])
    def test_residuals(self, J, da, db, N, branch):
        res = majorana.zero_mode_residuals(ModelParams(J=J, delta_a=da, delta_b=db, N=N), branch)
        assert max(res.values()) <= 1e-10

    def test_residuals_at_n64(self):
        p = ModelParams(J=1.0, delta_a=2.0, delta_b=0.0, N=64)
        assert max(majorana.zero_mode_residuals(p, "minus").values()) <= 1e-10

    def test_single_sublattice_when_balanced(self):
        pair = majorana.zero_modes(ModelParams(J=1.0, delta_a=0.5, delta_b=0.5, N=8), "minus")
        amp = pair.psi_L
        assert not np.any(amp[1::2])  # B entries vanish
        odd_a = amp[0::4]  # A entries of sites 1, 3, 5, ...
        assert np.allclose(odd_a[1:] / odd_a[:-1], -1 / 3)

    def test_geometric_ratio(self):
        p = ModelParams(J=1.0, delta_a=2.0, delta_b=0.0, N=8)
        g = majorana.resonance(p).gamma
        psi = majorana.zero_modes(p, "minus").psi_L
        cells = np.abs(psi[0::4])
        assert np.allclose(cells[1:] / cells[:-1], abs(g))

    def test_bad_branch(self):
        with pytest.raises(ValueError):
            majorana.zero_modes(ModelParams(delta_a=2.0, delta_b=0.0), "left")


class TestEdgeState:
    def test_profile_shape_and_norm(self):
        pair = majorana.zero_modes(ModelParams(J=1.0, delta_a=2.0, delta_b=0.0, N=8), "minus")
        edge = majorana.edge_state(pair)
        assert np.linalg.norm(edge) <= math.sqrt(2) + 1e-12
        rows = majorana.profile_rows(edge)
        assert len(rows) == 32 and rows[0][:2] == (1, "A") and rows[1][:2] == (1, "B")

    def test_weight_at_ends(self):
        p = ModelParams(J=1.0, delta_a=2.0, delta_b=0.0, N=8)
        edge = np.abs(majorana.edge_state(majorana.zero_modes(p, "minus")))
        per_site = edge[0::2] + edge[1::2]
        assert per_site.argmax() in (0, 15)
        assert per_site[0] > per_site[4] and per_site[15] > per_site[11]

    def test_decay_slope(self):
        p = ModelParams(J=1.0, delta_a=2.0, delta_b=0.0, N=8)
        psi = majorana.zero_modes(p, "minus").psi_L
        slope = majorana.cell_decay_slope(psi, 0, 1)
        assert slope == pytest.approx(math.log(abs(2 * math.sqrt(2) - 3)), abs=1e-6)

    def test_zero_norm_rejected(self):
        pair = majorana.ZeroModePair(np.zeros(8), np.ones(8), "minus", 1.0)
        with pytest.raises(ValueError):
            majorana.edge_state(pair)
