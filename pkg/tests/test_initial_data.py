import numpy as np
import pytest

from kpzlab.initial_data import (
    OccupancyString,
    estimate_diffusion,
    gen_bernoulli_ic,
    gen_markov_ic,
    gen_periodic_ic,
    height_from_occupancy,
    markov_sigma2,
)


def exact_markov_height_variance(alpha: float, ell: int) -> float:
    """Var of h(ell) = sum of ell stationary +-1 chain steps, done by brute
    double sum so it is independent of any closed form."""
    r = 2.0 * alpha - 1.0
    total = float(ell)
    for i in range(1, ell + 1):
        for j in range(1, ell + 1):
            if i != j:
                total += r ** abs(i - j)
    return total


class TestGenerators:
    def test_periodic_pattern(self):
        occ = gen_periodic_ic(-4, 5)
        assert occ.bits.tolist() == [1, 0, 1, 0, 1, 0, 1, 0, 1, 0]
        assert occ.site(0) == 1 and occ.site(1) == 0

    def test_markov_marginal_is_half(self):
        rng = np.random.default_rng(7)
        hits = np.zeros(3)
        reps = 4000
        for _ in range(reps):
            occ = gen_markov_ic(-2, 2, 0.8, rng)
            hits += occ.bits[[0, 2, 4]]
        p = hits / reps
        se = np.sqrt(0.25 / reps)
        assert np.all(np.abs(p - 0.5) < 5 * se)

    def test_markov_autocovariance(self):
        # Cov(eta_0, eta_k) = (2 alpha - 1)^k / 4
        rng = np.random.default_rng(8)
        for alpha in (0.3, 0.8):
            reps = 6000
            mat = np.empty((reps, 6), dtype=np.uint8)
            for i in range(reps):
                mat[i] = gen_markov_ic(0, 5, alpha, rng).bits
            x = mat.astype(float)
            for k in (1, 2, 3):
                cov = np.mean(x[:, 0] * x[:, k]) - np.mean(x[:, 0]) * np.mean(x[:, k])
                target = (2 * alpha - 1) ** k / 4
                assert abs(cov - target) < 5 * 0.3 / np.sqrt(reps)

    def test_alpha_half_is_bernoulli_like(self):
        rng = np.random.default_rng(9)
        occ = gen_markov_ic(0, 20000, 0.5, rng)
        x = occ.bits.astype(float)
        lag1 = np.mean(x[:-1] * x[1:]) - np.mean(x[:-1]) * np.mean(x[1:])
        assert abs(lag1) < 5 * 0.25 / np.sqrt(x.size)

    def test_alpha_zero_alternates(self):
        rng = np.random.default_rng(10)
        occ = gen_markov_ic(0, 50, 0.0, rng)
        assert np.all(np.abs(np.diff(occ.bits.astype(int))) == 1)

    def test_validation(self):
        rng = np.random.default_rng(11)
        with pytest.raises(ValueError):
            gen_markov_ic(1, 5, 0.5, rng)  # window misses origin
        with pytest.raises(ValueError):
            gen_markov_ic(-5, 5, 1.0, rng)
        with pytest.raises(ValueError):
            gen_bernoulli_ic(-5, 5, rng, rho=0.0)
        assert markov_sigma2(0.5) == pytest.approx(1.0)
        with pytest.raises(ValueError):
            markov_sigma2(1.0)


class TestHeight:
    def test_empty_and_full(self):
        empty = OccupancyString(np.zeros(11, dtype=np.uint8), -5, 5)
        h = height_from_occupancy(empty)
        assert [h.height(j) for j in range(-5, 6)] == list(range(-5, 6))
        full = OccupancyString(np.ones(11, dtype=np.uint8), -5, 5)
        h = height_from_occupancy(full)
        assert [h.height(j) for j in range(-5, 6)] == [-j for j in range(-5, 6)]

    def test_periodic_alternates(self):
        occ = gen_periodic_ic(-6, 6)
        h = height_from_occupancy(occ)
        for j in range(-6, 7):
            assert h.height(j) == (j % 2)

    def test_current_offset(self):
        occ = gen_periodic_ic(-4, 4)
        h = height_from_occupancy(occ, j_count=3)
        assert h.height(0) == 6

    def test_steps_are_unit(self):
        rng = np.random.default_rng(12)
        occ = gen_markov_ic(-30, 30, 0.7, rng)
        h = height_from_occupancy(occ)
        assert np.all(np.abs(np.diff(h.h)) == 1)


class TestSerialization:
    def test_round_trip(self):
        rng = np.random.default_rng(13)
        occ = gen_markov_ic(-150, 150, 0.8, rng)
        text = occ.to_text()
        assert text.startswith("window=[-150,150]\n")
        back = OccupancyString.from_text(text)
        assert back.lo == occ.lo and back.hi == occ.hi
        assert np.array_equal(back.bits, occ.bits)

    def test_rejects_garbage(self):
        with pytest.raises(ValueError):
            OccupancyString.from_text("0101\n")
        with pytest.raises(ValueError):
            OccupancyString.from_text("window=[0,3]\n01x1\n")


class TestDiffusionEstimate:
    def test_sigma_zero_for_periodic(self):
        rng = np.random.default_rng(14)
        sigma2, err = estimate_diffusion(
            lambda lo, hi, g: gen_periodic_ic(lo, hi), 100, 200, rng
        )
        assert sigma2 == 0.0 and err == 0.0

    def test_exact_finite_length_variance(self):
        # Monte Carlo against the brute-force double sum at small ell.
        rng = np.random.default_rng(15)
        alpha, ell, reps = 0.7, 12, 60_000
        h_end = np.empty(reps)
        for r in range(reps):
            occ = gen_markov_ic(0, ell, alpha, rng)
            h_end[r] = height_from_occupancy(occ).height(ell)
        target = exact_markov_height_variance(alpha, ell)
        est = np.var(h_end, ddof=1)
        se = est * np.sqrt(2.0 / reps)
        assert abs(est - target) < 5 * se

    @pytest.mark.slow
    def test_matches_alpha_formula(self):
        rng = np.random.default_rng(16)
        for alpha in (0.3, 0.5, 0.8):
            sigma2, err = estimate_diffusion(
                lambda lo, hi, g, a=alpha: gen_markov_ic(lo, hi, a, g),
                10_000,
                20_000,
                rng,
            )
            assert sigma2 == pytest.approx(markov_sigma2(alpha), rel=0.02)

    def test_flags_drift(self):
        rng = np.random.default_rng(17)
        with pytest.raises(ValueError, match="drift"):
            estimate_diffusion(
                lambda lo, hi, g: gen_bernoulli_ic(lo, hi, g, rho=0.9),
                1000,
                200,
                rng,
            )

    def test_input_validation(self):
        rng = np.random.default_rng(18)
        with pytest.raises(ValueError):
            estimate_diffusion(lambda lo, hi, g: gen_periodic_ic(lo, hi), 5, 200, rng)
        with pytest.raises(ValueError):
            estimate_diffusion(lambda lo, hi, g: gen_periodic_ic(lo, hi), 100, 10, rng)
