#include <doctest.h>

#include <cmath>

#include "dualgrid/baselines.hpp"
#include "dualgrid/phantom.hpp"
#include "test_helpers.hpp"

using namespace dualgrid;

namespace {

std::vector<double> log_spaced(double lo, double hi, int count) {
    std::vector<double> out(count);
    const double llo = std::log10(lo), lhi = std::log10(hi);
    for (int i = 0; i < count; ++i)
        out[i] = std::pow(10.0, llo + (lhi - llo) * i / (count - 1));
    return out;
}

}  // namespace

TEST_CASE("sweep validates its alpha grid") {
    auto op = dualgrid::testing::small_operator(16, 12);
    Sinogram y(op.geometry.angles, op.geometry.n_bins, op.geometry.bin_spacing);
    SolverConfig cfg;
    CHECK_THROWS_AS(sweep(y, op, 0.2, {}, cfg), std::invalid_argument);
    CHECK_THROWS_AS(sweep(y, op, 0.2, {1e-4, 1e-4}, cfg), std::invalid_argument);
    CHECK_THROWS_AS(sweep(y, op, 0.2, {1e-2, 1e-4}, cfg), std::invalid_argument);
    CHECK_THROWS_AS(sweep(y, op, 0.2, {0.0, 1e-4}, cfg), std::invalid_argument);
}

TEST_CASE("sweep records one entry per alpha with consistent summary values") {
    const int n = 32;
    auto op = dualgrid::testing::small_operator(n, 24);
    ImageGrid truth = shepp_logan(n);
    truth.pixel_size = op.pixel_size;
    NoisySinogram noisy = add_noise(forward_project(op, truth), {0.05, 5});

    SolverConfig cfg;
    cfg.regularizer = Regularizer::tv;
    cfg.max_iters = 400;
    auto alphas = log_spaced(1e-8, 1e-2, 7);
    auto records = sweep(noisy.sino, op, 0.25, alphas, cfg);

    REQUIRE(records.size() == alphas.size());
    for (size_t i = 0; i < records.size(); ++i) {
        CHECK(records[i].alpha == alphas[i]);
        CHECK(records[i].s_value >= -1.0);
        CHECK(records[i].s_value <= 1.0);
        CHECK(records[i].residual_norm >= 0.0);
        CHECK(records[i].reg_value >= 0.0);
        CHECK(records[i].detail >= 0.0);
    }
    // residual grows and the regularizer shrinks across a wide alpha range
    CHECK(records.back().residual_norm > records.front().residual_norm);
    CHECK(records.back().reg_value < records.front().reg_value);
    CHECK(records.back().detail < records.front().detail);
}

TEST_CASE("lcurve_select finds a planted knee exactly") {
    // Two straight log-log segments meeting at index 4: curvature is zero
    // everywhere except the joint.
    std::vector<SweepRecord> records;
    for (int i = 0; i < 11; ++i) {
        SweepRecord r;
        r.alpha = std::pow(10.0, -8.0 + i * 0.5);
        const double t = i;
        const double lr = (i <= 4) ? 0.05 * t : 0.05 * 4 + 1.2 * (t - 4);  // log residual
        const double lg = (i <= 4) ? 10.0 - 1.5 * t : 10.0 - 1.5 * 4 - 0.04 * (t - 4);
        r.residual_norm = std::exp(lr);
        r.reg_value = std::exp(lg);
        records.push_back(r);
    }
    LcurveResult res = lcurve_select(records);
    CHECK(res.corner_index == 4);
    CHECK(res.alpha == records[4].alpha);
    CHECK_FALSE(res.degenerate);
}

TEST_CASE("lcurve_select flags a straight line as degenerate") {
    std::vector<SweepRecord> records;
    for (int i = 0; i < 9; ++i) {
        SweepRecord r;
        r.alpha = std::pow(10.0, -6.0 + i);
        r.residual_norm = std::exp(0.3 * i);
        r.reg_value = std::exp(5.0 - 0.7 * i);
        records.push_back(r);
    }
    LcurveResult res = lcurve_select(records);
    CHECK(res.degenerate);
    CHECK(res.corner_index == records.size() / 2);
    CHECK(res.alpha == records[records.size() / 2].alpha);
}

TEST_CASE("lcurve_select input validation") {
    std::vector<SweepRecord> few(4);
    CHECK_THROWS_AS(lcurve_select(few), std::invalid_argument);

    std::vector<SweepRecord> bad(6);
    for (size_t i = 0; i < bad.size(); ++i) {
        bad[i].alpha = 1e-6 * (i + 1);
        bad[i].residual_norm = 1.0 + i;
        bad[i].reg_value = 5.0 - i;  // last entry hits zero
    }
    CHECK_THROWS_AS(lcurve_select(bad), InvalidDataError);
}

TEST_CASE("discrepancy_select matches the known noise level within half a percent") {
    const int n = 32;
    auto op = dualgrid::testing::small_operator(n, 24);
    ImageGrid truth = shepp_logan(n);
    truth.pixel_size = op.pixel_size;
    NoisySinogram noisy = add_noise(forward_project(op, truth), {0.05, 13});
    REQUIRE(noisy.sigma_abs > 0.0);

    SolverConfig cfg;
    cfg.regularizer = Regularizer::tv;
    cfg.max_iters = 250;
    const double tau = 1.01;
    DiscrepancyResult res =
        discrepancy_select(noisy.sino, op, noisy.sigma_abs, tau, cfg, 1e-10, 1e0);

    const double m = static_cast<double>(noisy.sino.size());
    CHECK(res.target == doctest::Approx(tau * std::sqrt(m) * noisy.sigma_abs).epsilon(1e-12));
    CHECK(std::abs(res.residual - res.target) <= 0.005 * res.target);
    CHECK(res.alpha > 1e-10);
    CHECK(res.alpha < 1e0);
    CHECK(res.bisection_steps >= 1);
    CHECK(res.bisection_steps <= 40);
}

TEST_CASE("discrepancy_select rejects bad sigma and non-straddling brackets") {
    const int n = 24;
    auto op = dualgrid::testing::small_operator(n, 18);
    ImageGrid truth = shepp_logan(n);
    truth.pixel_size = op.pixel_size;
    NoisySinogram noisy = add_noise(forward_project(op, truth), {0.05, 13});

    SolverConfig cfg;
    cfg.regularizer = Regularizer::tv;
    cfg.max_iters = 150;
    CHECK_THROWS_AS(discrepancy_select(noisy.sino, op, 0.0, 1.01, cfg, 1e-10, 1e0),
                    std::invalid_argument);
    CHECK_THROWS_AS(discrepancy_select(noisy.sino, op, noisy.sigma_abs, 1.01, cfg, 1e-2, 1e-4),
                    std::invalid_argument);
    // both ends over-regularized: residual at alpha_lo already above the target
    CHECK_THROWS_AS(discrepancy_select(noisy.sino, op, noisy.sigma_abs, 1.01, cfg, 1e1, 1e3),
                    std::runtime_error);
}
