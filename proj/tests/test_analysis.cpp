#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <vector>

#include "acda/analysis.hpp"

using namespace acda;

TEST_CASE("exact power law is recovered exactly") {
    std::vector<std::pair<double, double>> data;
    for (double nu : {1e-2, 3e-3, 1e-3, 3e-4, 1e-4}) data.emplace_back(nu, 0.1752 * std::pow(nu, -0.5289));
    const auto fit = fit_power_law(data);
    CHECK(fit.c0 == Catch::Approx(0.1752).epsilon(1e-12));
    CHECK(fit.p == Catch::Approx(0.5289).epsilon(1e-12));
    CHECK(fit.log_residual_std < 1e-12);
    CHECK(fit.n_points == 5);
    CHECK(fit.nu_min == 1e-4);
    CHECK(fit.nu_max == 1e-2);
    CHECK(fit.predict(1e-3) == Catch::Approx(0.1752 * std::pow(1e-3, -0.5289)));
}

TEST_CASE("log-log fit against normal equations") {
    const std::vector<double> x{1, 2, 3, 5, 8, 13};
    const std::vector<double> y{2.1, 2.9, 4.2, 5.1, 8.8, 9.0};
    // Oracle: solve the 2x2 normal equations for (a, b) in log y = a + b log x.
    double s1 = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double lx = std::log(x[i]), ly = std::log(y[i]);
        s1 += 1;
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    const double det = s1 * sxx - sx * sx;
    const double a = (sy * sxx - sx * sxy) / det;
    const double b = (s1 * sxy - sx * sy) / det;
    double ssr = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = std::log(y[i]) - a - b * std::log(x[i]);
        ssr += r * r;
    }
    const double sigma = std::sqrt(ssr / 4.0);

    const auto fit = fit_log_log(x, y);
    CHECK(fit.intercept == Catch::Approx(a).epsilon(1e-12));
    CHECK(fit.slope == Catch::Approx(b).epsilon(1e-12));
    CHECK(fit.residual_std == Catch::Approx(sigma).epsilon(1e-10));
    CHECK(fit.slope_stderr == Catch::Approx(sigma * std::sqrt(s1 / det)).epsilon(1e-10));
    CHECK(fit.intercept_stderr == Catch::Approx(sigma * std::sqrt(sxx / det)).epsilon(1e-10));

    CHECK_THROWS_AS(fit_log_log(std::vector<double>{1.0}, std::vector<double>{1.0}), std::invalid_argument);
    CHECK_THROWS_AS(fit_log_log(std::vector<double>{1.0, 1.0}, std::vector<double>{1.0, 2.0}), std::invalid_argument);
    CHECK_THROWS_AS(fit_log_log(std::vector<double>{1.0, -2.0}, std::vector<double>{1.0, 2.0}), std::invalid_argument);
}

TEST_CASE("scale covariance") {
    std::vector<std::pair<double, double>> data{{1e-2, 4}, {3e-3, 9}, {1e-3, 14}, {3e-4, 30}, {1e-4, 47}};
    const auto base = fit_power_law(data);
    auto scaled_m = data;
    for (auto& [nu, m] : scaled_m) m *= 3.0;
    const auto fm = fit_power_law(scaled_m);
    CHECK(fm.p == Catch::Approx(base.p).epsilon(1e-12));
    CHECK(fm.c0 == Catch::Approx(3.0 * base.c0).epsilon(1e-12));
    CHECK(fm.log_residual_std == Catch::Approx(base.log_residual_std).epsilon(1e-9));

    auto scaled_nu = data;
    for (auto& [nu, m] : scaled_nu) nu *= 10.0;
    const auto fn = fit_power_law(scaled_nu);
    CHECK(fn.p == Catch::Approx(base.p).epsilon(1e-12));
    CHECK(fn.c0 == Catch::Approx(base.c0 * std::pow(10.0, base.p)).epsilon(1e-10));
}

TEST_CASE("noisy power law is recovered within its standard error") {
    std::mt19937_64 gen(99);
    std::normal_distribution<double> noise(0.0, 0.15);
    int covered = 0;
    const int trials = 200;
    for (int t = 0; t < trials; ++t) {
        std::vector<std::pair<double, double>> data;
        for (int i = 0; i < 30; ++i) {
            const double nu = std::pow(10.0, -2.0 - 2.0 * i / 29.0);
            data.emplace_back(nu, 0.2 * std::pow(nu, -0.5) * std::exp(noise(gen)));
        }
        const auto fit = fit_power_law(data);
        if (std::abs(fit.p - 0.5) <= 2.0 * fit.p_stderr) ++covered;
    }
    // Two standard errors cover roughly 95 percent.
    CHECK(covered >= 180);
}

TEST_CASE("fit rejects degenerate inputs") {
    CHECK_THROWS_AS(fit_power_law({{1e-2, 4}, {1e-3, 8}, {1e-3, 9}}), std::invalid_argument);
    CHECK_THROWS_AS(fit_power_law({{1e-2, 4}, {1e-3, 0.5}, {1e-4, 9}}), std::invalid_argument);
    CHECK_THROWS_AS(fit_power_law({{-1e-2, 4}, {1e-3, 5}, {1e-4, 9}}), std::invalid_argument);
}

TEST_CASE("length scale estimates") {
    PowerLawFit fit;
    fit.c0 = 0.1752;
    fit.p = 0.5289;
    fit.nu_min = 1e-4;
    fit.nu_max = 1e-2;
    const auto e = estimate_length_scale(fit, 7.5e-6, 1.0);
    CHECK(e.lambda == Catch::Approx(2.0 / 0.1752 * std::pow(7.5e-6, 0.5289)));
    CHECK(e.n_s == std::lround(1.0 / e.lambda));
    CHECK(e.extrapolated);
    CHECK_FALSE(e.warning.empty());
    CHECK_FALSE(estimate_length_scale(fit, 1e-3, 1.0).extrapolated);

    double prev = 0.0;
    for (double nu : {1e-6, 1e-5, 1e-4, 1e-3, 1e-2}) {
        const double lambda = estimate_length_scale(fit, nu, 1.0).lambda;
        CHECK(lambda > prev);
        prev = lambda;
    }
    CHECK(estimate_length_scale(fit, 1e-3, 2.0).lambda == Catch::Approx(2.0 * estimate_length_scale(fit, 1e-3, 1.0).lambda));
    fit.c0 = 0.0;
    CHECK_THROWS_AS(estimate_length_scale(fit, 1e-3, 1.0), std::invalid_argument);
}

TEST_CASE("structure counting") {
    Field u(100, 0.01);
    for (std::size_t k = 0; k <= 100; ++k) u.values[k] = std::sin(3.0 * 3.14159265358979 * u.x(k));
    CHECK(count_structures(u, 1.0) == 3);
    for (std::size_t k = 0; k <= 33; ++k) u.values[k] *= 0.3;  // first bump too weak
    CHECK(count_structures(u, 1.0) == 2);
    CHECK(count_structures(u, 100.0) == 3);
}
