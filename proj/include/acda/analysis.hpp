#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "acda/solver.hpp"

namespace acda {

/// Ordinary least squares of log(y) on log(x).
struct LogLogFit {
    double intercept = 0.0;
    double slope = 0.0;
    double residual_std = 0.0;  ///< sqrt(SSR / (n - 2)); zero when n == 2
    double intercept_stderr = 0.0;
    double slope_stderr = 0.0;
    std::size_t n_points = 0;
};

LogLogFit fit_log_log(std::span<const double> x, std::span<const double> y);

/// m_h ~ c0 nu^-p, with the residual band reported as exp(+-log_residual_std).
struct PowerLawFit {
    double c0 = 0.0;
    double p = 0.0;
    double log_residual_std = 0.0;
    std::size_t n_points = 0;
    double p_stderr = 0.0;
    double log_c0_stderr = 0.0;
    double nu_min = 0.0;
    double nu_max = 0.0;

    double predict(double nu) const;
};

/// Needs at least three distinct viscosities.
PowerLawFit fit_power_law(const std::vector<std::pair<double, double>>& nu_mh);

struct LengthScaleEstimate {
    double nu = 0.0;
    double lambda = 0.0;
    long n_s = 0;
    bool extrapolated = false;
    std::string warning;
};

/// lambda = (2L / c0) nu^p, from m_h = 2 n_s and lambda = L / n_s.
LengthScaleEstimate estimate_length_scale(const PowerLawFit& fit, double nu, double domain_length);

/// Maximal sign-constant intervals whose peak |u| reaches 0.5/sqrt(alpha).
std::size_t count_structures(const Field& u, double alpha);

}  // namespace acda
