#include "acda/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>

namespace acda {

LogLogFit fit_log_log(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw std::invalid_argument("fit_log_log: x and y differ in length");
    const std::size_t n = x.size();
    if (n < 2) throw std::invalid_argument("fit_log_log: need at least two points");
    std::vector<double> lx(n), ly(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw std::invalid_argument("fit_log_log: data must be positive");
        lx[i] = std::log(x[i]);
        ly[i] = std::log(y[i]);
    }
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += lx[i];
        my += ly[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
    }
    if (!(sxx > 0.0)) throw std::invalid_argument("fit_log_log: x values are all equal");

    LogLogFit fit;
    fit.n_points = n;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double ssr = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = ly[i] - (fit.intercept + fit.slope * lx[i]);
        ssr += r * r;
    }
    if (n > 2) {
        fit.residual_std = std::sqrt(ssr / static_cast<double>(n - 2));
        fit.slope_stderr = fit.residual_std / std::sqrt(sxx);
        fit.intercept_stderr = fit.residual_std * std::sqrt(1.0 / static_cast<double>(n) + mx * mx / sxx);
    }
    return fit;
}

double PowerLawFit::predict(double nu) const { return c0 * std::pow(nu, -p); }

PowerLawFit fit_power_law(const std::vector<std::pair<double, double>>& nu_mh) {
    std::set<double> distinct;
    std::vector<double> nu, mh;
    for (const auto& [v, m] : nu_mh) {
        if (!(v > 0.0)) throw std::invalid_argument("fit_power_law: viscosities must be positive");
        if (!(m >= 1.0)) throw std::invalid_argument("fit_power_law: m_h must be at least 1");
        distinct.insert(v);
        nu.push_back(v);
        mh.push_back(m);
    }
    if (distinct.size() < 3) throw std::invalid_argument("fit_power_law: need at least three distinct viscosities");

    const LogLogFit ll = fit_log_log(nu, mh);
    PowerLawFit fit;
    fit.c0 = std::exp(ll.intercept);
    fit.p = -ll.slope;
    fit.log_residual_std = ll.residual_std;
    fit.n_points = ll.n_points;
    fit.p_stderr = ll.slope_stderr;
    fit.log_c0_stderr = ll.intercept_stderr;
    fit.nu_min = *distinct.begin();
    fit.nu_max = *distinct.rbegin();
    return fit;
}

LengthScaleEstimate estimate_length_scale(const PowerLawFit& fit, double nu, double domain_length) {
    if (!(fit.c0 > 0.0)) throw std::invalid_argument("estimate_length_scale: invalid fit");
    if (!(nu > 0.0) || !(domain_length > 0.0))
        throw std::invalid_argument("estimate_length_scale: nu and L must be positive");
    LengthScaleEstimate est;
    est.nu = nu;
    est.lambda = 2.0 * domain_length / fit.c0 * std::pow(nu, fit.p);
    est.n_s = std::lround(domain_length / est.lambda);
    if (nu < fit.nu_min || nu > fit.nu_max) {
        est.extrapolated = true;
        std::ostringstream msg;
        msg << "nu = " << nu << " lies outside the fitted range [" << fit.nu_min << ", " << fit.nu_max << "]";
        est.warning = msg.str();
    }
    return est;
}

std::size_t count_structures(const Field& u, double alpha) {
    const double floor = 0.5 / std::sqrt(alpha);
    std::size_t count = 0;
    int sign = 0;
    double peak = 0.0;
    auto close = [&] {
        if (sign != 0 && peak >= floor) ++count;
    };
    for (double v : u.values) {
        const int s = (v > 0.0) - (v < 0.0);
        if (s != sign) {
            close();
            sign = s;
            peak = 0.0;
        }
        peak = std::max(peak, std::abs(v));
    }
    close();
    return count;
}

}  // namespace acda
