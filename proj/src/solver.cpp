#include "acda/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace acda {

double SolverConfig::saturation_amplitude() const { return 1.0 / std::sqrt(alpha); }

void SolverConfig::validate() const {
    auto fail = [](const std::string& what) { throw std::invalid_argument("SolverConfig: " + what); };
    if (!(nu > 0.0) || !std::isfinite(nu)) fail("nu must be positive");
    if (!(alpha > 0.0) || !std::isfinite(alpha)) fail("alpha must be positive");
    if (!(domain_length > 0.0) || !std::isfinite(domain_length)) fail("domain_length must be positive");
    if (n_points < 8) fail("n_points must be at least 8");
    if (!(dt > 0.0) || !std::isfinite(dt)) fail("dt must be positive");
}

double discrete_l2(std::span<const double> values, double dx) {
    double sum = 0.0;
    for (double v : values) sum += v * v;
    return std::sqrt(dx * sum);
}

double discrete_linf(std::span<const double> values) {
    double m = 0.0;
    for (double v : values) m = std::max(m, std::abs(v));
    return m;
}

double l2_distance(const Field& a, const Field& b) {
    if (a.values.size() != b.values.size()) throw std::invalid_argument("l2_distance: mesh mismatch");
    double sum = 0.0;
    for (std::size_t k = 0; k < a.values.size(); ++k) {
        const double d = a.values[k] - b.values[k];
        sum += d * d;
    }
    return std::sqrt(a.dx * sum);
}

double linf_distance(const Field& a, const Field& b) {
    if (a.values.size() != b.values.size()) throw std::invalid_argument("linf_distance: mesh mismatch");
    double m = 0.0;
    for (std::size_t k = 0; k < a.values.size(); ++k) m = std::max(m, std::abs(a.values[k] - b.values[k]));
    return m;
}

std::size_t first_non_finite(std::span<const double> values) {
    for (std::size_t k = 0; k < values.size(); ++k)
        if (!std::isfinite(values[k])) return k;
    return values.size();
}

// ---------------------------------------------------------------------------

TridiagonalSystem::TridiagonalSystem(std::vector<double> sub, std::vector<double> diag,
                                     std::vector<double> super, std::vector<double> rhs)
    : sub_(std::move(sub)), diag_(std::move(diag)), super_(std::move(super)), rhs_(std::move(rhs)) {
    const std::size_t n = diag_.size();
    if (n == 0) throw std::invalid_argument("TridiagonalSystem: empty system");
    if (sub_.size() != n || super_.size() != n || rhs_.size() != n)
        throw std::invalid_argument("TridiagonalSystem: coefficient arrays differ in length");
    for (std::size_t i = 0; i < n; ++i) {
        const double lower = i > 0 ? std::abs(sub_[i]) : 0.0;
        const double upper = i + 1 < n ? std::abs(super_[i]) : 0.0;
        if (std::abs(diag_[i]) < lower + upper) {
            std::ostringstream msg;
            msg << "TridiagonalSystem: row " << i << " is not diagonally dominant";
            throw std::invalid_argument(msg.str());
        }
    }
}

std::vector<double> TridiagonalSystem::multiply(std::span<const double> x) const {
    const std::size_t n = size();
    if (x.size() != n) throw std::invalid_argument("TridiagonalSystem::multiply: size mismatch");
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        double s = diag_[i] * x[i];
        if (i > 0) s += sub_[i] * x[i - 1];
        if (i + 1 < n) s += super_[i] * x[i + 1];
        out[i] = s;
    }
    return out;
}

std::vector<double> solve_tridiagonal(const TridiagonalSystem& system) {
    constexpr double kMinPivot = 1e-300;
    const std::size_t n = system.size();
    const auto& a = system.sub();
    const auto& b = system.diag();
    const auto& c = system.super();
    std::vector<double> cp(n), x(system.rhs());

    double pivot = b[0];
    if (std::abs(pivot) < kMinPivot) throw std::runtime_error("solve_tridiagonal: vanishing pivot at row 0");
    cp[0] = n > 1 ? c[0] / pivot : 0.0;
    x[0] /= pivot;
    for (std::size_t i = 1; i < n; ++i) {
        pivot = b[i] - a[i] * cp[i - 1];
        if (std::abs(pivot) < kMinPivot)
            throw std::runtime_error("solve_tridiagonal: vanishing pivot at row " + std::to_string(i));
        cp[i] = i + 1 < n ? c[i] / pivot : 0.0;
        x[i] = (x[i] - a[i] * x[i - 1]) / pivot;
    }
    for (std::size_t i = n - 1; i-- > 0;) x[i] -= cp[i] * x[i + 1];
    return x;
}

// ---------------------------------------------------------------------------

ConvexSplittingOperator::ConvexSplittingOperator(const SolverConfig& config) {
    config.validate();
    const double dx = config.dx();
    const double r = config.dt * config.nu / (dx * dx);
    diag_ = 1.0 + 2.0 * r - config.dt * (1.0 + 2.0 * config.alpha);
    off_ = -r;
    // Dominance requires dt (1 + 2 alpha) <= 1.
    if (std::abs(diag_) < 2.0 * std::abs(off_)) {
        throw std::invalid_argument("ConvexSplittingOperator: matrix is not diagonally dominant; need dt*(1+2*alpha) <= 1");
    }
    const std::size_t n = config.n_points - 1;
    upper_prime_.resize(n);
    inv_pivot_.resize(n);
    double prev = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double pivot = diag_ - off_ * prev;
        inv_pivot_[i] = 1.0 / pivot;
        prev = i + 1 < n ? off_ * inv_pivot_[i] : 0.0;
        upper_prime_[i] = prev;
    }
}

TridiagonalSystem ConvexSplittingOperator::system(std::vector<double> interior_rhs) const {
    const std::size_t n = interior_size();
    if (interior_rhs.size() != n) throw std::invalid_argument("ConvexSplittingOperator::system: size mismatch");
    return TridiagonalSystem(std::vector<double>(n, off_), std::vector<double>(n, diag_),
                             std::vector<double>(n, off_), std::move(interior_rhs));
}

void ConvexSplittingOperator::solve_in_place(std::span<double> full) const {
    const std::size_t n = interior_size();
    if (full.size() != n + 2) throw std::invalid_argument("ConvexSplittingOperator::solve_in_place: size mismatch");
    double* x = full.data() + 1;
    x[0] *= inv_pivot_[0];
    for (std::size_t i = 1; i < n; ++i) x[i] = (x[i] - off_ * x[i - 1]) * inv_pivot_[i];
    for (std::size_t i = n - 1; i-- > 0;) x[i] -= upper_prime_[i] * x[i + 1];
    full.front() = 0.0;
    full.back() = 0.0;
}

// ---------------------------------------------------------------------------

AllenCahnStepper::AllenCahnStepper(const SolverConfig& config) : config_(config), op_(config) {}

void AllenCahnStepper::step(Field& u, std::span<const double> forcing) const {
    const std::size_t size = config_.n_points + 1;
    if (u.values.size() != size) throw std::invalid_argument("AllenCahnStepper::step: mesh mismatch");
    if (!forcing.empty() && forcing.size() != size)
        throw std::invalid_argument("AllenCahnStepper::step: forcing size mismatch");
    const double dt = config_.dt;
    const double alpha = config_.alpha;
    double* w = u.values.data();
    if (forcing.empty()) {
        for (std::size_t k = 1; k + 1 < size; ++k) w[k] = w[k] + dt * (explicit_reaction(w[k], alpha) + 0.0);
    } else {
        for (std::size_t k = 1; k + 1 < size; ++k) w[k] = w[k] + dt * (explicit_reaction(w[k], alpha) + forcing[k]);
    }
    op_.solve_in_place(u.values);
    u.time += dt;

    const std::size_t bad = first_non_finite(u.values);
    if (bad != size) {
        std::ostringstream msg;
        msg << "non-finite value at mesh index " << bad << " (t = " << u.time << ")";
        throw DivergenceError(msg.str());
    }
}

Field step_reference(const Field& u, const SolverConfig& config) {
    Field next = u;
    AllenCahnStepper(config).step(next);
    return next;
}

// ---------------------------------------------------------------------------

GaussianSource::GaussianSource(std::uint64_t seed) : engine_(seed) {}

double GaussianSource::uniform_open() {
    // 53 random mantissa bits mapped into (0, 1).
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
}

double GaussianSource::operator()() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    const double r = std::sqrt(-2.0 * std::log(uniform_open()));
    const double theta = 2.0 * std::numbers::pi * uniform_open();
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
}

Field make_initial_data(const SolverConfig& config, std::uint64_t seed, double target_l2) {
    config.validate();
    if (!(target_l2 > 0.0) || !std::isfinite(target_l2))
        throw std::invalid_argument("make_initial_data: target_l2 must be positive");
    const std::size_t n = config.n_points;
    const std::size_t modes = n / 4;
    if (modes < 1) throw std::invalid_argument("make_initial_data: N/4 < 1");

    GaussianSource gauss(seed);
    std::vector<double> amplitude(modes);
    for (double& a : amplitude) a = gauss();

    // sin(2 pi k x_j / L) with x_j = j L / N depends only on (k j) mod N.
    std::vector<double> sine_table(n);
    for (std::size_t r = 0; r < n; ++r)
        sine_table[r] = std::sin(2.0 * std::numbers::pi * static_cast<double>(r) / static_cast<double>(n));

    Field u = Field::zeros(config);
    for (std::size_t j = 1; j < n; ++j) {
        double s = 0.0;
        for (std::size_t k = 1; k <= modes; ++k) s += amplitude[k - 1] * sine_table[(k * j) % n];
        u.values[j] = s;
    }
    u.values.front() = 0.0;
    u.values.back() = 0.0;

    const double norm = discrete_l2(u);
    if (!(norm > 0.0)) throw std::runtime_error("make_initial_data: generated field is identically zero");
    const double scale = target_l2 / norm;
    for (double& v : u.values) v *= scale;
    return u;
}

}  // namespace acda
