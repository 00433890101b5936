#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace acda {

/// Raised when a time step produces a non-finite value.
class DivergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Physical and discretization parameters of the 1D Allen-Cahn problem
/// u_t - nu u_xx = u - alpha u^3 on (0, L) with u(0) = u(L) = 0.
struct SolverConfig {
    double nu = 7.5e-6;
    double alpha = 1.0;
    double domain_length = 1.0;
    std::size_t n_points = 4096;  ///< number of mesh intervals N
    double dt = 1e-3;

    double dx() const { return domain_length / static_cast<double>(n_points); }

    /// Amplitude of the metastable plateaus, 1/sqrt(alpha).
    double saturation_amplitude() const;

    /// Throws std::invalid_argument when a field is out of range.
    void validate() const;
};

/// One time slice on the uniform mesh x_k = k dx, k = 0..N (both endpoints stored).
struct Field {
    std::vector<double> values;
    double dx = 0.0;
    double time = 0.0;

    Field() = default;
    Field(std::size_t n_intervals, double spacing, double t = 0.0)
        : values(n_intervals + 1, 0.0), dx(spacing), time(t) {}

    static Field zeros(const SolverConfig& config) { return Field(config.n_points, config.dx()); }

    std::size_t n_intervals() const { return values.empty() ? 0 : values.size() - 1; }
    double x(std::size_t k) const { return static_cast<double>(k) * dx; }
};

double discrete_l2(std::span<const double> values, double dx);
double discrete_linf(std::span<const double> values);
inline double discrete_l2(const Field& u) { return discrete_l2(u.values, u.dx); }
inline double discrete_linf(const Field& u) { return discrete_linf(u.values); }

/// L2 norm of the difference of two fields on the same mesh.
double l2_distance(const Field& a, const Field& b);
double linf_distance(const Field& a, const Field& b);

/// Index of the first non-finite entry, or values.size() when all are finite.
std::size_t first_non_finite(std::span<const double> values);

/// A general tridiagonal system. Row i reads
/// sub[i] x[i-1] + diag[i] x[i] + super[i] x[i+1] = rhs[i];
/// sub[0] and super[n-1] are ignored. Diagonal dominance is checked on construction.
class TridiagonalSystem {
public:
    TridiagonalSystem(std::vector<double> sub, std::vector<double> diag, std::vector<double> super,
                      std::vector<double> rhs);

    std::size_t size() const { return diag_.size(); }
    const std::vector<double>& sub() const { return sub_; }
    const std::vector<double>& diag() const { return diag_; }
    const std::vector<double>& super() const { return super_; }
    const std::vector<double>& rhs() const { return rhs_; }

    /// A x for an arbitrary x, used for residual checks.
    std::vector<double> multiply(std::span<const double> x) const;

private:
    std::vector<double> sub_, diag_, super_, rhs_;
};

/// Thomas algorithm: one forward elimination and one back substitution.
/// Throws std::runtime_error if a pivot falls below 1e-300 in magnitude.
std::vector<double> solve_tridiagonal(const TridiagonalSystem& system);

/// The constant matrix (1 - dt (nu D_xx + 1 + 2 alpha)) restricted to the
/// N-1 interior unknowns, pre-factored once so every solve is a pair of sweeps.
class ConvexSplittingOperator {
public:
    explicit ConvexSplittingOperator(const SolverConfig& config);

    double diagonal() const { return diag_; }
    double off_diagonal() const { return off_; }
    std::size_t interior_size() const { return inv_pivot_.size(); }

    /// The tridiagonal system for a given interior right-hand side.
    TridiagonalSystem system(std::vector<double> interior_rhs) const;

    /// Solves in place on a full mesh vector; endpoints are set to zero.
    void solve_in_place(std::span<double> full) const;

private:
    double diag_ = 0.0;
    double off_ = 0.0;
    std::vector<double> upper_prime_;  // modified super-diagonal
    std::vector<double> inv_pivot_;
};

/// Explicit part of the split nonlinearity, -2 alpha w - alpha w^3.
inline double explicit_reaction(double w, double alpha) { return -2.0 * alpha * w - alpha * w * w * w; }

/// Time stepper for the reference Allen-Cahn solution.
class AllenCahnStepper {
public:
    explicit AllenCahnStepper(const SolverConfig& config);

    const SolverConfig& config() const { return config_; }
    const ConvexSplittingOperator& op() const { return op_; }

    /// Advances u by one step in place. `forcing`, if non-empty, is added to
    /// the explicit reaction term (used for the nudging feedback).
    void step(Field& u, std::span<const double> forcing = {}) const;

private:
    SolverConfig config_;
    ConvexSplittingOperator op_;
};

/// Random initial data sum_{k=1}^{N/4} a_k sin(2 pi k x / L) with standard
/// Gaussian a_k, rescaled to the requested discrete L2 norm.
Field make_initial_data(const SolverConfig& config, std::uint64_t seed, double target_l2);

/// One convex-splitting step of the reference equation.
Field step_reference(const Field& u, const SolverConfig& config);

/// Seeded standard-normal source (std::mt19937_64 + Box-Muller) whose
/// output is identical on every platform.
class GaussianSource {
public:
    explicit GaussianSource(std::uint64_t seed);
    double operator()();

private:
    double uniform_open();
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace acda
