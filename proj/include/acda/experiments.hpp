#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "acda/assimilation.hpp"
#include "acda/observation.hpp"
#include "acda/solver.hpp"

namespace acda {

/// How the start of assimilation is chosen from the reference trajectory.
enum class SpinUpPolicy {
    /// First time ||u||_inf >= 0.8/sqrt(alpha); failing by t = cap is an error.
    FirstCrossing,
    /// t_s = max{t <= cap : ||u||_inf <= 0.8/sqrt(alpha)}, i.e. the last time the
    /// amplitude was still below the trigger, or the cap itself.
    LastBelowCapped,
};

struct SpinUp {
    Field state;      ///< reference state at the start of assimilation
    double duration;  ///< t_s
    bool reached;     ///< whether the metastable trigger was met before the cap
};

/// Initial data with ||u0||_L2 = 1e-2 evolved to the metastable regime.
SpinUp spin_up_reference(const SolverConfig& config, std::uint64_t seed,
                         SpinUpPolicy policy = SpinUpPolicy::FirstCrossing, double cap = 10.0);

struct TrialSpec {
    SolverConfig config;
    double mu = 1000.0;
    ObservationKind obs_kind = ObservationKind::UniformStatic;
    std::uint64_t seed = 1;
    double threshold = 5e-14;
    double t_star = 50.0;
    double probe_speed = 30.0;  ///< mesh cells per step, probe searches only
    SpinUpPolicy spin_up = SpinUpPolicy::LastBelowCapped;

    void validate() const;
};

/// Observation set of m nodes of the given kind (probe clusters start at index 0).
ObservationSet make_observation(ObservationKind kind, std::size_t n_intervals, std::size_t m, double speed);

/// Whether m nodes reach the threshold by t_star when assimilating against u_start.
bool sufficiently_converges(const TrialSpec& spec, const Field& u_start, std::size_t m);

struct MinNodesTrial {
    std::uint64_t seed = 0;
    std::optional<std::size_t> m_h;  ///< empty when even the full mesh fails
    double spin_up_time = 0.0;
    std::vector<std::pair<std::size_t, bool>> probes;  ///< every (m, converged) tested, in order
    std::string error;                                 ///< non-empty when the trial itself failed
};

struct MinNodesResult {
    double nu = 0.0;
    ObservationKind obs_kind = ObservationKind::UniformStatic;
    std::optional<std::size_t> m_h;  ///< median over successful trials
    std::vector<MinNodesTrial> trials;
};

/// Bisection on [1, N]: a converging midpoint becomes the new upper end, a
/// failing one the new lower end, until the bracket has length one; the
/// upper end is returned. The untested ends are checked only when the
/// bracket collapses onto them.
MinNodesTrial binary_search_min_nodes(const TrialSpec& spec, const Field& u_start);
MinNodesResult binary_search_min_nodes(const TrialSpec& spec);

/// Independent trials grouped by (nu, kind) in the order they first appear,
/// each group keeping its specs' order. Failures are recorded, not thrown.
std::vector<MinNodesResult> run_trial_batch(const std::vector<TrialSpec>& specs, unsigned threads = 0);

struct VelocityResult {
    double c = 0.0;
    std::size_t m = 0;
    std::optional<double> converge_time;
    bool locked = false;
};

struct VelocitySweepOptions {
    double time_cap = 200.0;
    double locked_factor = 1.5;
    std::size_t record_every = 10;
};

/// One probe run per speed from the same spun-up reference state.
std::vector<VelocityResult> velocity_sweep(const SolverConfig& config, double mu, std::size_t m,
                                           const std::vector<double>& speeds, std::uint64_t seed, double threshold,
                                           const VelocitySweepOptions& options = {});
std::vector<VelocityResult> velocity_sweep(const SolverConfig& config, const Field& u_start, double mu,
                                           std::size_t m, const std::vector<double>& speeds, double threshold,
                                           const VelocitySweepOptions& options = {});

/// Sets `locked` from the converged-time mean of a batch.
void classify_locked(std::vector<VelocityResult>& results, double factor = 1.5);

/// Speeds K (mesh cells per step) dividing N with |K - m| < lambda/dx, and
/// their multiples, up to max_speed.
std::vector<std::size_t> conjectured_locked_speeds(std::size_t n_intervals, std::size_t m, double lambda_cells,
                                                   std::size_t max_speed);

/// Mesh cells a probe of m nodes moving c cells per step never visits on the
/// periodic mesh: the starts are the multiples of g = gcd(c, N).
std::size_t unobserved_cells(std::size_t n_intervals, std::size_t m, std::size_t c);

struct ProbeSizeRow {
    std::size_t m = 0;
    std::optional<double> mean_time;
    std::size_t n_converged = 0;
    std::vector<VelocityResult> runs;
};

struct ProbeSizeStudy {
    std::vector<ProbeSizeRow> rows;
    /// T = prefactor * M^exponent over sizes with a mean; absent with fewer than two.
    std::optional<double> prefactor;
    std::optional<double> exponent;
};

ProbeSizeStudy probe_size_study(const SolverConfig& config, double mu, const std::vector<std::size_t>& sizes,
                                const std::vector<double>& speeds, std::uint64_t seed, double threshold,
                                const VelocitySweepOptions& options = {});

}  // namespace acda
