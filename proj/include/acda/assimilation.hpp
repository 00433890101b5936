#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "acda/observation.hpp"
#include "acda/solver.hpp"

namespace acda {

/// Nudging parameters. The feedback is explicit, so construction enforces dt <= 2/mu.
struct NudgeConfig {
    double mu = 500.0;
    ObservationSet obs;
    double t_end = 50.0;
    std::size_t record_every = 10;

    NudgeConfig(double relaxation, ObservationSet observation, double end_time, const SolverConfig& config,
                std::size_t sample_every = 10);

    std::size_t n_steps(const SolverConfig& config) const;
};

/// Error history of one coupled reference/assimilated run. Times are measured
/// from the start of assimilation.
struct RunRecord {
    std::vector<double> times;
    std::vector<double> l2_errors;
    std::vector<double> linf_errors;
    std::optional<double> converged_at;
    /// First mesh index of the probe at each sample (probe runs only).
    std::vector<std::size_t> probe_positions;
    double threshold = 0.0;
    Field final_reference;
    Field final_assimilated;

    std::size_t size() const { return times.size(); }
    double final_l2() const { return l2_errors.empty() ? 0.0 : l2_errors.back(); }
    /// Linear interpolation of the L2 error at time t (clamped to the recorded range).
    double l2_at(double t) const;
};

struct RunOptions {
    /// Stop as soon as the L2 error first drops to the threshold.
    bool stop_on_convergence = false;
    bool record_probe = false;
    /// Initial assimilated state; zero when absent.
    std::optional<Field> initial_assimilated;
};

/// One step of the nudged system. The feedback uses the observation set at the
/// current time level; a probe is advanced afterwards.
Field step_assimilated(const Field& v, const Field& u_current, NudgeConfig& nudge, const SolverConfig& config);

/// Reference and assimilated solutions advanced in lockstep, sharing one
/// factored matrix.
class TwinIntegrator {
public:
    TwinIntegrator(const SolverConfig& config, double mu, ObservationSet obs, Field reference, Field assimilated);

    void step();

    const Field& reference() const { return u_; }
    const Field& assimilated() const { return v_; }
    const ObservationSet& observation() const { return obs_; }
    std::size_t steps_taken() const { return steps_; }
    double l2_error() const { return l2_distance(u_, v_); }
    double linf_error() const { return linf_distance(u_, v_); }

private:
    AllenCahnStepper stepper_;
    double mu_;
    ObservationSet obs_;
    Field u_, v_;
    std::vector<double> diff_, forcing_;
    std::size_t steps_ = 0;
};

/// Runs reference and assimilated systems to nudge.t_end from u0 (v0 = 0 by default),
/// sampling the errors every nudge.record_every steps.
RunRecord run_pair(const Field& u0, const NudgeConfig& nudge, const SolverConfig& config, double threshold,
                   const RunOptions& options = {});

/// Plateau lengths (in time units) of the descending stair-step pattern of a
/// probe run's log-error curve. Empty for static observation sets.
std::vector<double> detect_stairsteps(const RunRecord& record, const SolverConfig& config,
                                      const ObservationSet& obs);

/// Time for a probe to traverse the periodic domain once, N dt / c.
double probe_traversal_time(const SolverConfig& config, double speed);

}  // namespace acda
