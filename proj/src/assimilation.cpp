#include "acda/assimilation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace acda {

NudgeConfig::NudgeConfig(double relaxation, ObservationSet observation, double end_time, const SolverConfig& config,
                         std::size_t sample_every)
    : mu(relaxation), obs(std::move(observation)), t_end(end_time), record_every(sample_every) {
    if (!(mu > 0.0) || !std::isfinite(mu)) throw std::invalid_argument("NudgeConfig: mu must be positive");
    if (config.dt > 2.0 / mu) {
        std::ostringstream msg;
        msg << "NudgeConfig: CFL violated, dt = " << config.dt << " exceeds 2/mu = " << 2.0 / mu;
        throw std::invalid_argument(msg.str());
    }
    if (!(t_end >= 0.0) || !std::isfinite(t_end)) throw std::invalid_argument("NudgeConfig: t_end must be >= 0");
    if (record_every == 0) throw std::invalid_argument("NudgeConfig: record_every must be >= 1");
    if (obs.n_intervals() != config.n_points)
        throw std::invalid_argument("NudgeConfig: observation set built for a different mesh");
}

std::size_t NudgeConfig::n_steps(const SolverConfig& config) const {
    return static_cast<std::size_t>(std::llround(t_end / config.dt));
}

double RunRecord::l2_at(double t) const {
    if (times.empty()) throw std::logic_error("RunRecord::l2_at: empty record");
    if (t <= times.front()) return l2_errors.front();
    if (t >= times.back()) return l2_errors.back();
    const auto it = std::upper_bound(times.begin(), times.end(), t);
    const std::size_t i = static_cast<std::size_t>(it - times.begin());
    const double w = (t - times[i - 1]) / (times[i] - times[i - 1]);
    return l2_errors[i - 1] * (1.0 - w) + l2_errors[i] * w;
}

// ---------------------------------------------------------------------------

TwinIntegrator::TwinIntegrator(const SolverConfig& config, double mu, ObservationSet obs, Field reference,
                               Field assimilated)
    : stepper_(config), mu_(mu), obs_(std::move(obs)), u_(std::move(reference)), v_(std::move(assimilated)) {
    const std::size_t size = config.n_points + 1;
    if (u_.values.size() != size || v_.values.size() != size)
        throw std::invalid_argument("TwinIntegrator: mesh mismatch");
    if (obs_.n_intervals() != config.n_points)
        throw std::invalid_argument("TwinIntegrator: observation set built for a different mesh");
    diff_.assign(size, 0.0);
    forcing_.assign(size, 0.0);
}

void TwinIntegrator::step() {
    const std::size_t size = diff_.size();
    std::fill(forcing_.begin(), forcing_.end(), 0.0);
    if (!obs_.empty()) {
        // I_h is linear, so I_h(u) - I_h(v) = I_h(u - v).
        for (std::size_t k = 0; k < size; ++k) diff_[k] = u_.values[k] - v_.values[k];
        accumulate_interpolant(diff_, obs_, mu_, forcing_);
    }
    stepper_.step(u_);
    try {
        stepper_.step(v_, forcing_);
    } catch (const DivergenceError& e) {
        std::ostringstream msg;
        msg << "assimilated solution diverged at step " << steps_ + 1 << " (mu*dt = " << mu_ * stepper_.config().dt
            << "): " << e.what();
        throw DivergenceError(msg.str());
    }
    obs_.advance();
    ++steps_;
}

Field step_assimilated(const Field& v, const Field& u_current, NudgeConfig& nudge, const SolverConfig& config) {
    if (v.values.size() != u_current.values.size()) throw std::invalid_argument("step_assimilated: mesh mismatch");
    const std::size_t size = config.n_points + 1;
    std::vector<double> diff(size), forcing(size, 0.0);
    for (std::size_t k = 0; k < size; ++k) diff[k] = u_current.values[k] - v.values[k];
    if (!nudge.obs.empty()) accumulate_interpolant(diff, nudge.obs, nudge.mu, forcing);
    Field next = v;
    try {
        AllenCahnStepper(config).step(next, forcing);
    } catch (const DivergenceError& e) {
        std::ostringstream msg;
        msg << "assimilated solution diverged (mu*dt = " << nudge.mu * config.dt << "): " << e.what();
        throw DivergenceError(msg.str());
    }
    nudge.obs.advance();
    return next;
}

RunRecord run_pair(const Field& u0, const NudgeConfig& nudge, const SolverConfig& config, double threshold,
                   const RunOptions& options) {
    if (u0.values.size() != config.n_points + 1) throw std::invalid_argument("run_pair: mesh mismatch");
    Field v0 = options.initial_assimilated ? *options.initial_assimilated : Field(config.n_points, config.dx());
    Field u = u0;
    u.time = 0.0;
    v0.time = 0.0;
    TwinIntegrator twin(config, nudge.mu, nudge.obs, std::move(u), std::move(v0));

    RunRecord rec;
    rec.threshold = threshold;
    const std::size_t n_steps = nudge.n_steps(config);
    const std::size_t expected = n_steps / nudge.record_every + 2;
    rec.times.reserve(expected);
    rec.l2_errors.reserve(expected);
    rec.linf_errors.reserve(expected);

    auto sample = [&] {
        const double l2 = twin.l2_error();
        rec.times.push_back(static_cast<double>(twin.steps_taken()) * config.dt);
        rec.l2_errors.push_back(l2);
        rec.linf_errors.push_back(twin.linf_error());
        if (options.record_probe && twin.observation().kind() == ObservationKind::SweepingProbe)
            rec.probe_positions.push_back((twin.observation().probe_start() +
                                           static_cast<std::size_t>(std::floor(twin.observation().probe_offset() + 1e-9))) %
                                          config.n_points);
        if (!rec.converged_at && l2 <= threshold) rec.converged_at = rec.times.back();
    };

    sample();
    for (std::size_t n = 1; n <= n_steps; ++n) {
        if (options.stop_on_convergence && rec.converged_at) break;
        twin.step();
        if (n % nudge.record_every == 0 || n == n_steps) sample();
    }
    rec.final_reference = twin.reference();
    rec.final_assimilated = twin.assimilated();
    return rec;
}

double probe_traversal_time(const SolverConfig& config, double speed) {
    if (!(speed > 0.0)) throw std::invalid_argument("probe_traversal_time: speed must be positive");
    return static_cast<double>(config.n_points) * config.dt / speed;
}

namespace {

std::vector<double> moving_average(const std::vector<double>& x, std::size_t half) {
    std::vector<double> out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const std::size_t lo = i >= half ? i - half : 0;
        const std::size_t hi = std::min(x.size() - 1, i + half);
        double s = 0.0;
        for (std::size_t j = lo; j <= hi; ++j) s += x[j];
        out[i] = s / static_cast<double>(hi - lo + 1);
    }
    return out;
}

// Lag (in samples) of the first autocorrelation peak reaching half the largest one.
std::optional<double> dominant_period(const std::vector<double>& signal) {
    const std::size_t n = signal.size();
    if (n < 12) return std::nullopt;
    const double mean = std::accumulate(signal.begin(), signal.end(), 0.0) / static_cast<double>(n);
    std::vector<double> z(n);
    for (std::size_t i = 0; i < n; ++i) z[i] = signal[i] - mean;
    const std::size_t max_lag = n / 3;
    std::vector<double> r(max_lag + 2, 0.0);
    for (std::size_t lag = 0; lag <= max_lag + 1 && lag < n; ++lag) {
        double s = 0.0;
        for (std::size_t i = 0; i + lag < n; ++i) s += z[i] * z[i + lag];
        r[lag] = s / static_cast<double>(n - lag);
    }
    if (!(r[0] > 0.0)) return std::nullopt;
    std::vector<std::size_t> peaks;
    double best = 0.0;
    for (std::size_t lag = 2; lag <= max_lag; ++lag) {
        if (r[lag] > r[lag - 1] && r[lag] >= r[lag + 1] && r[lag] > 0.0) {
            peaks.push_back(lag);
            best = std::max(best, r[lag]);
        }
    }
    for (std::size_t lag : peaks) {
        if (r[lag] < 0.5 * best) continue;
        // Parabolic refinement of the peak position.
        const double a = r[lag - 1], b = r[lag], c = r[lag + 1];
        const double denom = a - 2.0 * b + c;
        const double shift = denom < 0.0 ? 0.5 * (a - c) / denom : 0.0;
        return static_cast<double>(lag) + shift;
    }
    return std::nullopt;
}

}  // namespace

std::vector<double> detect_stairsteps(const RunRecord& record, const SolverConfig& config, const ObservationSet& obs) {
    (void)config;
    if (obs.kind() != ObservationKind::SweepingProbe || record.size() < 3) return {};

    // Analyse the curve only while it is well above the convergence floor.
    const double floor = std::max(100.0 * record.threshold, 1e-13 * record.l2_errors.front());
    std::size_t end = 0;
    while (end < record.size() && record.l2_errors[end] > floor) ++end;
    if (end < 12) return {};

    std::vector<double> descent(end - 1);
    for (std::size_t i = 1; i < end; ++i)
        descent[i - 1] = std::log(record.l2_errors[i - 1]) - std::log(record.l2_errors[i]);
    const std::vector<double> rate = moving_average(descent, 1);

    const auto period = dominant_period(rate);
    if (!period) return {};

    // Drop centres: local maxima of the descent rate that dominate a window of one half period.
    const auto radius = static_cast<std::size_t>(std::max(1.0, std::floor(0.5 * *period)));
    std::vector<std::size_t> drops;
    for (std::size_t i = 0; i < rate.size(); ++i) {
        const std::size_t lo = i >= radius ? i - radius : 0;
        const std::size_t hi = std::min(rate.size() - 1, i + radius);
        bool is_max = rate[i] > 0.0;
        for (std::size_t j = lo; j <= hi && is_max; ++j)
            if (rate[j] > rate[i] || (rate[j] == rate[i] && j < i)) is_max = false;
        if (is_max) drops.push_back(i);
    }

    std::vector<double> plateaus;
    for (std::size_t k = 1; k < drops.size(); ++k)
        plateaus.push_back(record.times[drops[k] + 1] - record.times[drops[k - 1] + 1]);
    return plateaus;
}

}  // namespace acda
