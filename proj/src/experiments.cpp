#include "acda/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>
#include <thread>

#include "acda/analysis.hpp"

namespace acda {

namespace {
constexpr double kInitialL2 = 1e-2;
}

SpinUp spin_up_reference(const SolverConfig& config, std::uint64_t seed, SpinUpPolicy policy, double cap) {
    if (!(cap > 0.0)) throw std::invalid_argument("spin_up_reference: cap must be positive");
    const AllenCahnStepper stepper(config);
    const double trigger = 0.8 * config.saturation_amplitude();
    const auto max_steps = static_cast<std::size_t>(std::llround(cap / config.dt));
    Field u = make_initial_data(config, seed, kInitialL2);

    if (policy == SpinUpPolicy::FirstCrossing) {
        for (std::size_t n = 0; discrete_linf(u) < trigger; ++n) {
            if (n == max_steps)
                throw std::runtime_error("spin_up_reference: amplitude did not reach 0.8/sqrt(alpha) by t = " +
                                         std::to_string(cap) + " (seed " + std::to_string(seed) + ")");
            stepper.step(u);
        }
        return {u, u.time, true};
    }

    // Last time at or below the trigger within [0, cap].
    Field last_below = u;
    bool reached = false;
    for (std::size_t n = 0; n < max_steps; ++n) {
        stepper.step(u);
        if (discrete_linf(u) <= trigger)
            last_below = u;
        else
            reached = true;
    }
    if (discrete_linf(u) <= trigger) reached = false;
    return {last_below, last_below.time, reached};
}

void TrialSpec::validate() const {
    config.validate();
    if (!(threshold > 0.0)) throw std::invalid_argument("TrialSpec: threshold must be positive");
    if (!(t_star > 0.0)) throw std::invalid_argument("TrialSpec: t_star must be positive");
    if (!(mu > 0.0)) throw std::invalid_argument("TrialSpec: mu must be positive");
    if (config.dt > 2.0 / mu) throw std::invalid_argument("TrialSpec: CFL violated (dt > 2/mu)");
    if (obs_kind != ObservationKind::UniformStatic && obs_kind != ObservationKind::SweepingProbe)
        throw std::invalid_argument("TrialSpec: node-count searches use uniform grids or probes");
}

ObservationSet make_observation(ObservationKind kind, std::size_t n_intervals, std::size_t m, double speed) {
    switch (kind) {
        case ObservationKind::UniformStatic: return ObservationSet::uniform(n_intervals, m);
        case ObservationKind::SweepingProbe: return ObservationSet::sweeping_probe(n_intervals, m, speed);
        default: throw std::invalid_argument("make_observation: kind is not parameterized by a node count");
    }
}

bool sufficiently_converges(const TrialSpec& spec, const Field& u_start, std::size_t m) {
    const NudgeConfig nudge(spec.mu, make_observation(spec.obs_kind, spec.config.n_points, m, spec.probe_speed),
                            spec.t_star, spec.config);
    RunOptions options;
    options.stop_on_convergence = true;
    return run_pair(u_start, nudge, spec.config, spec.threshold, options).converged_at.has_value();
}

MinNodesTrial binary_search_min_nodes(const TrialSpec& spec, const Field& u_start) {
    spec.validate();
    const std::size_t n = spec.config.n_points;
    const std::size_t largest = spec.obs_kind == ObservationKind::SweepingProbe ? n : n + 1;

    MinNodesTrial trial;
    trial.seed = spec.seed;
    std::map<std::size_t, bool> known;
    auto test = [&](std::size_t m) {
        if (auto it = known.find(m); it != known.end()) return it->second;
        const bool ok = sufficiently_converges(spec, u_start, m);
        known.emplace(m, ok);
        trial.probes.emplace_back(m, ok);
        return ok;
    };

    std::size_t lower = 1;
    std::size_t upper = n;
    while (upper - lower > 1) {
        const std::size_t mid = lower + (upper - lower) / 2;
        if (test(mid))
            upper = mid;
        else
            lower = mid;
    }
    if (lower == 1 && !known.contains(1) && test(1)) {
        trial.m_h = 1;
        return trial;
    }
    if (!known.contains(upper) && !test(upper)) {
        if (largest > upper && test(largest)) trial.m_h = largest;
        return trial;
    }
    trial.m_h = upper;
    return trial;
}

MinNodesResult binary_search_min_nodes(const TrialSpec& spec) {
    spec.validate();
    const SpinUp start = spin_up_reference(spec.config, spec.seed, spec.spin_up);
    MinNodesTrial trial = binary_search_min_nodes(spec, start.state);
    trial.spin_up_time = start.duration;
    MinNodesResult result;
    result.nu = spec.config.nu;
    result.obs_kind = spec.obs_kind;
    result.m_h = trial.m_h;
    result.trials.push_back(std::move(trial));
    return result;
}

namespace {

std::optional<std::size_t> median_m_h(const std::vector<MinNodesTrial>& trials) {
    std::vector<std::size_t> values;
    for (const auto& t : trials)
        if (t.m_h) values.push_back(*t.m_h);
    if (values.empty()) return std::nullopt;
    std::sort(values.begin(), values.end());
    return values[(values.size() - 1) / 2];
}

}  // namespace

std::vector<MinNodesResult> run_trial_batch(const std::vector<TrialSpec>& specs, unsigned threads) {
    if (specs.empty()) throw std::invalid_argument("run_trial_batch: no trials");
    std::vector<MinNodesTrial> trials(specs.size());

    auto run_one = [&](std::size_t i) {
        try {
            trials[i] = binary_search_min_nodes(specs[i]).trials.front();
        } catch (const std::exception& e) {
            trials[i] = MinNodesTrial{};
            trials[i].seed = specs[i].seed;
            trials[i].error = e.what();
        }
    };

    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, specs.size()));
    if (threads <= 1) {
        for (std::size_t i = 0; i < specs.size(); ++i) run_one(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < threads; ++t)
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < specs.size(); i = next++) run_one(i);
            });
    }

    std::vector<MinNodesResult> results;
    for (std::size_t i = 0; i < specs.size(); ++i) {
        auto it = std::find_if(results.begin(), results.end(), [&](const MinNodesResult& r) {
            return r.nu == specs[i].config.nu && r.obs_kind == specs[i].obs_kind;
        });
        if (it == results.end()) {
            results.push_back({specs[i].config.nu, specs[i].obs_kind, std::nullopt, {}});
            it = std::prev(results.end());
        }
        it->trials.push_back(std::move(trials[i]));
    }
    for (auto& r : results) r.m_h = median_m_h(r.trials);
    return results;
}

// ---------------------------------------------------------------------------

void classify_locked(std::vector<VelocityResult>& results, double factor) {
    double sum = 0.0;
    std::size_t count = 0;
    for (const auto& r : results)
        if (r.converge_time) {
            sum += *r.converge_time;
            ++count;
        }
    const double mean = count ? sum / static_cast<double>(count) : 0.0;
    for (auto& r : results) r.locked = !r.converge_time || *r.converge_time > factor * mean;
}

std::vector<VelocityResult> velocity_sweep(const SolverConfig& config, const Field& u_start, double mu,
                                           std::size_t m, const std::vector<double>& speeds, double threshold,
                                           const VelocitySweepOptions& options) {
    if (speeds.empty()) throw std::invalid_argument("velocity_sweep: no speeds");
    std::vector<VelocityResult> results;
    results.reserve(speeds.size());
    for (double c : speeds) {
        const NudgeConfig nudge(mu, ObservationSet::sweeping_probe(config.n_points, m, c), options.time_cap, config,
                                options.record_every);
        RunOptions run_options;
        run_options.stop_on_convergence = true;
        const RunRecord rec = run_pair(u_start, nudge, config, threshold, run_options);
        results.push_back({c, m, rec.converged_at, false});
    }
    classify_locked(results, options.locked_factor);
    return results;
}

std::vector<VelocityResult> velocity_sweep(const SolverConfig& config, double mu, std::size_t m,
                                           const std::vector<double>& speeds, std::uint64_t seed, double threshold,
                                           const VelocitySweepOptions& options) {
    const SpinUp start = spin_up_reference(config, seed);
    return velocity_sweep(config, start.state, mu, m, speeds, threshold, options);
}

std::vector<std::size_t> conjectured_locked_speeds(std::size_t n_intervals, std::size_t m, double lambda_cells,
                                                   std::size_t max_speed) {
    std::vector<std::size_t> out;
    for (std::size_t k = 1; k <= max_speed; ++k) {
        if (n_intervals % k != 0) continue;
        if (std::abs(static_cast<double>(k) - static_cast<double>(m)) >= lambda_cells) continue;
        for (std::size_t c = k; c <= max_speed; c += k) out.push_back(c);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::size_t unobserved_cells(std::size_t n_intervals, std::size_t m, std::size_t c) {
    const std::size_t g = std::gcd(c % n_intervals, n_intervals);  // gcd(0, N) = N: a parked probe
    return n_intervals - (n_intervals / g) * std::min(m, g);
}

ProbeSizeStudy probe_size_study(const SolverConfig& config, double mu, const std::vector<std::size_t>& sizes,
                                const std::vector<double>& speeds, std::uint64_t seed, double threshold,
                                const VelocitySweepOptions& options) {
    if (sizes.empty()) throw std::invalid_argument("probe_size_study: no probe sizes");
    const SpinUp start = spin_up_reference(config, seed);
    ProbeSizeStudy study;
    std::vector<double> ms, ts;
    for (std::size_t m : sizes) {
        ProbeSizeRow row;
        row.m = m;
        row.runs = velocity_sweep(config, start.state, mu, m, speeds, threshold, options);
        double sum = 0.0;
        for (const auto& r : row.runs)
            if (!r.locked && r.converge_time) {
                sum += *r.converge_time;
                ++row.n_converged;
            }
        if (row.n_converged > 0) {
            row.mean_time = sum / static_cast<double>(row.n_converged);
            ms.push_back(static_cast<double>(m));
            ts.push_back(*row.mean_time);
        }
        study.rows.push_back(std::move(row));
    }
    std::vector<double> distinct = ms;
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    if (distinct.size() >= 2) {
        const LogLogFit fit = fit_log_log(ms, ts);
        study.prefactor = std::exp(fit.intercept);
        study.exponent = fit.slope;
    }
    return study;
}

}  // namespace acda
