#include "acda/observation.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace acda {

std::string_view to_string(ObservationKind kind) {
    switch (kind) {
        case ObservationKind::UniformStatic: return "uniform";
        case ObservationKind::LayerBased: return "layer";
        case ObservationKind::SweepingProbe: return "probe";
        case ObservationKind::Custom: return "custom";
    }
    return "custom";
}

ObservationKind parse_observation_kind(std::string_view text) {
    if (text == "uniform") return ObservationKind::UniformStatic;
    if (text == "layer") return ObservationKind::LayerBased;
    if (text == "probe") return ObservationKind::SweepingProbe;
    if (text == "custom") return ObservationKind::Custom;
    throw std::invalid_argument("unknown observation kind '" + std::string(text) + "'");
}

ObservationSet ObservationSet::uniform(std::size_t n_intervals, std::size_t m) {
    if (m == 0) throw std::invalid_argument("ObservationSet::uniform: need at least one node");
    if (m > n_intervals + 1) throw std::invalid_argument("ObservationSet::uniform: more nodes than mesh points");
    ObservationSet obs;
    obs.kind_ = ObservationKind::UniformStatic;
    obs.n_intervals_ = n_intervals;
    if (m == 1) {
        obs.points_ = {n_intervals / 2};
        return obs;
    }
    obs.points_.reserve(m);
    for (std::size_t j = 0; j < m; ++j) {
        // Exact rational rounding of j N / (m - 1), ties toward the lower index.
        const std::size_t num = j * n_intervals;
        const std::size_t den = m - 1;
        std::size_t q = num / den;
        const std::size_t rem = num % den;
        if (2 * rem > den) ++q;
        obs.points_.push_back(q);
    }
    return obs;
}

ObservationSet ObservationSet::full_mesh(std::size_t n_intervals) { return uniform(n_intervals, n_intervals + 1); }

ObservationSet ObservationSet::sweeping_probe(std::size_t n_intervals, std::size_t m, double speed,
                                              std::size_t start) {
    if (m == 0) throw std::invalid_argument("ObservationSet::sweeping_probe: need at least one node");
    if (m > n_intervals) throw std::invalid_argument("ObservationSet::sweeping_probe: probe longer than the domain");
    if (!(speed >= 0.0) || !std::isfinite(speed))
        throw std::invalid_argument("ObservationSet::sweeping_probe: speed must be finite and non-negative");
    ObservationSet obs;
    obs.kind_ = ObservationKind::SweepingProbe;
    obs.n_intervals_ = n_intervals;
    obs.speed_ = speed;
    obs.start_ = start % n_intervals;
    obs.cluster_ = m;
    obs.rebuild_probe_points();
    return obs;
}

ObservationSet ObservationSet::custom(std::size_t n_intervals, std::vector<std::size_t> points) {
    std::sort(points.begin(), points.end());
    points.erase(std::unique(points.begin(), points.end()), points.end());
    if (!points.empty() && points.back() > n_intervals)
        throw std::invalid_argument("ObservationSet::custom: index outside the mesh");
    ObservationSet obs;
    obs.kind_ = ObservationKind::Custom;
    obs.n_intervals_ = n_intervals;
    obs.points_ = std::move(points);
    return obs;
}

bool ObservationSet::bridges(std::size_t i) const {
    if (i + 1 >= points_.size()) return false;
    if (kind_ != ObservationKind::SweepingProbe) return true;
    return points_[i + 1] == points_[i] + 1;
}

void ObservationSet::rebuild_probe_points() {
    // Displacement recomputed from the step count so fractional speeds never drift.
    const double displacement = std::floor(static_cast<double>(steps_) * speed_ + 1e-9);
    const auto shift = static_cast<std::uint64_t>(displacement) % n_intervals_;
    const std::size_t first = (start_ + shift) % n_intervals_;
    points_.resize(cluster_);
    for (std::size_t j = 0; j < cluster_; ++j) points_[j] = (first + j) % n_intervals_;
    std::sort(points_.begin(), points_.end());
}

void ObservationSet::advance() {
    if (kind_ != ObservationKind::SweepingProbe) return;
    ++steps_;
    rebuild_probe_points();
}

ObservationSet advance_probe(const ObservationSet& obs, const SolverConfig& config) {
    if (obs.n_intervals() != config.n_points)
        throw std::invalid_argument("advance_probe: observation set built for a different mesh");
    ObservationSet next = obs;
    next.advance();
    return next;
}

std::string ObservationSet::to_csv_record() const {
    std::ostringstream out;
    out << to_string(kind_) << ',' << points_.size() << ',' << std::setprecision(17) << speed_ << ',';
    for (std::size_t i = 0; i < points_.size(); ++i) {
        if (i) out << ';';
        out << points_[i];
    }
    return out.str();
}

ObservationSet ObservationSet::from_csv_record(std::string_view record, std::size_t n_intervals) {
    std::vector<std::string> cols;
    std::string cur;
    for (char ch : record) {
        if (ch == ',') {
            cols.push_back(cur);
            cur.clear();
        } else {
            cur += ch;
        }
    }
    cols.push_back(cur);
    if (cols.size() != 4) throw std::invalid_argument("observation record needs 4 columns");
    const ObservationKind kind = parse_observation_kind(cols[0]);
    const std::size_t m = std::stoul(cols[1]);
    const double speed = std::stod(cols[2]);
    std::vector<std::size_t> idx;
    std::stringstream ss(cols[3]);
    std::string tok;
    while (std::getline(ss, tok, ';'))
        if (!tok.empty()) idx.push_back(std::stoul(tok));
    if (idx.size() != m) throw std::invalid_argument("observation record: node count does not match index list");

    if (kind == ObservationKind::SweepingProbe) {
        // The probe start is the first index of the unwrapped cluster.
        std::size_t start = idx.front();
        for (std::size_t i = 0; i + 1 < idx.size(); ++i)
            if (idx[i + 1] != idx[i] + 1) start = idx[i + 1];
        return sweeping_probe(n_intervals, m, speed, start);
    }
    ObservationSet obs = custom(n_intervals, std::move(idx));
    obs.kind_ = kind;
    return obs;
}

// ---------------------------------------------------------------------------

Interpolant::Interpolant(const Field& f, const ObservationSet& obs) {
    if (obs.empty()) throw std::invalid_argument("Interpolant: empty observation set");
    if (f.values.size() != obs.n_intervals() + 1) throw std::invalid_argument("Interpolant: mesh mismatch");
    const auto& pts = obs.points();
    nodes_.reserve(pts.size());
    values_.reserve(pts.size());
    for (std::size_t p : pts) {
        nodes_.push_back(f.x(p));
        values_.push_back(f.values[p]);
    }
    bridged_.resize(pts.size(), false);
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) bridged_[i] = obs.bridges(i);
}

bool Interpolant::in_support(double x) const {
    auto it = std::lower_bound(nodes_.begin(), nodes_.end(), x);
    if (it != nodes_.end() && *it == x) return true;
    if (it == nodes_.begin() || it == nodes_.end()) return false;
    return bridged_[static_cast<std::size_t>(it - nodes_.begin()) - 1];
}

double Interpolant::operator()(double x) const {
    auto it = std::lower_bound(nodes_.begin(), nodes_.end(), x);
    if (it != nodes_.end() && *it == x) return values_[static_cast<std::size_t>(it - nodes_.begin())];
    if (it == nodes_.begin() || it == nodes_.end()) return 0.0;
    const std::size_t i = static_cast<std::size_t>(it - nodes_.begin()) - 1;
    if (!bridged_[i]) return 0.0;
    const double w = (x - nodes_[i]) / (nodes_[i + 1] - nodes_[i]);
    return values_[i] * (1.0 - w) + values_[i + 1] * w;
}

void accumulate_interpolant(std::span<const double> f, const ObservationSet& obs, double scale,
                            std::span<double> out) {
    const auto& pts = obs.points();
    if (f.size() != obs.n_intervals() + 1 || out.size() != f.size())
        throw std::invalid_argument("accumulate_interpolant: mesh mismatch");
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const std::size_t p = pts[i];
        const double fp = f[p];
        // Node values are taken verbatim so the interpolant is exact at the nodes.
        out[p] += scale * fp;
        if (!obs.bridges(i)) continue;
        const std::size_t q = pts[i + 1];
        const double fq = f[q];
        const double len = static_cast<double>(q - p);
        for (std::size_t k = p + 1; k < q; ++k) {
            const double w = static_cast<double>(k - p) / len;
            out[k] += scale * (fp * (1.0 - w) + fq * w);
        }
    }
}

Field interpolate(const Field& f, const ObservationSet& obs) {
    if (obs.empty()) throw std::invalid_argument("interpolate: empty observation set");
    Field out(f.n_intervals(), f.dx, f.time);
    accumulate_interpolant(f.values, obs, 1.0, out.values);
    return out;
}

// ---------------------------------------------------------------------------

ObservationSet layer_based_placement(const Field& u, const SolverConfig& config) {
    const std::size_t n = u.n_intervals();
    if (n != config.n_points) throw std::invalid_argument("layer_based_placement: mesh mismatch");
    const double trigger = 0.8 * config.saturation_amplitude();
    if (discrete_linf(u) < trigger)
        throw std::invalid_argument("layer_based_placement: field has not reached the metastable regime");

    const auto& v = u.values;
    // Structures are maximal runs of interior points with constant nonzero sign.
    std::vector<std::size_t> maxima, crossings;
    int sign = 0;
    std::size_t best = 0;
    for (std::size_t k = 1; k < n; ++k) {
        const int s = (v[k] > 0.0) - (v[k] < 0.0);
        if (s == 0) continue;
        if (s != sign) {
            if (sign != 0) {
                maxima.push_back(best);
                // Crossing between the previous nonzero point and k: pick the smaller |u|.
                std::size_t prev = k - 1;
                while (prev > 0 && v[prev] == 0.0) --prev;
                crossings.push_back(std::abs(v[prev]) <= std::abs(v[k]) ? prev : k);
            }
            sign = s;
            best = k;
        } else if (std::abs(v[k]) > std::abs(v[best])) {
            best = k;
        }
    }
    if (sign == 0) throw std::invalid_argument("layer_based_placement: field has no structure to anchor");
    maxima.push_back(best);

    std::vector<std::size_t> pts{0, n};
    pts.insert(pts.end(), maxima.begin(), maxima.end());
    pts.insert(pts.end(), crossings.begin(), crossings.end());
    ObservationSet obs = ObservationSet::custom(n, std::move(pts));
    obs.kind_ = ObservationKind::LayerBased;
    std::sort(crossings.begin(), crossings.end());
    crossings.erase(std::unique(crossings.begin(), crossings.end()), crossings.end());
    obs.layer_points_ = std::move(crossings);
    return obs;
}

ObservationSet remove_layer_coverage(const ObservationSet& obs, std::size_t layer_index) {
    if (layer_index >= obs.layer_points_.size())
        throw std::out_of_range("remove_layer_coverage: no transition layer with index " +
                                std::to_string(layer_index));
    ObservationSet out = obs;
    const std::size_t idx = obs.layer_points_[layer_index];
    out.layer_points_.erase(out.layer_points_.begin() + static_cast<std::ptrdiff_t>(layer_index));
    out.points_.erase(std::find(out.points_.begin(), out.points_.end(), idx));
    return out;
}

std::size_t prominent_layer(const ObservationSet& obs, const Field& u) {
    const auto& layers = obs.layer_points();
    if (layers.empty()) throw std::invalid_argument("prominent_layer: set has no transition layers");
    const auto& pts = obs.points();
    std::size_t best = 0;
    double best_peak = -1.0;
    std::size_t best_gap = 0;
    for (std::size_t i = 0; i < layers.size(); ++i) {
        const auto at = static_cast<std::size_t>(std::lower_bound(pts.begin(), pts.end(), layers[i]) - pts.begin());
        const std::size_t lo = at > 0 ? pts[at - 1] : pts[at];
        const std::size_t hi = at + 1 < pts.size() ? pts[at + 1] : pts[at];
        const double peak = std::max(std::abs(u.values.at(lo)), std::abs(u.values.at(hi)));
        const std::size_t gap = hi - lo;
        const bool tie = std::abs(peak - best_peak) <= 1e-9 * std::max(1.0, peak);
        if ((!tie && peak > best_peak) || (tie && gap > best_gap)) {
            best = i;
            best_peak = peak;
            best_gap = gap;
        }
    }
    return best;
}

ObservationSet insert_node(const ObservationSet& obs, std::size_t index, bool is_layer) {
    if (obs.kind() == ObservationKind::SweepingProbe)
        throw std::invalid_argument("insert_node: probe clusters are rebuilt from their motion");
    if (index > obs.n_intervals()) throw std::out_of_range("insert_node: index outside the mesh");
    ObservationSet out = obs;
    auto it = std::lower_bound(out.points_.begin(), out.points_.end(), index);
    if (it == out.points_.end() || *it != index) out.points_.insert(it, index);
    if (is_layer) {
        auto lt = std::lower_bound(out.layer_points_.begin(), out.layer_points_.end(), index);
        if (lt == out.layer_points_.end() || *lt != index) out.layer_points_.insert(lt, index);
    }
    return out;
}

ObservationSet exclude_interval(const ObservationSet& obs, std::size_t lo, std::size_t hi) {
    if (obs.kind() == ObservationKind::SweepingProbe)
        throw std::invalid_argument("exclude_interval: not defined for a moving probe");
    if (lo >= hi || hi > obs.n_intervals()) throw std::invalid_argument("exclude_interval: bad interval");
    std::vector<std::size_t> kept;
    for (std::size_t p : obs.points())
        if (p <= lo || p >= hi) kept.push_back(p);
    return ObservationSet::custom(obs.n_intervals(), std::move(kept));
}

}  // namespace acda
