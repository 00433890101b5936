#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "acda/solver.hpp"

namespace acda {

enum class ObservationKind {
    UniformStatic,
    LayerBased,
    SweepingProbe,
    Custom,  ///< hand-edited static set, e.g. a full mesh with one interval removed
};

std::string_view to_string(ObservationKind kind);
ObservationKind parse_observation_kind(std::string_view text);

/// A finite set of measurement mesh indices plus how it moves in time.
///
/// Static kinds interpolate across every gap between consecutive nodes. A
/// sweeping probe only interpolates between adjacent mesh indices, so a
/// probe split by the periodic wrap becomes two independent runs and the
/// interpolant is zero away from the probe.
class ObservationSet {
public:
    ObservationSet() = default;

    /// m nodes at round(j N / (m - 1)), j = 0..m-1, ties rounding down.
    /// m = 1 places a single node at the midpoint.
    static ObservationSet uniform(std::size_t n_intervals, std::size_t m);

    /// Every mesh index 0..N.
    static ObservationSet full_mesh(std::size_t n_intervals);

    /// m consecutive indices starting at `start`, moving `speed` mesh cells per step.
    /// Positions wrap modulo N (x = 0 and x = L are the same point of the periodic sweep).
    static ObservationSet sweeping_probe(std::size_t n_intervals, std::size_t m, double speed,
                                         std::size_t start = 0);

    /// A static set from arbitrary indices (deduplicated and sorted).
    static ObservationSet custom(std::size_t n_intervals, std::vector<std::size_t> points);

    ObservationKind kind() const { return kind_; }
    std::size_t n_intervals() const { return n_intervals_; }
    const std::vector<std::size_t>& points() const { return points_; }
    std::size_t size() const { return points_.size(); }
    bool empty() const { return points_.empty(); }

    /// Subset of points that sit in transition layers (layer-based sets only).
    const std::vector<std::size_t>& layer_points() const { return layer_points_; }

    double probe_speed() const { return speed_; }
    /// Total displacement of the probe, in mesh cells, since construction.
    double probe_offset() const { return static_cast<double>(steps_) * speed_; }
    std::size_t probe_start() const { return start_; }
    std::uint64_t probe_steps() const { return steps_; }

    /// True when the interpolant spans the gap between points()[i] and points()[i+1].
    bool bridges(std::size_t i) const;

    /// One-line CSV record: kind,m,speed,i0;i1;...
    std::string to_csv_record() const;
    static ObservationSet from_csv_record(std::string_view record, std::size_t n_intervals);

    friend ObservationSet layer_based_placement(const Field& u, const SolverConfig& config);
    friend ObservationSet remove_layer_coverage(const ObservationSet& obs, std::size_t layer_index);
    friend ObservationSet insert_node(const ObservationSet& obs, std::size_t index, bool is_layer);

    /// Moves a probe forward one step in place.
    void advance();

    bool operator==(const ObservationSet&) const = default;

private:
    void rebuild_probe_points();

    ObservationKind kind_ = ObservationKind::Custom;
    std::size_t n_intervals_ = 0;
    std::vector<std::size_t> points_;
    std::vector<std::size_t> layer_points_;
    double speed_ = 0.0;
    std::size_t start_ = 0;
    std::size_t cluster_ = 0;
    std::uint64_t steps_ = 0;
};

/// Piecewise-linear interpolant of sampled values on the observation nodes,
/// evaluable at any x in [0, L].
class Interpolant {
public:
    Interpolant(const Field& f, const ObservationSet& obs);

    const std::vector<double>& nodes() const { return nodes_; }
    const std::vector<double>& node_values() const { return values_; }
    bool in_support(double x) const;

    double operator()(double x) const;

private:
    std::vector<double> nodes_;
    std::vector<double> values_;
    std::vector<bool> bridged_;  // bridged_[i]: segment (i, i+1) is part of the support
};

/// I_h(f; X) sampled on the full mesh; zero outside the support.
Field interpolate(const Field& f, const ObservationSet& obs);

/// out[k] += scale * I_h(f; X)(x_k) for every k in the support. Touches only the support.
void accumulate_interpolant(std::span<const double> f, const ObservationSet& obs, double scale,
                            std::span<double> out);

/// Advance a sweeping probe by one time step. Non-probe sets are returned unchanged.
ObservationSet advance_probe(const ObservationSet& obs, const SolverConfig& config);

/// One node in every transition layer (zero crossing), one at the |u| maximum of
/// every structure between crossings, and one at each endpoint.
ObservationSet layer_based_placement(const Field& u, const SolverConfig& config);

/// Removes the layer_index-th transition-layer node of a layer-based set.
ObservationSet remove_layer_coverage(const ObservationSet& obs, std::size_t layer_index);

/// Index into layer_points() of a layer bounding the dominant structure (largest
/// |u| at the neighbouring maxima). Ties go to the layer with the widest node gap.
std::size_t prominent_layer(const ObservationSet& obs, const Field& u);

/// Adds a node; `is_layer` marks it as a transition-layer node.
ObservationSet insert_node(const ObservationSet& obs, std::size_t index, bool is_layer);

/// Removes every node strictly inside (lo, hi), keeping the interval's endpoints.
ObservationSet exclude_interval(const ObservationSet& obs, std::size_t lo, std::size_t hi);

}  // namespace acda
