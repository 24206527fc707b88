#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "rcgossip/analytic.hpp"
#include "rcgossip/core.hpp"

namespace rcgossip {

/// Mixes a user seed with a stream index into an independent 64-bit key.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

/// SplitMix64 generator keyed by (seed, stream). Each renewal cycle owns
/// its own stream, so results do not depend on how cycles are scheduled.
class StreamRng {
public:
    using result_type = std::uint64_t;

    StreamRng(std::uint64_t seed, std::uint64_t stream) : state_(mix_seed(seed, stream)) {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return ~result_type{0}; }

    result_type operator()();

    /// Uniform on [0, 1) with 53 random bits.
    double uniform();

    /// Exponential with the given positive rate.
    double exponential(double rate);

private:
    std::uint64_t state_;
};

/// Versions held by every participant. Version counters only flow
/// downstream: source -> clusterheads -> end-nodes, or source -> end-nodes
/// in a flat network.
struct SimState {
    std::uint64_t source_version = 0;
    std::vector<std::uint64_t> ch_versions;
    std::vector<std::uint64_t> node_versions;
    double clock = 0.0;
    std::vector<double> fresh_time_accum;
};

struct SimEvent {
    enum class Kind { self_update, ch_delivery, node_delivery };
    Kind kind = Kind::self_update;
    double time = 0.0;
    int target = -1;          // CH or end-node index; -1 for self_update
    bool became_fresh = false;  // target now holds the source's version
};

/// Event-driven engine over one network. After every event the total
/// intensity is recomputed and a single exponential is drawn, which keeps
/// rate-changing policies exact by memorylessness.
class GossipSimulation {
public:
    explicit GossipSimulation(const NetworkSpec& spec);

    /// Start-of-cycle state: the source just self-updated and nothing is fresh.
    void reset();

    /// Advances to the next event. Returns nullopt, with the clock set to
    /// `until`, when the next event would fall past `until`.
    std::optional<SimEvent> step(StreamRng& rng,
                                 double until = std::numeric_limits<double>::infinity());

    /// Credits every currently fresh node with its fresh time up to now.
    void flush_fresh_time();

    const SimState& state() const { return state_; }
    int end_nodes() const { return static_cast<int>(state_.node_versions.size()); }
    int fresh_count() const { return fresh_count_; }
    bool is_fresh(int node) const
    {
        return state_.node_versions[node] == state_.source_version;
    }

private:
    struct Group {
        GossipPolicy policy;
        double source_rate;
        double gossip_rate;
        int feeder;                // -1 for the source, otherwise a CH index
        bool members_are_chs;
        int first_member;
        std::vector<int> order;    // first `synced` entries hold the feeder's version
        int synced = 0;
    };

    std::uint64_t feeder_version(const Group& g) const;
    double group_rate(const Group& g) const;
    void deliver(Group& g, int position, SimEvent& event);
    void self_update();

    NetworkSpec spec_;
    SimState state_;
    std::vector<Group> groups_;  // groups_[0] is fed by the source
    std::vector<double> fresh_since_;
    std::vector<double> group_rates_;
    int fresh_count_ = 0;
};

struct CycleOutcome {
    std::vector<bool> updated;
    std::vector<double> fresh_duration;
    double cycle_length = 0.0;
};

/// Runs one renewal cycle from the all-stale state until the source
/// self-updates. Throws std::invalid_argument for an invalid spec.
CycleOutcome simulate_cycle(const NetworkSpec& spec, StreamRng& rng);

enum class Estimator { cycle, time_average };

struct FreshnessEstimate {
    double p_hat = 0.0;
    double std_error = 0.0;
    double ci_lo = 0.0;
    double ci_hi = 0.0;
    double samples = 0.0;  // cycles, or horizon length for time averages
    std::uint64_t seed = 0;
    Estimator estimator = Estimator::cycle;
    std::vector<double> per_node;
    std::optional<std::string> warning;

    friend bool operator==(const FreshnessEstimate&, const FreshnessEstimate&) = default;
};

/// Mean of the per-cycle update indicators over all nodes and cycles.
/// The binomial standard error uses num_cycles as the sample count, which
/// is conservative since node indicators within a cycle are correlated.
/// `threads` == 0 picks the hardware concurrency; results do not depend on it.
FreshnessEstimate estimate_freshness_cycles(const NetworkSpec& spec, std::int64_t num_cycles,
                                            std::uint64_t seed, unsigned threads = 0);

/// Fraction of time fresh along one long trajectory, averaged over nodes.
/// Standard error by batch means over `batches` equal time slices.
FreshnessEstimate estimate_freshness_time(const NetworkSpec& spec, double horizon,
                                          std::uint64_t seed, int batches = 50);

struct DecompositionReport {
    FreshnessEstimate simulated;
    ClusteredBreakdown analytic;
    double z = 0.0;
};

/// Full two-level simulation against p_CH · p_node|CH.
DecompositionReport decomposition_check(const NetworkSpec& spec, std::int64_t num_cycles,
                                        std::uint64_t seed);

/// (estimate − target) / std_error, with 0 / ±inf when the error is zero.
double z_score(const FreshnessEstimate& estimate, double target);

}  // namespace rcgossip
