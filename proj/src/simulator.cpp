#include "rcgossip/simulator.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <thread>

namespace rcgossip {

namespace {

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

std::uint64_t splitmix_finalize(std::uint64_t z)
{
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Stream used by the single long trajectory of the time-average estimator.
constexpr std::uint64_t kTrajectoryStream = ~std::uint64_t{0};

constexpr double kZ95 = 1.959963984540054;

void fill_interval(FreshnessEstimate& e)
{
    e.ci_lo = std::max(0.0, e.p_hat - kZ95 * e.std_error);
    e.ci_hi = std::min(1.0, e.p_hat + kZ95 * e.std_error);
}

}  // namespace

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream)
{
    return splitmix_finalize(splitmix_finalize(seed + kGolden) ^ (stream * kGolden + 1));
}

StreamRng::result_type StreamRng::operator()()
{
    state_ += kGolden;
    return splitmix_finalize(state_);
}

double StreamRng::uniform()
{
    return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
}

double StreamRng::exponential(double rate)
{
    return -std::log1p(-uniform()) / rate;
}

GossipSimulation::GossipSimulation(const NetworkSpec& spec) : spec_(spec)
{
    require_valid(spec);
    const Rates& r = spec.rates;
    auto iota = [](int first, int count) {
        std::vector<int> v(count);
        std::iota(v.begin(), v.end(), first);
        return v;
    };

    if (const auto* flat = std::get_if<FlatShape>(&spec.shape)) {
        groups_.push_back({flat->policy, rate_of(r, flat->source_rate),
                           rate_of(r, flat->gossip_rate), -1, false, 0, iota(0, flat->n)});
    } else {
        const auto& c = std::get<ClusteredShape>(spec.shape);
        groups_.push_back({c.source_policy, r.lambda_s, 0.0, -1, true, 0, iota(0, c.m)});
        for (int ch = 0; ch < c.m; ++ch) {
            groups_.push_back(
                {c.cluster_policy, r.lambda_c, r.lambda_g, ch, false, ch * c.k, iota(ch * c.k, c.k)});
        }
        state_.ch_versions.assign(c.m, 0);
    }
    state_.node_versions.assign(spec.end_nodes(), 0);
    state_.fresh_time_accum.assign(spec.end_nodes(), 0.0);
    fresh_since_.assign(spec.end_nodes(), 0.0);
    group_rates_.assign(groups_.size(), 0.0);
    reset();
}

void GossipSimulation::reset()
{
    state_.source_version = 1;
    std::fill(state_.ch_versions.begin(), state_.ch_versions.end(), 0);
    std::fill(state_.node_versions.begin(), state_.node_versions.end(), 0);
    std::fill(state_.fresh_time_accum.begin(), state_.fresh_time_accum.end(), 0.0);
    state_.clock = 0.0;
    fresh_count_ = 0;
    for (auto& g : groups_) {
        std::iota(g.order.begin(), g.order.end(), g.first_member);
        // Members start on the feeder's version unless the feeder is the source.
        g.synced = g.feeder < 0 ? 0 : static_cast<int>(g.order.size());
    }
}

std::uint64_t GossipSimulation::feeder_version(const Group& g) const
{
    return g.feeder < 0 ? state_.source_version : state_.ch_versions[g.feeder];
}

double GossipSimulation::group_rate(const Group& g) const
{
    const int size = static_cast<int>(g.order.size());
    if (g.synced >= size) return 0.0;
    return (size - g.synced) *
           per_stale_rate(g.policy, g.source_rate, g.gossip_rate, size, g.synced);
}

void GossipSimulation::deliver(Group& g, int position, SimEvent& event)
{
    std::swap(g.order[position], g.order[g.synced]);
    const int member = g.order[g.synced];
    ++g.synced;
    const std::uint64_t version = feeder_version(g);
    event.target = member;

    if (g.members_are_chs) {
        event.kind = SimEvent::Kind::ch_delivery;
        state_.ch_versions[member] = version;
        event.became_fresh = version == state_.source_version;
        // every node of this cluster now lacks the CH's new version
        groups_[member + 1].synced = 0;
        return;
    }

    event.kind = SimEvent::Kind::node_delivery;
    assert(state_.node_versions[member] < version);
    state_.node_versions[member] = version;
    event.became_fresh = version == state_.source_version;
    if (event.became_fresh) {
        ++fresh_count_;
        fresh_since_[member] = state_.clock;
    }
}

void GossipSimulation::self_update()
{
    for (std::size_t i = 0; i < state_.node_versions.size(); ++i) {
        if (state_.node_versions[i] == state_.source_version) {
            state_.fresh_time_accum[i] += state_.clock - fresh_since_[i];
        }
    }
    ++state_.source_version;
    groups_.front().synced = 0;
    fresh_count_ = 0;
}

void GossipSimulation::flush_fresh_time()
{
    for (std::size_t i = 0; i < state_.node_versions.size(); ++i) {
        if (state_.node_versions[i] == state_.source_version) {
            state_.fresh_time_accum[i] += state_.clock - fresh_since_[i];
            fresh_since_[i] = state_.clock;
        }
    }
}

std::optional<SimEvent> GossipSimulation::step(StreamRng& rng, double until)
{
    const double lambda_e = spec_.rates.lambda_e;
    double total = lambda_e;
    auto& rates = group_rates_;
    for (std::size_t g = 0; g < groups_.size(); ++g) {
        rates[g] = group_rate(groups_[g]);
        total += rates[g];
    }

    const double next = state_.clock + rng.exponential(total);
    if (next > until) {
        state_.clock = until;
        return std::nullopt;
    }
    state_.clock = next;

    SimEvent event;
    event.time = next;
    double pick = rng.uniform() * total;
    if (pick < lambda_e) {
        self_update();
        return event;
    }
    pick -= lambda_e;

    std::size_t chosen = 0;
    while (chosen + 1 < groups_.size() && (rates[chosen] == 0.0 || pick >= rates[chosen])) {
        pick -= rates[chosen];
        ++chosen;
    }
    if (rates[chosen] == 0.0) {
        // rounding pushed `pick` past the last active group; take the last one
        chosen = groups_.size();
        while (rates[--chosen] == 0.0) {}
    }
    Group& g = groups_[chosen];
    const int stale = static_cast<int>(g.order.size()) - g.synced;
    const int offset = std::min(stale - 1, static_cast<int>(rng.uniform() * stale));
    deliver(g, g.synced + offset, event);
    return event;
}

namespace {

void run_cycle(GossipSimulation& sim, StreamRng& rng, CycleOutcome& out)
{
    sim.reset();
    const int n = sim.end_nodes();
    out.updated.assign(n, false);
    out.fresh_duration.assign(n, 0.0);
    std::vector<double> fresh_at(n, 0.0);
    for (;;) {
        const SimEvent e = *sim.step(rng);
        if (e.kind == SimEvent::Kind::self_update) {
            out.cycle_length = e.time;
            break;
        }
        if (e.kind == SimEvent::Kind::node_delivery && e.became_fresh) {
            out.updated[e.target] = true;
            fresh_at[e.target] = e.time;
        }
    }
    for (int i = 0; i < n; ++i) {
        if (out.updated[i]) out.fresh_duration[i] = out.cycle_length - fresh_at[i];
    }
}

}  // namespace

CycleOutcome simulate_cycle(const NetworkSpec& spec, StreamRng& rng)
{
    GossipSimulation sim(spec);
    CycleOutcome out;
    run_cycle(sim, rng, out);
    return out;
}

FreshnessEstimate estimate_freshness_cycles(const NetworkSpec& spec, std::int64_t num_cycles,
                                            std::uint64_t seed, unsigned threads)
{
    if (num_cycles < 1) throw std::domain_error("estimate_freshness_cycles: num_cycles must be >= 1");
    require_valid(spec);
    const int n = spec.end_nodes();

    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::int64_t>(threads, std::max<std::int64_t>(1, num_cycles / 1000)));

    std::vector<std::vector<std::int64_t>> counts(threads, std::vector<std::int64_t>(n, 0));
    auto work = [&](unsigned worker) {
        GossipSimulation sim(spec);
        CycleOutcome outcome;
        const std::int64_t begin = num_cycles * worker / threads;
        const std::int64_t end = num_cycles * (worker + 1) / threads;
        for (std::int64_t c = begin; c < end; ++c) {
            StreamRng rng(seed, static_cast<std::uint64_t>(c));
            run_cycle(sim, rng, outcome);
            for (int i = 0; i < n; ++i) counts[worker][i] += outcome.updated[i] ? 1 : 0;
        }
    };
    {
        std::vector<std::jthread> pool;
        for (unsigned w = 1; w < threads; ++w) pool.emplace_back(work, w);
        work(0);
    }

    std::vector<std::int64_t> per_node(n, 0);
    for (const auto& c : counts) {
        for (int i = 0; i < n; ++i) per_node[i] += c[i];
    }
    const std::int64_t total = std::accumulate(per_node.begin(), per_node.end(), std::int64_t{0});

    FreshnessEstimate e;
    e.estimator = Estimator::cycle;
    e.seed = seed;
    e.samples = static_cast<double>(num_cycles);
    e.p_hat = static_cast<double>(total) / (static_cast<double>(n) * num_cycles);
    e.std_error = std::sqrt(e.p_hat * (1.0 - e.p_hat) / num_cycles);
    e.per_node.reserve(n);
    for (auto c : per_node) e.per_node.push_back(static_cast<double>(c) / num_cycles);
    fill_interval(e);
    return e;
}

FreshnessEstimate estimate_freshness_time(const NetworkSpec& spec, double horizon,
                                          std::uint64_t seed, int batches)
{
    if (!(horizon > 0.0) || !std::isfinite(horizon)) {
        throw std::domain_error("estimate_freshness_time: horizon must be finite and > 0");
    }
    if (batches < 2) throw std::domain_error("estimate_freshness_time: need at least 2 batches");

    GossipSimulation sim(spec);
    StreamRng rng(seed, kTrajectoryStream);
    const int n = sim.end_nodes();
    const double width = horizon / batches;
    std::vector<double> batch_area(batches, 0.0);

    auto integrate = [&](double from, double to, int fresh) {
        if (fresh == 0) return;
        while (from < to) {
            const int b = std::min(batches - 1, static_cast<int>(from / width));
            const double edge = b == batches - 1 ? to : std::min(to, (b + 1) * width);
            batch_area[b] += fresh * (edge - from);
            from = edge;
        }
    };

    for (;;) {
        const double before = sim.state().clock;
        const int fresh = sim.fresh_count();
        const auto event = sim.step(rng, horizon);
        integrate(before, sim.state().clock, fresh);
        if (!event) break;
    }
    sim.flush_fresh_time();

    FreshnessEstimate e;
    e.estimator = Estimator::time_average;
    e.seed = seed;
    e.samples = horizon;
    std::vector<double> means(batches);
    for (int b = 0; b < batches; ++b) means[b] = batch_area[b] / (width * n);
    e.p_hat = std::accumulate(means.begin(), means.end(), 0.0) / batches;
    double ss = 0.0;
    for (double m : means) ss += (m - e.p_hat) * (m - e.p_hat);
    e.std_error = std::sqrt(ss / (batches - 1) / batches);
    for (double t : sim.state().fresh_time_accum) e.per_node.push_back(t / horizon);
    fill_interval(e);
    if (horizon < 100.0 / spec.rates.lambda_e) {
        e.warning = "horizon " + std::to_string(horizon) + " spans fewer than 100 mean cycles";
    }
    return e;
}

double z_score(const FreshnessEstimate& estimate, double target)
{
    const double diff = estimate.p_hat - target;
    if (estimate.std_error > 0.0) return diff / estimate.std_error;
    if (diff == 0.0) return 0.0;
    return diff > 0 ? std::numeric_limits<double>::infinity()
                    : -std::numeric_limits<double>::infinity();
}

DecompositionReport decomposition_check(const NetworkSpec& spec, std::int64_t num_cycles,
                                        std::uint64_t seed)
{
    DecompositionReport report;
    report.analytic = clustered_freshness(spec);
    report.simulated = estimate_freshness_cycles(spec, num_cycles, seed);
    report.z = z_score(report.simulated, report.analytic.p);
    return report;
}

}  // namespace rcgossip
