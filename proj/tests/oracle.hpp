#pragma once

// Brute-force reference values for the tests. Everything here works on the
// full set of fresh nodes (2^n states) with rates built link by link from
// the policy description, so it shares no code with the library's u(j)
// function or its renewal recursion.

#include <cstdint>
#include <vector>

#include "rcgossip/core.hpp"

namespace oracle {

struct PolicyTraits {
    bool source_rc;
    bool gossip;
    bool gossip_rc;
};

inline PolicyTraits traits(rcgossip::GossipPolicy p)
{
    using enum rcgossip::GossipPolicy;
    switch (p) {
    case DC_noRC: return {false, false, false};
    case DC_RC: return {true, false, false};
    case FC_noRC: return {false, true, false};
    case FC_sRC: return {true, true, false};
    case FC_allRC: return {true, true, true};
    }
    return {};
}

/// Rate at which stale node `target` receives the current version when the
/// nodes in `fresh` hold it. Every sender spreads its total rate evenly:
/// over all receivers (traditional) or over the stale ones only (RC).
inline long double link_rate(const PolicyTraits& t, int n, std::uint32_t fresh, long double source,
                             long double gossip)
{
    const int fresh_count = __builtin_popcount(fresh);
    const int stale_count = n - fresh_count;
    long double rate = t.source_rc ? source / stale_count : source / n;
    if (t.gossip && n > 1) {
        const long double per_sender = t.gossip_rc ? gossip / stale_count : gossip / (n - 1);
        rate += fresh_count * per_sender;
    }
    return rate;
}

/// Probability that node 0 is updated before the source self-updates, by
/// first-step analysis over subsets of fresh nodes (n <= 16).
inline long double flat_capture_probability(rcgossip::GossipPolicy policy, int n,
                                            long double source, long double gossip,
                                            long double lambda_e)
{
    const PolicyTraits t = traits(policy);
    const std::uint32_t full = (1u << n) - 1;
    // value[S] for S not containing node 0; fill from larger sets down.
    std::vector<long double> value(full + 1, 0.0L);
    for (std::int64_t s = full; s >= 0; --s) {
        const auto set = static_cast<std::uint32_t>(s);
        if (set & 1u) continue;
        const long double r = link_rate(t, n, set, source, gossip);
        long double total = lambda_e;
        long double acc = r;  // node 0 itself is updated
        total += r;
        for (int i = 1; i < n; ++i) {
            if (set & (1u << i)) continue;
            total += r;
            acc += r * value[set | (1u << i)];
        }
        value[set] = acc / total;
    }
    return value[0];
}

/// Exact freshness of end-node 0 (in cluster 0) of a clustered network.
/// State: which CHs hold the new version, and which nodes of cluster 0 do.
/// Other clusters never influence node 0, but other CHs do under DC_RC.
inline long double clustered_capture_probability(rcgossip::GossipPolicy source_policy,
                                                 rcgossip::GossipPolicy cluster_policy, int m,
                                                 int k, const rcgossip::Rates& r)
{
    const PolicyTraits src = traits(source_policy);
    const PolicyTraits clu = traits(cluster_policy);
    const std::uint32_t ch_full = (1u << m) - 1;
    const std::uint32_t node_full = (1u << k) - 1;
    auto index = [&](std::uint32_t chs, std::uint32_t nodes) { return chs * (node_full + 1) + nodes; };
    std::vector<long double> value((ch_full + 1) * (node_full + 1), 0.0L);

    for (std::int64_t c = ch_full; c >= 0; --c) {
        const auto chs = static_cast<std::uint32_t>(c);
        const bool ch0_fresh = chs & 1u;
        for (std::int64_t v = node_full; v >= 0; --v) {
            const auto nodes = static_cast<std::uint32_t>(v);
            if (nodes & 1u) continue;            // node 0 already fresh: absorbing
            if (!ch0_fresh && nodes != 0) continue;  // unreachable
            long double total = r.lambda_e;
            long double acc = 0.0L;
            if (chs != ch_full) {
                const long double to_ch = link_rate(src, m, chs, r.lambda_s, 0.0L);
                for (int j = 0; j < m; ++j) {
                    if (chs & (1u << j)) continue;
                    total += to_ch;
                    // CH 0 turning fresh starts cluster 0 from scratch
                    acc += to_ch * value[index(chs | (1u << j), j == 0 ? 0 : nodes)];
                }
            }
            if (ch0_fresh) {
                const long double to_node = link_rate(clu, k, nodes, r.lambda_c, r.lambda_g);
                total += to_node;
                acc += to_node;  // node 0
                for (int i = 1; i < k; ++i) {
                    if (nodes & (1u << i)) continue;
                    total += to_node;
                    acc += to_node * value[index(chs, nodes | (1u << i))];
                }
            }
            value[index(chs, nodes)] = acc / total;
        }
    }
    return value[index(0, 0)];
}

}  // namespace oracle
