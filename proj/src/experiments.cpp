#include "rcgossip/experiments.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "rcgossip/simulator.hpp"

namespace rcgossip {

namespace {

using nlohmann::json;

std::string join_problems(const std::vector<std::string>& problems)
{
    std::string msg = "invalid experiment config:";
    for (const auto& p : problems) msg += "\n  " + p;
    return msg;
}

std::string format_short(double v)
{
    char buf[32];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 6);
    return std::string(buf, end);
}

std::string rate_case_name(const Rates& r, bool with_cluster_rate)
{
    std::string s = "e" + format_short(r.lambda_e) + "_s" + format_short(r.lambda_s);
    if (with_cluster_rate) s += "_c" + format_short(r.lambda_c);
    return s + "_g" + format_short(r.lambda_g);
}

void reject_unknown(const json& object, std::initializer_list<std::string_view> allowed,
                    const std::string& where, std::vector<std::string>& problems)
{
    for (const auto& [key, _] : object.items()) {
        bool known = false;
        for (auto a : allowed) known = known || key == a;
        if (!known) problems.push_back(where + ": unknown key '" + key + "'");
    }
}

template <class T>
std::optional<T> read(const json& object, const char* key, const std::string& where,
                      std::vector<std::string>& problems)
{
    if (!object.contains(key)) return std::nullopt;
    try {
        return object.at(key).get<T>();
    } catch (const json::exception&) {
        problems.push_back(where + "." + key + ": wrong type");
        return std::nullopt;
    }
}

std::optional<GossipPolicy> read_policy(const json& value, const std::string& where,
                                        std::vector<std::string>& problems)
{
    if (!value.is_string()) {
        problems.push_back(where + ": policy must be a string");
        return std::nullopt;
    }
    auto p = parse_policy(value.get<std::string>());
    if (!p) problems.push_back(where + ": unknown policy '" + value.get<std::string>() + "'");
    return p;
}

RateCase read_case(const json& c, const std::string& where, std::vector<std::string>& problems)
{
    RateCase out;
    if (!c.is_object()) {
        problems.push_back(where + ": rate case must be an object");
        return out;
    }
    reject_unknown(c, {"label", "alpha", "lambda_e", "lambda_s", "lambda_c", "lambda_g"}, where,
                   problems);
    out.rates.lambda_s = read<double>(c, "lambda_s", where, problems).value_or(1.0);
    out.rates.lambda_c = read<double>(c, "lambda_c", where, problems).value_or(1.0);
    out.rates.lambda_g = read<double>(c, "lambda_g", where, problems).value_or(1.0);
    const auto alpha = read<double>(c, "alpha", where, problems);
    const auto lambda_e = read<double>(c, "lambda_e", where, problems);
    if (alpha && lambda_e) {
        problems.push_back(where + ": alpha and lambda_e are mutually exclusive");
    }
    if (alpha) {
        out.rates.lambda_e = *alpha * out.rates.lambda_s;
    } else {
        out.rates.lambda_e = lambda_e.value_or(1.0);
    }
    if (auto label = read<std::string>(c, "label", where, problems)) {
        out.label = *label;
    } else if (alpha) {
        out.label = "alpha=" + format_short(*alpha);
    } else {
        out.label = rate_case_name(out.rates, true);
    }
    return out;
}

void check_rates(const Rates& r, const std::string& where, std::vector<std::string>& problems)
{
    for (const auto& v : validate(NetworkSpec::flat(1, GossipPolicy::DC_noRC, r))) {
        problems.push_back(where + ": " + v.message);
    }
}

}  // namespace

ConfigError::ConfigError(const std::vector<std::string>& problems)
    : std::invalid_argument(join_problems(problems)), problems_(problems)
{
}

std::string_view to_string(ExperimentMode mode)
{
    switch (mode) {
    case ExperimentMode::flat_sweep_n: return "flat_sweep_n";
    case ExperimentMode::clustered_sweep_k: return "clustered_sweep_k";
    case ExperimentMode::single_point: return "single_point";
    }
    return "?";
}

std::string PolicyChoice::label() const
{
    std::string s(to_string(source));
    if (cluster) s += "+" + std::string(to_string(*cluster));
    return s;
}

ExperimentConfig parse_config(std::string_view json_text)
{
    std::vector<std::string> problems;
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError({std::string("malformed JSON: ") + e.what()});
    }
    if (!doc.is_object()) throw ConfigError({"config root must be a JSON object"});
    reject_unknown(doc,
                   {"name", "mode", "policies", "cases", "n", "n_range", "k", "sim", "output",
                    "plot_dir"},
                   "config", problems);

    ExperimentConfig cfg;
    cfg.name = read<std::string>(doc, "name", "config", problems).value_or(cfg.name);
    if (auto mode = read<std::string>(doc, "mode", "config", problems)) {
        if (*mode == "flat_sweep_n") cfg.mode = ExperimentMode::flat_sweep_n;
        else if (*mode == "clustered_sweep_k") cfg.mode = ExperimentMode::clustered_sweep_k;
        else if (*mode == "single_point") cfg.mode = ExperimentMode::single_point;
        else problems.push_back("config.mode: unknown mode '" + *mode + "'");
    }

    if (doc.contains("policies")) {
        const json& list = doc.at("policies");
        if (!list.is_array()) problems.push_back("config.policies: must be an array");
        for (std::size_t i = 0; list.is_array() && i < list.size(); ++i) {
            const std::string where = "config.policies[" + std::to_string(i) + "]";
            const json& item = list[i];
            PolicyChoice choice;
            if (item.is_array()) {
                if (item.size() != 2) {
                    problems.push_back(where + ": a policy pair needs exactly two entries");
                    continue;
                }
                auto s = read_policy(item[0], where, problems);
                auto c = read_policy(item[1], where, problems);
                if (!s || !c) continue;
                choice = {*s, *c};
            } else {
                auto s = read_policy(item, where, problems);
                if (!s) continue;
                choice = {*s, std::nullopt};
            }
            cfg.policies.push_back(choice);
        }
    }

    if (doc.contains("cases")) {
        const json& list = doc.at("cases");
        if (!list.is_array()) problems.push_back("config.cases: must be an array");
        for (std::size_t i = 0; list.is_array() && i < list.size(); ++i) {
            cfg.cases.push_back(
                read_case(list[i], "config.cases[" + std::to_string(i) + "]", problems));
        }
    }

    cfg.n = read<int>(doc, "n", "config", problems);
    cfg.k = read<int>(doc, "k", "config", problems);
    if (auto range = read<std::vector<int>>(doc, "n_range", "config", problems)) {
        if (range->size() != 2) {
            problems.push_back("config.n_range: expected [from, to]");
        } else {
            cfg.n_from = (*range)[0];
            cfg.n_to = (*range)[1];
        }
    }
    if (doc.contains("sim")) {
        const json& sim = doc.at("sim");
        if (!sim.is_object()) {
            problems.push_back("config.sim: must be an object");
        } else {
            reject_unknown(sim, {"cycles", "seed"}, "config.sim", problems);
            SimSettings s;
            s.cycles = read<std::int64_t>(sim, "cycles", "config.sim", problems).value_or(s.cycles);
            s.seed = read<std::uint64_t>(sim, "seed", "config.sim", problems).value_or(s.seed);
            cfg.sim = s;
        }
    }
    cfg.output = read<std::string>(doc, "output", "config", problems).value_or("");
    cfg.plot_dir = read<std::string>(doc, "plot_dir", "config", problems).value_or("");

    if (!problems.empty()) throw ConfigError(problems);
    if (auto semantic = validate_config(cfg); !semantic.empty()) throw ConfigError(semantic);
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw IoError("cannot read config file " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

std::vector<std::string> validate_config(const ExperimentConfig& cfg)
{
    std::vector<std::string> problems;
    if (cfg.name.empty()) problems.push_back("name: must not be empty");
    for (char ch : cfg.name) {
        if (!(std::isalnum(static_cast<unsigned char>(ch)) || ch == '_' || ch == '-' || ch == '.')) {
            problems.push_back("name: only letters, digits, '_', '-' and '.' are allowed");
            break;
        }
    }
    if (cfg.policies.empty()) problems.push_back("policies: at least one policy is required");
    if (cfg.cases.empty()) problems.push_back("cases: at least one rate case is required");
    for (std::size_t i = 0; i < cfg.cases.size(); ++i) {
        check_rates(cfg.cases[i].rates, "cases[" + std::to_string(i) + "]", problems);
    }

    const bool wants_clusters = cfg.mode == ExperimentMode::clustered_sweep_k ||
                                (cfg.mode == ExperimentMode::single_point && cfg.k.has_value());
    for (std::size_t i = 0; i < cfg.policies.size(); ++i) {
        const auto& p = cfg.policies[i];
        const std::string where = "policies[" + std::to_string(i) + "]";
        if (wants_clusters && !p.clustered()) {
            problems.push_back(where + ": clustered runs need [source, cluster] pairs");
        }
        if (!wants_clusters && p.clustered()) {
            problems.push_back(where + ": flat runs take a single policy name");
        }
        if (p.clustered() && is_fully_connected(p.source)) {
            problems.push_back(where + ": CHs form a DC network: source policy must be DC_noRC or DC_RC");
        }
    }

    switch (cfg.mode) {
    case ExperimentMode::flat_sweep_n:
        if (!cfg.n_from || !cfg.n_to) {
            problems.push_back("n_range: required for flat_sweep_n");
        } else if (*cfg.n_from < 1 || *cfg.n_to < *cfg.n_from) {
            problems.push_back("n_range: must satisfy 1 <= from <= to");
        }
        if (cfg.n) problems.push_back("n: use n_range for flat_sweep_n");
        if (cfg.k) problems.push_back("k: not used by flat_sweep_n");
        break;
    case ExperimentMode::clustered_sweep_k:
        if (!cfg.n || *cfg.n < 1) problems.push_back("n: required and >= 1 for clustered_sweep_k");
        if (cfg.n_from || cfg.n_to) problems.push_back("n_range: not used by clustered_sweep_k");
        if (cfg.k) problems.push_back("k: clustered_sweep_k scans every divisor of n");
        break;
    case ExperimentMode::single_point:
        if (!cfg.n || *cfg.n < 1) problems.push_back("n: required and >= 1 for single_point");
        if (cfg.n_from || cfg.n_to) problems.push_back("n_range: not used by single_point");
        if (cfg.k && cfg.n && (*cfg.k < 1 || *cfg.n % *cfg.k != 0)) {
            problems.push_back("k: must divide n (m·k = n)");
        }
        break;
    }
    if (cfg.sim && cfg.sim->cycles < 1) problems.push_back("sim.cycles: must be >= 1");
    return problems;
}

namespace {

ResultRow flat_row(const std::string& experiment, GossipPolicy policy, int n, const Rates& r)
{
    ResultRow row;
    row.experiment = experiment;
    row.policy_source = std::string(to_string(policy));
    row.n = n;
    row.lambda_e = r.lambda_e;
    row.lambda_s = r.lambda_s;
    row.lambda_g = r.lambda_g;
    row.p_oracle = flat_freshness(policy, r.lambda_s, r.lambda_g, r.lambda_e, n);
    row.p_analytic = closed_form_freshness(policy, r.lambda_s, r.lambda_g, r.lambda_e, n);
    return row;
}

ResultRow clustered_row(const std::string& experiment, const PolicyChoice& policy, int n, int k,
                        const Rates& r)
{
    ResultRow row;
    row.experiment = experiment;
    row.policy_source = std::string(to_string(policy.source));
    row.policy_cluster = std::string(to_string(*policy.cluster));
    row.n = n;
    row.k = k;
    row.m = n / k;
    row.lambda_e = r.lambda_e;
    row.lambda_s = r.lambda_s;
    row.lambda_c = r.lambda_c;
    row.lambda_g = r.lambda_g;
    row.p_oracle = clustered_freshness(n / k, k, policy.source, *policy.cluster, r).p;
    row.p_analytic = tabulated_clustered_freshness(policy.source, *policy.cluster, n / k, k, r);
    return row;
}

NetworkSpec spec_of(const ResultRow& row)
{
    const Rates r{row.lambda_e, row.lambda_s, row.lambda_c.value_or(0.0), row.lambda_g};
    if (row.policy_cluster) {
        return NetworkSpec::clustered(*row.m, *row.k, policy_from_string(row.policy_source),
                                      policy_from_string(*row.policy_cluster), r);
    }
    return NetworkSpec::flat(row.n, policy_from_string(row.policy_source), r);
}

}  // namespace

std::vector<ResultRow> evaluate_grid(const ExperimentConfig& cfg)
{
    if (auto problems = validate_config(cfg); !problems.empty()) throw ConfigError(problems);

    std::vector<ResultRow> rows;
    for (const auto& rc : cfg.cases) {
        for (const auto& policy : cfg.policies) {
            switch (cfg.mode) {
            case ExperimentMode::flat_sweep_n:
                for (int n = *cfg.n_from; n <= *cfg.n_to; ++n) {
                    rows.push_back(flat_row(cfg.name, policy.source, n, rc.rates));
                }
                break;
            case ExperimentMode::clustered_sweep_k:
                for (int k : divisors(*cfg.n)) {
                    rows.push_back(clustered_row(cfg.name, policy, *cfg.n, k, rc.rates));
                }
                break;
            case ExperimentMode::single_point:
                rows.push_back(policy.clustered()
                                   ? clustered_row(cfg.name, policy, *cfg.n, *cfg.k, rc.rates)
                                   : flat_row(cfg.name, policy.source, *cfg.n, rc.rates));
                break;
            }
        }
    }

    for (std::size_t i = 0; i < rows.size(); ++i) {
        auto& row = rows[i];
        if (row.p_analytic && std::abs(*row.p_analytic - row.p_oracle) > kOracleTolerance) {
            throw std::logic_error("closed form and recursion disagree for " + row.policy_source +
                                   " at n=" + std::to_string(row.n));
        }
        if (!cfg.sim) continue;
        const std::uint64_t seed = mix_seed(cfg.sim->seed, i);
        const auto est = estimate_freshness_cycles(spec_of(row), cfg.sim->cycles, seed);
        row.p_sim = est.p_hat;
        row.sim_ci_lo = est.ci_lo;
        row.sim_ci_hi = est.ci_hi;
        row.cycles = cfg.sim->cycles;
        row.seed = seed;
    }
    return rows;
}

std::vector<ResultRow> run_experiment(const ExperimentConfig& cfg)
{
    auto rows = evaluate_grid(cfg);
    if (!cfg.output.empty()) write_text_file(cfg.output, to_csv(rows));
    if (!cfg.plot_dir.empty()) {
        std::vector<SeriesKey> expected;
        for (const auto& rc : cfg.cases) {
            for (const auto& p : cfg.policies) {
                expected.push_back({cfg.name, p.label(), rate_case_name(rc.rates, p.clustered())});
            }
        }
        emit_plot_data(rows, cfg.plot_dir, expected);
    }
    return rows;
}

std::string SeriesKey::file_name() const
{
    return experiment + "__" + policy + "__" + rate_case + ".dat";
}

SeriesKey series_key(const ResultRow& row)
{
    std::string policy = row.policy_source;
    if (row.policy_cluster) policy += "+" + *row.policy_cluster;
    const Rates r{row.lambda_e, row.lambda_s, row.lambda_c.value_or(0.0), row.lambda_g};
    return {row.experiment, policy, rate_case_name(r, row.lambda_c.has_value())};
}

bool OptimalKReport::all_passed() const
{
    for (const auto& c : checks) {
        if (!c.passed) return false;
    }
    return true;
}

std::string OptimalKReport::to_text() const
{
    std::ostringstream out;
    out << "optimal cluster size, n = " << n << "\n";
    out << "case\tpolicy\tk*\tm*\tp*\n";
    char p[32];
    for (const auto& e : entries) {
        std::snprintf(p, sizeof p, "%.10g", e.optimum.p_star);
        out << e.rate_case << '\t' << e.policy.label() << '\t' << e.optimum.k_star << '\t'
            << e.optimum.m_star << '\t' << p << '\n';
    }
    for (const auto& w : winners) out << "winner  " << w << '\n';
    for (const auto& c : checks) {
        out << (c.passed ? "[PASS] " : "[FAIL] ") << c.rate_case << ": " << c.claim << " ("
            << c.detail << ")\n";
    }
    return out.str();
}

OptimalKReport report_optimal_k(const ExperimentConfig& cfg)
{
    if (cfg.mode != ExperimentMode::clustered_sweep_k) {
        throw ConfigError({"mode: optimal-k needs a clustered_sweep_k config"});
    }
    if (auto problems = validate_config(cfg); !problems.empty()) throw ConfigError(problems);

    using enum GossipPolicy;
    OptimalKReport report;
    report.n = *cfg.n;
    char buf[160];

    for (const auto& rc : cfg.cases) {
        std::vector<const OptimalKEntry*> in_case;
        const std::size_t first = report.entries.size();
        for (const auto& p : cfg.policies) {
            report.entries.push_back(
                {rc.label, rc.rates, p, optimal_cluster_size(*cfg.n, rc.rates, p.source, *p.cluster)});
        }
        auto find = [&](GossipPolicy s, GossipPolicy c) -> const OptimalKEntry* {
            for (std::size_t i = first; i < report.entries.size(); ++i) {
                if (report.entries[i].policy == PolicyChoice{s, c}) return &report.entries[i];
            }
            return nullptr;
        };

        const OptimalKEntry* best = &report.entries[first];
        for (std::size_t i = first; i < report.entries.size(); ++i) {
            if (report.entries[i].optimum.p_star > best->optimum.p_star) best = &report.entries[i];
        }
        report.winners.push_back(rc.label + ": " + best->policy.label() + " wins");

        auto dominates = [&](const OptimalKEntry* champion, auto&& is_rival,
                             const std::string& claim) {
            if (champion == nullptr) return;
            bool any = false;
            bool ok = true;
            double margin = std::numeric_limits<double>::infinity();
            for (std::size_t i = first; i < report.entries.size(); ++i) {
                const auto& e = report.entries[i];
                if (&e == champion || !is_rival(e.policy)) continue;
                any = true;
                margin = std::min(margin, champion->optimum.p_star - e.optimum.p_star);
                ok = ok && champion->optimum.p_star > e.optimum.p_star;
            }
            if (!any) return;
            std::snprintf(buf, sizeof buf, "smallest margin %.6g", margin);
            report.checks.push_back({rc.label, claim, ok, buf});
        };
        auto is_dc_pair = [](const PolicyChoice& p) { return !is_fully_connected(*p.cluster); };
        auto is_fc_pair = [](const PolicyChoice& p) { return is_fully_connected(*p.cluster); };
        dominates(find(DC_RC, DC_RC), is_dc_pair,
                  "(DC_RC,DC_RC) peak exceeds every other DC cluster configuration");
        dominates(find(DC_RC, FC_allRC), is_fc_pair,
                  "(DC_RC,FC_allRC) peak exceeds every other FC cluster configuration");

        const OptimalKEntry* at_source = find(DC_RC, DC_noRC);
        const OptimalKEntry* at_cluster = find(DC_noRC, DC_RC);
        if (at_source && at_cluster) {
            const double ps = at_source->optimum.p_star;
            const double pc = at_cluster->optimum.p_star;
            const int ks = at_source->optimum.k_star;
            const int kc = at_cluster->optimum.k_star;
            const double ls = rc.rates.lambda_s;
            const double lc = rc.rates.lambda_c;
            if (ls == lc) {
                std::snprintf(buf, sizeof buf, "|Δp*| = %.3g, k* = %d vs %d, product %d", std::abs(ps - pc),
                              ks, kc, ks * kc);
                report.checks.push_back({rc.label,
                                         "single-RC placements reach equal peaks when λs = λc",
                                         std::abs(ps - pc) <= 1e-12, buf});
                report.checks.push_back({rc.label,
                                         "equal single-RC peaks sit at different cluster sizes",
                                         ks != kc, buf});
            } else {
                std::snprintf(buf, sizeof buf, "p*(source RC) = %.10g, p*(cluster RC) = %.10g", ps, pc);
                if (ls > lc) {
                    report.checks.push_back({rc.label,
                                             "λs > λc: RC at the source stage peaks at least as high",
                                             ps >= pc, buf});
                } else {
                    report.checks.push_back({rc.label,
                                             "λs < λc: RC at the cluster stage peaks at least as high",
                                             pc >= ps, buf});
                }
            }
        }
    }
    return report;
}

}  // namespace rcgossip
