#include <charconv>
#include <fstream>
#include <map>
#include <system_error>

#include "rcgossip/experiments.hpp"

namespace rcgossip {

namespace {

constexpr int kColumns = 17;

void put(std::string& out, double v)
{
    char buf[40];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    out.append(buf, end);
}

template <class T>
void put(std::string& out, const std::optional<T>& v)
{
    if (!v) return;
    if constexpr (std::is_same_v<T, std::string>) {
        out += *v;
    } else if constexpr (std::is_floating_point_v<T>) {
        put(out, *v);
    } else {
        out += std::to_string(*v);
    }
}

std::vector<std::string_view> split(std::string_view line, char sep)
{
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const auto pos = line.find(sep, start);
        out.push_back(line.substr(start, pos == std::string_view::npos ? pos : pos - start));
        if (pos == std::string_view::npos) return out;
        start = pos + 1;
    }
}

template <class T>
T parse_number(std::string_view cell, int line, const char* column)
{
    T value{};
    auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
    if (ec != std::errc{} || ptr != cell.data() + cell.size()) {
        throw std::invalid_argument("csv line " + std::to_string(line) + ": bad " + column +
                                    " '" + std::string(cell) + "'");
    }
    return value;
}

template <class T>
std::optional<T> parse_optional(std::string_view cell, int line, const char* column)
{
    if (cell.empty()) return std::nullopt;
    if constexpr (std::is_same_v<T, std::string>) {
        return std::string(cell);
    } else {
        return parse_number<T>(cell, line, column);
    }
}

}  // namespace

std::string to_csv(const std::vector<ResultRow>& rows)
{
    std::string out(kCsvHeader);
    out += '\n';
    for (const auto& r : rows) {
        out += r.experiment;
        out += ',';
        out += r.policy_source;
        out += ',';
        put(out, r.policy_cluster);
        out += ',';
        out += std::to_string(r.n);
        out += ',';
        put(out, r.k);
        out += ',';
        put(out, r.m);
        out += ',';
        put(out, r.lambda_e);
        out += ',';
        put(out, r.lambda_s);
        out += ',';
        put(out, r.lambda_c);
        out += ',';
        put(out, r.lambda_g);
        out += ',';
        put(out, r.p_analytic);
        out += ',';
        put(out, r.p_oracle);
        out += ',';
        put(out, r.p_sim);
        out += ',';
        put(out, r.sim_ci_lo);
        out += ',';
        put(out, r.sim_ci_hi);
        out += ',';
        put(out, r.cycles);
        out += ',';
        put(out, r.seed);
        out += '\n';
    }
    return out;
}

std::vector<ResultRow> parse_csv(std::string_view text)
{
    auto lines = split(text, '\n');
    if (!lines.empty() && lines.back().empty()) lines.pop_back();
    if (lines.empty() || lines.front() != kCsvHeader) {
        throw std::invalid_argument("csv: missing or unexpected header");
    }

    std::vector<ResultRow> rows;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const int ln = static_cast<int>(i) + 1;
        const auto c = split(lines[i], ',');
        if (c.size() != kColumns) {
            throw std::invalid_argument("csv line " + std::to_string(ln) + ": expected " +
                                        std::to_string(kColumns) + " fields, got " +
                                        std::to_string(c.size()));
        }
        ResultRow r;
        r.experiment = std::string(c[0]);
        r.policy_source = std::string(c[1]);
        r.policy_cluster = parse_optional<std::string>(c[2], ln, "policy_cluster");
        r.n = parse_number<int>(c[3], ln, "n");
        r.k = parse_optional<int>(c[4], ln, "k");
        r.m = parse_optional<int>(c[5], ln, "m");
        r.lambda_e = parse_number<double>(c[6], ln, "lambda_e");
        r.lambda_s = parse_number<double>(c[7], ln, "lambda_s");
        r.lambda_c = parse_optional<double>(c[8], ln, "lambda_c");
        r.lambda_g = parse_number<double>(c[9], ln, "lambda_g");
        r.p_analytic = parse_optional<double>(c[10], ln, "p_analytic");
        r.p_oracle = parse_number<double>(c[11], ln, "p_oracle");
        r.p_sim = parse_optional<double>(c[12], ln, "p_sim");
        r.sim_ci_lo = parse_optional<double>(c[13], ln, "sim_ci_lo");
        r.sim_ci_hi = parse_optional<double>(c[14], ln, "sim_ci_hi");
        r.cycles = parse_optional<std::int64_t>(c[15], ln, "cycles");
        r.seed = parse_optional<std::uint64_t>(c[16], ln, "seed");
        rows.push_back(std::move(r));
    }
    return rows;
}

void write_text_file(const std::filesystem::path& path, std::string_view text)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    out.close();
    if (!out) throw IoError("failed writing " + path.string());
}

PlotEmission emit_plot_data(const std::vector<ResultRow>& rows,
                            const std::filesystem::path& directory,
                            const std::vector<SeriesKey>& expected)
{
    std::map<SeriesKey, std::vector<const ResultRow*>> groups;
    for (const auto& key : expected) groups[key];
    for (const auto& row : rows) groups[series_key(row)].push_back(&row);

    std::error_code ec;
    std::filesystem::create_directories(directory, ec);
    if (ec) throw IoError("cannot create " + directory.string() + ": " + ec.message());

    PlotEmission out;
    for (const auto& [key, members] : groups) {
        if (members.empty()) {
            out.warnings.push_back("series " + key.file_name() + " has no rows; no file written");
            continue;
        }
        std::string text = "# experiment=" + key.experiment + " policy=" + key.policy +
                           " case=" + key.rate_case + "\n# x y\n";
        const bool by_k = members.front()->k.has_value();
        for (const ResultRow* r : members) {
            text += std::to_string(by_k ? *r->k : r->n);
            text += ' ';
            put(text, r->p_oracle);
            text += '\n';
        }
        const auto path = directory / key.file_name();
        write_text_file(path, text);
        out.files.push_back(path);
    }
    return out;
}

}  // namespace rcgossip
