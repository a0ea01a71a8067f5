#include "profcat/corpus.hpp"

#include "profcat/error.hpp"

#include <cmath>
#include <charconv>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

namespace profcat {

namespace {

struct Header {
    std::set<std::string> codes;
    std::string doc_id;
};

bool parse_header(std::string_view line, Header* out)
{
    auto sep = line.find(" # ");
    if (sep == std::string_view::npos || sep == 0)
        return false;
    std::string_view codes = line.substr(0, sep);
    std::string_view id = line.substr(sep + 3);
    if (id.empty() || id.find_first_of(" \t") == 0)
        return false;
    Header h;
    std::size_t i = 0;
    while (true) {
        auto sp = codes.find(' ', i);
        std::string_view code = codes.substr(i, sp == std::string_view::npos ? std::string_view::npos : sp - i);
        if (code.empty() || code.find_first_of("#\t\r") != std::string_view::npos)
            return false;
        h.codes.emplace(code);
        if (sp == std::string_view::npos)
            break;
        i = sp + 1;
    }
    h.doc_id = std::string(id);
    if (out)
        *out = std::move(h);
    return true;
}

std::vector<std::string_view> split_lines(std::string_view text)
{
    std::vector<std::string_view> lines;
    std::size_t pos = 0;
    while (pos < text.size()) {
        auto nl = text.find('\n', pos);
        if (nl == std::string_view::npos) {
            lines.push_back(text.substr(pos));
            break;
        }
        lines.push_back(text.substr(pos, nl - pos));
        pos = nl + 1;
    }
    return lines;
}

// Bounded draw in [0, bound) without modulo bias (Lemire's method).
std::uint64_t draw_below(std::mt19937_64& rng, std::uint64_t bound)
{
    using u128 = unsigned __int128;
    u128 m = static_cast<u128>(rng()) * bound;
    auto low = static_cast<std::uint64_t>(m);
    if (low < bound) {
        std::uint64_t threshold = (0 - bound) % bound;
        while (low < threshold) {
            m = static_cast<u128>(rng()) * bound;
            low = static_cast<std::uint64_t>(m);
        }
    }
    return static_cast<std::uint64_t>(m >> 64);
}

} // namespace

bool is_compact_header(std::string_view line)
{
    if (!line.empty() && line.back() == '\r')
        line.remove_suffix(1);
    return parse_header(line, nullptr);
}

Collection parse_compact_text(std::string_view text)
{
    if (text.size() >= 3 && text.substr(0, 3) == "\xEF\xBB\xBF")
        text.remove_prefix(3);
    Collection c;
    std::set<std::string> seen;
    std::vector<std::string_view> body;
    auto flush = [&] {
        if (c.docs.empty())
            return;
        std::string joined;
        for (std::size_t i = 0; i < body.size(); ++i) {
            if (i)
                joined += '\n';
            joined.append(body[i]);
        }
        c.docs.back().body = std::move(joined);
        body.clear();
    };

    std::size_t line_no = 0;
    for (auto line : split_lines(text)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r')
            line.remove_suffix(1);
        Header h;
        if (parse_header(line, &h)) {
            flush();
            if (!seen.insert(h.doc_id).second)
                throw ParseError("compact line " + std::to_string(line_no) + ": duplicate doc id " + h.doc_id);
            c.docs.push_back({std::move(h.doc_id), std::move(h.codes), {}});
            continue;
        }
        if (c.docs.empty()) {
            if (line.find_first_not_of(" \t") == std::string_view::npos)
                continue;
            if (line.starts_with("# ") || line.starts_with(" # "))
                throw ParseError("compact line " + std::to_string(line_no) + ": header with zero codes");
            throw ParseError("compact line " + std::to_string(line_no) + ": body text before first header");
        }
        if (line.starts_with("# ") && line.size() > 2)
            throw ParseError("compact line " + std::to_string(line_no) + ": header with zero codes");
        body.push_back(line);
    }
    flush();
    return c;
}

Collection parse_compact(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ParseError("cannot open corpus " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_compact_text(ss.str());
}

std::string format_compact(const Collection& c)
{
    std::string out;
    std::set<std::string> seen;
    for (const auto& d : c.docs) {
        if (d.doc_id.empty())
            throw ParseError("document with empty id");
        if (!seen.insert(d.doc_id).second)
            throw ParseError("duplicate doc id " + d.doc_id);
        if (d.gold.empty())
            throw ParseError("document " + d.doc_id + " has no descriptor codes");
        std::string header;
        for (const auto& code : d.gold) {
            if (!header.empty())
                header += ' ';
            header += code;
        }
        header += " # ";
        header += d.doc_id;
        if (!is_compact_header(header))
            throw ParseError("document " + d.doc_id + " cannot be expressed as a compact header");
        for (auto line : split_lines(d.body)) {
            if (is_compact_header(line) || line.starts_with("# "))
                throw ParseError("document " + d.doc_id + " has a body line that reads as a header: " +
                                 std::string(line));
        }
        out += header;
        out += '\n';
        if (!d.body.empty()) {
            out += d.body;
            out += '\n';
        }
    }
    return out;
}

void write_compact(const Collection& c, const std::filesystem::path& path)
{
    auto text = format_compact(c);
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw ParseError("cannot write corpus " + path.string());
    out << text;
}

std::vector<std::size_t> SplitPlan::fold_sizes() const
{
    std::vector<std::size_t> sizes(static_cast<std::size_t>(n_folds), 0);
    for (const auto& [_, f] : assignment)
        ++sizes.at(static_cast<std::size_t>(f));
    return sizes;
}

std::set<std::string> SplitPlan::fold_members(int fold) const
{
    std::set<std::string> out;
    for (const auto& [id, f] : assignment)
        if (f == fold)
            out.insert(id);
    return out;
}

SplitPlan make_folds(const Collection& c, int n, std::uint64_t seed)
{
    if (n < 2)
        throw ConfigError("number of folds must be >= 2");
    if (static_cast<std::size_t>(n) > c.size())
        throw ConfigError("more folds (" + std::to_string(n) + ") than documents (" + std::to_string(c.size()) + ")");

    std::vector<std::size_t> order(c.size());
    std::iota(order.begin(), order.end(), 0);
    std::mt19937_64 rng(seed);
    for (std::size_t i = order.size(); i > 1; --i)
        std::swap(order[i - 1], order[draw_below(rng, i)]);

    SplitPlan plan;
    plan.n_folds = n;
    plan.seed = seed;
    for (std::size_t i = 0; i < order.size(); ++i)
        plan.assignment[c.docs[order[i]].doc_id] = static_cast<int>(i % static_cast<std::size_t>(n));
    return plan;
}

std::string format_split_plan(const SplitPlan& plan)
{
    std::string out;
    for (const auto& [id, f] : plan.assignment) {
        out += id;
        out += '\t';
        out += std::to_string(f);
        out += '\n';
    }
    return out;
}

SplitPlan parse_split_plan(std::string_view text, int n_folds, std::uint64_t seed)
{
    SplitPlan plan;
    plan.n_folds = n_folds;
    plan.seed = seed;
    for (auto line : split_lines(text)) {
        if (line.empty())
            continue;
        auto tab = line.rfind('\t');
        if (tab == std::string_view::npos)
            throw ParseError("split plan line without TAB: " + std::string(line));
        int fold = -1;
        auto digits = line.substr(tab + 1);
        auto [end, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), fold);
        if (ec != std::errc() || end != digits.data() + digits.size() || fold < 0 || fold >= n_folds)
            throw ParseError("bad fold index in split plan line: " + std::string(line));
        plan.assignment[std::string(line.substr(0, tab))] = fold;
    }
    return plan;
}

Partition split_fixed(const Collection& c, const std::set<std::string>& test_ids)
{
    std::set<std::string> present;
    for (const auto& d : c.docs)
        present.insert(d.doc_id);
    for (const auto& id : test_ids)
        if (!present.contains(id))
            throw NotFoundError("test id not in collection: " + id);
    Partition p;
    for (const auto& d : c.docs)
        (test_ids.contains(d.doc_id) ? p.test : p.train).docs.push_back(d);
    return p;
}

CollectionStats collection_stats(const Collection& c)
{
    if (c.empty())
        throw Error("statistics of an empty collection");
    CollectionStats s;
    double sum = 0.0;
    for (const auto& d : c.docs) {
        ++s.label_histogram[d.gold.size()];
        sum += static_cast<double>(d.gold.size());
        for (const auto& code : d.gold)
            ++s.usage[code];
    }
    auto n = static_cast<double>(c.size());
    s.mean_labels = sum / n;
    double sq = 0.0;
    for (const auto& d : c.docs) {
        double dev = static_cast<double>(d.gold.size()) - s.mean_labels;
        sq += dev * dev;
    }
    s.stddev_labels = std::sqrt(sq / n);
    return s;
}

} // namespace profcat
