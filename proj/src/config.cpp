#include "profcat/config.hpp"

#include "profcat/error.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <set>

namespace profcat {

namespace {

std::string_view trim(std::string_view s)
{
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos)
        return {};
    auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

template <typename T>
T to_number(std::string_view key, std::string_view value)
{
    T v{};
    auto [end, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
    if (ec != std::errc() || end != value.data() + value.size())
        throw ConfigError("bad value '" + std::string(value) + "' for " + std::string(key));
    return v;
}

bool to_bool(std::string_view key, std::string_view value)
{
    if (value == "true" || value == "yes" || value == "1")
        return true;
    if (value == "false" || value == "no" || value == "0")
        return false;
    throw ConfigError("bad boolean '" + std::string(value) + "' for " + std::string(key));
}

using Setter = std::function<void(JobConfig&, std::string_view, std::string_view)>;

const std::map<std::string, Setter, std::less<>>& setters()
{
    static const std::map<std::string, Setter, std::less<>> table{
        {"model", [](JobConfig& c, auto, auto v) { c.model_path = std::string(v); }},
        {"input_dir", [](JobConfig& c, auto, auto v) { c.input_dir = std::string(v); }},
        {"input_file", [](JobConfig& c, auto, auto v) { c.input_file = std::string(v); }},
        {"corpus", [](JobConfig& c, auto, auto v) { c.input_file = std::string(v); }},
        {"output", [](JobConfig& c, auto, auto v) { c.output_path = std::string(v); }},
        {"blacklist", [](JobConfig& c, auto, auto v) { c.blacklist_path = std::string(v); }},
        {"stoplist", [](JobConfig& c, auto, auto v) { c.stoplist_paths.emplace_back(std::string(v)); }},
        {"thesaurus", [](JobConfig& c, auto, auto v) { c.thesaurus_path = std::string(v); }},
        {"test_ids", [](JobConfig& c, auto, auto v) { c.test_ids_path = std::string(v); }},
        {"split_out", [](JobConfig& c, auto, auto v) { c.split_path = std::string(v); }},
        {"k", [](JobConfig& c, auto k, auto v) { c.k = to_number<int>(k, v); }},
        {"format", [](JobConfig& c, auto, auto v) { c.format_hint = parse_format_hint(v); }},
        {"body_format", [](JobConfig& c, auto, auto v) { c.train.body_format = parse_format_hint(v); }},
        {"feature_spec", [](JobConfig& c, auto, auto v) { c.feature_spec = FeatureSpec::parse(v); }},
        {"seed", [](JobConfig& c, auto k, auto v) { c.seed = to_number<std::uint64_t>(k, v); }},
        {"n_folds", [](JobConfig& c, auto k, auto v) { c.n_folds = to_number<int>(k, v); }},
        {"strict_rank_denominator",
         [](JobConfig& c, auto k, auto v) { c.strict_rank_denominator = to_bool(k, v); }},
        {"in_place", [](JobConfig& c, auto k, auto v) { c.in_place = to_bool(k, v); }},
        {"threads", [](JobConfig& c, auto k, auto v) { c.threads = to_number<int>(k, v); }},
        {"host", [](JobConfig& c, auto, auto v) { c.host = std::string(v); }},
        {"port", [](JobConfig& c, auto k, auto v) { c.port = to_number<int>(k, v); }},
        {"lang", [](JobConfig& c, auto, auto v) { c.lang = std::string(v); }},
        {"min_docs_per_category",
         [](JobConfig& c, auto k, auto v) { c.train.min_docs_per_category = to_number<int>(k, v); }},
        {"min_doc_length_tokens",
         [](JobConfig& c, auto k, auto v) { c.train.min_doc_length_tokens = to_number<int>(k, v); }},
        {"min_word_corpus_freq",
         [](JobConfig& c, auto k, auto v) { c.train.min_word_corpus_freq = to_number<int>(k, v); }},
        {"min_loglikelihood",
         [](JobConfig& c, auto k, auto v) { c.train.min_loglikelihood = to_number<double>(k, v); }},
        {"descriptor_count_weighting",
         [](JobConfig& c, auto, auto v) { c.train.descriptor_count_weighting = parse_count_weighting(v); }},
        {"max_associates_per_profile",
         [](JobConfig& c, auto k, auto v) {
             if (v == "unlimited")
                 c.train.max_associates_per_profile.reset();
             else
                 c.train.max_associates_per_profile = to_number<int>(k, v);
         }},
    };
    return table;
}

bool is_path_key(std::string_view key)
{
    static const std::set<std::string, std::less<>> keys{"model",     "input_dir", "input_file", "corpus",
                                                         "output",    "blacklist", "stoplist",   "thesaurus",
                                                         "test_ids",  "split_out"};
    return keys.contains(key);
}

} // namespace

void JobConfig::set(std::string_view key, std::string_view value)
{
    auto it = setters().find(key);
    if (it == setters().end())
        throw ConfigError("unknown configuration key '" + std::string(key) + "'");
    it->second(*this, key, value);
}

void JobConfig::load_file(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open configuration file " + path.string());
    auto base = path.parent_path();
    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        auto line = trim(raw);
        if (line.empty() || line.front() == '#')
            continue;
        auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw ConfigError(path.string() + ":" + std::to_string(line_no) + ": expected key = value");
        auto key = trim(line.substr(0, eq));
        auto value = trim(line.substr(eq + 1));
        if (is_path_key(key) && !value.empty() && std::filesystem::path(value).is_relative())
            set(key, (base / std::string(value)).string());
        else
            set(key, value);
    }
}

StopLists JobConfig::load_stoplists() const
{
    StopLists stops;
    for (const auto& p : stoplist_paths)
        stops.merge(load_stoplist(p));
    return stops;
}

Blacklist JobConfig::load_blacklist() const
{
    return blacklist_path.empty() ? Blacklist{} : profcat::load_blacklist(blacklist_path);
}

std::vector<std::string> JobConfig::keys()
{
    std::vector<std::string> out;
    for (const auto& [k, _] : setters())
        out.push_back(k);
    return out;
}

} // namespace profcat
