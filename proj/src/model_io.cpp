#include "profcat/error.hpp"
#include "profcat/hash.hpp"
#include "profcat/trainer.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace profcat {

namespace {

constexpr std::string_view magic = "profcat-model";

std::string format_double(double v)
{
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, end);
}

class LineReader {
public:
    explicit LineReader(std::string_view text) : text_(text) {}

    bool next(std::string_view& line)
    {
        if (pos_ >= text_.size())
            return false;
        auto nl = text_.find('\n', pos_);
        if (nl == std::string_view::npos)
            throw ModelError("model file corrupted: unterminated last line");
        line = text_.substr(pos_, nl - pos_);
        pos_ = nl + 1;
        ++line_no_;
        return true;
    }

    std::string_view expect(std::string_view what)
    {
        std::string_view line;
        if (!next(line))
            throw ModelError("model file corrupted: truncated before " + std::string(what));
        return line;
    }

    std::size_t offset() const noexcept { return pos_; }
    std::size_t line_no() const noexcept { return line_no_; }

private:
    std::string_view text_;
    std::size_t pos_ = 0;
    std::size_t line_no_ = 0;
};

std::string_view value_after(std::string_view line, std::string_view key)
{
    if (line == key)
        return {};
    if (!line.starts_with(key) || line.size() <= key.size() || line[key.size()] != ' ')
        throw ModelError("model file corrupted: expected '" + std::string(key) + "', got '" + std::string(line) + "'");
    return line.substr(key.size() + 1);
}

template <typename T>
T parse_number(std::string_view s, std::string_view what)
{
    T v{};
    auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || end != s.data() + s.size())
        throw ModelError("model file corrupted: bad " + std::string(what) + " '" + std::string(s) + "'");
    return v;
}

std::vector<std::string_view> split(std::string_view s, char sep)
{
    std::vector<std::string_view> out;
    std::size_t pos = 0;
    while (true) {
        auto at = s.find(sep, pos);
        out.push_back(s.substr(pos, at == std::string_view::npos ? std::string_view::npos : at - pos));
        if (at == std::string_view::npos)
            break;
        pos = at + 1;
    }
    return out;
}

} // namespace

std::string serialize_model(const Model& m)
{
    std::string out;
    auto line = [&](std::string_view a, std::string_view b = {}) {
        out += a;
        if (!b.empty()) {
            out += ' ';
            out += b;
        }
        out += '\n';
    };
    const auto& p = m.params;
    line(magic);
    line("format_version", std::to_string(m.format_version));
    line("param min_docs_per_category", std::to_string(p.min_docs_per_category));
    line("param min_doc_length_tokens", std::to_string(p.min_doc_length_tokens));
    line("param min_word_corpus_freq", std::to_string(p.min_word_corpus_freq));
    line("param min_loglikelihood", format_double(p.min_loglikelihood));
    line("param descriptor_count_weighting", to_string(p.descriptor_count_weighting));
    line("param max_associates_per_profile",
         p.max_associates_per_profile ? std::to_string(*p.max_associates_per_profile) : "unlimited");
    line("param body_format", to_string(p.body_format));
    line("feature_spec", m.feature_spec.to_string());
    line("stoplist_fingerprint", m.stoplist_fingerprint);
    line("profiles", std::to_string(m.profiles.size()));
    for (const auto& [code, prof] : m.profiles) {
        line("profile " + code, std::to_string(prof.n_train_docs()) + " " + std::to_string(prof.size()));
        for (const auto& [feature, weight] : prof.associates()) {
            out += format_double(weight);
            out += '\t';
            out += feature;
            out += '\n';
        }
    }
    line("end");
    Fnv1a64 h;
    h.update(out);
    line("checksum", h.hex());
    return out;
}

Model deserialize_model(std::string_view bytes)
{
    LineReader in(bytes);
    if (in.expect("magic") != magic)
        throw ModelError("not a model file (bad magic line)");
    auto version = parse_number<int>(value_after(in.expect("format_version"), "format_version"), "format_version");
    if (version != model_format_version)
        throw ModelError("unsupported model format_version " + std::to_string(version) + " (this build reads version " +
                         std::to_string(model_format_version) + ")");

    Model m;
    m.format_version = version;
    auto& p = m.params;
    p.min_docs_per_category = parse_number<int>(value_after(in.expect("param"), "param min_docs_per_category"), "param");
    p.min_doc_length_tokens = parse_number<int>(value_after(in.expect("param"), "param min_doc_length_tokens"), "param");
    p.min_word_corpus_freq = parse_number<int>(value_after(in.expect("param"), "param min_word_corpus_freq"), "param");
    p.min_loglikelihood = parse_number<double>(value_after(in.expect("param"), "param min_loglikelihood"), "param");
    try {
        p.descriptor_count_weighting =
            parse_count_weighting(value_after(in.expect("param"), "param descriptor_count_weighting"));
        auto max_assoc = value_after(in.expect("param"), "param max_associates_per_profile");
        if (max_assoc != "unlimited")
            p.max_associates_per_profile = parse_number<int>(max_assoc, "param");
        p.body_format = parse_format_hint(value_after(in.expect("param"), "param body_format"));
        m.feature_spec = FeatureSpec::parse(value_after(in.expect("feature_spec"), "feature_spec"));
    } catch (const ConfigError& e) {
        throw ModelError(std::string("model file corrupted: ") + e.what());
    }
    m.stoplist_fingerprint = std::string(value_after(in.expect("stoplist_fingerprint"), "stoplist_fingerprint"));
    auto n_profiles = parse_number<std::size_t>(value_after(in.expect("profiles"), "profiles"), "profile count");

    for (std::size_t i = 0; i < n_profiles; ++i) {
        auto header = split(value_after(in.expect("profile"), "profile"), ' ');
        if (header.size() != 3)
            throw ModelError("model file corrupted: bad profile header at line " + std::to_string(in.line_no()));
        std::string code(header[0]);
        int docs = parse_number<int>(header[1], "n_train_docs");
        auto n_assoc = parse_number<std::size_t>(header[2], "associate count");
        std::vector<std::pair<std::string, double>> assoc;
        assoc.reserve(n_assoc);
        for (std::size_t j = 0; j < n_assoc; ++j) {
            auto line = in.expect("associate");
            auto tab = line.find('\t');
            if (tab == std::string_view::npos)
                throw ModelError("model file corrupted: bad associate line " + std::to_string(in.line_no()));
            assoc.emplace_back(std::string(line.substr(tab + 1)), parse_number<double>(line.substr(0, tab), "weight"));
        }
        if (!m.profiles.emplace(code, CategoryProfile(code, std::move(assoc), docs)).second)
            throw ModelError("model file corrupted: duplicate profile " + code);
    }
    if (in.expect("end") != "end")
        throw ModelError("model file corrupted: missing end marker");
    std::size_t body_end = in.offset();
    auto stored = value_after(in.expect("checksum"), "checksum");
    Fnv1a64 h;
    h.update(bytes.substr(0, body_end));
    if (stored != h.hex())
        throw ModelError("model file corrupted: checksum mismatch");
    std::string_view trailing;
    if (in.next(trailing))
        throw ModelError("model file corrupted: data after checksum");
    return m;
}

void save_model(const Model& m, const std::filesystem::path& path)
{
    auto bytes = serialize_model(m);
    std::ofstream out(path, std::ios::binary);
    if (!out || !out.write(bytes.data(), static_cast<std::streamsize>(bytes.size())))
        throw ModelError("cannot write model " + path.string());
}

Model load_model(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ModelError("cannot open model " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return deserialize_model(ss.str());
}

std::string model_fingerprint(const Model& m)
{
    return to_hex64(fnv1a64(serialize_model(m)));
}

std::string params_fingerprint(const TrainParams& p, const FeatureSpec& spec)
{
    Model shell;
    shell.params = p;
    shell.feature_spec = spec;
    auto text = serialize_model(shell);
    return to_hex64(fnv1a64(text.substr(0, text.find("stoplist_fingerprint"))));
}

} // namespace profcat
