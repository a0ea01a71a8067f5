#include "profcat/indexer.hpp"

#include "profcat/error.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace profcat {

namespace {

bool entry_order(const RankEntry& a, const RankEntry& b)
{
    if (a.weight != b.weight)
        return a.weight > b.weight;
    return a.code < b.code;
}

double squared_norm(const FeatureDoc& doc)
{
    double sq = 0.0;
    for (const auto& [_, c] : doc.features) {
        auto v = static_cast<double>(c);
        sq += v * v;
    }
    return sq;
}

// Sum of count * weight / divisor over shared features. Dividing each
// weight by the profile norm before summing makes the single-associate
// case exact (w / |w| == 1), so profiles whose cosines are equal in exact
// arithmetic also compare equal here and fall through to the code order.
double scaled_dot(const FeatureDoc& doc, const CategoryProfile& p, double divisor)
{
    double dot = 0.0;
    if (doc.features.size() <= p.size()) {
        for (const auto& [f, c] : doc.features) {
            double w = p.weight(f);
            if (w != 0.0)
                dot += static_cast<double>(c) * (w / divisor);
        }
    } else {
        const auto& assoc = p.associates();
        for (auto idx : p.feature_order()) {
            const auto& [f, w] = assoc[idx];
            auto it = doc.features.find(f);
            if (it != doc.features.end())
                dot += static_cast<double>(it->second) * (w / divisor);
        }
    }
    return dot;
}

double cosine(const FeatureDoc& doc, double doc_norm, const CategoryProfile& p)
{
    if (p.norm() <= 0.0)
        return 0.0;
    double dot = scaled_dot(doc, p, p.norm());
    if (dot <= 0.0)
        return 0.0;
    return std::min(1.0, dot / doc_norm);
}

} // namespace

Blacklist parse_blacklist(std::string_view text)
{
    Blacklist bl;
    std::istringstream in{std::string(text)};
    std::string line;
    while (std::getline(in, line)) {
        auto b = line.find_first_not_of(" \t\r");
        if (b == std::string::npos || line[b] == '#')
            continue;
        auto e = line.find_last_not_of(" \t\r");
        bl.codes.insert(line.substr(b, e - b + 1));
    }
    return bl;
}

Blacklist load_blacklist(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ParseError("cannot open blacklist " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_blacklist(ss.str());
}

void check_compatible(const Model& m, const FeatureSpec& spec, const StopLists& stops)
{
    if (!(m.feature_spec == spec))
        throw ModelError("model was trained with feature spec '" + m.feature_spec.to_string() +
                         "' but indexing uses '" + spec.to_string() + "'");
    if (m.stoplist_fingerprint != stops.fingerprint())
        throw ModelError("stop lists differ from the ones the model was trained with (fingerprint " +
                         m.stoplist_fingerprint + " vs " + stops.fingerprint() + ")");
}

FeatureDoc vectorize(std::string_view text, const FeatureSpec& spec, const StopLists& stops, FormatHint hint,
                     std::string doc_id)
{
    return prepare_document(text, hint, spec, stops, std::move(doc_id));
}

double sparse_dot(const FeatureDoc& doc, const CategoryProfile& p)
{
    return scaled_dot(doc, p, 1.0);
}

RankedAssignment rank(const FeatureDoc& doc, const Model& m, const Blacklist& bl, int k, Execution exec)
{
    if (k < 1)
        throw ConfigError("k must be >= 1");
    RankedAssignment out;
    out.doc_id = doc.doc_id;
    out.k_requested = k;
    if (doc.features.empty()) {
        out.empty_document = true;
        return out;
    }

    std::vector<const CategoryProfile*> profiles;
    profiles.reserve(m.profiles.size());
    for (const auto& [code, p] : m.profiles)
        if (!bl.contains(code))
            profiles.push_back(&p);

    const double doc_norm = std::sqrt(squared_norm(doc));
    std::vector<double> scores(profiles.size(), 0.0);
    const auto count = static_cast<std::ptrdiff_t>(profiles.size());
    if (exec == Execution::parallel) {
#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t i = 0; i < count; ++i)
            scores[static_cast<std::size_t>(i)] = cosine(doc, doc_norm, *profiles[static_cast<std::size_t>(i)]);
    } else {
        for (std::ptrdiff_t i = 0; i < count; ++i)
            scores[static_cast<std::size_t>(i)] = cosine(doc, doc_norm, *profiles[static_cast<std::size_t>(i)]);
    }

    for (std::size_t i = 0; i < profiles.size(); ++i)
        if (scores[i] > 0.0)
            out.entries.push_back({profiles[i]->code(), scores[i]});
    auto keep = std::min(out.entries.size(), static_cast<std::size_t>(k));
    std::partial_sort(out.entries.begin(), out.entries.begin() + static_cast<std::ptrdiff_t>(keep),
                      out.entries.end(), entry_order);
    out.entries.resize(keep);
    return out;
}

std::vector<RankedAssignment> rank_batch(std::span<const FeatureDoc> docs, const Model& m, const Blacklist& bl,
                                         int k, Execution exec)
{
    if (k < 1)
        throw ConfigError("k must be >= 1");
    std::vector<RankedAssignment> out(docs.size());
    const auto count = static_cast<std::ptrdiff_t>(docs.size());
    if (exec == Execution::parallel) {
        // Documents are the parallel dimension here; each ranking runs serially.
#pragma omp parallel for schedule(dynamic, 4)
        for (std::ptrdiff_t i = 0; i < count; ++i)
            out[static_cast<std::size_t>(i)] = rank(docs[static_cast<std::size_t>(i)], m, bl, k, Execution::serial);
    } else {
        for (std::ptrdiff_t i = 0; i < count; ++i)
            out[static_cast<std::size_t>(i)] = rank(docs[static_cast<std::size_t>(i)], m, bl, k, Execution::serial);
    }
    return out;
}

Explanation explain(const FeatureDoc& doc, std::string_view text, const Model& m, const std::string& code,
                    const StopLists& stops)
{
    auto it = m.profiles.find(code);
    if (it == m.profiles.end())
        throw NotFoundError("no profile for descriptor " + code);
    const CategoryProfile& p = it->second;

    Explanation ex;
    ex.code = code;
    for (const auto& [f, c] : doc.features) {
        double w = p.weight(f);
        if (w > 0.0)
            ex.matched.push_back({f, w, c});
    }
    std::sort(ex.matched.begin(), ex.matched.end(), [](const auto& a, const auto& b) {
        if (a.profile_weight != b.profile_weight)
            return a.profile_weight > b.profile_weight;
        return a.feature < b.feature;
    });
    if (ex.matched.empty())
        return ex;

    std::set<std::string> wanted;
    for (const auto& ma : ex.matched)
        wanted.insert(ma.feature);

    auto spans = tokenize_with_offsets(text);
    std::vector<std::string> tokens;
    tokens.reserve(spans.size());
    for (const auto& s : spans)
        tokens.push_back(s.token);
    auto alive = surviving_indices(tokens, stops);

    const auto& spec = m.feature_spec;
    std::size_t n = spec.kind == FeatureSpec::Kind::ngram ? static_cast<std::size_t>(spec.n) : 1;
    for (std::size_t i = 0; i + n <= alive.size(); ++i) {
        std::string feature = tokens[alive[i]];
        for (std::size_t j = 1; j < n; ++j) {
            feature += ' ';
            feature += tokens[alive[i + j]];
        }
        if (wanted.contains(feature))
            ex.spans.push_back({spans[alive[i]].begin, spans[alive[i + n - 1]].end});
    }
    return ex;
}

} // namespace profcat

namespace profcat {

Indexer::Indexer(Model model, StopLists stops, Blacklist blacklist)
    : model_(std::move(model)), stops_(std::move(stops)), blacklist_(std::move(blacklist))
{
    check_compatible(model_, model_.feature_spec, stops_);
}

Indexer::Prepared Indexer::prepare(std::string_view raw, FormatHint hint, std::string doc_id) const
{
    Prepared p;
    p.text = extract_text(raw, hint);
    auto tokens = tokenize(p.text);
    p.features = featurize(apply_stoplists(tokens, stops_), model_.feature_spec, std::move(doc_id));
    p.features.token_count = static_cast<std::int64_t>(tokens.size());
    return p;
}

RankedAssignment Indexer::index(const FeatureDoc& doc, int k, Execution exec) const
{
    return rank(doc, model_, blacklist_, k, exec);
}

RankedAssignment Indexer::index(std::string_view raw, FormatHint hint, std::string doc_id, int k) const
{
    return index(prepare(raw, hint, std::move(doc_id)).features, k);
}

Explanation Indexer::explain(const Prepared& doc, const std::string& code) const
{
    return profcat::explain(doc.features, doc.text, model_, code, stops_);
}

} // namespace profcat
