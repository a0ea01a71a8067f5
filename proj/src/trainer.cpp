#include "profcat/trainer.hpp"

#include "profcat/error.hpp"
#include "profcat/hash.hpp"
#include "profcat/loglikelihood.hpp"

#include <algorithm>
#include <cmath>
#include <exception>

namespace profcat {

namespace {

bool associate_order(const std::pair<std::string, double>& a, const std::pair<std::string, double>& b)
{
    if (a.second != b.second)
        return a.second > b.second;
    return a.first < b.first;
}

template <typename Fn>
void for_each_index(std::size_t n, Execution exec, Fn&& fn)
{
    std::vector<std::exception_ptr> errors(n);
    auto guarded = [&](std::size_t i) {
        try {
            fn(i);
        } catch (...) {
            errors[i] = std::current_exception();
        }
    };
    if (exec == Execution::parallel) {
        const auto count = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(dynamic, 8)
        for (std::ptrdiff_t i = 0; i < count; ++i)
            guarded(static_cast<std::size_t>(i));
    } else {
        for (std::size_t i = 0; i < n; ++i)
            guarded(i);
    }
    // Report the error of the first failing document, independent of scheduling.
    for (auto& e : errors)
        if (e)
            std::rethrow_exception(e);
}

} // namespace

void TrainParams::validate() const
{
    if (min_docs_per_category < 1 || min_doc_length_tokens < 1 || min_word_corpus_freq < 1)
        throw ConfigError("integer training parameters must be >= 1");
    if (!(min_loglikelihood >= 0.0) || !std::isfinite(min_loglikelihood))
        throw ConfigError("min_loglikelihood must be a finite value >= 0");
    if (max_associates_per_profile && *max_associates_per_profile < 1)
        throw ConfigError("max_associates_per_profile must be >= 1 or unlimited");
}

CorpusStats corpus_statistics(const std::vector<FeatureDoc>& docs)
{
    CorpusStats s;
    for (const auto& d : docs) {
        for (const auto& [f, c] : d.features) {
            s.feature_freq[f] += c;
            s.total_tokens += c;
        }
        ++s.n_docs;
    }
    return s;
}

std::map<std::string, double> doc_loglikelihood(const FeatureDoc& doc, const CorpusStats& stats)
{
    std::int64_t doc_size = doc.total_count();
    if (doc_size == 0)
        throw TrainError("log-likelihood of empty document " + doc.doc_id);
    std::map<std::string, double> out;
    for (const auto& [feature, count] : doc.features) {
        auto it = stats.feature_freq.find(feature);
        if (it == stats.feature_freq.end() || it->second < count)
            throw TrainError("feature '" + feature + "' of document " + doc.doc_id + " missing from corpus statistics");
        Contingency t{count, it->second - count, doc_size, stats.total_tokens - doc_size};
        if (t.rest_size < 0)
            throw TrainError("document " + doc.doc_id + " larger than the reference corpus");
        if (!over_represented(t))
            continue;
        double ll = loglikelihood(t);
        if (ll > 0.0)
            out.emplace(feature, ll);
    }
    return out;
}

CategoryProfile::CategoryProfile(std::string code, std::vector<std::pair<std::string, double>> associates,
                                 int n_train_docs)
    : code_(std::move(code)), associates_(std::move(associates)), n_train_docs_(n_train_docs)
{
    std::sort(associates_.begin(), associates_.end(), associate_order);
    lookup_.reserve(associates_.size());
    for (const auto& [f, w] : associates_) {
        norm_sq_ += w * w;
        lookup_.emplace(f, w);
    }
    norm_ = std::sqrt(norm_sq_);
    feature_order_.resize(associates_.size());
    for (std::uint32_t i = 0; i < feature_order_.size(); ++i)
        feature_order_[i] = i;
    std::sort(feature_order_.begin(), feature_order_.end(),
              [this](std::uint32_t a, std::uint32_t b) { return associates_[a].first < associates_[b].first; });
}

double CategoryProfile::weight(const std::string& feature) const
{
    auto it = lookup_.find(feature);
    return it == lookup_.end() ? 0.0 : it->second;
}

Model train(const Collection& collection, const TrainParams& params, const FeatureSpec& spec,
            const StopLists& stops, Execution exec)
{
    params.validate();
    if (collection.empty())
        throw TrainError("cannot train on an empty collection");

    const auto& docs = collection.docs;
    std::vector<FeatureDoc> prepared(docs.size());
    for_each_index(docs.size(), exec, [&](std::size_t i) {
        prepared[i] = prepare_document(docs[i].body, params.body_format, spec, stops, docs[i].doc_id);
    });

    // Length gate comes before the corpus statistics so short documents do
    // not enter the reference corpus.
    std::vector<std::size_t> kept;
    std::vector<FeatureDoc> surviving;
    for (std::size_t i = 0; i < prepared.size(); ++i) {
        if (prepared[i].token_count >= params.min_doc_length_tokens) {
            kept.push_back(i);
            surviving.push_back(std::move(prepared[i]));
        }
    }

    // Rare features are removed from every document, then the statistics are
    // recomputed over what remains.
    {
        auto raw = corpus_statistics(surviving);
        for (auto& d : surviving)
            std::erase_if(d.features, [&](const auto& kv) {
                return raw.feature_freq.at(kv.first) < params.min_word_corpus_freq;
            });
    }
    const CorpusStats stats = corpus_statistics(surviving);

    std::vector<std::vector<std::pair<std::string, double>>> retained(surviving.size());
    for_each_index(surviving.size(), exec, [&](std::size_t i) {
        if (surviving[i].features.empty())
            return;
        for (auto& [f, ll] : doc_loglikelihood(surviving[i], stats))
            if (ll >= params.min_loglikelihood)
                retained[i].emplace_back(f, ll);
    });

    // Deterministic merge in document order.
    std::map<std::string, std::unordered_map<std::string, double>> sums;
    std::map<std::string, int> contributors;
    for (std::size_t j = 0; j < surviving.size(); ++j) {
        if (retained[j].empty())
            continue;
        const auto& gold = docs[kept[j]].gold;
        const double share = static_cast<double>(gold.size());
        for (const auto& code : gold) {
            auto& acc = sums[code];
            for (const auto& [f, ll] : retained[j])
                acc[f] += params.descriptor_count_weighting == CountWeighting::inverse ? ll / share : ll;
            ++contributors[code];
        }
    }

    Model m;
    m.params = params;
    m.feature_spec = spec;
    m.stoplist_fingerprint = stops.fingerprint();
    for (auto& [code, acc] : sums) {
        int n = contributors[code];
        if (n < params.min_docs_per_category || acc.empty())
            continue;
        std::vector<std::pair<std::string, double>> assoc(acc.begin(), acc.end());
        std::sort(assoc.begin(), assoc.end(), associate_order);
        if (params.max_associates_per_profile &&
            assoc.size() > static_cast<std::size_t>(*params.max_associates_per_profile))
            assoc.resize(static_cast<std::size_t>(*params.max_associates_per_profile));
        m.profiles.emplace(code, CategoryProfile(code, std::move(assoc), n));
    }
    if (m.profiles.empty())
        throw TrainError("no category could be trained with the given parameters");
    return m;
}

std::string_view to_string(CountWeighting w)
{
    return w == CountWeighting::inverse ? "inverse" : "none";
}

CountWeighting parse_count_weighting(std::string_view name)
{
    if (name == "inverse")
        return CountWeighting::inverse;
    if (name == "none")
        return CountWeighting::none;
    throw ConfigError("unknown descriptor_count_weighting '" + std::string(name) + "'");
}

} // namespace profcat
