#pragma once

#include "profcat/corpus.hpp"
#include "profcat/execution.hpp"
#include "profcat/textprep.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace profcat {

enum class CountWeighting { none, inverse };

struct TrainParams {
    int min_docs_per_category = 4;
    int min_doc_length_tokens = 100;
    int min_word_corpus_freq = 4;
    double min_loglikelihood = 5.0;
    CountWeighting descriptor_count_weighting = CountWeighting::inverse;
    std::optional<int> max_associates_per_profile; // nullopt = unlimited
    FormatHint body_format = FormatHint::automatic;

    // Throws ConfigError on out-of-range values.
    void validate() const;
    bool operator==(const TrainParams&) const = default;
};

struct CorpusStats {
    std::int64_t total_tokens = 0;
    std::unordered_map<std::string, std::int64_t> feature_freq;
    std::int64_t n_docs = 0;

    bool operator==(const CorpusStats&) const = default;
};

CorpusStats corpus_statistics(const std::vector<FeatureDoc>& docs);

// Over-represented features of `doc` with their log-likelihood score against
// the corpus. Throws TrainError for an empty document or a feature that
// `stats` does not know.
std::map<std::string, double> doc_loglikelihood(const FeatureDoc& doc, const CorpusStats& stats);

class CategoryProfile {
public:
    CategoryProfile() = default;
    // Sorts associates by (weight desc, feature asc) and caches the norm.
    CategoryProfile(std::string code, std::vector<std::pair<std::string, double>> associates, int n_train_docs);

    const std::string& code() const noexcept { return code_; }
    // Sorted by descending weight, then feature.
    const std::vector<std::pair<std::string, double>>& associates() const noexcept { return associates_; }
    double norm() const noexcept { return norm_; }
    double norm_squared() const noexcept { return norm_sq_; }
    int n_train_docs() const noexcept { return n_train_docs_; }

    // 0 when absent.
    double weight(const std::string& feature) const;
    // Positions into associates(), ordered by feature string.
    const std::vector<std::uint32_t>& feature_order() const noexcept { return feature_order_; }
    std::size_t size() const noexcept { return associates_.size(); }

    bool operator==(const CategoryProfile& o) const
    {
        return code_ == o.code_ && associates_ == o.associates_ && n_train_docs_ == o.n_train_docs_;
    }

private:
    std::string code_;
    std::vector<std::pair<std::string, double>> associates_;
    std::unordered_map<std::string, double> lookup_;
    std::vector<std::uint32_t> feature_order_;
    double norm_ = 0.0;
    double norm_sq_ = 0.0;
    int n_train_docs_ = 0;
};

inline constexpr int model_format_version = 1;

struct Model {
    std::map<std::string, CategoryProfile> profiles;
    TrainParams params;
    FeatureSpec feature_spec;
    std::string stoplist_fingerprint;
    int format_version = model_format_version;

    bool operator==(const Model&) const = default;
};

// Per-document work (text preparation, log-likelihood scoring) runs in
// parallel under Execution::parallel; contributions are merged in document
// order so both modes yield identical models. Throws TrainError when no
// category can be trained.
Model train(const Collection& collection, const TrainParams& params, const FeatureSpec& spec,
            const StopLists& stops, Execution exec = Execution::parallel);

// Model text format: see docs/formats.md.
std::string serialize_model(const Model& m);
Model deserialize_model(std::string_view bytes);
void save_model(const Model& m, const std::filesystem::path& path);
Model load_model(const std::filesystem::path& path);

// Hash of the serialised model.
std::string model_fingerprint(const Model& m);
// Hash of the training parameters and feature spec only.
std::string params_fingerprint(const TrainParams& p, const FeatureSpec& spec);

std::string_view to_string(CountWeighting w);
CountWeighting parse_count_weighting(std::string_view name);

} // namespace profcat
