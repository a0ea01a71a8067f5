#pragma once

#include "profcat/execution.hpp"
#include "profcat/textprep.hpp"
#include "profcat/trainer.hpp"

#include <filesystem>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace profcat {

struct Blacklist {
    std::set<std::string> codes;

    bool contains(const std::string& code) const { return codes.contains(code); }
};

// One code per line; '#' comment lines and blank lines are skipped.
Blacklist parse_blacklist(std::string_view text);
Blacklist load_blacklist(const std::filesystem::path& path);

struct RankEntry {
    std::string code;
    double weight = 0.0;

    bool operator==(const RankEntry&) const = default;
};

struct RankedAssignment {
    std::string doc_id;
    std::vector<RankEntry> entries; // weight desc, then code asc
    int k_requested = 0;
    bool empty_document = false;    // the document had no features

    bool operator==(const RankedAssignment&) const = default;
};

// Checks that the model was trained with this feature spec and stop list.
// Throws ModelError on mismatch.
void check_compatible(const Model& m, const FeatureSpec& spec, const StopLists& stops);

FeatureDoc vectorize(std::string_view text, const FeatureSpec& spec, const StopLists& stops,
                     FormatHint hint = FormatHint::automatic, std::string doc_id = {});

// Cosine similarity between raw feature counts and each non-blacklisted
// profile. Zero-overlap profiles are left out; the top k remain. Throws
// ConfigError for k < 1.
RankedAssignment rank(const FeatureDoc& doc, const Model& m, const Blacklist& bl, int k,
                      Execution exec = Execution::parallel);

// Parallel over documents; output order equals input order.
std::vector<RankedAssignment> rank_batch(std::span<const FeatureDoc> docs, const Model& m, const Blacklist& bl,
                                         int k, Execution exec = Execution::parallel);

// Sum of count(w) * weight(w) over shared features, accumulated in ascending
// feature order.
double sparse_dot(const FeatureDoc& doc, const CategoryProfile& p);

struct MatchedAssociate {
    std::string feature;
    double profile_weight = 0.0;
    std::int64_t doc_count = 0;
};

struct CharSpan {
    std::size_t begin = 0; // byte offsets into the extracted text
    std::size_t end = 0;

    bool operator==(const CharSpan&) const = default;
};

struct Explanation {
    std::string code;
    std::vector<MatchedAssociate> matched; // descending profile weight
    std::vector<CharSpan> spans;           // ascending
};

// `text` is the extracted text that `doc` was built from. For token and
// ngram features the spans are located by re-tokenizing with offsets; for
// external features only spans of single surviving tokens equal to a
// matched feature are reported. Throws NotFoundError for an unknown code.
Explanation explain(const FeatureDoc& doc, std::string_view text, const Model& m, const std::string& code,
                    const StopLists& stops);

} // namespace profcat

namespace profcat {

// A trained model together with the stop lists and blacklist it is used
// with. Immutable and shareable across threads; the CLI and the service both
// index through it so they rank identically.
class Indexer {
public:
    // Throws ModelError when `stops` differ from the model's stop lists.
    Indexer(Model model, StopLists stops, Blacklist blacklist = {});

    struct Prepared {
        std::string text;    // extracted text
        FeatureDoc features;
    };

    Prepared prepare(std::string_view raw, FormatHint hint, std::string doc_id) const;
    RankedAssignment index(const FeatureDoc& doc, int k, Execution exec = Execution::parallel) const;
    RankedAssignment index(std::string_view raw, FormatHint hint, std::string doc_id, int k) const;
    Explanation explain(const Prepared& doc, const std::string& code) const;

    const Model& model() const noexcept { return model_; }
    const StopLists& stops() const noexcept { return stops_; }
    const Blacklist& blacklist() const noexcept { return blacklist_; }

private:
    Model model_;
    StopLists stops_;
    Blacklist blacklist_;
};

} // namespace profcat
