#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace profcat {

struct LabeledDoc {
    std::string doc_id;
    std::set<std::string> gold;
    std::string body;

    bool operator==(const LabeledDoc&) const = default;
};

struct Collection {
    std::vector<LabeledDoc> docs;

    std::size_t size() const noexcept { return docs.size(); }
    bool empty() const noexcept { return docs.empty(); }
    bool operator==(const Collection&) const = default;
};

// Compact training format. A header line is
//     <code>( <code>)* # <doc_id>
// and every following line up to the next header is the document body.
bool is_compact_header(std::string_view line);
Collection parse_compact_text(std::string_view text);
Collection parse_compact(const std::filesystem::path& path);
std::string format_compact(const Collection& c);
void write_compact(const Collection& c, const std::filesystem::path& path);

struct SplitPlan {
    int n_folds = 0;
    std::uint64_t seed = 0;
    std::map<std::string, int> assignment; // doc_id -> fold

    std::vector<std::size_t> fold_sizes() const;
    std::set<std::string> fold_members(int fold) const;
    bool operator==(const SplitPlan&) const = default;
};

// Seeded Fisher-Yates shuffle of the doc indices, then position i goes to
// fold i mod n. Portable: the permutation depends only on (size, seed).
SplitPlan make_folds(const Collection& c, int n, std::uint64_t seed);

// "doc_id<TAB>fold" per line, in collection order of the plan's map.
std::string format_split_plan(const SplitPlan& plan);
SplitPlan parse_split_plan(std::string_view text, int n_folds, std::uint64_t seed);

struct Partition {
    Collection train;
    Collection test;
};

// Throws NotFoundError when a test id is not in `c`.
Partition split_fixed(const Collection& c, const std::set<std::string>& test_ids);

struct CollectionStats {
    std::map<std::size_t, std::size_t> label_histogram; // |gold| -> number of docs
    double mean_labels = 0.0;
    double stddev_labels = 0.0; // population
    std::map<std::string, std::size_t> usage;          // code -> number of docs
};

// Throws Error on an empty collection.
CollectionStats collection_stats(const Collection& c);

} // namespace profcat
