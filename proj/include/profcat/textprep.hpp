#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace profcat {

enum class FormatHint { plain, xml, html, automatic };

FormatHint parse_format_hint(std::string_view name); // "plain" | "xml" | "html" | "auto"
std::string_view to_string(FormatHint hint);

// Strips markup for xml/html (each tag becomes one space, whitespace runs are
// collapsed), decodes the five predefined entities and numeric references,
// and drops a leading UTF-8 BOM. `automatic` selects xml when the first
// non-blank character is '<'. Throws ParseError on invalid UTF-8. An
// unterminated trailing tag is dropped and reported through `warnings`.
std::string extract_text(std::string_view raw, FormatHint hint,
                         std::vector<std::string>* warnings = nullptr);

// Lower-cases every code point (simple Unicode case mapping).
std::string fold_case(std::string_view utf8);

struct TokenSpan {
    std::string token;  // case-folded
    std::size_t begin;  // byte offsets into the tokenized text
    std::size_t end;
};

// A token is a maximal run of letters, combining marks and digits, where a
// hyphen or apostrophe may join two such characters. Tokens without any
// letter are dropped.
std::vector<TokenSpan> tokenize_with_offsets(std::string_view text);
std::vector<std::string> tokenize(std::string_view text);

struct StopLists {
    std::set<std::string> single;
    std::set<std::vector<std::string>> multi; // every phrase has >= 2 tokens

    bool empty() const noexcept { return single.empty() && multi.empty(); }

    // Adds one entry; the entry is run through tokenize() first so it matches
    // the tokenizer's normalisation. Entries with no tokens are ignored.
    void add(std::string_view entry);
    void merge(const StopLists& other);

    // Stable hash over the normalised entries; recorded in trained models.
    std::string fingerprint() const;

    bool operator==(const StopLists&) const = default;
};

// One entry per line, '#' starts a comment line, lines with internal spaces
// are multi-word phrases.
StopLists parse_stoplist(std::string_view text);
StopLists load_stoplist(const std::filesystem::path& path);

// Indices of the tokens that survive stop-list filtering, ascending. Each
// pass removes multi-word phrases (longest match first, left to right,
// non-overlapping) and then single stop words; passes repeat until the
// survivors contain no stop entry.
std::vector<std::size_t> surviving_indices(const std::vector<std::string>& tokens, const StopLists& stops);
std::vector<std::string> apply_stoplists(const std::vector<std::string>& tokens, const StopLists& stops);

struct FeatureSpec {
    enum class Kind { token, ngram, external };

    Kind kind = Kind::token;
    int n = 1;                    // window size; >= 2 for ngram
    std::string external_command; // non-empty iff kind == external

    static FeatureSpec token() { return {}; }
    static FeatureSpec ngram(int n);
    static FeatureSpec external(std::string command);

    // "token", "ngram 2", "external <command>"
    std::string to_string() const;
    static FeatureSpec parse(std::string_view text);

    bool operator==(const FeatureSpec&) const = default;
};

struct FeatureDoc {
    std::string doc_id;
    std::map<std::string, std::int64_t> features;
    std::int64_t token_count = 0; // before stop filtering

    std::int64_t total_count() const noexcept;
    bool operator==(const FeatureDoc&) const = default;
};

// `tokens` are already stop-filtered. Throws ExternalError when the external
// featurizer cannot be run or exits non-zero.
FeatureDoc featurize(const std::vector<std::string>& tokens, const FeatureSpec& spec, std::string doc_id);

// Runs the external featurizer protocol: tokens one per line on stdin,
// features one per line on stdout. Empty output lines are skipped.
std::vector<std::string> run_external_featurizer(const std::string& command,
                                                 const std::vector<std::string>& tokens);

// extract_text -> tokenize -> apply_stoplists -> featurize
FeatureDoc prepare_document(std::string_view raw, FormatHint hint, const FeatureSpec& spec,
                            const StopLists& stops, std::string doc_id);

} // namespace profcat
