#pragma once

#include "profcat/indexer.hpp"
#include "profcat/textprep.hpp"
#include "profcat/trainer.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace profcat {

// Settings shared by all CLI subcommands and the service. Loaded from a flat
// key=value file; command-line flags are applied on top through set().
struct JobConfig {
    std::filesystem::path model_path;
    std::filesystem::path input_dir;
    std::filesystem::path input_file; // corpus for train/evaluate/stats, single document for index
    std::filesystem::path output_path;
    std::filesystem::path blacklist_path;
    std::vector<std::filesystem::path> stoplist_paths;
    std::filesystem::path thesaurus_path;
    std::filesystem::path test_ids_path; // evaluate: fixed split
    std::filesystem::path split_path;    // evaluate: write the fold plan here

    int k = 6;
    FormatHint format_hint = FormatHint::automatic;
    TrainParams train;
    FeatureSpec feature_spec;
    std::uint64_t seed = 1;
    int n_folds = 10;
    bool strict_rank_denominator = false;
    bool in_place = false;
    int threads = 0; // 0 = OpenMP default
    std::string host = "127.0.0.1";
    int port = 8080;
    std::string lang = "en";

    // Throws ConfigError for an unknown key or a malformed value.
    void set(std::string_view key, std::string_view value);
    // Reads "key = value" lines; '#' starts a comment line. Relative paths
    // are resolved against the file's directory.
    void load_file(const std::filesystem::path& path);

    StopLists load_stoplists() const;
    Blacklist load_blacklist() const;

    static std::vector<std::string> keys();
};

} // namespace profcat
