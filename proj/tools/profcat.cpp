// profcat: train, index, evaluate, serve, stats.
//
// Exit codes:
//   0  success
//   1  usage or configuration error
//   2  malformed or inconsistent input (corpus, thesaurus, stop list, XML)
//   3  model file error (missing, corrupted, version or spec mismatch)
//   4  training produced no category
//   5  external featurizer failure
//   6  unexpected internal error

#include "profcat/config.hpp"
#include "profcat/corpus.hpp"
#include "profcat/error.hpp"
#include "profcat/evaluator.hpp"
#include "profcat/hash.hpp"
#include "profcat/indexer.hpp"
#include "profcat/result_xml.hpp"
#include "profcat/service.hpp"
#include "profcat/thesaurus.hpp"
#include "profcat/trainer.hpp"

#include <CLI11.hpp>
#include <omp.h>

#include <algorithm>
#include <csignal>
#include <fstream>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using namespace profcat;

namespace {

enum Exit { ok = 0, usage = 1, input = 2, model = 3, training = 4, external = 5, internal = 6 };

struct Flag {
    const char* name;
    const char* key;
    const char* help;
};

// Flags shared by every subcommand; each maps onto a configuration key.
const std::vector<Flag> common_flags{
    {"--model,-m", "model", "model file"},
    {"--stoplist", "stoplist", "stop-word list (repeatable)"},
    {"--feature-spec", "feature_spec", "token | ngram N | external CMD"},
    {"--threads", "threads", "OpenMP threads (0 = default)"},
};

const std::vector<Flag> train_flags{
    {"--corpus,-i", "corpus", "compact-format training corpus"},
    {"--body-format", "body_format", "plain | xml | html | auto"},
    {"--min-docs", "min_docs_per_category", "minimum training documents per category"},
    {"--min-length", "min_doc_length_tokens", "minimum document length in tokens"},
    {"--min-freq", "min_word_corpus_freq", "minimum corpus frequency of an associate"},
    {"--min-ll", "min_loglikelihood", "minimum log-likelihood of an associate in a document"},
    {"--weighting", "descriptor_count_weighting", "none | inverse"},
    {"--max-associates", "max_associates_per_profile", "N | unlimited"},
};

const std::vector<Flag> index_flags{
    {"--input-dir", "input_dir", "directory of documents to index"},
    {"--input-file", "input_file", "single document to index"},
    {"--output,-o", "output", "result XML file (default: stdout)"},
    {"-k", "k", "descriptors per document"},
    {"--format", "format", "plain | xml | html | auto"},
    {"--blacklist", "blacklist", "codes that are never assigned"},
    {"--in-place", "in_place", "true: add the result block to each XML input file"},
};

const std::vector<Flag> evaluate_flags{
    {"--folds", "n_folds", "number of cross-validation folds"},
    {"--seed", "seed", "fold shuffle seed"},
    {"--test-ids", "test_ids", "fixed split: file with one test doc id per line"},
    {"--split-out", "split_out", "write the fold plan (doc_id TAB fold) here"},
    {"--strict-denominator", "strict_rank_denominator", "true: precision denominator is always k"},
};

const std::vector<Flag> serve_flags{
    {"--thesaurus", "thesaurus", "thesaurus file"},
    {"--host", "host", "bind address"},
    {"--port", "port", "TCP port"},
    {"--lang", "lang", "label language"},
};

struct Command {
    CLI::App* app = nullptr;
    std::string config_path;
    std::vector<std::pair<std::string, std::vector<std::string>>> values; // key -> values
};

void add_flags(Command& cmd, const std::vector<Flag>& flags)
{
    for (const auto& f : flags) {
        auto& slot = cmd.values.emplace_back(f.key, std::vector<std::string>{});
        (void)slot;
    }
    std::size_t base = cmd.values.size() - flags.size();
    for (std::size_t i = 0; i < flags.size(); ++i)
        cmd.app->add_option(flags[i].name, cmd.values[base + i].second, flags[i].help);
}

Command make_command(CLI::App& root, const char* name, const char* help,
                     std::initializer_list<const std::vector<Flag>*> groups)
{
    Command cmd;
    cmd.app = root.add_subcommand(name, help);
    cmd.app->add_option("--config,-c", cmd.config_path, "key=value configuration file");
    cmd.values.reserve(64);
    for (const auto* g : groups)
        add_flags(cmd, *g);
    return cmd;
}

JobConfig resolve(const Command& cmd)
{
    JobConfig cfg;
    if (!cmd.config_path.empty())
        cfg.load_file(cmd.config_path);
    for (const auto& [key, vals] : cmd.values) {
        if (vals.empty())
            continue;
        if (key == "stoplist")
            cfg.stoplist_paths.clear();
        for (const auto& v : vals)
            cfg.set(key, v);
    }
    if (cfg.threads > 0)
        omp_set_num_threads(cfg.threads);
    return cfg;
}

void require(const fs::path& p, const char* what)
{
    if (p.empty())
        throw ConfigError(std::string("missing required setting: ") + what);
    if (!fs::exists(p))
        throw ConfigError(std::string(what) + " not found: " + p.string());
}

std::string read_file(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    if (!in)
        throw ParseError("cannot read " + p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_output(const fs::path& p, const std::string& text)
{
    if (p.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(p, std::ios::binary);
    if (!out || !(out << text))
        throw ConfigError("cannot write " + p.string());
}

int run_train(const JobConfig& cfg)
{
    require(cfg.input_file, "corpus");
    if (cfg.model_path.empty())
        throw ConfigError("missing required setting: model");
    auto corpus = parse_compact(cfg.input_file);
    auto stops = cfg.load_stoplists();
    auto m = train(corpus, cfg.train, cfg.feature_spec, stops);
    save_model(m, cfg.model_path);

    std::size_t associates = 0;
    for (const auto& [_, p] : m.profiles)
        associates += p.size();
    std::set<std::string> seen;
    for (const auto& d : corpus.docs)
        seen.insert(d.gold.begin(), d.gold.end());
    std::cout << "documents:            " << corpus.size() << '\n'
              << "categories in corpus: " << seen.size() << '\n'
              << "categories trained:   " << m.profiles.size() << '\n'
              << "associates:           " << associates << '\n'
              << "model:                " << cfg.model_path.string() << " (" << model_fingerprint(m) << ")\n";
    return ok;
}

int run_index(const JobConfig& cfg)
{
    require(cfg.model_path, "model");
    if (cfg.input_dir.empty() == cfg.input_file.empty())
        throw ConfigError("exactly one of input_dir or input_file is required");
    if (cfg.k < 1)
        throw ConfigError("k must be >= 1");

    std::vector<fs::path> files;
    if (!cfg.input_file.empty()) {
        require(cfg.input_file, "input_file");
        files.push_back(cfg.input_file);
    } else {
        require(cfg.input_dir, "input_dir");
        for (const auto& e : fs::directory_iterator(cfg.input_dir))
            if (e.is_regular_file())
                files.push_back(e.path());
        std::sort(files.begin(), files.end());
    }

    // Documents are featurized with the spec stored in the model.
    auto m = load_model(cfg.model_path);
    Indexer indexer(std::move(m), cfg.load_stoplists(), cfg.load_blacklist());

    std::vector<std::string> raw(files.size());
    std::vector<std::string> failures;
    std::vector<char> readable(files.size(), 0);
    for (std::size_t i = 0; i < files.size(); ++i) {
        try {
            raw[i] = read_file(files[i]);
            readable[i] = 1;
        } catch (const Error& e) {
            failures.push_back(files[i].string() + ": " + e.what());
        }
    }

    std::vector<Indexer::Prepared> prepared(files.size());
    std::vector<std::string> errors(files.size());
    const auto count = static_cast<std::ptrdiff_t>(files.size());
#pragma omp parallel for schedule(dynamic, 4)
    for (std::ptrdiff_t i = 0; i < count; ++i) {
        auto u = static_cast<std::size_t>(i);
        if (!readable[u])
            continue;
        try {
            prepared[u] = indexer.prepare(raw[u], cfg.format_hint, files[u].string());
        } catch (const std::exception& e) {
            errors[u] = e.what();
        }
    }

    std::vector<FeatureDoc> docs;
    std::vector<std::size_t> origin;
    for (std::size_t i = 0; i < files.size(); ++i) {
        if (!readable[i])
            continue;
        if (!errors[i].empty()) {
            failures.push_back(files[i].string() + ": " + errors[i]);
            continue;
        }
        docs.push_back(std::move(prepared[i].features));
        origin.push_back(i);
    }
    auto ranked = rank_batch(docs, indexer.model(), indexer.blacklist(), cfg.k);

    if (cfg.in_place) {
        for (std::size_t j = 0; j < ranked.size(); ++j) {
            const auto& path = files[origin[j]];
            const auto& text = raw[origin[j]];
            bool xml = cfg.format_hint == FormatHint::xml ||
                       (cfg.format_hint == FormatHint::automatic && text.find_first_not_of(" \t\r\n\xEF\xBB\xBF") != std::string::npos &&
                        text[text.find_first_not_of(" \t\r\n\xEF\xBB\xBF")] == '<');
            if (!xml)
                continue;
            auto block = format_document_block(ranked[j].doc_id, ResultDocument(ranked[j]).entries());
            try {
                write_output(path, insert_block_into_xml(text, block));
            } catch (const Error& e) {
                failures.push_back(path.string() + ": " + e.what());
            }
        }
    }
    if (!cfg.in_place || !cfg.output_path.empty())
        write_output(cfg.output_path, format_result_xml(ranked));

    std::size_t empty = std::count_if(ranked.begin(), ranked.end(), [](const auto& r) { return r.empty_document; });
    std::cerr << "indexed " << ranked.size() << " of " << files.size() << " documents";
    if (empty)
        std::cerr << " (" << empty << " without features)";
    std::cerr << '\n';
    for (const auto& f : failures)
        std::cerr << "warning: skipped " << f << '\n';
    return ok;
}

int run_evaluate(const JobConfig& cfg)
{
    require(cfg.input_file, "corpus");
    auto corpus = parse_compact(cfg.input_file);
    auto stops = cfg.load_stoplists();
    EvalOptions opts;
    opts.k = cfg.k;
    opts.strict_rank_denominator = cfg.strict_rank_denominator;
    opts.blacklist = cfg.load_blacklist();

    EvaluationResult result;
    if (!cfg.test_ids_path.empty()) {
        require(cfg.test_ids_path, "test_ids");
        std::set<std::string> ids;
        std::istringstream in(read_file(cfg.test_ids_path));
        std::string line;
        while (std::getline(in, line)) {
            if (!line.empty() && line.back() == '\r')
                line.pop_back();
            if (!line.empty() && line.front() != '#')
                ids.insert(line);
        }
        auto parts = split_fixed(corpus, ids);
        result = evaluate_fixed(parts.train, parts.test, cfg.train, cfg.feature_spec, stops, opts);
    } else {
        auto plan = make_folds(corpus, cfg.n_folds, cfg.seed);
        if (!cfg.split_path.empty())
            write_output(cfg.split_path, format_split_plan(plan));
        result = cross_validate(corpus, plan, cfg.train, cfg.feature_spec, stops, opts);
    }
    write_output(cfg.output_path, format_report(result));
    return ok;
}

Service* active_service = nullptr;

void handle_signal(int)
{
    if (active_service)
        active_service->stop();
}

int run_serve(const JobConfig& cfg)
{
    require(cfg.model_path, "model");
    auto m = load_model(cfg.model_path);
    auto indexer = std::make_shared<const Indexer>(std::move(m), cfg.load_stoplists(), cfg.load_blacklist());
    std::optional<Thesaurus> thesaurus;
    if (!cfg.thesaurus_path.empty()) {
        require(cfg.thesaurus_path, "thesaurus");
        std::vector<std::string> warnings;
        thesaurus = load_thesaurus(cfg.thesaurus_path, &warnings);
        for (const auto& w : warnings)
            std::cerr << "warning: " << w << '\n';
    }
    ServiceOptions opts;
    opts.default_k = cfg.k;
    opts.default_format = cfg.format_hint;
    opts.lang = cfg.lang;
    opts.output_dir = cfg.output_path;
    Service service(indexer, std::move(thesaurus), opts);
    active_service = &service;
    std::signal(SIGINT, handle_signal);
    std::signal(SIGTERM, handle_signal);
    std::cerr << "listening on " << cfg.host << ':' << cfg.port << '\n';
    if (!service.listen(cfg.host, cfg.port)) {
        active_service = nullptr;
        throw ConfigError("cannot listen on " + cfg.host + ":" + std::to_string(cfg.port));
    }
    active_service = nullptr;
    return ok;
}

int run_stats(const JobConfig& cfg)
{
    require(cfg.input_file, "corpus");
    auto corpus = parse_compact(cfg.input_file);
    auto s = collection_stats(corpus);
    std::ostringstream out;
    char buf[128];
    out << "documents: " << corpus.size() << '\n' << "descriptors used: " << s.usage.size() << '\n';
    std::snprintf(buf, sizeof buf, "labels per document: mean %.4f, std-dev %.4f\n", s.mean_labels, s.stddev_labels);
    out << buf << "histogram (labels: documents):\n";
    for (const auto& [labels, docs] : s.label_histogram)
        out << "  " << labels << ": " << docs << '\n';
    std::vector<std::pair<std::string, std::size_t>> usage(s.usage.begin(), s.usage.end());
    std::stable_sort(usage.begin(), usage.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
    out << "most used descriptors:\n";
    for (std::size_t i = 0; i < std::min<std::size_t>(usage.size(), 20); ++i)
        out << "  " << usage[i].first << ": " << usage[i].second << '\n';
    write_output(cfg.output_path, out.str());
    return ok;
}

int exit_code(const std::exception_ptr& ep)
{
    try {
        std::rethrow_exception(ep);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return usage;
    } catch (const ModelError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return model;
    } catch (const TrainError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return training;
    } catch (const ExternalError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return external;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return input;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return internal;
    }
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App root{"Profile-based multi-label document categoriser"};
    root.require_subcommand(1);

    auto train_cmd = make_command(root, "train", "train category profiles from a compact corpus",
                                  {&common_flags, &train_flags});
    auto index_cmd = make_command(root, "index", "rank descriptors for documents and write result XML",
                                  {&common_flags, &index_flags});
    auto eval_cmd = make_command(root, "evaluate", "cross-validation or fixed-split evaluation",
                                 {&common_flags, &train_flags, &evaluate_flags, &index_flags});
    auto serve_cmd = make_command(root, "serve", "HTTP service for interactive review",
                                  {&common_flags, &serve_flags, &index_flags});
    auto stats_cmd = make_command(root, "stats", "label statistics of a compact corpus",
                                  {&common_flags, &train_flags, &index_flags});

    try {
        root.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = root.exit(e);
        return rc == 0 ? ok : usage;
    }

    try {
        if (*train_cmd.app)
            return run_train(resolve(train_cmd));
        if (*index_cmd.app)
            return run_index(resolve(index_cmd));
        if (*eval_cmd.app)
            return run_evaluate(resolve(eval_cmd));
        if (*serve_cmd.app)
            return run_serve(resolve(serve_cmd));
        if (*stats_cmd.app)
            return run_stats(resolve(stats_cmd));
    } catch (...) {
        return exit_code(std::current_exception());
    }
    return usage;
}
