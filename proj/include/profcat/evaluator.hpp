#pragma once

#include "profcat/corpus.hpp"
#include "profcat/execution.hpp"
#include "profcat/indexer.hpp"
#include "profcat/trainer.hpp"

#include <optional>
#include <set>
#include <string>
#include <vector>

namespace profcat {

// fixed(k): score the top k assignments; dynamic: score the top |gold|.
struct RankMode {
    enum class Kind { fixed, dynamic };
    Kind kind = Kind::fixed;
    int k = 6;

    static RankMode fixed(int k) { return {Kind::fixed, k}; }
    static RankMode dynamic() { return {Kind::dynamic, 0}; }
    std::string to_string() const;
    bool operator==(const RankMode&) const = default;
};

struct DocEval {
    std::string doc_id;
    std::set<std::string> gold;
    std::vector<std::string> assigned;
    int rank_used = 0;
    int tp = 0;
    int assigned_counted = 0; // precision denominator contribution
};

// With `strict_rank_denominator` the precision denominator is always
// rank_used; otherwise it is min(rank_used, |assigned|). Throws Error for an
// empty gold set or duplicate assignments.
DocEval eval_doc(const std::set<std::string>& gold, const std::vector<std::string>& assigned, RankMode mode,
                 bool strict_rank_denominator = false);

struct EvalReport {
    RankMode mode;
    std::size_t n_docs = 0;
    long long tp = 0;
    long long assigned = 0;
    long long gold = 0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    std::vector<EvalReport> per_fold;
};

// Micro-averaged over pooled counts. Throws Error on an empty list.
EvalReport aggregate(const std::vector<DocEval>& evals, RankMode mode);
EvalReport pool(const std::vector<EvalReport>& parts, RankMode mode);

struct EvalOptions {
    int k = 6;
    bool strict_rank_denominator = false;
    Blacklist blacklist;
    Execution execution = Execution::parallel;
};

struct FoldResult {
    int fold = 0;
    std::size_t train_docs = 0;
    std::size_t test_docs = 0;
    std::size_t categories_trained = 0;
    EvalReport fixed;
    EvalReport dynamic;
    std::vector<DocEval> docs; // fixed-mode evaluations, in test-collection order
};

struct EvaluationResult {
    std::string method;            // "cv" or "fixed"
    int n_folds = 0;
    std::uint64_t seed = 0;
    std::string test_ids_fingerprint; // fixed split only
    std::string params_fingerprint;
    int k = 6;
    bool strict_rank_denominator = false;
    EvalReport fixed;   // pooled; per_fold filled for cv
    EvalReport dynamic; // pooled; per_fold filled for cv
    std::vector<FoldResult> folds;
    double mean_categories_trained = 0.0;
};

// One train/test round. The test docs are ranked at max(k, largest gold set)
// and scored in both modes.
FoldResult run_fold(const Collection& train_set, const Collection& test_set, const TrainParams& params,
                    const FeatureSpec& spec, const StopLists& stops, const EvalOptions& opts, int fold_index,
                    std::size_t eval_rank);

// Folds run in parallel under Execution::parallel (training inside each fold
// is then serial). Throws TrainError when a fold trains no category.
EvaluationResult cross_validate(const Collection& c, int n_folds, std::uint64_t seed, const TrainParams& params,
                                const FeatureSpec& spec, const StopLists& stops, const EvalOptions& opts);
EvaluationResult cross_validate(const Collection& c, const SplitPlan& plan, const TrainParams& params,
                                const FeatureSpec& spec, const StopLists& stops, const EvalOptions& opts);

// Throws Error for an empty test set or overlapping ids.
EvaluationResult evaluate_fixed(const Collection& train_set, const Collection& test_set, const TrainParams& params,
                                const FeatureSpec& spec, const StopLists& stops, const EvalOptions& opts);

// Human-readable table followed by one machine-readable JSON record line.
std::string format_report(const EvaluationResult& r);

} // namespace profcat
