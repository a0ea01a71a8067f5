#include "profcat/evaluator.hpp"

#include "profcat/error.hpp"
#include "profcat/hash.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <exception>

namespace profcat {

namespace {

void finish(EvalReport& r)
{
    r.precision = r.assigned > 0 ? static_cast<double>(r.tp) / static_cast<double>(r.assigned) : 0.0;
    r.recall = r.gold > 0 ? static_cast<double>(r.tp) / static_cast<double>(r.gold) : 0.0;
    // 2PR/(P+R) simplifies to 2tp/(assigned+gold) on pooled counts.
    r.f1 = r.tp > 0 ? 2.0 * static_cast<double>(r.tp) / static_cast<double>(r.assigned + r.gold) : 0.0;
}

std::size_t largest_gold(const Collection& c)
{
    std::size_t m = 0;
    for (const auto& d : c.docs)
        m = std::max(m, d.gold.size());
    return m;
}

nlohmann::json report_json(const EvalReport& r)
{
    return {{"mode", r.mode.to_string()}, {"n_docs", r.n_docs}, {"tp", r.tp},     {"assigned", r.assigned},
            {"gold", r.gold},             {"precision", r.precision}, {"recall", r.recall}, {"f1", r.f1}};
}

} // namespace

std::string RankMode::to_string() const
{
    return kind == Kind::dynamic ? "dynamic" : "fixed(" + std::to_string(k) + ")";
}

DocEval eval_doc(const std::set<std::string>& gold, const std::vector<std::string>& assigned, RankMode mode,
                 bool strict_rank_denominator)
{
    if (gold.empty())
        throw Error("evaluation of a document with an empty gold set");
    std::set<std::string> seen;
    for (const auto& a : assigned)
        if (!seen.insert(a).second)
            throw Error("duplicate assigned code " + a);
    if (mode.kind == RankMode::Kind::fixed && mode.k < 1)
        throw ConfigError("evaluation rank k must be >= 1");

    DocEval e;
    e.gold = gold;
    e.assigned = assigned;
    e.rank_used = mode.kind == RankMode::Kind::fixed ? mode.k : static_cast<int>(gold.size());
    auto considered = std::min(assigned.size(), static_cast<std::size_t>(e.rank_used));
    for (std::size_t i = 0; i < considered; ++i)
        if (gold.contains(assigned[i]))
            ++e.tp;
    e.assigned_counted = strict_rank_denominator ? e.rank_used : static_cast<int>(considered);
    return e;
}

EvalReport aggregate(const std::vector<DocEval>& evals, RankMode mode)
{
    if (evals.empty())
        throw Error("aggregate over zero documents");
    EvalReport r;
    r.mode = mode;
    r.n_docs = evals.size();
    for (const auto& e : evals) {
        r.tp += e.tp;
        r.assigned += e.assigned_counted;
        r.gold += static_cast<long long>(e.gold.size());
    }
    finish(r);
    return r;
}

EvalReport pool(const std::vector<EvalReport>& parts, RankMode mode)
{
    EvalReport r;
    r.mode = mode;
    for (const auto& p : parts) {
        r.n_docs += p.n_docs;
        r.tp += p.tp;
        r.assigned += p.assigned;
        r.gold += p.gold;
    }
    finish(r);
    return r;
}

FoldResult run_fold(const Collection& train_set, const Collection& test_set, const TrainParams& params,
                    const FeatureSpec& spec, const StopLists& stops, const EvalOptions& opts, int fold_index,
                    std::size_t eval_rank)
{
    if (test_set.empty())
        throw Error("evaluation with an empty test set");
    FoldResult fr;
    fr.fold = fold_index;
    fr.train_docs = train_set.size();
    fr.test_docs = test_set.size();

    Model model;
    try {
        model = train(train_set, params, spec, stops, opts.execution);
    } catch (const TrainError& e) {
        throw TrainError("fold " + std::to_string(fold_index) + ": " + e.what());
    }
    fr.categories_trained = model.profiles.size();

    std::vector<FeatureDoc> docs;
    docs.reserve(test_set.size());
    for (const auto& d : test_set.docs)
        docs.push_back(vectorize(d.body, spec, stops, params.body_format, d.doc_id));
    int rank_k = static_cast<int>(std::max<std::size_t>(eval_rank, static_cast<std::size_t>(opts.k)));
    auto ranked = rank_batch(docs, model, opts.blacklist, rank_k, opts.execution);

    std::vector<DocEval> dyn;
    for (std::size_t i = 0; i < test_set.size(); ++i) {
        std::vector<std::string> codes;
        for (const auto& e : ranked[i].entries)
            codes.push_back(e.code);
        const auto& gold = test_set.docs[i].gold;
        auto fixed = eval_doc(gold, codes, RankMode::fixed(opts.k), opts.strict_rank_denominator);
        fixed.doc_id = test_set.docs[i].doc_id;
        auto dynamic = eval_doc(gold, codes, RankMode::dynamic(), opts.strict_rank_denominator);
        dynamic.doc_id = fixed.doc_id;
        fr.docs.push_back(std::move(fixed));
        dyn.push_back(std::move(dynamic));
    }
    fr.fixed = aggregate(fr.docs, RankMode::fixed(opts.k));
    fr.dynamic = aggregate(dyn, RankMode::dynamic());
    return fr;
}

EvaluationResult cross_validate(const Collection& c, int n_folds, std::uint64_t seed, const TrainParams& params,
                                const FeatureSpec& spec, const StopLists& stops, const EvalOptions& opts)
{
    return cross_validate(c, make_folds(c, n_folds, seed), params, spec, stops, opts);
}

EvaluationResult cross_validate(const Collection& c, const SplitPlan& plan, const TrainParams& params,
                                const FeatureSpec& spec, const StopLists& stops, const EvalOptions& opts)
{
    if (plan.n_folds < 2)
        throw ConfigError("cross-validation needs at least 2 folds");
    for (const auto& d : c.docs)
        if (!plan.assignment.contains(d.doc_id))
            throw ConfigError("split plan does not cover document " + d.doc_id);

    const std::size_t eval_rank = largest_gold(c);
    const auto n = static_cast<std::size_t>(plan.n_folds);
    std::vector<Collection> train_sets(n), test_sets(n);
    for (const auto& d : c.docs) {
        auto f = static_cast<std::size_t>(plan.assignment.at(d.doc_id));
        for (std::size_t i = 0; i < n; ++i)
            (i == f ? test_sets[i] : train_sets[i]).docs.push_back(d);
    }

    std::vector<FoldResult> folds(n);
    std::vector<std::exception_ptr> errors(n);
    EvalOptions inner = opts;
    inner.execution = Execution::serial;
    auto run = [&](std::size_t i) {
        try {
            folds[i] = run_fold(train_sets[i], test_sets[i], params, spec, stops,
                                opts.execution == Execution::parallel ? inner : opts, static_cast<int>(i), eval_rank);
        } catch (...) {
            errors[i] = std::current_exception();
        }
    };
    if (opts.execution == Execution::parallel) {
        const auto count = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(dynamic, 1)
        for (std::ptrdiff_t i = 0; i < count; ++i)
            run(static_cast<std::size_t>(i));
    } else {
        for (std::size_t i = 0; i < n; ++i)
            run(i);
    }
    for (auto& e : errors)
        if (e)
            std::rethrow_exception(e);

    EvaluationResult r;
    r.method = "cv";
    r.n_folds = plan.n_folds;
    r.seed = plan.seed;
    r.params_fingerprint = params_fingerprint(params, spec);
    r.k = opts.k;
    r.strict_rank_denominator = opts.strict_rank_denominator;
    std::vector<EvalReport> fixed_parts, dynamic_parts;
    double categories = 0.0;
    for (const auto& f : folds) {
        fixed_parts.push_back(f.fixed);
        dynamic_parts.push_back(f.dynamic);
        categories += static_cast<double>(f.categories_trained);
    }
    r.fixed = pool(fixed_parts, RankMode::fixed(opts.k));
    r.fixed.per_fold = fixed_parts;
    r.dynamic = pool(dynamic_parts, RankMode::dynamic());
    r.dynamic.per_fold = dynamic_parts;
    r.mean_categories_trained = categories / static_cast<double>(n);
    r.folds = std::move(folds);
    return r;
}

EvaluationResult evaluate_fixed(const Collection& train_set, const Collection& test_set, const TrainParams& params,
                                const FeatureSpec& spec, const StopLists& stops, const EvalOptions& opts)
{
    if (test_set.empty())
        throw Error("evaluation with an empty test set");
    std::set<std::string> train_ids;
    for (const auto& d : train_set.docs)
        train_ids.insert(d.doc_id);
    Fnv1a64 ids;
    for (const auto& d : test_set.docs) {
        if (train_ids.contains(d.doc_id))
            throw Error("document " + d.doc_id + " is in both the training and the test set");
        ids.update_field(d.doc_id);
    }
    std::size_t eval_rank = std::max(largest_gold(train_set), largest_gold(test_set));

    EvaluationResult r;
    r.method = "fixed";
    r.n_folds = 1;
    r.test_ids_fingerprint = ids.hex();
    r.params_fingerprint = params_fingerprint(params, spec);
    r.k = opts.k;
    r.strict_rank_denominator = opts.strict_rank_denominator;
    r.folds.push_back(run_fold(train_set, test_set, params, spec, stops, opts, 0, eval_rank));
    r.fixed = r.folds[0].fixed;
    r.dynamic = r.folds[0].dynamic;
    r.mean_categories_trained = static_cast<double>(r.folds[0].categories_trained);
    return r;
}

std::string format_report(const EvaluationResult& r)
{
    std::string out;
    char buf[256];
    out += "# evaluation report\n";
    if (r.method == "cv")
        std::snprintf(buf, sizeof buf, "method: cv  folds: %d  seed: %llu\n", r.n_folds,
                      static_cast<unsigned long long>(r.seed));
    else
        std::snprintf(buf, sizeof buf, "method: fixed  test-ids: %s\n", r.test_ids_fingerprint.c_str());
    out += buf;
    std::snprintf(buf, sizeof buf, "params: %s  k: %d  strict-denominator: %s\n", r.params_fingerprint.c_str(), r.k,
                  r.strict_rank_denominator ? "yes" : "no");
    out += buf;
    out += "fold      docs  categories  precision     recall         f1  f1-dynamic\n";
    auto row = [&](const std::string& label, std::size_t docs, double cats, const EvalReport& fx,
                   const EvalReport& dy) {
        std::snprintf(buf, sizeof buf, "%-6s %7zu %11.1f %10.4f %10.4f %10.4f %11.4f\n", label.c_str(), docs, cats,
                      fx.precision, fx.recall, fx.f1, dy.f1);
        out += buf;
    };
    std::size_t total_docs = 0;
    for (const auto& f : r.folds) {
        row(std::to_string(f.fold), f.test_docs, static_cast<double>(f.categories_trained), f.fixed, f.dynamic);
        total_docs += f.test_docs;
    }
    row("all", total_docs, r.mean_categories_trained, r.fixed, r.dynamic);

    nlohmann::json rec;
    rec["method"] = r.method;
    rec["n_folds"] = r.n_folds;
    rec["seed"] = r.seed;
    rec["params_fingerprint"] = r.params_fingerprint;
    if (!r.test_ids_fingerprint.empty())
        rec["test_ids_fingerprint"] = r.test_ids_fingerprint;
    rec["k"] = r.k;
    rec["strict_rank_denominator"] = r.strict_rank_denominator;
    rec["mean_categories_trained"] = r.mean_categories_trained;
    rec["fixed"] = report_json(r.fixed);
    rec["dynamic"] = report_json(r.dynamic);
    auto& folds = rec["folds"] = nlohmann::json::array();
    for (const auto& f : r.folds)
        folds.push_back({{"fold", f.fold},
                         {"train_docs", f.train_docs},
                         {"test_docs", f.test_docs},
                         {"categories_trained", f.categories_trained},
                         {"fixed", report_json(f.fixed)},
                         {"dynamic", report_json(f.dynamic)}});
    out += "record: " + rec.dump() + "\n";
    return out;
}

} // namespace profcat
