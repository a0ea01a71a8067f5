#include "profcat/error.hpp"
#include "profcat/indexer.hpp"

#include "support/oracles.hpp"
#include "support/synthetic.hpp"

#include <doctest.h>

#include <omp.h>

#include <cmath>
#include <random>

using namespace profcat;
using testing::rank_oracle;

namespace {

Model toy_model()
{
    Model m;
    m.profiles.emplace("A", CategoryProfile("A", {{"apple", 2.0}, {"pear", 1.0}}, 4));
    m.profiles.emplace("B", CategoryProfile("B", {{"pear", 3.0}, {"plum", 1.0}}, 4));
    m.profiles.emplace("C", CategoryProfile("C", {{"kiwi", 1.0}}, 4));
    return m;
}

FeatureDoc fdoc(std::map<std::string, std::int64_t> f)
{
    FeatureDoc d;
    d.doc_id = "d";
    d.features = std::move(f);
    d.token_count = d.total_count();
    return d;
}

std::size_t position(const RankedAssignment& r, const std::string& code)
{
    for (std::size_t i = 0; i < r.entries.size(); ++i)
        if (r.entries[i].code == code)
            return i;
    return r.entries.size();
}

} // namespace

TEST_CASE("parallel vectors score exactly one")
{
    auto m = toy_model();
    auto r = rank(fdoc({{"apple", 4}, {"pear", 2}}), m, {}, 6);
    REQUIRE(r.entries.size() == 2);
    CHECK(r.entries[0].code == "A");
    CHECK(r.entries[0].weight == 1.0);
    CHECK(r.entries[1].code == "B");
    CHECK_FALSE(r.empty_document);
}

TEST_CASE("no overlap, empty documents and bad k")
{
    auto m = toy_model();
    CHECK(rank(fdoc({{"banana", 3}}), m, {}, 6).entries.empty());
    auto empty = rank(fdoc({}), m, {}, 6);
    CHECK(empty.entries.empty());
    CHECK(empty.empty_document);
    CHECK_THROWS_AS(rank(fdoc({{"apple", 1}}), m, {}, 0), ConfigError);
}

TEST_CASE("blacklist removes a code and promotes the next")
{
    auto m = toy_model();
    auto doc = fdoc({{"apple", 4}, {"pear", 2}});
    Blacklist bl{{"A"}};
    auto r = rank(doc, m, bl, 1);
    REQUIRE(r.entries.size() == 1);
    CHECK(r.entries[0].code == "B");
    CHECK(parse_blacklist("# none\nA\n\n B \n").codes == std::set<std::string>{"A", "B"});
}

TEST_CASE("ties break on ascending code")
{
    Model m;
    for (const std::string code : {"z9", "a1", "m5"})
        m.profiles.emplace(code, CategoryProfile(code, {{"t", 1.0}, {"u", 2.0}}, 4));
    auto r = rank(fdoc({{"t", 1}}), m, {}, 3);
    REQUIRE(r.entries.size() == 3);
    CHECK(r.entries[0].code == "a1");
    CHECK(r.entries[1].code == "m5");
    CHECK(r.entries[2].code == "z9");
    CHECK(r.entries[0].weight == r.entries[2].weight);

    // Single-associate profiles hit by the same feature tie whatever their
    // weight.
    Model single;
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> w(1e-3, 50.0);
    for (int i = 0; i < 40; ++i) {
        auto code = "s" + std::to_string(i);
        single.profiles.emplace(code, CategoryProfile(code, {{"t", w(rng)}}, 4));
    }
    auto s = rank(fdoc({{"t", 5}, {"v", 3}}), single, {}, 40);
    REQUIRE(s.entries.size() == 40);
    for (std::size_t i = 1; i < s.entries.size(); ++i) {
        CHECK(s.entries[i].weight == s.entries[0].weight);
        CHECK(s.entries[i - 1].code < s.entries[i].code);
    }
}

TEST_CASE("property: ranking equals the extended-precision oracle")
{
    std::mt19937_64 rng(77);
    for (int trial = 0; trial < 300; ++trial) {
        auto inst = testing::random_rank_instance(rng);
        auto got = rank(inst.doc, inst.model, {}, inst.k);
        auto want = rank_oracle(inst.doc, inst.model, {}, inst.k);
        REQUIRE(got.entries.size() == want.size());
        for (std::size_t i = 0; i < want.size(); ++i) {
            REQUIRE(got.entries[i].code == want[i].code);
            REQUIRE(std::abs(got.entries[i].weight - static_cast<double>(want[i].weight)) <= 1e-12);
            REQUIRE(got.entries[i].weight > 0.0);
            REQUIRE(got.entries[i].weight <= 1.0);
        }
    }
}

TEST_CASE("property: scaling the document leaves the ranking unchanged")
{
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 300; ++trial) {
        auto inst = testing::random_rank_instance(rng);
        auto base = rank(inst.doc, inst.model, {}, 50);
        CHECK(rank(inst.doc, inst.model, {}, 50) == base);
        for (std::int64_t alpha : {2, 3, 7, 1000}) {
            auto scaled = inst.doc;
            for (auto& [f, c] : scaled.features)
                c *= alpha;
            auto r = rank(scaled, inst.model, {}, 50);
            REQUIRE(r.entries.size() == base.entries.size());
            for (std::size_t i = 0; i < r.entries.size(); ++i) {
                REQUIRE(r.entries[i].code == base.entries[i].code);
                REQUIRE(std::abs(r.entries[i].weight - base.entries[i].weight) <= 1e-12);
            }
        }
    }
}

TEST_CASE("property: a feature unique to one profile never lowers it against unrelated profiles")
{
    std::mt19937_64 rng(55);
    int checked = 0;
    for (int trial = 0; trial < 300; ++trial) {
        auto inst = testing::random_rank_instance(rng);
        if (inst.doc.features.empty())
            continue;
        // Give profile P a feature nobody else has.
        auto& [p_code, p] = *inst.model.profiles.begin();
        auto assoc = p.associates();
        assoc.emplace_back("unique_feature", 3.5);
        const std::string code = p_code;
        inst.model.profiles[code] = CategoryProfile(code, assoc, 4);

        auto before = rank(inst.doc, inst.model, {}, 1000);
        auto doc = inst.doc;
        doc.features["unique_feature"] = 1 + static_cast<std::int64_t>(rng() % 5);
        auto after = rank(doc, inst.model, {}, 1000);
        for (const auto& e : before.entries) {
            if (e.code == code || position(before, code) > position(before, e.code))
                continue;
            REQUIRE(position(after, code) < position(after, e.code));
            ++checked;
        }
    }
    CHECK(checked > 100);
}

TEST_CASE("batch ranking: parallel equals serial and keeps order")
{
    omp_set_num_threads(4);
    std::mt19937_64 rng(99);
    auto inst = testing::random_rank_instance(rng, 50, 200);
    std::vector<FeatureDoc> docs;
    for (int i = 0; i < 64; ++i) {
        auto d = testing::random_rank_instance(rng, 1, 200).doc;
        d.doc_id = "doc" + std::to_string(i);
        docs.push_back(d);
    }
    auto par = rank_batch(docs, inst.model, {}, 6, Execution::parallel);
    auto ser = rank_batch(docs, inst.model, {}, 6, Execution::serial);
    CHECK(par == ser);
    for (std::size_t i = 0; i < docs.size(); ++i) {
        CHECK(par[i].doc_id == docs[i].doc_id);
        CHECK(par[i] == rank(docs[i], inst.model, {}, 6, Execution::parallel));
        CHECK(par[i] == rank(docs[i], inst.model, {}, 6, Execution::serial));
    }
}

TEST_CASE("sparse dot product")
{
    CategoryProfile p("P", {{"a", 0.5}, {"b", 2.0}, {"c", 1.0}}, 1);
    CHECK(sparse_dot(fdoc({{"a", 2}, {"c", 3}, {"z", 9}}), p) == 4.0);
    CHECK(sparse_dot(fdoc({}), p) == 0.0);
}

TEST_CASE("explanations")
{
    Model m;
    m.profiles.emplace("T", CategoryProfile("T", {{"treaty", 3.0}, {"bank", 1.0}}, 4));
    std::string text = "The Treaty and the bank. A treaty!";
    auto doc = vectorize(text, m.feature_spec, {}, FormatHint::plain);
    auto ex = explain(doc, text, m, "T", {});
    REQUIRE(ex.matched.size() == 2);
    CHECK(ex.matched[0].feature == "treaty");
    CHECK(ex.matched[0].doc_count == 2);
    CHECK(ex.matched[1].feature == "bank");
    REQUIRE(ex.spans.size() == 3);
    CHECK(text.substr(ex.spans[0].begin, ex.spans[0].end - ex.spans[0].begin) == "Treaty");
    CHECK(text.substr(ex.spans[1].begin, ex.spans[1].end - ex.spans[1].begin) == "bank");
    CHECK(text.substr(ex.spans[2].begin, ex.spans[2].end - ex.spans[2].begin) == "treaty");

    auto none = explain(vectorize("nothing here", m.feature_spec, {}), "nothing here", m, "T", {});
    CHECK(none.matched.empty());
    CHECK(none.spans.empty());
    CHECK_THROWS_AS(explain(doc, text, m, "missing", {}), NotFoundError);
}

TEST_CASE("bigram explanation spans cover the pair")
{
    Model m;
    m.feature_spec = FeatureSpec::ngram(2);
    m.profiles.emplace("G", CategoryProfile("G", {{"a b", 1.0}}, 4));
    std::string text = "x a b y";
    auto doc = vectorize(text, m.feature_spec, {});
    auto ex = explain(doc, text, m, "G", {});
    REQUIRE(ex.spans.size() == 1);
    CHECK(ex.spans[0] == CharSpan{2, 5});
}

TEST_CASE("explanations skip stop-listed tokens")
{
    Model m;
    StopLists stops;
    stops.add("of the");
    m.stoplist_fingerprint = stops.fingerprint();
    m.feature_spec = FeatureSpec::ngram(2);
    m.profiles.emplace("G", CategoryProfile("G", {{"bank europe", 1.0}}, 4));
    std::string text = "Bank of the Europe";
    auto doc = vectorize(text, m.feature_spec, stops);
    CHECK(doc.features.count("bank europe") == 1);
    auto ex = explain(doc, text, m, "G", stops);
    REQUIRE(ex.spans.size() == 1);
    CHECK(ex.spans[0] == CharSpan{0, text.size()});
}

TEST_CASE("indexer checks the model against its stop lists")
{
    auto c = testing::make_synthetic({.categories = 6, .docs = 80, .seed = 2});
    StopLists stops;
    stops.add("wa");
    auto m = train(c, TrainParams{}, FeatureSpec::token(), stops);
    CHECK_THROWS_AS(Indexer(m, StopLists{}), ModelError);
    CHECK_THROWS_AS(check_compatible(m, FeatureSpec::ngram(2), stops), ModelError);

    Indexer ix(m, stops);
    const auto& d = c.docs[0];
    auto direct = rank(prepare_document(d.body, FormatHint::automatic, FeatureSpec::token(), stops, d.doc_id), m, {}, 6);
    CHECK(ix.index(d.body, FormatHint::automatic, d.doc_id, 6) == direct);
    auto prepared = ix.prepare(d.body, FormatHint::automatic, d.doc_id);
    REQUIRE_FALSE(direct.entries.empty());
    CHECK_FALSE(ix.explain(prepared, direct.entries[0].code).matched.empty());
}
