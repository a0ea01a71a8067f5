#include "profcat/error.hpp"
#include "profcat/thesaurus.hpp"

#include <doctest.h>

#include <random>

using namespace profcat;

namespace {

const char* sample = R"(# sample
field 04
label = POLITICS

descriptor 525
label.en = parliamentary debate
label.fr = débat parlementaire
broader = 1542
field = 04

descriptor 1542
label.en = Parliament
narrower = 525
related = 4315

descriptor 4315
label.en = parliamentary group
related = 1542
)";

// Random DAG: broader links only point at lower-numbered descriptors, so the
// result is acyclic by construction. Reverse links are filled in to make the
// input already symmetric.
Thesaurus random_thesaurus(std::mt19937_64& rng)
{
    std::uniform_int_distribution<int> size(1, 40);
    std::bernoulli_distribution link(0.08);
    std::bernoulli_distribution has_fr(0.5);
    int n = size(rng);
    std::map<std::string, Descriptor> ds;
    std::map<std::string, std::string> fields{{"f1", "FIELD ONE"}, {"f2", "FIELD TWO"}};
    auto code = [](int i) { return "d" + std::to_string(i); };
    for (int i = 0; i < n; ++i) {
        auto& d = ds[code(i)];
        d.code = code(i);
        d.labels["en"] = "label " + std::to_string(i * 7 % 13) + " term";
        if (has_fr(rng))
            d.labels["fr"] = "étiquette " + std::to_string(i);
        if (i % 3 == 0)
            d.field_id = i % 2 ? "f1" : "f2";
    }
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < i; ++j) {
            if (link(rng)) {
                ds[code(i)].broader.push_back(code(j));
                ds[code(j)].narrower.push_back(code(i));
            } else if (link(rng)) {
                ds[code(i)].related.push_back(code(j));
                ds[code(j)].related.push_back(code(i));
            }
        }
    return Thesaurus(std::move(ds), std::move(fields));
}

bool listed(const std::vector<std::string>& v, const std::string& x)
{
    return std::find(v.begin(), v.end(), x) != v.end();
}

} // namespace

TEST_CASE("parse and navigate a small thesaurus")
{
    std::vector<std::string> warnings;
    auto t = parse_thesaurus(sample, &warnings);
    CHECK(warnings.empty());
    REQUIRE(t.size() == 3);
    const Descriptor* d = t.find("525");
    REQUIRE(d);
    CHECK(d->display("en") == "parliamentary debate");
    CHECK(d->display("fr") == "débat parlementaire");
    CHECK(d->display("de") == "525");

    auto n = t.neighborhood("525");
    REQUIRE(n.broader.size() == 1);
    CHECK(n.broader[0]->code == "1542");
    CHECK(n.narrower.empty());
    CHECK(n.field == "POLITICS");

    auto p = t.neighborhood("1542");
    REQUIRE(p.related.size() == 1);
    CHECK(p.related[0]->code == "4315");
    CHECK_THROWS_AS(t.neighborhood("9999"), NotFoundError);
}

TEST_CASE("one-sided links are repaired with a warning")
{
    std::vector<std::string> warnings;
    auto t = parse_thesaurus("descriptor a\nbroader = b\ndescriptor b\ndescriptor c\nrelated = a\n", &warnings);
    CHECK(warnings.size() == 2);
    CHECK(t.find("b")->narrower == std::vector<std::string>{"a"});
    CHECK(t.find("a")->related == std::vector<std::string>{"c"});
}

TEST_CASE("integrity errors")
{
    CHECK_THROWS_AS(parse_thesaurus("descriptor a\nbroader = missing\n"), IntegrityError);
    CHECK_THROWS_AS(parse_thesaurus("descriptor a\nrelated = a\n"), IntegrityError);
    CHECK_THROWS_AS(parse_thesaurus("descriptor a\nbroader = b\ndescriptor b\nbroader = c\ndescriptor c\nbroader = a\n"),
                    IntegrityError);
    CHECK_THROWS_AS(parse_thesaurus("descriptor a\nfield = nowhere\n"), IntegrityError);
    CHECK_THROWS_AS(parse_thesaurus("descriptor a\ndescriptor a\n"), ParseError);
    CHECK_THROWS_AS(parse_thesaurus("label = x\n"), ParseError);
    CHECK_THROWS_AS(parse_thesaurus("descriptor a\ncolour = red\n"), ParseError);
}

TEST_CASE("missing reference names the code")
{
    try {
        parse_thesaurus("descriptor a\nnarrower = zz9\n");
        FAIL("expected IntegrityError");
    } catch (const IntegrityError& e) {
        CHECK(std::string(e.what()).find("zz9") != std::string::npos);
    }
}

TEST_CASE("search is case-insensitive and ordered by match position then code")
{
    auto t = parse_thesaurus(sample);
    auto hits = t.search("PARLIAMENT", "en");
    REQUIRE(hits.size() == 3);
    CHECK(hits[0]->code == "1542");
    CHECK(hits[1]->code == "4315");
    CHECK(hits[2]->code == "525");
    CHECK(t.search("débat", "fr").size() == 1);
    CHECK(t.search("parliament", "xx").empty());
    CHECK(t.search("nothing like this", "en").empty());
}

TEST_CASE("property: links are symmetric and the text form round-trips")
{
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 200; ++trial) {
        auto t = random_thesaurus(rng);
        for (const auto& [code, d] : t.descriptors()) {
            for (const auto& b : d.broader)
                REQUIRE(listed(t.find(b)->narrower, code));
            for (const auto& n : d.narrower)
                REQUIRE(listed(t.find(n)->broader, code));
            for (const auto& r : d.related)
                REQUIRE(listed(t.find(r)->related, code));
        }
        std::vector<std::string> warnings;
        auto back = parse_thesaurus(format_thesaurus(t), &warnings);
        REQUIRE(warnings.empty());
        REQUIRE(back == t);
    }
}
