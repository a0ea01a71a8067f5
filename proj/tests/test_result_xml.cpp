#include "profcat/error.hpp"
#include "profcat/result_xml.hpp"

#include "support/xml_check.hpp"

#include <doctest.h>

#include <charconv>
#include <random>

using namespace profcat;

namespace {

RankedAssignment intervention1()
{
    RankedAssignment r;
    r.doc_id = R"(e:\EuroVoc\dist\.\docs\EN20050310.xml-intervention1.xml)";
    r.k_requested = 6;
    r.entries = {{"1542", 0.17665901837832437}, {"4315", 0.15937165360181865}, {"3052", 0.12350606022588106},
                 {"4314", 0.1070006660498749},  {"3568", 0.09116418698452647}, {"2173", 0.09104806666270188}};
    return r;
}

} // namespace

TEST_CASE("result file for a six-descriptor ranking")
{
    const std::string expected =
        R"(<result><EuroVoc documentId="e:\EuroVoc\dist\.\docs\EN20050310.xml-intervention1.xml">)"
        R"(<category code="1542" weight="0.17665901837832437"></category>)"
        R"(<category code="4315" weight="0.15937165360181865"></category>)"
        R"(<category code="3052" weight="0.12350606022588106"></category>)"
        R"(<category code="4314" weight="0.1070006660498749"></category>)"
        R"(<category code="3568" weight="0.09116418698452647"></category>)"
        R"(<category code="2173" weight="0.09104806666270188"></category>)"
        "</EuroVoc>\n</result>\n";
    CHECK(format_result_xml(std::vector<RankedAssignment>{intervention1()}) == expected);
    CHECK(testing::check_result_xml(expected).empty());
}

TEST_CASE("edge cases of the result file")
{
    CHECK(format_result_xml(std::vector<RankedAssignment>{}) == "<result></result>\n");
    RankedAssignment odd;
    odd.doc_id = "a<b & \"c\"";
    odd.entries = {{"x'1", 1.0}};
    auto xml = format_result_xml(std::vector<RankedAssignment>{odd});
    CHECK(xml == "<result><EuroVoc documentId=\"a&lt;b &amp; &quot;c&quot;\">"
                 "<category code=\"x&apos;1\" weight=\"1\"></category></EuroVoc>\n</result>\n");
    CHECK(testing::check_result_xml(xml).empty());
}

TEST_CASE("property: weights are written as shortest round-trip decimals")
{
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 20000; ++i) {
        double w = u(rng);
        auto s = format_weight(w);
        double back = 0;
        std::from_chars(s.data(), s.data() + s.size(), back);
        REQUIRE(back == w);
        auto digits = s.substr(s.find_first_not_of("0.") == std::string::npos ? s.size() : s.find_first_not_of("0."));
        std::erase(digits, '.');
        REQUIRE(digits.size() <= 17);
        REQUIRE(s.find('e') == std::string::npos);
    }
    CHECK(format_weight(0.1070006660498749) == "0.1070006660498749");
}

TEST_CASE("amendments")
{
    ResultDocument doc(intervention1());
    doc.remove("1542");
    doc.add("525");
    CHECK_FALSE(doc.contains("1542"));
    CHECK(doc.contains("525"));
    CHECK_THROWS_AS(doc.add("4315"), Error);
    CHECK_THROWS_AS(doc.add("525"), Error);
    CHECK_THROWS_AS(doc.remove("1542"), NotFoundError);
    CHECK_THROWS_AS(doc.remove("nope"), NotFoundError);

    auto entries = doc.entries();
    REQUIRE(entries.size() == 6);
    CHECK(entries.front().code == "4315");
    CHECK(entries.front().weight == 0.15937165360181865);
    CHECK(entries.back().code == "525");
    CHECK(entries.back().manual);
    CHECK_FALSE(entries.back().weight.has_value());

    auto xml = format_result_xml(std::vector<ResultDocument>{doc});
    CHECK(xml.find("code=\"1542\"") == std::string::npos);
    CHECK(xml.find("<category code=\"525\" manual=\"true\"></category></EuroVoc>") != std::string::npos);
    CHECK(testing::check_result_xml(xml).empty());

    // Restoring a deleted automatic code brings back its weight and rank.
    doc.add("1542");
    CHECK(doc.entries().front().code == "1542");
    CHECK(doc.entries().front().weight == 0.17665901837832437);
    doc.remove("525");
    CHECK(doc.added().empty());
    CHECK(format_result_xml(std::vector<ResultDocument>{doc}) ==
          format_result_xml(std::vector<RankedAssignment>{intervention1()}));

    CHECK_FALSE(doc.saved());
    doc.mark_saved();
    CHECK(doc.saved());
    doc.remove("2173");
    CHECK_FALSE(doc.saved());
}

TEST_CASE("in-place insertion goes before the closing root tag")
{
    std::string input = "<?xml version=\"1.0\"?>\n<doc><p>text</p></doc>\n";
    auto block = format_document_block("d", {{"1", 0.5, false}});
    auto out = insert_block_into_xml(input, block);
    CHECK(out == "<?xml version=\"1.0\"?>\n<doc><p>text</p>" + block + "</doc>\n");
    CHECK_THROWS_AS(insert_block_into_xml("no markup", block), ParseError);
}

TEST_CASE("the shipped schema is well-formed")
{
    auto xsd = testing::read_text(PROFCAT_SCHEMA);
    CHECK(xsd.find("name=\"result\"") != std::string::npos);
    CHECK(testing::well_formed(xsd).empty());
}
