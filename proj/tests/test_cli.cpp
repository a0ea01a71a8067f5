#include "profcat/corpus.hpp"
#include "profcat/trainer.hpp"

#include "support/synthetic.hpp"
#include "support/xml_check.hpp"

#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

using namespace profcat;
namespace fs = std::filesystem;

namespace {

struct Workspace {
    fs::path dir = fs::temp_directory_path() / "profcat_cli_test";

    Workspace()
    {
        fs::remove_all(dir);
        fs::create_directories(dir / "docs");
        auto corpus = testing::make_synthetic({.categories = 8, .docs = 160, .seed = 4});
        write_compact(corpus, dir / "corpus.txt");
        write("stop.txt", "wa\nwb wc\n");
        write("docs/b.txt", corpus.docs[1].body);
        write("docs/a.xml", "<?xml version=\"1.0\"?>\n<doc><p>" + corpus.docs[0].body + "</p></doc>\n");
        write("docs/c.txt", "broken \xC3\x28 bytes");
        write("test_ids.txt", "syn3\nsyn7\nsyn11\n");
        write("job.conf", "corpus = corpus.txt\nmodel = out.model\nstoplist = stop.txt\n");
    }
    ~Workspace() { fs::remove_all(dir); }

    void write(const std::string& name, const std::string& content) const
    {
        std::ofstream(dir / name, std::ios::binary) << content;
    }
    std::string read(const std::string& name) const { return testing::read_text((dir / name).string()); }
    std::string path(const std::string& name) const { return (dir / name).string(); }

    // Runs the tool inside the workspace; stdout and stderr go to files.
    int run(const std::string& args) const
    {
        std::string cmd = "cd '" + dir.string() + "' && '" PROFCAT_CLI "' " + args + " >stdout.txt 2>stderr.txt";
        int status = std::system(cmd.c_str());
        return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    }
};

} // namespace

TEST_CASE("train, index and evaluate from the command line")
{
    Workspace w;
    REQUIRE(w.run("train --config job.conf") == 0);
    CHECK(w.read("stdout.txt").find("categories trained:   8") != std::string::npos);
    auto model = w.read("out.model");
    REQUIRE(w.run("train --config job.conf") == 0);
    CHECK(w.read("out.model") == model);

    REQUIRE(w.run("index -m out.model --stoplist stop.txt --input-dir docs -o result.xml") == 0);
    auto xml = w.read("result.xml");
    CHECK(testing::check_result_xml(xml).empty());
    auto a = xml.find("docs/a.xml");
    auto b = xml.find("docs/b.txt");
    CHECK(a != std::string::npos);
    CHECK(b != std::string::npos);
    CHECK(a < b);
    CHECK(xml.find("docs/c.txt") == std::string::npos);
    auto err = w.read("stderr.txt");
    CHECK(err.find("indexed 2 of 3") != std::string::npos);
    CHECK(err.find("warning: skipped") != std::string::npos);

    REQUIRE(w.run("index -m out.model --stoplist stop.txt --input-file docs/b.txt -k 1") == 0);
    auto one = w.read("stdout.txt");
    CHECK(testing::check_result_xml(one).empty());
    std::size_t count = 0;
    for (auto p = one.find("<category"); p != std::string::npos; p = one.find("<category", p + 1))
        ++count;
    CHECK(count == 1);

    fs::create_directories(w.dir / "empty");
    REQUIRE(w.run("index -m out.model --stoplist stop.txt --input-dir empty") == 0);
    CHECK(w.read("stdout.txt") == "<result></result>\n");

    REQUIRE(w.run("index -m out.model --stoplist stop.txt --input-dir docs --in-place true") == 0);
    auto updated = w.read("docs/a.xml");
    CHECK(updated.find("<EuroVoc documentId=") != std::string::npos);
    CHECK(updated.find("</EuroVoc></doc>") != std::string::npos);
    CHECK(testing::well_formed(updated).empty());
    CHECK(w.read("docs/b.txt").find("EuroVoc") == std::string::npos);

    REQUIRE(w.run("evaluate --config job.conf --folds 4 --seed 9 -o report1.txt --split-out split.tsv") == 0);
    REQUIRE(w.run("evaluate --config job.conf --folds 4 --seed 9 -o report2.txt") == 0);
    auto report = w.read("report1.txt");
    CHECK(report == w.read("report2.txt"));
    CHECK(report.find("record: {") != std::string::npos);
    CHECK(report.find("\"method\":\"cv\"") != std::string::npos);
    CHECK(parse_split_plan(w.read("split.tsv"), 4, 9).assignment.size() == 160);

    REQUIRE(w.run("evaluate --config job.conf --test-ids test_ids.txt -o fixed.txt") == 0);
    auto fixed = w.read("fixed.txt");
    CHECK(fixed.find("\"method\":\"fixed\"") != std::string::npos);
    CHECK(fixed.find("\"test_ids_fingerprint\":\"") != std::string::npos);

    REQUIRE(w.run("stats --corpus corpus.txt") == 0);
    CHECK(w.read("stdout.txt").find("documents: 160") != std::string::npos);
}

TEST_CASE("exit codes")
{
    Workspace w;
    CHECK(w.run("") == 1);
    CHECK(w.run("train --corpus missing.txt -m x.model") == 1);
    CHECK(w.run("train --config job.conf --weighting sqrt") == 1);
    CHECK(w.run("index -m nope.model --input-dir docs") == 1);

    w.write("bad_corpus.txt", "text before any header\n");
    CHECK(w.run("train --corpus bad_corpus.txt -m x.model") == 2);

    w.write("broken.model", "profcat-model\nformat_version 1\ngarbage\n");
    CHECK(w.run("index -m broken.model --input-dir docs") == 3);
    REQUIRE(w.run("train --config job.conf") == 0);
    CHECK(w.run("index -m out.model --input-dir docs") == 3); // stop lists differ from training

    CHECK(w.run("train --config job.conf --min-docs 1000") == 4);
    CHECK(w.run("train --config job.conf --feature-spec 'external false'") == 5);
    CHECK(w.run("--help") == 0);
}
