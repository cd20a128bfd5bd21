#include <doctest.h>

#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cli.hpp"
#include "refinery/corpus_io.hpp"
#include "refinery/pipeline.hpp"
#include "refinery/stats.hpp"
#include "synth.hpp"
#include "tempdir.hpp"

using namespace refinery;
using refinery::testing::TempDir;
using refinery::testing::read_file;
using refinery::testing::write_file;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result call(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::filesystem::path write_corpus_file(const TempDir& dir, std::size_t n, std::uint64_t seed) {
    const auto path = dir / "in.jsonl";
    write_corpus(synth::web_corpus(n, seed), path);
    return path;
}

}  // namespace

TEST_CASE("process writes four artifacts") {
    TempDir dir;
    const auto in = write_corpus_file(dir, 120, 1);
    const auto out = dir / "out";
    const auto r = call({"process", "--source", "web", "--in", in.string(), "--out", out.string(), "--seed", "7"});
    REQUIRE_MESSAGE(r.code == cli::kExitOk, r.err);
    for (const char* f : {"manifest.json", "corpus.jsonl", "drops.jsonl", "report.json"}) {
        CHECK_MESSAGE(std::filesystem::exists(out / f), f);
    }
    CHECK(r.out.find("read 120") != std::string::npos);

    const auto manifest = nlohmann::json::parse(read_file(out / "manifest.json"));
    CHECK(manifest.at("seed") == 7);
    CHECK(manifest.at("source") == "web");
    CHECK(manifest.at("version") == cli::kVersion);
    CHECK(manifest.at("config_hash").get<std::string>().size() == 16);
    CHECK(manifest.at("spec").at("dedup").at("seed") == 7);

    // Every input id is retained or logged exactly once.
    const auto retained = read_corpus(out / "corpus.jsonl");
    const auto drops = pipeline::read_drop_log(out / "drops.jsonl");
    CHECK(retained.size() + drops.size() == 120);
    CHECK_FALSE(pipeline::load_report(out / "report.json").check().has_value());

    // Same manifest inputs, other worker count: identical bytes.
    const auto out2 = dir / "out2";
    REQUIRE(call({"process", "--source", "web", "--in", in.string(), "--out", out2.string(), "--seed", "7", "--jobs",
                  "4"})
                .code == 0);
    CHECK(read_file(out / "corpus.jsonl") == read_file(out2 / "corpus.jsonl"));
    CHECK(read_file(out / "drops.jsonl") == read_file(out2 / "drops.jsonl"));
    CHECK(read_file(out / "report.json") == read_file(out2 / "report.json"));
}

TEST_CASE("exit codes") {
    TempDir dir;
    const auto in = write_corpus_file(dir, 10, 2);

    write_file(dir / "bad.json", R"({"source":"book_text","stages":[{"op":"charnorm"},{"op":"evaluate_book"}]})");
    auto r = call({"process", "--spec", (dir / "bad.json").string(), "--in", in.string(), "--out", (dir / "o").string()});
    CHECK(r.code == cli::kExitConfig);
    CHECK(r.err.find("document-stage-first") != std::string::npos);

    r = call({"process", "--source", "blog", "--in", in.string(), "--out", (dir / "o").string()});
    CHECK(r.code == cli::kExitConfig);
    r = call({"process", "--source", "web", "--in", (dir / "missing.jsonl").string(), "--out", (dir / "o").string()});
    CHECK(r.code == cli::kExitIo);
    r = call({"process", "--source", "web"});
    CHECK(r.code == cli::kExitConfig);
    r = call({"frobnicate"});
    CHECK(r.code == cli::kExitConfig);

    write_file(dir / "dup.jsonl", "{\"id\":\"a\",\"text\":\"x\"}\n{\"id\":\"a\",\"text\":\"y\"}\n");
    r = call({"process", "--source", "social", "--strict", "--in", (dir / "dup.jsonl").string(), "--out",
              (dir / "o").string()});
    CHECK(r.code == cli::kExitIo);
    CHECK(r.err.find("line 2") != std::string::npos);

    r = call({"validate-config", "--spec", (dir / "bad.json").string()});
    CHECK(r.code == cli::kExitConfig);
    r = call({"validate-config", "--dump-preset", "wikishia"});
    REQUIRE(r.code == 0);
    write_file(dir / "wiki.json", r.out);
    r = call({"validate-config", "--spec", (dir / "wiki.json").string()});
    CHECK(r.code == 0);
    CHECK(r.out.rfind("ok ", 0) == 0);
}

TEST_CASE("dedup command") {
    TempDir dir;
    write_file(dir / "in.jsonl",
               "{\"id\":\"m1\",\"text\":\"قیمت دلار ۵۸۳۰۰ تومان شنبه\",\"source\":\"social\"}\n"
               "{\"id\":\"m2\",\"text\":\"قیمت دلار ۵۸۹۰۰ تومان دوشنبه\",\"source\":\"social\"}\n"
               "{\"id\":\"m3\",\"text\":\"هوا امروز آفتابی است\",\"source\":\"social\"}\n");
    auto r = call({"dedup", "--in", (dir / "in.jsonl").string(), "--out", (dir / "d").string()});
    REQUIRE_MESSAGE(r.code == 0, r.err);
    const auto kept = read_corpus(dir / "d" / "corpus.jsonl");
    REQUIRE(kept.size() == 2);
    CHECK(kept[0].text == "قیمت دلار ۵۸۳۰۰ تومان شنبه");
    const auto dups = read_file(dir / "d" / "duplicates.jsonl");
    CHECK(dups.find("\"representative\":\"m1\"") != std::string::npos);

    r = call({"dedup", "--mode", "exact", "--min-sim", "0.98", "--in", (dir / "in.jsonl").string(), "--out",
              (dir / "e").string()});
    REQUIRE(r.code == 0);
    CHECK(read_corpus(dir / "e" / "corpus.jsonl").size() == 3);
    CHECK(read_file(dir / "e" / "duplicates.jsonl").empty());

    r = call({"dedup", "--hashes", "100", "--in", (dir / "in.jsonl").string(), "--out", (dir / "f").string()});
    CHECK(r.code == cli::kExitConfig);
}

TEST_CASE("stats command") {
    TempDir dir;
    const auto in = write_corpus_file(dir, 80, 3);
    REQUIRE(call({"process", "--source", "web", "--in", in.string(), "--out", (dir / "p").string()}).code == 0);

    auto r = call({"stats", "--corpus", in.string(), "--out", (dir / "s1").string()});
    REQUIRE_MESSAGE(r.code == 0, r.err);
    CHECK(std::filesystem::exists(dir / "s1" / "lengths.csv"));
    CHECK_FALSE(std::filesystem::exists(dir / "s1" / "reduction.csv"));

    r = call({"stats", "--report", (dir / "p" / "report.json").string(), "--out", (dir / "s2").string()});
    REQUIRE(r.code == 0);
    CHECK_FALSE(std::filesystem::exists(dir / "s2" / "lengths.csv"));
    CHECK(std::filesystem::exists(dir / "s2" / "reduction.csv"));

    r = call({"stats", "--corpus", in.string(), "--report", (dir / "p" / "report.json").string(), "--histogram", "--out",
              (dir / "s3").string()});
    REQUIRE(r.code == 0);
    const auto lengths = stats::parse_lengths_csv(read_file(dir / "s3" / "lengths.csv"));
    auto expected = stats::length_distribution(read_corpus(in));
    CHECK(lengths == expected);
    const auto summary =
        stats::reduction_summary(std::vector<RunReport>{pipeline::load_report(dir / "p" / "report.json")});
    CHECK(stats::parse_reduction_csv(read_file(dir / "s3" / "reduction.csv")) == stats::reduction_table(summary));
    CHECK(std::filesystem::exists(dir / "s3" / "lengths_hist.csv"));

    r = call({"stats", "--out", (dir / "s4").string()});
    CHECK(r.code == cli::kExitConfig);
}

TEST_CASE("inspect-drops") {
    TempDir dir;
    const auto in = write_corpus_file(dir, 100, 4);
    REQUIRE(call({"process", "--source", "web", "--in", in.string(), "--out", (dir / "p").string()}).code == 0);
    auto r = call({"inspect-drops", "--drops", (dir / "p" / "drops.jsonl").string(), "--reason", "Duplicate"});
    REQUIRE(r.code == 0);
    CHECK(r.out.rfind("id\tsource\tstage\treason\tvalue\tthreshold\n", 0) == 0);
    std::istringstream lines(r.out);
    std::string line;
    std::getline(lines, line);
    std::size_t rows = 0;
    while (std::getline(lines, line)) {
        ++rows;
        CHECK(line.find("\tDuplicate\t") != std::string::npos);
    }
    CHECK(rows > 0);

    // Running the pipeline directly gives the same rows.
    const auto direct = call({"inspect-drops", "--in", in.string(), "--source", "web", "--reason", "Duplicate"});
    CHECK(direct.out == r.out);
    CHECK(call({"inspect-drops", "--drops", (dir / "p" / "drops.jsonl").string(), "--reason", "Bogus"}).code ==
          cli::kExitConfig);
}

TEST_CASE("data directory from the environment") {
    TempDir dir;
    write_file(dir / "data" / "rules" / "rules_social.tsv", "word\tanywhere\tdelete_match\tACME\n");
    write_file(dir / "in.jsonl", "{\"id\":\"s\",\"source\":\"social\",\"text\":\"ACME این پیام به اندازه کافی بلند است تا بماند\"}\n");
    ::setenv(cli::kDataDirEnv, (dir / "data").c_str(), 1);
    const auto r = call({"process", "--source", "social", "--in", (dir / "in.jsonl").string(), "--out",
                         (dir / "o").string()});
    ::unsetenv(cli::kDataDirEnv);
    REQUIRE_MESSAGE(r.code == 0, r.err);
    const auto kept = read_corpus(dir / "o" / "corpus.jsonl");
    REQUIRE(kept.size() == 1);
    CHECK(kept[0].text.find("ACME") == std::string::npos);
}
