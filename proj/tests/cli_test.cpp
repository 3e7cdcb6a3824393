#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>

#include "fixtures.hpp"
#include "fqbank/corpus.hpp"
#include "fqbank/exchange.hpp"

using fqbank::testing::data_path;
using fqbank::testing::read_file;
using fqbank::testing::TempDir;

namespace {

struct RunResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

RunResult run(const std::string& args, const TempDir& dir) {
    const auto out = dir / "stdout.txt";
    const auto err = dir / "stderr.txt";
    const std::string cmd =
        std::string("'") + FQBANK_CLI_PATH + "' " + args + " >'" + out.string() + "' 2>'" + err.string() + "'";
    const int status = std::system(cmd.c_str());
    RunResult r;
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = read_file(out);
    r.err = read_file(err);
    return r;
}

std::string kurt_generate_args(const std::filesystem::path& out_dir, const std::string& extra = "") {
    return "generate --corpus '" + data_path("kurt_godel.jsonl").string() + "' --catalog '" +
           data_path("catalog_kurt.tsv").string() + "' --paraphrases '" + data_path("paraphrases_kurt.jsonl").string() +
           "' --lexicon '" + data_path("lexicon_1k.txt").string() + "' --out-dir '" + out_dir.string() + "' " + extra;
}

} // namespace

TEST(Cli, GenerateIsDeterministicAcrossRunsAndWorkers) {
    TempDir dir("cli-gen");
    const auto corpus = dir / "corpus.jsonl";
    fqbank::testing::write_corpus(corpus, fqbank::testing::synthetic_corpus(30));
    std::string catalog_text;
    for (const auto& [surface, type] : fqbank::testing::synthetic_entities()) {
        catalog_text += surface + "\t" + std::string(fqbank::to_string(type)) + "\n";
    }
    std::ofstream(dir / "catalog.tsv") << catalog_text;
    auto args = [&](const std::string& out, int workers) {
        return "generate --corpus '" + corpus.string() + "' --catalog '" + (dir / "catalog.tsv").string() +
               "' --lexicon '" + data_path("lexicon_1k.txt").string() + "' --seed 42 --workers " +
               std::to_string(workers) + " --out-dir '" + (dir / out).string() + "'";
    };
    ASSERT_EQ(run(args("a", 1), dir).exit_code, 0) << read_file(dir / "stderr.txt");
    ASSERT_EQ(run(args("b", 1), dir).exit_code, 0);
    ASSERT_EQ(run(args("c", 8), dir).exit_code, 0);
    for (const auto* file : {"dataset.jsonl", "audit.jsonl", "stats.txt"}) {
        const auto a = read_file(dir / "a" / file);
        EXPECT_FALSE(a.empty()) << file;
        EXPECT_EQ(a, read_file(dir / "b" / file)) << file;
        EXPECT_EQ(a, read_file(dir / "c" / file)) << file;
    }
    EXPECT_FALSE(std::filesystem::exists(dir / "a" / "dataset.jsonl.partial"));
}

TEST(Cli, ExampleDialogEndToEnd) {
    TempDir dir("cli-e2e");
    const auto gen = run(kurt_generate_args(dir / "out", "--seed 42 --target-history"), dir);
    ASSERT_EQ(gen.exit_code, 0) << gen.err;
    EXPECT_NE(gen.out.find("Dialog"), std::string::npos);
    const auto dataset = (dir / "out" / "dataset.jsonl").string();
    std::ifstream in(dataset);
    const auto samples = fqbank::read_samples(in);
    ASSERT_EQ(samples.size(), 4u);

    const auto exchange = (dir / "exchange.jsonl").string();
    auto r = run("export-scoring --dataset '" + dataset + "' --out '" + exchange + "' --blind", dir);
    ASSERT_EQ(r.exit_code, 0) << r.err;
    std::ifstream ex(exchange);
    const auto records = fqbank::read_exchange(ex);
    std::size_t pairs = 0;
    for (const auto& s : samples) {
        pairs += s.candidates.size();
    }
    ASSERT_EQ(records.size(), pairs);
    EXPECT_FALSE(records[0].label.has_value());

    // Oracle scorer: 1 for the valid follow-up, 0 otherwise.
    std::vector<fqbank::ScoreRecord> scores;
    for (const auto& s : samples) {
        for (const auto& c : s.candidates) {
            scores.push_back({s.sample_id, c.candidate_id, c.label == fqbank::Label::valid ? 1.0 : 0.0});
        }
    }
    {
        std::ofstream out(dir / "scores.jsonl");
        fqbank::write_scores(out, scores);
    }
    r = run("import-scores --dataset '" + dataset + "' --scores '" + (dir / "scores.jsonl").string() + "'", dir);
    EXPECT_EQ(r.exit_code, 0) << r.err;

    r = run("rank --dataset '" + dataset + "' --scorer external --scores '" + (dir / "scores.jsonl").string() +
                "' --out '" + (dir / "ranked.jsonl").string() + "'",
            dir);
    ASSERT_EQ(r.exit_code, 0) << r.err;
    r = run("eval --ranked '" + (dir / "ranked.jsonl").string() + "' --out-prefix '" + (dir / "report").string() + "'",
            dir);
    ASSERT_EQ(r.exit_code, 0) << r.err;
    EXPECT_NE(r.out.find("MRR                1.0000"), std::string::npos) << r.out;
    EXPECT_TRUE(std::filesystem::exists(dir / "report.jsonl"));
    EXPECT_TRUE(std::filesystem::exists(dir / "report.histogram.csv"));

    r = run("rank --dataset '" + dataset + "' --scorer bm25 --out '" + (dir / "bm25.jsonl").string() + "'", dir);
    ASSERT_EQ(r.exit_code, 0) << r.err;
    r = run("eval --ranked '" + (dir / "bm25.jsonl").string() + "' --k 1,2,5", dir);
    ASSERT_EQ(r.exit_code, 0) << r.err;
    EXPECT_NE(r.out.find("HitRatio@5"), std::string::npos);
    EXPECT_NE(r.out.find("rank metrics only"), std::string::npos);

    r = run("stats --dataset '" + dataset + "'", dir);
    EXPECT_EQ(r.exit_code, 0);
    EXPECT_EQ(r.out, read_file(dir / "out" / "stats.txt"));
}

TEST(Cli, MissingScoresAreReportedByName) {
    TempDir dir("cli-missing");
    ASSERT_EQ(run(kurt_generate_args(dir / "out", "--seed 1"), dir).exit_code, 0);
    const auto dataset = (dir / "out" / "dataset.jsonl").string();
    std::ofstream(dir / "scores.jsonl") << R"({"sample_id":"C_kurt#1","candidate_id":"c000","score":0.5})" << '\n';
    const auto r = run("import-scores --dataset '" + dataset + "' --scores '" + (dir / "scores.jsonl").string() + "'",
                       dir);
    EXPECT_EQ(r.exit_code, 2);
    EXPECT_NE(r.err.find("missing score: C_kurt#1/c001"), std::string::npos) << r.err;
    const auto rk = run("rank --dataset '" + dataset + "' --scorer external --scores '" +
                            (dir / "scores.jsonl").string() + "' --out '" + (dir / "r.jsonl").string() + "'",
                        dir);
    EXPECT_EQ(rk.exit_code, 2);
    EXPECT_FALSE(std::filesystem::exists(dir / "r.jsonl"));
}

TEST(Cli, UsageErrors) {
    TempDir dir("cli-usage");
    auto r = run(kurt_generate_args(dir / "out"), dir);
    EXPECT_EQ(r.exit_code, 2);
    EXPECT_NE(r.err.find("--seed"), std::string::npos);

    r = run("generate --corpus '" + data_path("kurt_godel.jsonl").string() + "' --seed 1 --out-dir '" +
                (dir / "o").string() + "'",
            dir);
    EXPECT_EQ(r.exit_code, 2);
    EXPECT_NE(r.err.find("--catalog"), std::string::npos);

    r = run(kurt_generate_args(dir / "out", "--seed 1 --generators paraphrase,bogus"), dir);
    EXPECT_EQ(r.exit_code, 2);

    std::ofstream(dir / "bad.jsonl") << "{not json\n";
    r = run("generate --corpus '" + (dir / "bad.jsonl").string() + "' --seed 1 --generators paraphrase --out-dir '" +
                (dir / "o").string() + "'",
            dir);
    EXPECT_EQ(r.exit_code, 2);
    EXPECT_NE(r.err.find(":1:"), std::string::npos);
    EXPECT_FALSE(std::filesystem::exists(dir / "o" / "dataset.jsonl"));

    EXPECT_NE(run("", dir).exit_code, 0);
    EXPECT_NE(run("rank --dataset /nonexistent --out x", dir).exit_code, 0);
}

TEST(Cli, IndexAndSearch) {
    TempDir dir("cli-index");
    const auto index = (dir / "index.txt").string();
    auto r = run("index --corpus '" + data_path("kurt_godel.jsonl").string() + "' --out '" + index + "'", dir);
    ASSERT_EQ(r.exit_code, 0) << r.err;
    r = run("search --index '" + index + "' --query 'Juventus Ronaldo' --k 2", dir);
    ASSERT_EQ(r.exit_code, 0) << r.err;
    EXPECT_EQ(r.out.rfind(R"({"doc_id":"C_ronaldo#1")", 0), 0u) << r.out;
}
