#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <sstream>

#include "fixtures.hpp"
#include "fqbank/ranking.hpp"

using namespace fqbank;

namespace {

Sample sample_of(std::vector<std::pair<std::string, Label>> candidates) {
    Sample s;
    s.sample_id = "S#1";
    s.context.history.push_back({"Where was Kurt Gödel born?", "Brunn"});
    s.context.current_question = "When was Kurt Gödel born?";
    s.context.current_answer = "1906";
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        char id[8];
        std::snprintf(id, sizeof id, "c%03zu", i);
        s.candidates.push_back({id, candidates[i].first, candidates[i].second});
    }
    return s;
}

std::vector<std::string> order(const RankedList& l) {
    std::vector<std::string> ids;
    for (const auto& e : l.ranked) {
        ids.push_back(e.candidate_id);
    }
    return ids;
}

class FunctionScorer : public Scorer {
public:
    explicit FunctionScorer(std::vector<std::optional<double>> s) : s_(std::move(s)) {}
    std::string_view name() const override { return "fn"; }
    std::vector<std::optional<double>> score(const Sample&) const override { return s_; }

private:
    std::vector<std::optional<double>> s_;
};

} // namespace

TEST(Rank, DescendingScoreTiesByIdUnscoredLast) {
    const auto s = sample_of({{"a", Label::paraphrase},
                              {"b", Label::valid},
                              {"c", Label::asr_error},
                              {"d", Label::random_question},
                              {"e", Label::history_duplicate}});
    const auto l = rank_scores(s, {0.5, std::nullopt, 0.9, 0.5, std::numeric_limits<double>::quiet_NaN()});
    EXPECT_EQ(order(l), (std::vector<std::string>{"c002", "c000", "c003", "c001", "c004"}));
    EXPECT_EQ(l.rank_of_valid, 4u);
    EXPECT_EQ(l.unscored(), 2u);
    EXPECT_FALSE(l.ranked[4].score.has_value());
    EXPECT_THROW(rank_scores(s, {0.1}), std::invalid_argument);
}

TEST(Rank, MonotoneTransformKeepsTheOrder) {
    Rng rng(3);
    for (int i = 0; i < 100; ++i) {
        std::vector<std::pair<std::string, Label>> cands;
        const std::size_t n = 2 + rng.index(10);
        std::vector<std::optional<double>> a, b;
        for (std::size_t c = 0; c < n; ++c) {
            cands.push_back({"t", c == 0 ? Label::valid : Label::paraphrase});
            const double x = static_cast<double>(rng.index(2001)) / 1000.0 - 1.0;
            a.push_back(x);
            b.push_back(x * x * x + x);
        }
        const auto s = sample_of(cands);
        const auto la = rank_scores(s, a);
        const auto lb = rank_scores(s, b);
        EXPECT_EQ(order(la), order(lb));
        EXPECT_EQ(la.rank_of_valid, lb.rank_of_valid);
    }
}

TEST(Bm25Scorer, PrefersCandidatesSharingContextWords) {
    const auto s = sample_of({{"What were Kurt Gödel's interests?", Label::valid},
                              {"When did Cristiano Ronaldo join Juventus?", Label::random_question},
                              {"What is the capital of France?", Label::random_question}});
    const auto scores = Bm25Scorer().score(s);
    ASSERT_EQ(scores.size(), 3u);
    EXPECT_GT(*scores[0], *scores[1]);
    EXPECT_EQ(rank(s, Bm25Scorer()).rank_of_valid, 1u);
}

TEST(WordVectorScorer, CosineOfPooledVectors) {
    VectorStore store(2);
    const float kurt[] = {1, 0}, godel[] = {1, 0}, ronaldo[] = {0, 1};
    store.add("kurt", kurt);
    store.add("gödel", godel);
    store.add("ronaldo", ronaldo);
    const auto s = sample_of({{"Kurt Gödel", Label::valid}, {"Ronaldo", Label::random_question}, {"", Label::paraphrase}});
    const auto scores = WordVectorScorer(store).score(s);
    EXPECT_NEAR(*scores[0], 1.0, 1e-12);
    EXPECT_NEAR(*scores[1], 0.0, 1e-12);
    EXPECT_NEAR(*scores[2], 0.0, 1e-12);
}

TEST(SentenceVectorScorer, MissingTextsAreUnscored) {
    const auto s = sample_of({{"yes", Label::valid}, {"no", Label::paraphrase}, {"gone", Label::paraphrase}});
    SentenceVectors sv;
    sv.add(context_text(s.context), {1, 0});
    sv.add("yes", {2, 0});
    sv.add("no", {0, 1});
    const auto scores = SentenceVectorScorer(sv).score(s);
    EXPECT_NEAR(*scores[0], 1.0, 1e-12);
    EXPECT_NEAR(*scores[1], 0.0, 1e-12);
    EXPECT_FALSE(scores[2].has_value());
    SentenceVectors no_context;
    no_context.add("yes", {1, 0});
    for (const auto& v : SentenceVectorScorer(no_context).score(s)) {
        EXPECT_FALSE(v.has_value());
    }
}

TEST(ExternalScorer, LooksUpAndNamesMissingPairs) {
    const auto s = sample_of({{"x", Label::valid}, {"y", Label::paraphrase}});
    ScoreTable table;
    table.add("S#1", "c000", 0.9);
    EXPECT_THROW(rank(s, ExternalScorer(table)), ScoreCoverageError);
    try {
        ExternalScorer(table).score(s);
    } catch (const ScoreCoverageError& e) {
        EXPECT_NE(std::string(e.what()).find("S#1/c001"), std::string::npos);
    }
    table.add("S#1", "c001", 0.2);
    EXPECT_EQ(rank(s, ExternalScorer(table)).rank_of_valid, 1u);
}

TEST(RankAll, WorkerCountDoesNotChangeTheOutput) {
    std::vector<Sample> samples;
    for (int i = 0; i < 40; ++i) {
        auto s = sample_of({{"When was Kurt born?", Label::valid}, {"Paris?", Label::paraphrase},
                            {"When was Kurt Gödel born in Brunn?", Label::asr_error}});
        s.sample_id = "S#" + std::to_string(i);
        samples.push_back(std::move(s));
    }
    const Bm25Scorer scorer;
    EXPECT_EQ(rank_all(samples, scorer, 1), rank_all(samples, scorer, 8));
    EXPECT_THROW(rank_all(samples, FunctionScorer({0.1}), 4), std::invalid_argument);
}

TEST(RankedJson, RoundTripAndValidation) {
    const auto s = sample_of({{"a", Label::paraphrase}, {"b", Label::valid}, {"c", Label::asr_error}});
    const auto l = rank_scores(s, {0.25, 0.5, std::nullopt});
    EXPECT_EQ(ranked_to_json(l).dump(),
              R"({"sample_id":"S#1","ranked":[{"candidate_id":"c001","label":"valid","score":0.5},)"
              R"({"candidate_id":"c000","label":"paraphrase","score":0.25},)"
              R"({"candidate_id":"c002","label":"asr_error","score":null,"unscored":true}],"rank_of_valid":1})");
    std::stringstream ss;
    write_ranked(ss, {l, l});
    const auto back = read_ranked(ss);
    ASSERT_EQ(back.size(), 2u);
    EXPECT_EQ(back[0], l);

    auto j = nlohmann::json::parse(ranked_to_json(l).dump());
    j["rank_of_valid"] = 2;
    EXPECT_THROW(ranked_from_json(j), FormatError);
    std::istringstream bad("{}\n");
    EXPECT_THROW(read_ranked(bad), FormatError);
}
