#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "fqbank/exchange.hpp"

using namespace fqbank;

namespace {

Sample two_turn_sample() {
    Sample s;
    s.sample_id = "C#2";
    s.context.history.push_back({"Where was Kurt Gödel born?", "Brunn, Austria-Hungary"});
    s.context.current_question = "When was Kurt Gödel born?";
    s.context.current_answer = "April 28, 1906";
    s.candidates = {{"c000", "Where did Curt Gödel go to school?", Label::asr_error},
                    {"c001", "Where did Kurt Gödel go to school?", Label::valid}};
    return s;
}

} // namespace

TEST(Exchange, JoinedTextLayout) {
    const auto s = two_turn_sample();
    EXPECT_EQ(joined_text(s.context, "X?"),
              "Where was Kurt Gödel born? Brunn, Austria-Hungary [SEP] When was Kurt Gödel born? April 28, 1906 "
              "[SEP] X?");
    EXPECT_EQ(joined_text(s.context, "X?", 1), "Where was Kurt Gödel born? Brunn [SEP] When was Kurt Gödel born? April [SEP] X?");
    DialogContext unanswered;
    unanswered.current_question = "Q?";
    EXPECT_EQ(joined_text(unanswered, "C"), "Q? [SEP] C");
}

TEST(Exchange, LabelsAndBlindMode) {
    const std::vector<Sample> samples{two_turn_sample()};
    std::stringstream labelled, blind;
    write_exchange(labelled, samples, false);
    write_exchange(blind, samples, true);
    EXPECT_EQ(labelled.str().substr(0, labelled.str().find('\n')),
              R"({"sample_id":"C#2","candidate_id":"c000","joined_text":"Where was Kurt Gödel born? Brunn, )"
              R"(Austria-Hungary [SEP] When was Kurt Gödel born? April 28, 1906 [SEP] Where did Curt Gödel go to )"
              R"(school?","label":0})");
    const auto a = read_exchange(labelled);
    const auto b = read_exchange(blind);
    ASSERT_EQ(a.size(), 2u);
    EXPECT_EQ(a[0].label, 0);
    EXPECT_EQ(a[1].label, 1);
    EXPECT_FALSE(b[1].label.has_value());
    EXPECT_EQ(a[1].joined_text, b[1].joined_text);
    std::istringstream bad("{\"sample_id\":\"x\"}\n");
    EXPECT_THROW(read_exchange(bad), FormatError);
}

TEST(ScoreTable, ParsesValidatesAndReportsMissing) {
    std::stringstream ss;
    write_scores(ss, {{"C#2", "c000", 0.125}, {"C#2", "c001", 1.0}});
    const auto table = ScoreTable::parse(ss);
    EXPECT_EQ(table.size(), 2u);
    EXPECT_EQ(table.find("C#2", "c000"), 0.125);
    EXPECT_FALSE(table.find("C#2", "c009").has_value());
    EXPECT_TRUE(table.missing_pairs({two_turn_sample()}).empty());

    ScoreTable partial;
    partial.add("C#2", "c001", 0.0);
    EXPECT_EQ(partial.missing_pairs({two_turn_sample()}), std::vector<std::string>{"C#2/c000"});
}

TEST(ScoreTable, RejectsBadRecords) {
    for (const char* line : {
             R"({"sample_id":"a","candidate_id":"c000","score":1.5})",
             R"({"sample_id":"a","candidate_id":"c000","score":-0.1})",
             R"({"sample_id":"a","candidate_id":"c000","score":"0.5"})",
             R"({"sample_id":"a","score":0.5})",
             "garbage",
         }) {
        std::istringstream in(std::string("\n") + line + "\n");
        try {
            ScoreTable::parse(in);
            ADD_FAILURE() << line;
        } catch (const ScoreFileError& e) {
            EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos) << e.what();
        }
    }
    std::istringstream dup(R"({"sample_id":"a","candidate_id":"c000","score":0.5})"
                           "\n"
                           R"({"sample_id":"a","candidate_id":"c000","score":0.6})"
                           "\n");
    EXPECT_THROW(ScoreTable::parse(dup), ScoreFileError);
    ScoreTable t;
    EXPECT_THROW(t.add("a", "b", std::nan("")), ScoreFileError);
    EXPECT_THROW(ScoreTable::load("/nonexistent/scores.jsonl"), ScoreFileError);
}
