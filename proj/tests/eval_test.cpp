#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "fqbank/eval.hpp"

using namespace fqbank;

namespace {

/// A list of `n` candidates with the valid one at 1-based `rank`.
RankedList list_with_valid_at(std::size_t rank, std::size_t n = 5) {
    RankedList l;
    l.sample_id = "s" + std::to_string(rank);
    for (std::size_t i = 1; i <= n; ++i) {
        l.ranked.push_back({"c" + std::to_string(i), i == rank ? Label::valid : Label::random_question,
                            1.0 - 0.1 * static_cast<double>(i)});
    }
    l.rank_of_valid = rank;
    return l;
}

std::vector<RankedList> lists_at(std::initializer_list<std::size_t> ranks) {
    std::vector<RankedList> out;
    for (auto r : ranks) {
        out.push_back(list_with_valid_at(r));
    }
    return out;
}

} // namespace

TEST(Mrr, SpotValues) {
    EXPECT_NEAR(mrr(lists_at({1, 2, 4})), 0.5833333333333334, 1e-12);
    EXPECT_DOUBLE_EQ(mrr(lists_at({1, 1, 1})), 1.0);
    EXPECT_DOUBLE_EQ(mrr(lists_at({5})), 0.2);
}

TEST(Mrr, RejectsEmptyAndValidless) {
    EXPECT_THROW(mrr({}), std::invalid_argument);
    auto lists = lists_at({1});
    lists[0].rank_of_valid = 0;
    EXPECT_THROW(mrr(lists), std::invalid_argument);
}

TEST(HitRatio, SpotValues) {
    const auto lists = lists_at({1, 2, 4, 1});
    EXPECT_DOUBLE_EQ(hit_ratio(lists, 1), 50.0);
    EXPECT_DOUBLE_EQ(hit_ratio(lists, 2), 75.0);
    EXPECT_DOUBLE_EQ(hit_ratio(lists, 3), 75.0);
    EXPECT_DOUBLE_EQ(hit_ratio(lists, 4), 100.0);
    EXPECT_THROW(hit_ratio(lists, 0), std::invalid_argument);
    EXPECT_THROW(hit_ratio({}, 1), std::invalid_argument);
}

TEST(Metrics, AgreeWithBruteForceOnRandomLists) {
    std::mt19937_64 gen(123);
    std::vector<RankedList> lists;
    double rr_sum = 0.0;
    std::size_t top1 = 0, top3 = 0;
    for (int i = 0; i < 1000; ++i) {
        const std::size_t n = 2 + gen() % 12;
        std::vector<double> scores(n);
        for (auto& s : scores) {
            s = static_cast<double>(gen() % 1000) / 1000.0;
        }
        Sample sample;
        sample.sample_id = "s" + std::to_string(i);
        const std::size_t valid = gen() % n;
        std::vector<std::optional<double>> opt;
        for (std::size_t c = 0; c < n; ++c) {
            char id[8];
            std::snprintf(id, sizeof id, "c%03zu", c);
            sample.candidates.push_back({id, "t", c == valid ? Label::valid : Label::paraphrase});
            opt.push_back(scores[c]);
        }
        lists.push_back(rank_scores(sample, opt));
        // Rank = 1 + candidates that beat the valid one (higher score, or
        // equal score with a smaller id).
        std::size_t rank = 1;
        for (std::size_t c = 0; c < n; ++c) {
            if (scores[c] > scores[valid] || (scores[c] == scores[valid] && c < valid)) {
                ++rank;
            }
        }
        EXPECT_EQ(lists.back().rank_of_valid, rank);
        rr_sum += 1.0 / static_cast<double>(rank);
        top1 += rank <= 1;
        top3 += rank <= 3;
    }
    EXPECT_NEAR(mrr(lists), rr_sum / 1000.0, 1e-12);
    EXPECT_NEAR(hit_ratio(lists, 1), 100.0 * static_cast<double>(top1) / 1000.0, 1e-9);
    EXPECT_NEAR(hit_ratio(lists, 3), 100.0 * static_cast<double>(top3) / 1000.0, 1e-9);
}

TEST(Distribution, BinsAndTailFractions) {
    RankedList l;
    l.sample_id = "s";
    l.ranked = {{"c0", Label::valid, 0.91},        {"c1", Label::paraphrase, 0.86},
                {"c2", Label::random_question, 0.01}, {"c3", Label::random_question, 0.26},
                {"c4", Label::random_question, 1.0},  {"c5", Label::asr_error, std::nullopt}};
    l.rank_of_valid = 1;
    const auto d = confounder_distribution({l}, 0.1, 0.4);
    ASSERT_TRUE(d.has_value());
    EXPECT_EQ(d->size(), 3u);
    EXPECT_FALSE(d->contains(Label::asr_error));
    const auto& r = d->at(Label::random_question);
    EXPECT_EQ(r.count, 3u);
    EXPECT_DOUBLE_EQ(r.fraction_below, 1.0 / 3.0);
    EXPECT_DOUBLE_EQ(r.fraction_above, 1.0 / 3.0);
    EXPECT_EQ(r.histogram[0], 1u);
    EXPECT_EQ(r.histogram[5], 1u);
    EXPECT_EQ(r.histogram[19], 1u);
    EXPECT_EQ(d->at(Label::valid).histogram[18], 1u);
}

TEST(Distribution, OutOfRangeScoresDisableIt) {
    auto lists = lists_at({1});
    lists[0].ranked[2].score = 3.5;
    EXPECT_FALSE(confounder_distribution(lists).has_value());
    lists[0].ranked[2].score = -0.01;
    EXPECT_FALSE(confounder_distribution(lists).has_value());
    const auto report = evaluate(lists);
    EXPECT_FALSE(report.distribution.has_value());
    EXPECT_NE(format_report_table(report).find("rank metrics only"), std::string::npos);
}

TEST(Report, WritersCoverEveryLabel) {
    auto lists = lists_at({1, 2});
    lists[1].ranked[4].score = std::nullopt;
    const auto report = evaluate(lists, {1, 3, 10});
    EXPECT_EQ(report.sample_count, 2u);
    EXPECT_DOUBLE_EQ(report.mrr, 0.75);
    EXPECT_DOUBLE_EQ(report.hit_ratio.at(10), 100.0);
    EXPECT_EQ(report.unscored_candidates, 1u);

    std::stringstream jsonl;
    write_report_jsonl(jsonl, report);
    std::string line;
    std::size_t lines = 0;
    while (std::getline(jsonl, line)) {
        ++lines;
    }
    EXPECT_EQ(lines, 1u + report.distribution->size());

    std::stringstream csv;
    write_histogram_csv(csv, report);
    std::getline(csv, line);
    EXPECT_EQ(line, "label,bin,lower,upper,count");
    std::getline(csv, line);
    EXPECT_EQ(line.substr(0, line.rfind(',')), "valid,0,0.00,0.05");

    const auto table = format_report_table(report);
    EXPECT_NE(table.find("MRR                0.7500"), std::string::npos);
    EXPECT_NE(table.find("HitRatio@1         50.00"), std::string::npos);
}
