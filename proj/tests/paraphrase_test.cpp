#include <gtest/gtest.h>

#include <sstream>

#include "fixtures.hpp"
#include "fqbank/corpus.hpp"
#include "fqbank/paraphrase.hpp"
#include "fqbank/text.hpp"

using namespace fqbank;

TEST(RuleParaphrase, RewritesKnownShapes) {
    RuleParaphraseProvider rules;
    EXPECT_EQ(rules.paraphrase("Where did Kurt Gödel go to school?"), "Which school did Kurt Gödel attend?");
    EXPECT_EQ(rules.paraphrase("When was Kurt Gödel born?"), "What year was Kurt Gödel born?");
    EXPECT_EQ(rules.paraphrase("where was Kurt Gödel born"), "What is the birthplace of Kurt Gödel?");
    EXPECT_EQ(rules.paraphrase("How old is Cristiano Ronaldo?"), "What is the age of Cristiano Ronaldo?");
    EXPECT_EQ(rules.paraphrase("What were Kurt Gödel's interests?"), "What were the interests of Kurt Gödel?");
    EXPECT_EQ(rules.paraphrase("What is the capital of France?"), "What is France's capital?");
    EXPECT_FALSE(rules.paraphrase("Tell me more.").has_value());
    EXPECT_FALSE(rules.paraphrase("?").has_value());
}

TEST(RuleParaphrase, OutputDiffersAndKeepsEntities) {
    RuleParaphraseProvider rules;
    const auto catalog = fqbank::testing::synthetic_catalog();
    std::size_t rewritten = 0;
    for (const auto& conv : fqbank::testing::synthetic_corpus(60)) {
        for (const auto& turn : conv.turns) {
            const auto p = rules.paraphrase(turn.question_rewritten);
            if (!p) {
                continue;
            }
            ++rewritten;
            EXPECT_NE(fold_key(*p), fold_key(turn.question_rewritten));
            const auto before = catalog.find_entities(turn.question_rewritten);
            const auto after = catalog.find_entities(*p);
            ASSERT_EQ(before.size(), after.size()) << *p;
            for (std::size_t i = 0; i < before.size(); ++i) {
                EXPECT_EQ(before[i].tokens, after[i].tokens);
            }
        }
    }
    EXPECT_GT(rewritten, 50u);
}

TEST(FileParaphrase, FirstRecordWinsAndLookupIsFolded) {
    std::istringstream in(R"({"question":"Where did Kurt Gödel go to school?","paraphrase":"A?"})"
                          "\n\n"
                          R"({"question":"where did kurt gödel go to school?","paraphrase":"B?"})"
                          "\n");
    const auto file = FileParaphraseProvider::parse(in);
    EXPECT_EQ(file.size(), 1u);
    EXPECT_EQ(file.paraphrase("WHERE did Kurt Gödel go to school?"), "A?");
    EXPECT_FALSE(file.paraphrase("Other?").has_value());
    EXPECT_EQ(file.name(), "file_import");

    std::istringstream bad(R"({"question":"x"})");
    EXPECT_THROW(FileParaphraseProvider::parse(bad), FormatError);
}

TEST(ChainedParaphrase, TriesProvidersInOrder) {
    FileParaphraseProvider file;
    file.add("How old is Ada Lovelace?", "What age was Ada Lovelace?");
    RuleParaphraseProvider rules;
    ChainedParaphraseProvider chain({&file, &rules});
    EXPECT_EQ(chain.paraphrase("How old is Ada Lovelace?"), "What age was Ada Lovelace?");
    EXPECT_EQ(chain.paraphrase("How old is Alan Turing?"), "What is the age of Alan Turing?");
    EXPECT_FALSE(chain.paraphrase("Hello").has_value());
    EXPECT_FALSE(ChainedParaphraseProvider({}).paraphrase("How old is x?").has_value());
}
