#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "fqbank/embeddings.hpp"

using namespace fqbank;

namespace {

VectorStore small_store() {
    std::istringstream in(
        "3 2\n"
        "kurt 1 0\n"
        "godel 0 1\n"
        "born 1 1\n"
        "Kurt 9 9\n");
    return VectorStore::parse(in, 2);
}

} // namespace

TEST(VectorStore, ParsesAndKeepsFirstDuplicate) {
    const auto store = small_store();
    EXPECT_EQ(store.size(), 3u);
    ASSERT_EQ(store.find("kurt").size(), 2u);
    EXPECT_EQ(store.find("kurt")[0], 1.0f);
    EXPECT_TRUE(store.find("curt").empty());
}

TEST(VectorStore, RejectsWrongArityWithWarnings) {
    std::istringstream in("a 1 2\nb 1\nc 1 x\nd 3 4\n");
    std::vector<std::string> warnings;
    const auto store = VectorStore::parse(in, 2, &warnings);
    EXPECT_EQ(store.size(), 2u);
    EXPECT_EQ(warnings.size(), 2u);

    std::istringstream wrong("a 1 2 3\nb 4 5 6\n");
    EXPECT_THROW(VectorStore::parse(wrong, 2), VectorLoadError);
    EXPECT_THROW(VectorStore::load("/nonexistent/vectors.txt", 2), VectorLoadError);
}

TEST(Embedding, MeanCountsOovInTheDenominator) {
    const auto store = small_store();
    const auto e = embed_mean("Kurt born unknown?", store);
    EXPECT_EQ(e.token_count, 3u);
    EXPECT_EQ(e.oov_count, 1u);
    EXPECT_NEAR(e.vector[0], 2.0 / 3.0, 1e-12);
    EXPECT_NEAR(e.vector[1], 1.0 / 3.0, 1e-12);
    const auto empty = embed_mean("", store);
    EXPECT_EQ(empty.vector, (std::vector<double>{0.0, 0.0}));
}

TEST(Embedding, CosineEdgeCases) {
    const std::vector<double> a{1, 0}, b{0, 1}, c{2, 0}, z{0, 0}, d{1, 1, 1};
    EXPECT_DOUBLE_EQ(cosine(a, c), 1.0);
    EXPECT_DOUBLE_EQ(cosine(a, b), 0.0);
    EXPECT_DOUBLE_EQ(cosine(a, z), 0.0);
    EXPECT_NEAR(cosine(a, std::vector<double>{-3, 0}), -1.0, 1e-15);
    EXPECT_NEAR(cosine(a, std::vector<double>{1, 1}), 1.0 / std::sqrt(2.0), 1e-12);
    EXPECT_THROW(cosine(a, d), std::invalid_argument);
}

TEST(Embedding, VocabularyCoverage) {
    const auto store = small_store();
    const auto cov = vocabulary_coverage({"Kurt Godel", "born in Brunn"}, store);
    EXPECT_EQ(cov.tokens, 5u);
    EXPECT_EQ(cov.in_vocabulary, 3u);
    EXPECT_DOUBLE_EQ(cov.fraction(), 0.6);
    EXPECT_EQ(vocabulary_coverage({}, store).fraction(), 0.0);
}

TEST(SentenceVectors, LookupByNormalizedText) {
    std::istringstream in(R"({"text":"Where was  Kurt born?","values":[0.5,0.5]})"
                          "\n"
                          R"({"text":"Other","values":[1,0]})"
                          "\n");
    const auto sv = SentenceVectors::parse(in);
    EXPECT_EQ(sv.dimension(), 2u);
    EXPECT_EQ(sv.size(), 2u);
    ASSERT_TRUE(sv.lookup("Where was Kurt born? ").has_value());
    EXPECT_FALSE(sv.lookup("where was kurt born?").has_value());

    std::istringstream mixed(R"({"text":"a","values":[1,2]})"
                             "\n"
                             R"({"text":"b","values":[1]})"
                             "\n");
    EXPECT_THROW(SentenceVectors::parse(mixed), VectorLoadError);
    std::istringstream empty(R"({"text":"a","values":[]})");
    EXPECT_THROW(SentenceVectors::parse(empty), VectorLoadError);
}
