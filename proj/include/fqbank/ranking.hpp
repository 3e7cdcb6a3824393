#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "fqbank/corpus.hpp"
#include "fqbank/embeddings.hpp"
#include "fqbank/exchange.hpp"
#include "fqbank/index.hpp"

namespace fqbank {

/// Scores every candidate of a sample; higher means more relevant. A
/// nullopt entry marks a candidate the scorer could not handle.
class Scorer {
public:
    virtual ~Scorer() = default;
    virtual std::string_view name() const = 0;
    /// One entry per candidate, in sample order.
    virtual std::vector<std::optional<double>> score(const Sample& sample) const = 0;
};

/// Cosine between mean-pooled word vectors of the whole context (questions
/// and truncated answers) and of the candidate.
class WordVectorScorer : public Scorer {
public:
    explicit WordVectorScorer(const VectorStore& store, std::size_t max_answer_tokens = 64)
        : store_(store), max_answer_tokens_(max_answer_tokens) {}

    std::string_view name() const override { return "cosine"; }
    std::vector<std::optional<double>> score(const Sample& sample) const override;

private:
    const VectorStore& store_;
    std::size_t max_answer_tokens_;
};

/// Cosine over imported sentence vectors. The context is looked up by its
/// context_text(); missing texts leave candidates unscored.
class SentenceVectorScorer : public Scorer {
public:
    explicit SentenceVectorScorer(const SentenceVectors& vectors, std::size_t max_answer_tokens = 64)
        : vectors_(vectors), max_answer_tokens_(max_answer_tokens) {}

    std::string_view name() const override { return "sentence-import"; }
    std::vector<std::optional<double>> score(const Sample& sample) const override;

private:
    const SentenceVectors& vectors_;
    std::size_t max_answer_tokens_;
};

/// BM25 of each candidate against the context questions, over an index of
/// the sample's own candidates.
class Bm25Scorer : public Scorer {
public:
    explicit Bm25Scorer(Bm25Params params = {}) : params_(params) {}

    std::string_view name() const override { return "bm25"; }
    std::vector<std::optional<double>> score(const Sample& sample) const override;

private:
    Bm25Params params_;
};

class ScoreCoverageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Lookup into an externally produced score file. A missing pair throws
/// ScoreCoverageError naming the pair.
class ExternalScorer : public Scorer {
public:
    explicit ExternalScorer(const ScoreTable& table) : table_(table) {}

    std::string_view name() const override { return "external"; }
    std::vector<std::optional<double>> score(const Sample& sample) const override;

private:
    const ScoreTable& table_;
};

struct RankedEntry {
    std::string candidate_id;
    Label label = Label::valid;
    std::optional<double> score; // nullopt: unscored, ranked last

    bool operator==(const RankedEntry&) const = default;
};

struct RankedList {
    std::string sample_id;
    std::vector<RankedEntry> ranked;
    std::size_t rank_of_valid = 0; // 1-based; 0 when no valid candidate

    bool operator==(const RankedList&) const = default;

    std::size_t unscored() const;
};

/// Descending score, ties by ascending candidate_id, unscored (or NaN)
/// candidates last in candidate_id order.
RankedList rank_scores(const Sample& sample, const std::vector<std::optional<double>>& scores);
RankedList rank(const Sample& sample, const Scorer& scorer);
/// Samples are ranked on `workers` threads; output order is input order.
std::vector<RankedList> rank_all(const std::vector<Sample>& samples, const Scorer& scorer,
                                 std::size_t workers = 1);

nlohmann::ordered_json ranked_to_json(const RankedList& list);
RankedList ranked_from_json(const nlohmann::json& j);
void write_ranked(std::ostream& out, const std::vector<RankedList>& lists);
std::vector<RankedList> read_ranked(std::istream& in);

} // namespace fqbank
