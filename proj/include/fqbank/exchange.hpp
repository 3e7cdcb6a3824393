#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fqbank/corpus.hpp"

namespace fqbank {

inline constexpr std::string_view kSeparator = "[SEP]";

/// "q1 a1 [SEP] q2 a2 [SEP] ... qL aL [SEP] candidate", answers truncated
/// to `max_answer_tokens` tokens.
std::string joined_text(const DialogContext& context, std::string_view candidate,
                        std::size_t max_answer_tokens = 64);

struct ExchangeRecord {
    std::string sample_id;
    std::string candidate_id;
    std::string joined_text;
    std::optional<int> label; // 1 for the valid follow-up, 0 otherwise

    bool operator==(const ExchangeRecord&) const = default;
};

/// One record per (sample, candidate) in dataset order. `blind` omits labels.
void write_exchange(std::ostream& out, const std::vector<Sample>& samples, bool blind,
                    std::size_t max_answer_tokens = 64);
std::vector<ExchangeRecord> read_exchange(std::istream& in);

class ScoreFileError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ScoreRecord {
    std::string sample_id;
    std::string candidate_id;
    double score = 0.0;
};

void write_scores(std::ostream& out, const std::vector<ScoreRecord>& records);

/// Scores keyed by (sample_id, candidate_id). Every score lies in [0, 1].
class ScoreTable {
public:
    /// Line records {sample_id, candidate_id, score}. Throws ScoreFileError
    /// naming the line on malformed records, out-of-range scores and
    /// duplicate keys.
    static ScoreTable parse(std::istream& in);
    static ScoreTable load(const std::string& path);

    /// Throws ScoreFileError on an out-of-range score or a duplicate key.
    void add(std::string sample_id, std::string candidate_id, double score);

    std::optional<double> find(std::string_view sample_id, std::string_view candidate_id) const;
    std::size_t size() const { return scores_.size(); }

    /// "sample_id/candidate_id" for every dataset pair without a score.
    std::vector<std::string> missing_pairs(const std::vector<Sample>& samples) const;

private:
    std::map<std::pair<std::string, std::string>, double, std::less<>> scores_;
};

} // namespace fqbank
