#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace fqbank {

struct Turn {
    std::string question_original;
    std::string question_rewritten;
    std::string answer;
    bool unanswered = false;

    bool operator==(const Turn&) const = default;
};

struct Conversation {
    std::string conversation_id;
    std::string topic;
    std::vector<Turn> turns;

    bool operator==(const Conversation&) const = default;
};

struct QaPair {
    std::string question;
    std::string answer;

    bool operator==(const QaPair&) const = default;
};

/// Dialog context x: history turns 1..L-1 plus the current turn L. All
/// questions are the rewritten (context-independent) forms.
struct DialogContext {
    std::vector<QaPair> history;
    std::string current_question;
    std::string current_answer;

    bool operator==(const DialogContext&) const = default;

    /// History questions followed by the current question.
    std::vector<std::string> questions() const;
};

enum class Label {
    valid,
    paraphrase,
    irrelevant_entity,
    partial_entity,
    irrelevant_context,
    asr_error,
    random_question,
    history_duplicate,
};

inline constexpr std::size_t kLabelCount = 8;

std::string_view to_string(Label label);
std::optional<Label> parse_label(std::string_view name);

struct Candidate {
    std::string candidate_id;
    std::string text;
    Label label = Label::valid;

    bool operator==(const Candidate&) const = default;
};

struct Sample {
    std::string sample_id;
    DialogContext context;
    std::vector<Candidate> candidates;
    std::uint64_t seed = 0;

    bool operator==(const Sample&) const = default;

    const Candidate* valid_candidate() const;
};

/// One dialog position before confounders are attached.
struct SampleSkeleton {
    std::string sample_id;
    std::string conversation_id;
    std::size_t turn = 0; // L, 1-based
    DialogContext context;
    std::string valid_text;
};

struct ParseError {
    std::size_t line = 0;
    std::string message;
};

struct ParseReport {
    std::vector<Conversation> conversations;
    std::vector<ParseError> errors;
};

class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Reads line-delimited conversation records. Malformed lines are reported
/// with their 1-based line number; well-formed lines are kept in input order.
ParseReport parse_conversations(std::istream& in);

nlohmann::ordered_json conversation_to_json(const Conversation& conv);
std::string serialize_conversation(const Conversation& conv);

/// T-1 skeletons for a conversation of T turns; empty when T < 2.
std::vector<SampleSkeleton> generate_sample_skeletons(const Conversation& conv);

std::string make_sample_id(std::string_view conversation_id, std::size_t turn);

/// Context text for scorers: every turn's question then its answer, answers
/// truncated to `max_answer_tokens`, space-joined in turn order.
std::string context_text(const DialogContext& context, std::size_t max_answer_tokens = 64);

nlohmann::ordered_json sample_to_json(const Sample& sample);
Sample sample_from_json(const nlohmann::json& j);

void write_samples(std::ostream& out, const std::vector<Sample>& samples);

/// Throws FormatError naming the line on the first malformed record.
std::vector<Sample> read_samples(std::istream& in);

} // namespace fqbank
