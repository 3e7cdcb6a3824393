#include "fqbank/corpus.hpp"

#include <array>
#include <istream>
#include <ostream>

#include "fqbank/text.hpp"

namespace fqbank {
namespace {

using nlohmann::json;

constexpr std::array<std::string_view, kLabelCount> kLabelNames = {
    "valid",           "paraphrase", "irrelevant_entity", "partial_entity", "irrelevant_context",
    "asr_error",       "random_question", "history_duplicate",
};

const json& require(const json& obj, const char* field) {
    auto it = obj.find(field);
    if (it == obj.end()) {
        throw FormatError(std::string("missing field '") + field + "'");
    }
    return *it;
}

std::string require_string(const json& obj, const char* field) {
    const auto& v = require(obj, field);
    if (!v.is_string()) {
        throw FormatError(std::string("field '") + field + "' must be a string");
    }
    return v.get<std::string>();
}

Turn parse_turn(const json& j, std::size_t index) {
    if (!j.is_object()) {
        throw FormatError("turn " + std::to_string(index) + " is not an object");
    }
    Turn turn;
    try {
        turn.question_original = require_string(j, "question");
        turn.question_rewritten = require_string(j, "rewritten_question");
        turn.answer = require_string(j, "answer");
        if (auto it = j.find("unanswered"); it != j.end()) {
            if (!it->is_boolean()) {
                throw FormatError("field 'unanswered' must be a boolean");
            }
            turn.unanswered = it->get<bool>();
        }
    } catch (const FormatError& e) {
        throw FormatError("turn " + std::to_string(index) + ": " + e.what());
    }
    if (normalize_whitespace(turn.question_rewritten).empty()) {
        throw FormatError("turn " + std::to_string(index) + ": field 'rewritten_question' is empty");
    }
    if (turn.answer.empty() && !turn.unanswered) {
        throw FormatError("turn " + std::to_string(index) +
                          ": field 'answer' is empty but the turn is not flagged 'unanswered'");
    }
    return turn;
}

Conversation parse_conversation(const json& j) {
    if (!j.is_object()) {
        throw FormatError("record is not an object");
    }
    Conversation conv;
    conv.conversation_id = require_string(j, "conversation_id");
    conv.topic = require_string(j, "topic");
    const auto& turns = require(j, "turns");
    if (!turns.is_array()) {
        throw FormatError("field 'turns' must be an array");
    }
    conv.turns.reserve(turns.size());
    for (std::size_t i = 0; i < turns.size(); ++i) {
        conv.turns.push_back(parse_turn(turns[i], i));
    }
    return conv;
}

bool is_blank(std::string_view line) {
    return line.find_first_not_of(" \t\r\n") == std::string_view::npos;
}

} // namespace

std::vector<std::string> DialogContext::questions() const {
    std::vector<std::string> out;
    out.reserve(history.size() + 1);
    for (const auto& qa : history) {
        out.push_back(qa.question);
    }
    out.push_back(current_question);
    return out;
}

std::string_view to_string(Label label) {
    return kLabelNames[static_cast<std::size_t>(label)];
}

std::optional<Label> parse_label(std::string_view name) {
    for (std::size_t i = 0; i < kLabelNames.size(); ++i) {
        if (kLabelNames[i] == name) {
            return static_cast<Label>(i);
        }
    }
    return std::nullopt;
}

const Candidate* Sample::valid_candidate() const {
    for (const auto& c : candidates) {
        if (c.label == Label::valid) {
            return &c;
        }
    }
    return nullptr;
}

ParseReport parse_conversations(std::istream& in) {
    ParseReport report;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (is_blank(line)) {
            continue;
        }
        try {
            report.conversations.push_back(parse_conversation(json::parse(line)));
        } catch (const json::parse_error& e) {
            report.errors.push_back({line_no, std::string("invalid JSON: ") + e.what()});
        } catch (const FormatError& e) {
            report.errors.push_back({line_no, e.what()});
        }
    }
    return report;
}

nlohmann::ordered_json conversation_to_json(const Conversation& conv) {
    nlohmann::ordered_json j;
    j["conversation_id"] = conv.conversation_id;
    j["topic"] = conv.topic;
    j["turns"] = nlohmann::ordered_json::array();
    for (const auto& t : conv.turns) {
        nlohmann::ordered_json tj;
        tj["question"] = t.question_original;
        tj["rewritten_question"] = t.question_rewritten;
        tj["answer"] = t.answer;
        if (t.unanswered) {
            tj["unanswered"] = true;
        }
        j["turns"].push_back(std::move(tj));
    }
    return j;
}

std::string serialize_conversation(const Conversation& conv) {
    return conversation_to_json(conv).dump();
}

std::string make_sample_id(std::string_view conversation_id, std::size_t turn) {
    return std::string(conversation_id) + "#" + std::to_string(turn);
}

std::vector<SampleSkeleton> generate_sample_skeletons(const Conversation& conv) {
    std::vector<SampleSkeleton> out;
    if (conv.turns.size() < 2) {
        return out;
    }
    out.reserve(conv.turns.size() - 1);
    for (std::size_t l = 1; l < conv.turns.size(); ++l) {
        SampleSkeleton s;
        s.conversation_id = conv.conversation_id;
        s.turn = l;
        s.sample_id = make_sample_id(conv.conversation_id, l);
        for (std::size_t h = 0; h + 1 < l; ++h) {
            s.context.history.push_back({conv.turns[h].question_rewritten, conv.turns[h].answer});
        }
        s.context.current_question = conv.turns[l - 1].question_rewritten;
        s.context.current_answer = conv.turns[l - 1].answer;
        s.valid_text = conv.turns[l].question_rewritten;
        out.push_back(std::move(s));
    }
    return out;
}

std::string context_text(const DialogContext& context, std::size_t max_answer_tokens) {
    std::string out;
    auto append = [&out](std::string_view part) {
        if (part.empty()) {
            return;
        }
        if (!out.empty()) {
            out.push_back(' ');
        }
        out.append(part);
    };
    for (const auto& qa : context.history) {
        append(qa.question);
        append(truncate_tokens(qa.answer, max_answer_tokens));
    }
    append(context.current_question);
    append(truncate_tokens(context.current_answer, max_answer_tokens));
    return out;
}

nlohmann::ordered_json sample_to_json(const Sample& sample) {
    nlohmann::ordered_json j;
    j["sample_id"] = sample.sample_id;
    nlohmann::ordered_json ctx;
    ctx["history"] = nlohmann::ordered_json::array();
    for (const auto& qa : sample.context.history) {
        ctx["history"].push_back({{"q", qa.question}, {"a", qa.answer}});
    }
    ctx["current_q"] = sample.context.current_question;
    ctx["current_a"] = sample.context.current_answer;
    j["context"] = std::move(ctx);
    j["candidates"] = nlohmann::ordered_json::array();
    for (const auto& c : sample.candidates) {
        nlohmann::ordered_json cj;
        cj["candidate_id"] = c.candidate_id;
        cj["text"] = c.text;
        cj["label"] = to_string(c.label);
        j["candidates"].push_back(std::move(cj));
    }
    j["seed"] = sample.seed;
    return j;
}

Sample sample_from_json(const json& j) {
    if (!j.is_object()) {
        throw FormatError("sample record is not an object");
    }
    Sample s;
    s.sample_id = require_string(j, "sample_id");
    const auto& ctx = require(j, "context");
    if (!ctx.is_object()) {
        throw FormatError("field 'context' must be an object");
    }
    const auto& history = require(ctx, "history");
    if (!history.is_array()) {
        throw FormatError("field 'history' must be an array");
    }
    for (const auto& h : history) {
        s.context.history.push_back({require_string(h, "q"), require_string(h, "a")});
    }
    s.context.current_question = require_string(ctx, "current_q");
    s.context.current_answer = require_string(ctx, "current_a");
    const auto& cands = require(j, "candidates");
    if (!cands.is_array()) {
        throw FormatError("field 'candidates' must be an array");
    }
    for (const auto& c : cands) {
        Candidate cand;
        cand.candidate_id = require_string(c, "candidate_id");
        cand.text = require_string(c, "text");
        const auto label_name = require_string(c, "label");
        const auto label = parse_label(label_name);
        if (!label) {
            throw FormatError("unknown label '" + label_name + "'");
        }
        cand.label = *label;
        s.candidates.push_back(std::move(cand));
    }
    const auto& seed = require(j, "seed");
    if (!seed.is_number_unsigned() && !(seed.is_number_integer() && seed.get<std::int64_t>() >= 0)) {
        throw FormatError("field 'seed' must be a non-negative integer");
    }
    s.seed = seed.get<std::uint64_t>();
    return s;
}

void write_samples(std::ostream& out, const std::vector<Sample>& samples) {
    for (const auto& s : samples) {
        out << sample_to_json(s).dump() << '\n';
    }
}

std::vector<Sample> read_samples(std::istream& in) {
    std::vector<Sample> samples;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (is_blank(line)) {
            continue;
        }
        try {
            samples.push_back(sample_from_json(json::parse(line)));
        } catch (const json::exception& e) {
            throw FormatError("line " + std::to_string(line_no) + ": " + e.what());
        } catch (const FormatError& e) {
            throw FormatError("line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return samples;
}

} // namespace fqbank
