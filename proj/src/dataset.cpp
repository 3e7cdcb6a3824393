#include "fqbank/dataset.hpp"

#include <cstdio>
#include <iterator>
#include <ostream>

#include "fqbank/parallel.hpp"
#include "fqbank/text.hpp"

namespace fqbank {
namespace {

struct ConversationOutput {
    std::vector<AssembledSample> samples;
    std::vector<std::string> warnings;
};

ConversationOutput process(const Conversation& conv, const GenerationResources& resources,
                           const GeneratorConfig& config) {
    ConversationOutput out;
    if (conv.turns.size() < 2) {
        out.warnings.push_back("conversation " + conv.conversation_id + " has " +
                               std::to_string(conv.turns.size()) + " turn(s); no samples");
        return out;
    }
    for (const auto& skeleton : generate_sample_skeletons(conv)) {
        auto assembled = assemble_sample(skeleton, resources, config);
        out.warnings.insert(out.warnings.end(), assembled.warnings.begin(), assembled.warnings.end());
        out.samples.push_back(std::move(assembled));
    }
    return out;
}

std::string fixed(double value, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, value);
    return buf;
}

void row(std::string& out, const std::string& name, const std::string& value) {
    constexpr std::size_t kNameWidth = 36;
    constexpr std::size_t kValueWidth = 12;
    out += name;
    out.append(kNameWidth > name.size() ? kNameWidth - name.size() : 1, ' ');
    out.append(kValueWidth > value.size() ? kValueWidth - value.size() : 0, ' ');
    out += value;
    out += '\n';
}

} // namespace

DatasetResult build_dataset(const std::vector<Conversation>& conversations,
                            const GenerationResources& resources, const GeneratorConfig& config,
                            std::size_t workers) {
    std::vector<ConversationOutput> slots(conversations.size());
    parallel_for(conversations.size(), workers,
                 [&](std::size_t i) { slots[i] = process(conversations[i], resources, config); });
    DatasetResult result;
    for (auto& slot : slots) {
        std::move(slot.samples.begin(), slot.samples.end(), std::back_inserter(result.samples));
        std::move(slot.warnings.begin(), slot.warnings.end(), std::back_inserter(result.warnings));
    }
    return result;
}

std::size_t DatasetStats::confounders() const {
    std::size_t total = 0;
    for (std::size_t i = 0; i < kLabelCount; ++i) {
        if (static_cast<Label>(i) != Label::valid) {
            total += label_counts[i];
        }
    }
    return total;
}

double DatasetStats::per_dialog(std::size_t count) const {
    return dialogs == 0 ? 0.0 : static_cast<double>(count) / static_cast<double>(dialogs);
}

double DatasetStats::tokens_per_utterance() const {
    return turns == 0 ? 0.0 : static_cast<double>(utterance_tokens) / static_cast<double>(turns);
}

double DatasetStats::tokens_per_response() const {
    return turns == 0 ? 0.0 : static_cast<double>(response_tokens) / static_cast<double>(turns);
}

DatasetStats compute_stats(const std::vector<Sample>& samples) {
    DatasetStats stats;
    for (const auto& s : samples) {
        ++stats.dialogs;
        auto count_turn = [&](const std::string& q, const std::string& a) {
            ++stats.turns;
            stats.utterance_tokens += tokenize(q).size();
            stats.response_tokens += tokenize(a).size();
        };
        for (const auto& qa : s.context.history) {
            count_turn(qa.question, qa.answer);
        }
        count_turn(s.context.current_question, s.context.current_answer);
        for (const auto& c : s.candidates) {
            ++stats.label_counts[static_cast<std::size_t>(c.label)];
        }
    }
    return stats;
}

std::string format_stats_table(const DatasetStats& stats, bool fold_partial) {
    auto count = [&](Label l) { return stats.label_counts[static_cast<std::size_t>(l)]; };
    std::string out;
    row(out, "Dialog", std::to_string(stats.dialogs));
    row(out, "Turns (utterance, response pair)", std::to_string(stats.turns));
    row(out, "Turns per dialog", fixed(stats.per_dialog(stats.turns), 2));
    row(out, "Tokens per utterance", fixed(stats.tokens_per_utterance(), 2));
    row(out, "Tokens per response", fixed(stats.tokens_per_response(), 2));
    out += "Confounders\n";
    auto confounder = [&](const std::string& name, std::size_t n) {
        row(out, name, std::to_string(n));
        row(out, "- per dialog", fixed(stats.per_dialog(n), 2));
    };
    confounder("Paraphrase", count(Label::paraphrase));
    if (fold_partial) {
        confounder("Irrelevant entity", count(Label::irrelevant_entity) + count(Label::partial_entity));
    } else {
        confounder("Irrelevant entity", count(Label::irrelevant_entity));
        confounder("Partial entity match", count(Label::partial_entity));
    }
    confounder("Irrelevant context", count(Label::irrelevant_context));
    confounder("ASR Error", count(Label::asr_error));
    confounder("Random utterance", count(Label::random_question));
    confounder("Duplication of dialog history", count(Label::history_duplicate));
    confounder("Total", stats.confounders());
    return out;
}

void write_audit(std::ostream& out, const std::vector<AssembledSample>& samples) {
    for (const auto& s : samples) {
        for (const auto& record : s.audit) {
            out << audit_to_json(record).dump() << '\n';
        }
    }
}

} // namespace fqbank
