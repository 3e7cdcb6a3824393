#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "fqbank/corpus.hpp"
#include "fqbank/entity.hpp"
#include "fqbank/paraphrase.hpp"
#include "fqbank/phonetics.hpp"
#include "fqbank/rng.hpp"

namespace fqbank {

enum class Generator {
    paraphrase,
    irrelevant_entity,
    partial_entity,
    irrelevant_context,
    asr_error,
    random_question,
    history_duplicate,
};

inline constexpr Generator kAllGenerators[] = {
    Generator::paraphrase,         Generator::irrelevant_entity, Generator::partial_entity,
    Generator::irrelevant_context, Generator::asr_error,         Generator::random_question,
    Generator::history_duplicate,
};

std::string_view to_string(Generator g);
std::optional<Generator> parse_generator(std::string_view name);
Label label_of(Generator g);

enum class DuplicatePolicy { current_only, all_context_questions };

std::string_view to_string(DuplicatePolicy p);
std::optional<DuplicatePolicy> parse_duplicate_policy(std::string_view name);

struct GeneratorConfig {
    std::set<Generator> enabled{std::begin(kAllGenerators), std::end(kAllGenerators)};
    std::size_t random_question_count = 3;
    std::size_t max_entity_swaps_per_sample = 3;
    DuplicatePolicy duplicate_policy = DuplicatePolicy::all_context_questions;
    // Entity generators also rewrite history questions, not only the current one.
    bool target_history = false;
    std::uint64_t seed = 0;

    bool is_enabled(Generator g) const { return enabled.contains(g); }
    /// True when any enabled generator depends on the entity catalog.
    bool needs_catalog() const;
};

/// Half-open token range.
struct TokenSpan {
    std::size_t begin = 0;
    std::size_t end = 0;

    bool operator==(const TokenSpan&) const = default;
};

/// A confounder with the provenance needed to audit it.
struct GeneratedCandidate {
    std::string text;
    Label label = Label::paraphrase;
    std::string source_text;                 // question it was derived from
    std::optional<TokenSpan> source_span;    // tokens replaced in source_text
    std::optional<TokenSpan> replaced_span;  // the same region in text
    std::string source_conversation;         // for pool-drawn candidates
};

struct Generated {
    std::vector<GeneratedCandidate> candidates;
    std::vector<std::string> skipped; // one reason per skip
};

/// Every question of the corpus, with its entity mentions, indexed by
/// entity type for the pool-based generators.
class QuestionPool {
public:
    struct Entry {
        std::string text;
        std::string key; // fold_key(text)
        std::string conversation_id;
        std::vector<EntityMention> mentions;
    };

    static QuestionPool build(const std::vector<Conversation>& conversations,
                              const EntityCatalog* catalog);

    const std::vector<Entry>& entries() const { return entries_; }
    /// Entries holding at least one mention of `type`.
    const std::vector<std::size_t>& with_type(EntityType type) const {
        return by_type_[static_cast<std::size_t>(type)];
    }
    std::size_t conversation_count() const { return conversation_count_; }

private:
    std::vector<Entry> entries_;
    std::array<std::vector<std::size_t>, kEntityTypeCount> by_type_;
    std::size_t conversation_count_ = 0;
};

Generated gen_paraphrase(std::string_view question, const std::vector<EntityMention>& mentions,
                         const ParaphraseProvider& provider);

/// One same-type substitution per mention, at most `cap`.
Generated gen_irrelevant_entity(std::string_view question, const std::vector<EntityMention>& mentions,
                                const EntityCatalog& catalog, Rng& rng, std::size_t cap);

/// Replaces one token of a multi-token mention with a lexicon name: first
/// names for the leading token, last names elsewhere. Capitalized tokens
/// are preferred as the replacement target.
Generated gen_partial_entity(std::string_view question, const EntityMention& mention,
                             const NameLexicon& lexicon, Rng& rng);

/// Draws a question from another conversation that mentions an entity of
/// the same type and writes the current entity into it.
Generated gen_irrelevant_context(std::string_view current_question, const EntityMention& mention,
                                 const QuestionPool& pool, std::string_view conversation_id, Rng& rng);

/// `k` questions from other conversations, drawn without replacement and
/// from distinct conversations while enough exist. Questions whose fold_key
/// is in `taken` (or was already drawn) are not eligible.
Generated gen_random_questions(const QuestionPool& pool, std::string_view conversation_id, Rng& rng,
                               std::size_t k, const std::unordered_set<std::string>* taken = nullptr);

/// One candidate per mention token that has a homophone.
Generated gen_asr_error(std::string_view question, const EntityMention& mention,
                        const HomophoneProvider& homophones, std::vector<std::string>* warnings);

Generated gen_history_duplicates(const DialogContext& context, DuplicatePolicy policy);

struct GenerationResources {
    const EntityCatalog* catalog = nullptr;
    const NameLexicon* names = nullptr;
    const ParaphraseProvider* paraphrases = nullptr;
    const HomophoneProvider* homophones = nullptr;
    const QuestionPool* pool = nullptr;
};

/// Audit line: {sample_id, generator, action, reason, ...provenance}.
struct AuditRecord {
    std::string sample_id;
    std::string generator;
    std::string action; // emitted | skipped | deduped
    std::string reason;
    std::string candidate_id;
    std::string text;
    std::string source;
    std::optional<TokenSpan> source_span;
    std::optional<TokenSpan> replaced_span;
    std::string source_conversation;
};

nlohmann::ordered_json audit_to_json(const AuditRecord& record);

struct AssembledSample {
    Sample sample;
    // provenance[i] describes sample.candidates[i]; the valid entry has no source.
    std::vector<GeneratedCandidate> provenance;
    // permutation[i] = generation-order index of sample.candidates[i]
    std::vector<std::size_t> permutation;
    std::vector<AuditRecord> audit;
    std::vector<std::string> warnings;
    bool zero_confounders = false;
};

/// Valid follow-up plus every enabled generator's output, deduplicated on
/// folded text (the valid candidate always survives), shuffled with a seed
/// derived from (config.seed, sample_id).
AssembledSample assemble_sample(const SampleSkeleton& skeleton, const GenerationResources& resources,
                                const GeneratorConfig& config);

} // namespace fqbank
