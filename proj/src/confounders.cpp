#include "fqbank/confounders.hpp"

#include <algorithm>
#include <numeric>
#include <unordered_set>

#include "fqbank/text.hpp"

namespace fqbank {
namespace {

constexpr std::string_view kGeneratorNames[] = {
    "paraphrase",         "irrelevant_entity", "partial_entity",   "irrelevant_context",
    "asr_error",          "random_question",   "history_duplicate",
};

constexpr std::size_t kRejectionAttempts = 32;

/// Bytes of mention token k, excluding a trailing possessive.
std::pair<std::size_t, std::size_t> mention_token_bytes(const std::vector<Token>& tokens,
                                                        const EntityMention& m, std::size_t k) {
    return {tokens[k].begin, k + 1 == m.end ? std::min(tokens[k].end, m.byte_end) : tokens[k].end};
}

bool is_capitalized(std::string_view word) {
    return match_case("a", word) == "A";
}

bool contains_sequence(const std::vector<std::string>& haystack, const std::vector<std::string>& needle) {
    if (needle.empty()) {
        return true;
    }
    return std::search(haystack.begin(), haystack.end(), needle.begin(), needle.end()) != haystack.end();
}

/// Uniform draw from `items` restricted to `accept`; nullopt when nothing qualifies.
template <typename Accept>
std::optional<std::size_t> draw_matching(const std::vector<std::size_t>& items, Rng& rng, Accept accept) {
    if (items.empty()) {
        return std::nullopt;
    }
    for (std::size_t attempt = 0; attempt < kRejectionAttempts; ++attempt) {
        const std::size_t pick = items[rng.index(items.size())];
        if (accept(pick)) {
            return pick;
        }
    }
    std::vector<std::size_t> eligible;
    for (std::size_t item : items) {
        if (accept(item)) {
            eligible.push_back(item);
        }
    }
    if (eligible.empty()) {
        return std::nullopt;
    }
    return eligible[rng.index(eligible.size())];
}

std::string candidate_id(std::size_t position, std::size_t count) {
    std::size_t width = 3;
    for (std::size_t n = count; n >= 1000; n /= 10) {
        ++width;
    }
    std::string digits = std::to_string(position);
    return "c" + std::string(width - std::min(width, digits.size()), '0') + digits;
}

} // namespace

std::string_view to_string(Generator g) {
    return kGeneratorNames[static_cast<std::size_t>(g)];
}

std::optional<Generator> parse_generator(std::string_view name) {
    for (std::size_t i = 0; i < std::size(kGeneratorNames); ++i) {
        if (kGeneratorNames[i] == name) {
            return static_cast<Generator>(i);
        }
    }
    return std::nullopt;
}

Label label_of(Generator g) {
    switch (g) {
    case Generator::paraphrase:
        return Label::paraphrase;
    case Generator::irrelevant_entity:
        return Label::irrelevant_entity;
    case Generator::partial_entity:
        return Label::partial_entity;
    case Generator::irrelevant_context:
        return Label::irrelevant_context;
    case Generator::asr_error:
        return Label::asr_error;
    case Generator::random_question:
        return Label::random_question;
    case Generator::history_duplicate:
        return Label::history_duplicate;
    }
    return Label::paraphrase;
}

std::string_view to_string(DuplicatePolicy p) {
    return p == DuplicatePolicy::current_only ? "current_only" : "all_context_questions";
}

std::optional<DuplicatePolicy> parse_duplicate_policy(std::string_view name) {
    if (name == "current_only") {
        return DuplicatePolicy::current_only;
    }
    if (name == "all_context_questions") {
        return DuplicatePolicy::all_context_questions;
    }
    return std::nullopt;
}

bool GeneratorConfig::needs_catalog() const {
    return is_enabled(Generator::irrelevant_entity) || is_enabled(Generator::partial_entity) ||
           is_enabled(Generator::irrelevant_context) || is_enabled(Generator::asr_error);
}

QuestionPool QuestionPool::build(const std::vector<Conversation>& conversations,
                                 const EntityCatalog* catalog) {
    QuestionPool pool;
    std::unordered_set<std::string> ids;
    for (const auto& conv : conversations) {
        ids.insert(conv.conversation_id);
        for (const auto& turn : conv.turns) {
            Entry e;
            e.text = turn.question_rewritten;
            e.key = fold_key(e.text);
            e.conversation_id = conv.conversation_id;
            if (catalog) {
                e.mentions = catalog->find_entities(e.text);
            }
            const std::size_t idx = pool.entries_.size();
            std::array<bool, kEntityTypeCount> seen{};
            for (const auto& m : e.mentions) {
                const auto t = static_cast<std::size_t>(m.type);
                if (!seen[t]) {
                    seen[t] = true;
                    pool.by_type_[t].push_back(idx);
                }
            }
            pool.entries_.push_back(std::move(e));
        }
    }
    pool.conversation_count_ = ids.size();
    return pool;
}

Generated gen_paraphrase(std::string_view question, const std::vector<EntityMention>& mentions,
                         const ParaphraseProvider& provider) {
    Generated out;
    if (normalize_whitespace(question).empty()) {
        out.skipped.push_back("empty_question");
        return out;
    }
    auto text = provider.paraphrase(question);
    if (!text || normalize_whitespace(*text).empty()) {
        out.skipped.push_back("no_paraphrase");
        return out;
    }
    if (fold_key(*text) == fold_key(question)) {
        out.skipped.push_back("identical_to_source");
        return out;
    }
    const auto words = tokenize_words(*text);
    for (const auto& m : mentions) {
        if (!contains_sequence(words, m.tokens)) {
            out.skipped.push_back("entity_not_preserved");
            return out;
        }
    }
    GeneratedCandidate c;
    c.text = std::move(*text);
    c.label = Label::paraphrase;
    c.source_text = std::string(question);
    out.candidates.push_back(std::move(c));
    return out;
}

Generated gen_irrelevant_entity(std::string_view question, const std::vector<EntityMention>& mentions,
                                const EntityCatalog& catalog, Rng& rng, std::size_t cap) {
    Generated out;
    if (mentions.empty()) {
        out.skipped.push_back("no_entity_mentions");
        return out;
    }
    for (const auto& m : mentions) {
        if (out.candidates.size() >= cap) {
            out.skipped.push_back("entity_swap_cap_reached");
            break;
        }
        const auto original = question.substr(m.byte_begin, m.byte_end - m.byte_begin);
        auto replacement = catalog.sample_replacement(m.type, original, rng);
        if (!replacement) {
            out.skipped.push_back("no_same_type_replacement");
            continue;
        }
        GeneratedCandidate c;
        c.text = splice(question, m.byte_begin, m.byte_end, replacement->surface);
        c.label = Label::irrelevant_entity;
        c.source_text = std::string(question);
        c.source_span = TokenSpan{m.begin, m.end};
        c.replaced_span = TokenSpan{m.begin, m.begin + replacement->tokens.size()};
        out.candidates.push_back(std::move(c));
    }
    return out;
}

Generated gen_partial_entity(std::string_view question, const EntityMention& mention,
                             const NameLexicon& lexicon, Rng& rng) {
    Generated out;
    if (mention.size() < 2) {
        out.skipped.push_back("single_token_entity");
        return out;
    }
    if (lexicon.empty()) {
        out.skipped.push_back("empty_name_lexicon");
        return out;
    }
    const auto tokens = tokenize(question);
    std::vector<std::size_t> positions;
    for (std::size_t k = mention.begin; k < mention.end; ++k) {
        const auto [b, e] = mention_token_bytes(tokens, mention, k);
        if (is_capitalized(question.substr(b, e - b))) {
            positions.push_back(k);
        }
    }
    if (positions.empty()) {
        positions.resize(mention.size());
        std::iota(positions.begin(), positions.end(), mention.begin);
    }
    const std::size_t pos = positions[rng.index(positions.size())];
    const auto& names = (pos == mention.begin && !lexicon.first_names.empty()) || lexicon.last_names.empty()
                            ? lexicon.first_names
                            : lexicon.last_names;
    std::vector<std::size_t> name_ids(names.size());
    std::iota(name_ids.begin(), name_ids.end(), 0);
    const auto& original = mention.tokens[pos - mention.begin];
    auto pick = draw_matching(name_ids, rng,
                              [&](std::size_t i) { return case_fold(names[i]) != original; });
    if (!pick) {
        out.skipped.push_back("no_distinct_name");
        return out;
    }
    const auto [b, e] = mention_token_bytes(tokens, mention, pos);
    GeneratedCandidate c;
    c.text = splice(question, b, e, match_case(names[*pick], question.substr(b, e - b)));
    c.label = Label::partial_entity;
    c.source_text = std::string(question);
    c.source_span = TokenSpan{pos, pos + 1};
    c.replaced_span = TokenSpan{pos, pos + 1};
    out.candidates.push_back(std::move(c));
    return out;
}

Generated gen_irrelevant_context(std::string_view current_question, const EntityMention& mention,
                                 const QuestionPool& pool, std::string_view conversation_id, Rng& rng) {
    Generated out;
    const auto& entries = pool.entries();
    auto pick = draw_matching(pool.with_type(mention.type), rng, [&](std::size_t i) {
        return entries[i].conversation_id != conversation_id;
    });
    if (!pick) {
        out.skipped.push_back("no_same_type_pool_question");
        return out;
    }
    const auto& entry = entries[*pick];
    const auto target = std::find_if(entry.mentions.begin(), entry.mentions.end(),
                                     [&](const EntityMention& m) { return m.type == mention.type; });
    const auto surface =
        current_question.substr(mention.byte_begin, mention.byte_end - mention.byte_begin);
    GeneratedCandidate c;
    c.text = splice(entry.text, target->byte_begin, target->byte_end, surface);
    c.label = Label::irrelevant_context;
    c.source_text = entry.text;
    c.source_span = TokenSpan{target->begin, target->end};
    c.replaced_span = TokenSpan{target->begin, target->begin + mention.size()};
    c.source_conversation = entry.conversation_id;
    out.candidates.push_back(std::move(c));
    return out;
}

Generated gen_random_questions(const QuestionPool& pool, std::string_view conversation_id, Rng& rng,
                               std::size_t k, const std::unordered_set<std::string>* taken) {
    Generated out;
    if (k == 0) {
        return out;
    }
    const auto& entries = pool.entries();
    std::unordered_set<std::size_t> chosen;
    std::unordered_set<std::string> used_conversations;
    std::unordered_set<std::string> drawn_keys;
    auto take = [&](std::size_t i) {
        chosen.insert(i);
        used_conversations.insert(entries[i].conversation_id);
        drawn_keys.insert(entries[i].key);
        GeneratedCandidate c;
        c.text = entries[i].text;
        c.label = Label::random_question;
        c.source_text = entries[i].text;
        c.source_conversation = entries[i].conversation_id;
        out.candidates.push_back(std::move(c));
    };
    auto fresh_question = [&](std::size_t i) {
        if (entries[i].conversation_id == conversation_id || chosen.contains(i)) {
            return false;
        }
        const auto& key = entries[i].key;
        return !key.empty() && !drawn_keys.contains(key) && !(taken && taken->contains(key));
    };
    auto fresh_conversation = [&](std::size_t i) {
        return fresh_question(i) && !used_conversations.contains(entries[i].conversation_id);
    };

    if (!entries.empty()) {
        for (std::size_t attempt = 0; attempt < kRejectionAttempts * k && out.candidates.size() < k;
             ++attempt) {
            const std::size_t i = rng.index(entries.size());
            if (fresh_conversation(i)) {
                take(i);
            }
        }
    }
    // Small pools: exhaust distinct conversations first, then any other-conversation question.
    for (auto accept : {+[](bool distinct) { return distinct; }, +[](bool) { return true; }}) {
        while (out.candidates.size() < k) {
            std::vector<std::size_t> eligible;
            for (std::size_t i = 0; i < entries.size(); ++i) {
                if (fresh_question(i) && accept(fresh_conversation(i))) {
                    eligible.push_back(i);
                }
            }
            if (eligible.empty()) {
                break;
            }
            take(eligible[rng.index(eligible.size())]);
        }
    }
    if (out.candidates.size() < k) {
        out.skipped.push_back("pool_too_small: wanted " + std::to_string(k) + ", drew " +
                              std::to_string(out.candidates.size()));
    }
    return out;
}

Generated gen_asr_error(std::string_view question, const EntityMention& mention,
                        const HomophoneProvider& homophones, std::vector<std::string>* warnings) {
    Generated out;
    const auto tokens = tokenize(question);
    for (std::size_t k = mention.begin; k < mention.end && k < tokens.size(); ++k) {
        const auto found = homophones.homophones(mention.tokens[k - mention.begin], warnings);
        if (found.empty()) {
            continue;
        }
        const auto [b, e] = mention_token_bytes(tokens, mention, k);
        GeneratedCandidate c;
        c.text = splice(question, b, e, match_case(found.front(), question.substr(b, e - b)));
        c.label = Label::asr_error;
        c.source_text = std::string(question);
        c.source_span = TokenSpan{k, k + 1};
        c.replaced_span = TokenSpan{k, k + 1};
        out.candidates.push_back(std::move(c));
    }
    if (out.candidates.empty()) {
        out.skipped.push_back("no_homophone");
    }
    return out;
}

Generated gen_history_duplicates(const DialogContext& context, DuplicatePolicy policy) {
    Generated out;
    std::vector<std::string> questions;
    if (policy == DuplicatePolicy::current_only) {
        questions.push_back(context.current_question);
    } else {
        questions = context.questions();
    }
    for (auto& q : questions) {
        GeneratedCandidate c;
        c.text = q;
        c.label = Label::history_duplicate;
        c.source_text = std::move(q);
        out.candidates.push_back(std::move(c));
    }
    return out;
}

nlohmann::ordered_json audit_to_json(const AuditRecord& r) {
    nlohmann::ordered_json j;
    j["sample_id"] = r.sample_id;
    j["generator"] = r.generator;
    j["action"] = r.action;
    j["reason"] = r.reason;
    if (!r.candidate_id.empty()) {
        j["candidate_id"] = r.candidate_id;
    }
    if (!r.text.empty()) {
        j["text"] = r.text;
    }
    if (!r.source.empty()) {
        j["source"] = r.source;
    }
    if (r.source_span) {
        j["source_span"] = {r.source_span->begin, r.source_span->end};
    }
    if (r.replaced_span) {
        j["replaced_span"] = {r.replaced_span->begin, r.replaced_span->end};
    }
    if (!r.source_conversation.empty()) {
        j["source_conversation"] = r.source_conversation;
    }
    return j;
}

AssembledSample assemble_sample(const SampleSkeleton& skeleton, const GenerationResources& res,
                                const GeneratorConfig& config) {
    AssembledSample out;
    out.sample.sample_id = skeleton.sample_id;
    out.sample.context = skeleton.context;
    out.sample.seed = derive_seed(config.seed, skeleton.sample_id);
    Rng rng(out.sample.seed);

    struct Target {
        std::string text;
        std::vector<EntityMention> mentions;
    };
    std::vector<Target> targets;
    targets.push_back({skeleton.context.current_question, {}});
    if (config.target_history) {
        for (const auto& qa : skeleton.context.history) {
            targets.push_back({qa.question, {}});
        }
    }
    if (res.catalog) {
        for (auto& t : targets) {
            t.mentions = res.catalog->find_entities(t.text);
        }
    }
    const auto& current = targets.front();

    struct Pending {
        Generator generator;
        GeneratedCandidate candidate;
    };
    std::vector<Pending> pending;
    std::vector<AuditRecord> skips;
    auto collect = [&](Generator g, Generated&& gen) {
        for (auto& c : gen.candidates) {
            pending.push_back({g, std::move(c)});
        }
        for (auto& reason : gen.skipped) {
            AuditRecord r;
            r.sample_id = skeleton.sample_id;
            r.generator = std::string(to_string(g));
            r.action = "skipped";
            r.reason = std::move(reason);
            // Skips are interleaved by generation position.
            r.candidate_id = std::to_string(pending.size());
            skips.push_back(std::move(r));
        }
    };
    auto skip = [&](Generator g, const char* reason) {
        Generated gen;
        gen.skipped.emplace_back(reason);
        collect(g, std::move(gen));
    };
    auto any_mentions = [&] {
        return std::any_of(targets.begin(), targets.end(), [](const Target& t) { return !t.mentions.empty(); });
    };

    if (config.is_enabled(Generator::paraphrase)) {
        if (!res.paraphrases) {
            skip(Generator::paraphrase, "no_paraphrase_provider");
        } else {
            collect(Generator::paraphrase, gen_paraphrase(current.text, current.mentions, *res.paraphrases));
        }
    }

    if (config.is_enabled(Generator::irrelevant_entity)) {
        if (!res.catalog) {
            skip(Generator::irrelevant_entity, "no_entity_catalog");
        } else if (!any_mentions()) {
            skip(Generator::irrelevant_entity, "no_entity_mentions");
        } else {
            std::size_t remaining = config.max_entity_swaps_per_sample;
            for (const auto& t : targets) {
                if (t.mentions.empty()) {
                    continue;
                }
                auto gen = gen_irrelevant_entity(t.text, t.mentions, *res.catalog, rng, remaining);
                remaining -= std::min(remaining, gen.candidates.size());
                collect(Generator::irrelevant_entity, std::move(gen));
                if (remaining == 0) {
                    break;
                }
            }
        }
    }

    if (config.is_enabled(Generator::partial_entity)) {
        if (!res.catalog) {
            skip(Generator::partial_entity, "no_entity_catalog");
        } else if (!res.names) {
            skip(Generator::partial_entity, "no_name_lexicon");
        } else if (!any_mentions()) {
            skip(Generator::partial_entity, "no_entity_mentions");
        } else {
            std::size_t produced = 0;
            for (const auto& t : targets) {
                for (const auto& m : t.mentions) {
                    if (produced >= config.max_entity_swaps_per_sample) {
                        break;
                    }
                    auto gen = gen_partial_entity(t.text, m, *res.names, rng);
                    produced += gen.candidates.size();
                    collect(Generator::partial_entity, std::move(gen));
                }
            }
        }
    }

    if (config.is_enabled(Generator::irrelevant_context)) {
        if (!res.catalog) {
            skip(Generator::irrelevant_context, "no_entity_catalog");
        } else if (!res.pool) {
            skip(Generator::irrelevant_context, "no_question_pool");
        } else if (current.mentions.empty()) {
            skip(Generator::irrelevant_context, "no_entity_mentions");
        } else {
            collect(Generator::irrelevant_context,
                    gen_irrelevant_context(current.text, current.mentions.front(), *res.pool,
                                           skeleton.conversation_id, rng));
        }
    }

    if (config.is_enabled(Generator::asr_error)) {
        if (!res.catalog) {
            skip(Generator::asr_error, "no_entity_catalog");
        } else if (!res.homophones) {
            skip(Generator::asr_error, "no_homophone_source");
        } else if (!any_mentions()) {
            skip(Generator::asr_error, "no_entity_mentions");
        } else {
            for (const auto& t : targets) {
                for (const auto& m : t.mentions) {
                    collect(Generator::asr_error, gen_asr_error(t.text, m, *res.homophones, &out.warnings));
                }
            }
        }
    }

    if (config.is_enabled(Generator::random_question)) {
        if (!res.pool) {
            skip(Generator::random_question, "no_question_pool");
        } else {
            std::unordered_set<std::string> taken{fold_key(skeleton.valid_text)};
            for (const auto& q : skeleton.context.questions()) {
                taken.insert(fold_key(q));
            }
            for (const auto& p : pending) {
                taken.insert(fold_key(p.candidate.text));
            }
            auto gen = gen_random_questions(*res.pool, skeleton.conversation_id, rng,
                                            config.random_question_count, &taken);
            if (gen.candidates.size() < config.random_question_count) {
                out.warnings.push_back(skeleton.sample_id + ": only " + std::to_string(gen.candidates.size()) +
                                       " of " + std::to_string(config.random_question_count) +
                                       " random questions available");
            }
            collect(Generator::random_question, std::move(gen));
        }
    }

    if (config.is_enabled(Generator::history_duplicate)) {
        collect(Generator::history_duplicate,
                gen_history_duplicates(skeleton.context, config.duplicate_policy));
    }

    // Dedup: the valid follow-up first, then confounders in generation order.
    std::vector<GeneratedCandidate> kept;
    std::vector<std::string> kept_generator;
    GeneratedCandidate valid;
    valid.text = skeleton.valid_text;
    valid.label = Label::valid;
    kept.push_back(valid);
    kept_generator.emplace_back("valid");
    const auto valid_key = fold_key(skeleton.valid_text);
    std::unordered_set<std::string> keys{valid_key};

    struct Event {
        std::size_t kept_index; // meaningful for emitted records
        AuditRecord record;
    };
    std::vector<Event> events;
    std::size_t skip_cursor = 0;
    auto flush_skips = [&](std::size_t position) {
        while (skip_cursor < skips.size() && std::stoul(skips[skip_cursor].candidate_id) <= position) {
            auto r = std::move(skips[skip_cursor++]);
            r.candidate_id.clear();
            events.push_back({0, std::move(r)});
        }
    };

    for (std::size_t i = 0; i < pending.size(); ++i) {
        flush_skips(i);
        auto& p = pending[i];
        AuditRecord r;
        r.sample_id = skeleton.sample_id;
        r.generator = std::string(to_string(p.generator));
        r.text = p.candidate.text;
        r.source = p.candidate.source_text;
        r.source_span = p.candidate.source_span;
        r.replaced_span = p.candidate.replaced_span;
        r.source_conversation = p.candidate.source_conversation;
        const auto key = fold_key(p.candidate.text);
        if (key.empty()) {
            r.action = "skipped";
            r.reason = "empty_text";
            events.push_back({0, std::move(r)});
            continue;
        }
        if (!keys.insert(key).second) {
            r.action = "deduped";
            r.reason = key == valid_key ? "duplicate_of_valid" : "duplicate_candidate";
            events.push_back({0, std::move(r)});
            continue;
        }
        r.action = "emitted";
        events.push_back({kept.size(), std::move(r)});
        kept.push_back(std::move(p.candidate));
        kept_generator.push_back(std::string(to_string(p.generator)));
    }
    flush_skips(pending.size());

    out.zero_confounders = kept.size() == 1;
    if (out.zero_confounders) {
        out.warnings.push_back(skeleton.sample_id + ": no confounders generated");
    }

    out.permutation.resize(kept.size());
    std::iota(out.permutation.begin(), out.permutation.end(), 0);
    rng.shuffle(out.permutation);
    std::vector<std::string> id_of_kept(kept.size());
    for (std::size_t pos = 0; pos < kept.size(); ++pos) {
        const auto& src = kept[out.permutation[pos]];
        const auto id = candidate_id(pos, kept.size());
        id_of_kept[out.permutation[pos]] = id;
        out.sample.candidates.push_back({id, src.text, src.label});
        out.provenance.push_back(src);
    }

    AuditRecord valid_record;
    valid_record.sample_id = skeleton.sample_id;
    valid_record.generator = "valid";
    valid_record.action = "emitted";
    valid_record.reason = out.zero_confounders ? "zero_confounders" : "";
    valid_record.candidate_id = id_of_kept[0];
    valid_record.text = skeleton.valid_text;
    out.audit.push_back(std::move(valid_record));
    for (auto& e : events) {
        if (e.record.action == "emitted") {
            e.record.candidate_id = id_of_kept[e.kept_index];
        }
        out.audit.push_back(std::move(e.record));
    }
    return out;
}

} // namespace fqbank
