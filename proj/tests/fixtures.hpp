#pragma once

#include <unistd.h>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "fqbank/corpus.hpp"
#include "fqbank/entity.hpp"
#include "fqbank/phonetics.hpp"
#include "fqbank/rng.hpp"

namespace fqbank::testing {

inline std::filesystem::path data_path(const std::string& name) {
    return std::filesystem::path(FQBANK_TEST_DATA_DIR) / name;
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        static std::atomic<int> counter{0};
        path_ = std::filesystem::temp_directory_path() /
                ("fqbank-" + tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

inline const std::vector<std::pair<std::string, EntityType>>& synthetic_entities() {
    static const std::vector<std::pair<std::string, EntityType>> entities = {
        {"Kurt Gödel", EntityType::person},        {"Cristiano Ronaldo", EntityType::person},
        {"Marie Curie", EntityType::person},       {"Alan Turing", EntityType::person},
        {"Ada Lovelace", EntityType::person},      {"Niels Bohr", EntityType::person},
        {"Emmy Noether", EntityType::person},      {"Carl Sagan", EntityType::person},
        {"Paris", EntityType::location},           {"Vienna", EntityType::location},
        {"Brunn", EntityType::location},           {"Croatia", EntityType::location},
        {"New York", EntityType::location},        {"Juventus", EntityType::org},
        {"Princeton University", EntityType::org}, {"Royal Society", EntityType::org},
    };
    return entities;
}

inline EntityCatalog synthetic_catalog() {
    EntityCatalog catalog;
    for (const auto& [surface, type] : synthetic_entities()) {
        catalog.add(surface, type);
    }
    return catalog;
}

/// Word list with homophone pairs for the synthetic entities.
inline PhoneticLexicon synthetic_lexicon() {
    PhoneticLexicon lex;
    for (const char* w : {"curt", "kurt", "godel", "gödel", "marie", "mary", "curie", "cury", "alan", "allan",
                          "allen", "turing", "tureing", "ada", "niels", "neils", "bohr", "bor", "boor", "carl",
                          "karl", "sagan", "saggan", "paris", "parris", "vienna", "viena", "brunn", "brun",
                          "croatia", "new", "knew", "york", "yorke", "juventus", "royal", "royale", "society"}) {
        lex.add(w);
    }
    return lex;
}

/// Deterministic corpus of `n` conversations with 1-6 turns, each built
/// around one focus entity.
inline std::vector<Conversation> synthetic_corpus(std::size_t n, std::uint64_t seed = 7) {
    static const char* kPersonTemplates[] = {
        "Where was {} born?",          "When was {} born?",        "Where did {} go to school?",
        "What were {}'s interests?",   "What did {} do in 1931?",  "Did {} have any children?",
        "How old is {}?",              "What is the birthplace of {}?", "Who influenced {}?",
        "What awards did {} receive?",
    };
    static const char* kPlaceTemplates[] = {
        "What is the capital of {}?", "Where is {}?", "What is the population of {}?",
        "What language is spoken in {}?", "What is the history of {}?",
    };
    static const char* kOrgTemplates[] = {
        "When was {} founded?", "Who leads {}?", "Where is {} based?", "Who joined {} in 2018?",
    };
    const auto& entities = synthetic_entities();
    Rng rng(seed);
    std::vector<Conversation> out;
    for (std::size_t i = 0; i < n; ++i) {
        const auto& [surface, type] = entities[rng.index(entities.size())];
        Conversation conv;
        conv.conversation_id = "S" + std::to_string(1000 + i);
        conv.topic = surface;
        const std::size_t turns = 1 + rng.index(6);
        for (std::size_t t = 0; t < turns; ++t) {
            std::string tmpl;
            if (type == EntityType::person) {
                tmpl = kPersonTemplates[rng.index(std::size(kPersonTemplates))];
            } else if (type == EntityType::location) {
                tmpl = kPlaceTemplates[rng.index(std::size(kPlaceTemplates))];
            } else {
                tmpl = kOrgTemplates[rng.index(std::size(kOrgTemplates))];
            }
            const auto at = tmpl.find("{}");
            std::string rewritten = tmpl;
            rewritten.replace(at, 2, surface);
            std::string original = tmpl;
            original.replace(at, 2, t == 0 ? surface : (type == EntityType::person ? "they" : "it"));
            Turn turn;
            turn.question_original = original;
            turn.question_rewritten = rewritten;
            turn.answer = "Answer " + std::to_string(t + 1) + " about " + surface + " with some detail";
            conv.turns.push_back(std::move(turn));
        }
        out.push_back(std::move(conv));
    }
    return out;
}

inline void write_corpus(const std::filesystem::path& path, const std::vector<Conversation>& convs) {
    std::ofstream out(path, std::ios::binary);
    for (const auto& c : convs) {
        out << serialize_conversation(c) << '\n';
    }
}

inline std::vector<Conversation> load_corpus(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    return parse_conversations(in).conversations;
}

} // namespace fqbank::testing
