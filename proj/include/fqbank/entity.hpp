#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "fqbank/rng.hpp"
#include "fqbank/text.hpp"

namespace fqbank {

enum class EntityType { person, org, location, event, work, misc };

inline constexpr std::size_t kEntityTypeCount = 6;

std::string_view to_string(EntityType type);
std::optional<EntityType> parse_entity_type(std::string_view name);

struct EntityEntry {
    std::string surface;
    EntityType type = EntityType::misc;
    std::vector<std::string> tokens;

    bool operator==(const EntityEntry&) const = default;
};

/// Entity occurrence in a question. `begin`/`end` are a half-open token range;
/// `byte_begin`/`byte_end` locate the same span in the question text.
struct EntityMention {
    std::size_t begin = 0;
    std::size_t end = 0;
    EntityType type = EntityType::misc;
    std::vector<std::string> tokens;
    std::size_t byte_begin = 0;
    std::size_t byte_end = 0;

    std::size_t size() const { return end - begin; }
    bool operator==(const EntityMention&) const = default;
};

/// Typed surface forms. Doubles as a gazetteer recognizer (longest match over
/// folded tokens) and as the source of same-type substitutes.
class EntityCatalog {
public:
    EntityCatalog() = default;

    /// Tab-separated "surface<TAB>type" lines; "#" starts a comment line.
    /// Unknown types, malformed lines and duplicate surfaces are skipped
    /// with a warning.
    static EntityCatalog parse(std::istream& in, std::vector<std::string>* warnings = nullptr);
    static EntityCatalog load(const std::filesystem::path& path,
                              std::vector<std::string>* warnings = nullptr);

    /// False when the surface is a duplicate (first occurrence wins) or has no tokens.
    bool add(std::string_view surface, EntityType type);

    std::vector<EntityMention> find_entities(std::string_view question) const;

    /// Same-type entry whose folded surface differs from `exclude`. Empty when
    /// the catalog holds fewer than two entries of the type.
    std::optional<EntityEntry> sample_replacement(EntityType type, std::string_view exclude,
                                                  Rng& rng) const;

    const std::vector<EntityEntry>& entries() const { return entries_; }
    const std::vector<std::size_t>& entries_of(EntityType type) const {
        return by_type_[static_cast<std::size_t>(type)];
    }
    std::size_t size() const { return entries_.size(); }
    bool empty() const { return entries_.empty(); }

    bool operator==(const EntityCatalog& other) const;

private:
    std::vector<EntityEntry> entries_;
    std::array<std::vector<std::size_t>, kEntityTypeCount> by_type_;
    // first token -> entry indices, longest first
    std::unordered_map<std::string, std::vector<std::size_t>> by_first_token_;
    // folded surface -> entry index
    std::unordered_map<std::string, std::size_t> surfaces_;
};

/// First and last name tokens for partial-entity substitution.
struct NameLexicon {
    std::vector<std::string> first_names;
    std::vector<std::string> last_names;

    static NameLexicon load(const std::filesystem::path& first_names_path,
                            const std::filesystem::path& last_names_path);
    static std::vector<std::string> read_tokens(std::istream& in);
    /// First and last words of the catalog's multi-word PERSON entries.
    static NameLexicon from_catalog(const EntityCatalog& catalog);

    bool empty() const { return first_names.empty() && last_names.empty(); }
};

} // namespace fqbank
