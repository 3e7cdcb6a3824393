#include "fqbank/entity.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <istream>
#include <stdexcept>

namespace fqbank {
namespace {

/// "gödel's" -> "gödel"; other tokens unchanged.
std::string_view strip_possessive(std::string_view folded) {
    if (folded.size() > 2 && folded.substr(folded.size() - 2) == "'s") {
        return folded.substr(0, folded.size() - 2);
    }
    return folded;
}

constexpr std::array<std::string_view, kEntityTypeCount> kTypeNames = {
    "PERSON", "ORG", "LOCATION", "EVENT", "WORK", "MISC",
};

std::string join(const std::vector<std::string>& tokens) {
    std::string out;
    for (const auto& t : tokens) {
        if (!out.empty()) {
            out.push_back(' ');
        }
        out.append(t);
    }
    return out;
}

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(first, last - first + 1));
}

} // namespace

std::string_view to_string(EntityType type) {
    return kTypeNames[static_cast<std::size_t>(type)];
}

std::optional<EntityType> parse_entity_type(std::string_view name) {
    std::string upper(name);
    std::transform(upper.begin(), upper.end(), upper.begin(),
                   [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    for (std::size_t i = 0; i < kTypeNames.size(); ++i) {
        if (kTypeNames[i] == upper) {
            return static_cast<EntityType>(i);
        }
    }
    return std::nullopt;
}

EntityCatalog EntityCatalog::parse(std::istream& in, std::vector<std::string>* warnings) {
    auto warn = [warnings](std::size_t line_no, const std::string& msg) {
        if (warnings) {
            warnings->push_back("catalog line " + std::to_string(line_no) + ": " + msg);
        }
    };
    EntityCatalog catalog;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty() || trim(line).front() == '#') {
            continue;
        }
        const auto tab = line.rfind('\t');
        if (tab == std::string::npos) {
            warn(line_no, "expected 'surface<TAB>type'");
            continue;
        }
        const auto surface = trim(std::string_view(line).substr(0, tab));
        const auto type_name = trim(std::string_view(line).substr(tab + 1));
        const auto type = parse_entity_type(type_name);
        if (!type) {
            warn(line_no, "unknown entity type '" + type_name + "', skipped");
            continue;
        }
        if (tokenize(surface).empty()) {
            warn(line_no, "surface has no word tokens, skipped");
            continue;
        }
        if (!catalog.add(surface, *type)) {
            warn(line_no, "duplicate surface '" + surface + "', first entry kept");
        }
    }
    return catalog;
}

EntityCatalog EntityCatalog::load(const std::filesystem::path& path,
                                  std::vector<std::string>* warnings) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open entity catalog: " + path.string());
    }
    return parse(in, warnings);
}

bool EntityCatalog::add(std::string_view surface, EntityType type) {
    EntityEntry entry;
    entry.surface = std::string(surface);
    entry.type = type;
    entry.tokens = tokenize_words(surface);
    if (entry.tokens.empty()) {
        return false;
    }
    const std::size_t idx = entries_.size();
    if (!surfaces_.emplace(join(entry.tokens), idx).second) {
        return false;
    }
    by_type_[static_cast<std::size_t>(type)].push_back(idx);
    auto& bucket = by_first_token_[entry.tokens.front()];
    entries_.push_back(std::move(entry));
    // Longest first; insertion order among equal lengths.
    auto pos = std::upper_bound(bucket.begin(), bucket.end(), idx,
                                [this](std::size_t a, std::size_t b) {
                                    return entries_[a].tokens.size() > entries_[b].tokens.size();
                                });
    bucket.insert(pos, idx);
    return true;
}

std::vector<EntityMention> EntityCatalog::find_entities(std::string_view question) const {
    const auto tokens = tokenize(question);
    struct Match {
        std::size_t begin;
        std::size_t length;
        std::size_t entry;
    };
    std::vector<Match> matches;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        auto it = by_first_token_.find(tokens[i].text);
        if (it == by_first_token_.end()) {
            it = by_first_token_.find(std::string(strip_possessive(tokens[i].text)));
        }
        if (it == by_first_token_.end()) {
            continue;
        }
        for (std::size_t idx : it->second) {
            const auto& et = entries_[idx].tokens;
            if (i + et.size() > tokens.size()) {
                continue;
            }
            bool ok = true;
            for (std::size_t k = 0; k < et.size() && ok; ++k) {
                const auto& t = tokens[i + k].text;
                ok = t == et[k] || (k + 1 == et.size() && strip_possessive(t) == et[k]);
            }
            if (ok) {
                matches.push_back({i, et.size(), idx});
                break; // bucket is longest-first
            }
        }
    }
    // Longest wins globally; leftmost among equal lengths.
    std::stable_sort(matches.begin(), matches.end(), [](const Match& a, const Match& b) {
        if (a.length != b.length) {
            return a.length > b.length;
        }
        return a.begin < b.begin;
    });
    std::vector<bool> taken(tokens.size(), false);
    std::vector<EntityMention> out;
    for (const auto& m : matches) {
        bool free = true;
        for (std::size_t k = m.begin; k < m.begin + m.length && free; ++k) {
            free = !taken[k];
        }
        if (!free) {
            continue;
        }
        std::fill(taken.begin() + static_cast<std::ptrdiff_t>(m.begin),
                  taken.begin() + static_cast<std::ptrdiff_t>(m.begin + m.length), true);
        EntityMention mention;
        mention.begin = m.begin;
        mention.end = m.begin + m.length;
        mention.type = entries_[m.entry].type;
        mention.tokens = entries_[m.entry].tokens;
        mention.byte_begin = tokens[mention.begin].begin;
        mention.byte_end = tokens[mention.end - 1].end;
        if (tokens[mention.end - 1].text != mention.tokens.back()) {
            // Stop before the possessive: one byte for 's', then the apostrophe code point.
            std::size_t end = mention.byte_end - 1;
            do {
                --end;
            } while (end > mention.byte_begin && (static_cast<unsigned char>(question[end]) & 0xC0) == 0x80);
            mention.byte_end = end;
        }
        out.push_back(std::move(mention));
    }
    std::sort(out.begin(), out.end(),
              [](const EntityMention& a, const EntityMention& b) { return a.begin < b.begin; });
    return out;
}

std::optional<EntityEntry> EntityCatalog::sample_replacement(EntityType type,
                                                             std::string_view exclude,
                                                             Rng& rng) const {
    const auto& pool = entries_of(type);
    if (pool.size() < 2) {
        return std::nullopt;
    }
    // Position of the excluded surface within the type list, if present.
    std::optional<std::size_t> skip;
    if (auto it = surfaces_.find(join(tokenize_words(exclude))); it != surfaces_.end()) {
        auto pos = std::lower_bound(pool.begin(), pool.end(), it->second);
        if (pos != pool.end() && *pos == it->second) {
            skip = static_cast<std::size_t>(pos - pool.begin());
        }
    }
    if (!skip) {
        return entries_[pool[rng.index(pool.size())]];
    }
    std::size_t pick = rng.index(pool.size() - 1);
    if (pick >= *skip) {
        ++pick;
    }
    return entries_[pool[pick]];
}

bool EntityCatalog::operator==(const EntityCatalog& other) const {
    return entries_ == other.entries_ && by_type_ == other.by_type_ &&
           by_first_token_ == other.by_first_token_ && surfaces_ == other.surfaces_;
}

std::vector<std::string> NameLexicon::read_tokens(std::istream& in) {
    std::vector<std::string> out;
    std::unordered_set<std::string> seen;
    std::string line;
    while (std::getline(in, line)) {
        auto token = trim(line);
        if (token.empty() || token.find(' ') != std::string::npos) {
            continue;
        }
        if (seen.insert(case_fold(token)).second) {
            out.push_back(std::move(token));
        }
    }
    return out;
}

NameLexicon NameLexicon::load(const std::filesystem::path& first_names_path,
                              const std::filesystem::path& last_names_path) {
    auto read = [](const std::filesystem::path& p) {
        std::ifstream in(p);
        if (!in) {
            throw std::runtime_error("cannot open name lexicon: " + p.string());
        }
        return read_tokens(in);
    };
    NameLexicon lex;
    lex.first_names = read(first_names_path);
    lex.last_names = read(last_names_path);
    return lex;
}

NameLexicon NameLexicon::from_catalog(const EntityCatalog& catalog) {
    NameLexicon lex;
    std::unordered_set<std::string> first_seen;
    std::unordered_set<std::string> last_seen;
    for (std::size_t i : catalog.entries_of(EntityType::person)) {
        const auto& surface = catalog.entries()[i].surface;
        const auto tokens = tokenize(surface);
        if (tokens.size() < 2) {
            continue;
        }
        const auto& first = tokens.front();
        const auto& last = tokens.back();
        if (first_seen.insert(first.text).second) {
            lex.first_names.push_back(surface.substr(first.begin, first.end - first.begin));
        }
        if (last_seen.insert(last.text).second) {
            lex.last_names.push_back(surface.substr(last.begin, last.end - last.begin));
        }
    }
    return lex;
}

} // namespace fqbank
