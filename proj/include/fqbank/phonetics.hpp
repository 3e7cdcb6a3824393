#pragma once

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace fqbank {

/// Consonant-class key. Rules, applied in order to the folded letters of the
/// token (accented Latin letters reduced to their base letter):
///   1. leading letter: c -> k before a/o/u/consonant (or at the end),
///      c -> s before e/i/y; q -> k; x -> "ks"; ph -> f
///   2. drop w, y, h unless word-initial
///   3. collapse doubled letters
///   4. drop vowels except a word-initial vowel
///   5. uppercase
/// Tokens without letters map to the empty key.
std::string phonetic_key(std::string_view token);

/// Levenshtein distance over code points.
std::size_t edit_distance(std::string_view a, std::string_view b);

/// Vocabulary grouped by phonetic key.
class PhoneticLexicon {
public:
    void add(std::string_view token);
    static PhoneticLexicon parse(std::istream& in);
    static PhoneticLexicon load(const std::filesystem::path& path);

    /// Tokens sharing `key`, or nullptr.
    const std::vector<std::string>* tokens_for_key(const std::string& key) const;
    bool contains(std::string_view token) const;
    std::size_t size() const { return size_; }
    const std::map<std::string, std::vector<std::string>>& index() const { return index_; }

private:
    std::map<std::string, std::vector<std::string>> index_;
    std::size_t size_ = 0;
};

/// Filter shared by the local and remote paths: a single folded token that
/// differs in spelling from `original`, shares its phonetic key and lies
/// within `max_edit` character edits. Output keeps input order, deduplicated.
std::vector<std::string> filter_homophones(std::string_view original,
                                           const std::vector<std::string>& candidates,
                                           std::size_t max_edit = 2);

/// Key-mates of `token` passing the shared filter, sorted by
/// (edit distance, spelling).
std::vector<std::string> homophones_local(std::string_view token, const PhoneticLexicon& lexicon,
                                          std::size_t max_edit = 2);

struct RemoteLookup {
    bool ok = false;
    bool from_cache = false;
    std::vector<std::string> words; // raw service words, service order
    std::string error;
};

/// Sounds-like web client (`GET <base>?sl=<token>`, JSON array of
/// {"word", "score"}). Raw bodies are cached one file per token with no
/// expiry; cache writes are serialized.
class RemoteHomophoneClient {
public:
    RemoteHomophoneClient(std::string base_url, std::filesystem::path cache_dir,
                          std::chrono::milliseconds timeout = std::chrono::milliseconds(5000));

    RemoteLookup lookup(std::string_view token) const;

    std::filesystem::path cache_path(std::string_view token) const;
    std::size_t network_calls() const;

    /// Parses a response body; nullopt on malformed input.
    static std::optional<std::vector<std::string>> parse_response(std::string_view body);

private:
    std::string scheme_host_;
    std::string path_;
    std::filesystem::path cache_dir_;
    std::chrono::milliseconds timeout_;
    mutable std::mutex cache_mutex_;
    mutable std::size_t network_calls_ = 0;
};

/// What the ASR generator consumes.
class HomophoneProvider {
public:
    virtual ~HomophoneProvider() = default;
    virtual std::vector<std::string> homophones(std::string_view token,
                                                std::vector<std::string>* warnings) const = 0;
};

/// Remote lookups when a client is configured, falling back to the local
/// lexicon on any remote failure. Both paths go through filter_homophones.
class HomophoneSource : public HomophoneProvider {
public:
    HomophoneSource(const PhoneticLexicon* lexicon, const RemoteHomophoneClient* remote = nullptr,
                    std::size_t max_edit = 2)
        : lexicon_(lexicon), remote_(remote), max_edit_(max_edit) {}

    std::vector<std::string> homophones(std::string_view token,
                                        std::vector<std::string>* warnings) const override;

private:
    const PhoneticLexicon* lexicon_;
    const RemoteHomophoneClient* remote_;
    std::size_t max_edit_;
};

} // namespace fqbank
