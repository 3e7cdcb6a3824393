#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <regex>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace fqbank {

/// Source of "same meaning, different wording" questions.
class ParaphraseProvider {
public:
    virtual ~ParaphraseProvider() = default;
    virtual std::string_view name() const = 0;
    virtual std::optional<std::string> paraphrase(std::string_view question) const = 0;
};

/// Externally generated paraphrases, keyed by folded question text. The first
/// record for a question wins.
class FileParaphraseProvider : public ParaphraseProvider {
public:
    /// Line records {"question": ..., "paraphrase": ...}.
    static FileParaphraseProvider parse(std::istream& in);
    static FileParaphraseProvider load(const std::filesystem::path& path);

    void add(std::string_view question, std::string_view paraphrase);

    std::string_view name() const override { return "file_import"; }
    std::optional<std::string> paraphrase(std::string_view question) const override;
    std::size_t size() const { return table_.size(); }

private:
    std::unordered_map<std::string, std::string> table_;
};

/// Deterministic surface templates. The first matching rule wins.
class RuleParaphraseProvider : public ParaphraseProvider {
public:
    RuleParaphraseProvider();

    std::string_view name() const override { return "rule_based"; }
    std::optional<std::string> paraphrase(std::string_view question) const override;
    std::size_t rule_count() const { return rules_.size(); }

private:
    struct Rule {
        std::regex pattern;
        std::string format; // std::regex format string over the captures
    };
    std::vector<Rule> rules_;
};

/// Tries each provider in order.
class ChainedParaphraseProvider : public ParaphraseProvider {
public:
    explicit ChainedParaphraseProvider(std::vector<const ParaphraseProvider*> providers)
        : providers_(std::move(providers)) {}

    std::string_view name() const override { return "chained"; }
    std::optional<std::string> paraphrase(std::string_view question) const override;

private:
    std::vector<const ParaphraseProvider*> providers_;
};

} // namespace fqbank
