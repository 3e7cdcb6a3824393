#include "fqbank/paraphrase.hpp"

#include <cctype>
#include <fstream>
#include <istream>
#include <stdexcept>

#include <json.hpp>

#include "fqbank/corpus.hpp"
#include "fqbank/text.hpp"

namespace fqbank {
namespace {

struct RuleSpec {
    const char* pattern;
    const char* format;
};

// wh-movement, age, birth year/place, schooling, possessive and auxiliary rewrites.
constexpr RuleSpec kRules[] = {
    {R"(^when was (.+) born$)", "what year was $1 born"},
    {R"(^what year was (.+) born$)", "when was $1 born"},
    {R"(^how old is (.+)$)", "what is the age of $1"},
    {R"(^what is the age of (.+)$)", "how old is $1"},
    {R"(^where was (.+) born$)", "what is the birthplace of $1"},
    {R"(^what is the birthplace of (.+)$)", "where was $1 born"},
    {R"(^where did (.+) go to school$)", "which school did $1 attend"},
    {R"(^which school did (.+) attend$)", "where did $1 go to school"},
    {R"(^what did (.+) do (in|during|after|before) (.+)$)", "$2 $3, what did $1 do"},
    {R"(^did (.+) have any (.+)$)", "were there any $2 for $1"},
    {R"(^does (.+) have any (.+)$)", "are there any $2 for $1"},
    {R"(^what (is|was|are|were) (.+?)(?:'s|’s) (.+)$)", "what $1 the $3 of $2"},
    {R"(^what (is|was|are|were) the (.+?) of (.+)$)", "what $1 $3's $2"},
};

std::string strip_terminal_punctuation(std::string_view question) {
    std::string body = normalize_whitespace(question);
    while (!body.empty() && (body.back() == '?' || body.back() == '.' || body.back() == '!' ||
                             body.back() == ' ')) {
        body.pop_back();
    }
    return body;
}

} // namespace

FileParaphraseProvider FileParaphraseProvider::parse(std::istream& in) {
    FileParaphraseProvider provider;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r\n") == std::string::npos) {
            continue;
        }
        try {
            const auto j = nlohmann::json::parse(line);
            provider.add(j.at("question").get<std::string>(), j.at("paraphrase").get<std::string>());
        } catch (const nlohmann::json::exception& e) {
            throw FormatError("paraphrase line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return provider;
}

FileParaphraseProvider FileParaphraseProvider::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open paraphrase file: " + path.string());
    }
    return parse(in);
}

void FileParaphraseProvider::add(std::string_view question, std::string_view paraphrase) {
    auto text = normalize_whitespace(paraphrase);
    if (text.empty()) {
        return;
    }
    table_.emplace(fold_key(question), std::move(text));
}

std::optional<std::string> FileParaphraseProvider::paraphrase(std::string_view question) const {
    auto it = table_.find(fold_key(question));
    if (it == table_.end()) {
        return std::nullopt;
    }
    return it->second;
}

RuleParaphraseProvider::RuleParaphraseProvider() {
    for (const auto& spec : kRules) {
        rules_.push_back({std::regex(spec.pattern, std::regex::ECMAScript | std::regex::icase),
                          spec.format});
    }
}

std::optional<std::string> RuleParaphraseProvider::paraphrase(std::string_view question) const {
    const auto body = strip_terminal_punctuation(question);
    if (body.empty()) {
        return std::nullopt;
    }
    std::smatch m;
    for (const auto& rule : rules_) {
        if (std::regex_match(body, m, rule.pattern)) {
            std::string out = m.format(rule.format);
            out[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(out[0])));
            out.push_back('?');
            return out;
        }
    }
    return std::nullopt;
}

std::optional<std::string> ChainedParaphraseProvider::paraphrase(std::string_view question) const {
    for (const auto* p : providers_) {
        if (auto out = p->paraphrase(question)) {
            return out;
        }
    }
    return std::nullopt;
}

} // namespace fqbank
