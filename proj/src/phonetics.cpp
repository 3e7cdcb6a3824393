#include "fqbank/phonetics.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <istream>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

#include <httplib.h>
#include <json.hpp>

#include "fqbank/text.hpp"

namespace fqbank {
namespace {

// Base letter for folded Latin-1 letters U+00DF..U+00FF; 0 drops the code point.
constexpr char kLatin1Base[] = "saaaaaaaceeeeiiiidnooooo\0ouuuuyty";

std::string letters_only(std::string_view token) {
    std::string out;
    for (char32_t cp : decode_utf8(case_fold(token))) {
        if (cp >= 'a' && cp <= 'z') {
            out.push_back(static_cast<char>(cp));
        } else if (cp >= 0xDF && cp <= 0xFF) {
            const char base = kLatin1Base[cp - 0xDF];
            if (base != '\0') {
                out.push_back(base);
            }
        }
    }
    return out;
}

bool is_vowel(char c) {
    return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u';
}

std::string safe_file_name(std::string_view token) {
    static constexpr char kHex[] = "0123456789ABCDEF";
    std::string out;
    for (unsigned char c : token) {
        if ((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '-') {
            out.push_back(static_cast<char>(c));
        } else {
            out.push_back('%');
            out.push_back(kHex[c >> 4]);
            out.push_back(kHex[c & 0xF]);
        }
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

std::string phonetic_key(std::string_view token) {
    std::string s = letters_only(token);
    if (s.empty()) {
        return {};
    }

    // 1. leading letter
    if (s.size() >= 2 && s[0] == 'p' && s[1] == 'h') {
        s.replace(0, 2, "f");
    } else if (s[0] == 'c') {
        const char next = s.size() > 1 ? s[1] : '\0';
        s[0] = (next == 'e' || next == 'i' || next == 'y') ? 's' : 'k';
    } else if (s[0] == 'q') {
        s[0] = 'k';
    } else if (s[0] == 'x') {
        s.replace(0, 1, "ks");
    }

    // 2. w, y, h survive only word-initially
    std::string step;
    step.push_back(s[0]);
    for (std::size_t i = 1; i < s.size(); ++i) {
        if (s[i] != 'w' && s[i] != 'y' && s[i] != 'h') {
            step.push_back(s[i]);
        }
    }

    // 3. doubled letters
    std::string collapsed;
    for (char c : step) {
        if (collapsed.empty() || collapsed.back() != c) {
            collapsed.push_back(c);
        }
    }

    // 4 + 5
    std::string key;
    key.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(collapsed[0]))));
    for (std::size_t i = 1; i < collapsed.size(); ++i) {
        if (!is_vowel(collapsed[i])) {
            key.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(collapsed[i]))));
        }
    }
    return key;
}

std::size_t edit_distance(std::string_view a, std::string_view b) {
    const auto x = decode_utf8(a);
    const auto y = decode_utf8(b);
    std::vector<std::size_t> row(y.size() + 1);
    for (std::size_t j = 0; j <= y.size(); ++j) {
        row[j] = j;
    }
    for (std::size_t i = 1; i <= x.size(); ++i) {
        std::size_t diag = row[0];
        row[0] = i;
        for (std::size_t j = 1; j <= y.size(); ++j) {
            const std::size_t up = row[j];
            row[j] = std::min({row[j] + 1, row[j - 1] + 1, diag + (x[i - 1] == y[j - 1] ? 0 : 1)});
            diag = up;
        }
    }
    return row[y.size()];
}

void PhoneticLexicon::add(std::string_view token) {
    const auto words = tokenize_words(token);
    if (words.size() != 1) {
        return;
    }
    const auto key = phonetic_key(words[0]);
    if (key.empty()) {
        return;
    }
    auto& bucket = index_[key];
    auto pos = std::lower_bound(bucket.begin(), bucket.end(), words[0]);
    if (pos != bucket.end() && *pos == words[0]) {
        return;
    }
    bucket.insert(pos, words[0]);
    ++size_;
}

PhoneticLexicon PhoneticLexicon::parse(std::istream& in) {
    PhoneticLexicon lex;
    std::string line;
    while (std::getline(in, line)) {
        lex.add(trim(line));
    }
    return lex;
}

PhoneticLexicon PhoneticLexicon::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open phonetic lexicon: " + path.string());
    }
    return parse(in);
}

const std::vector<std::string>* PhoneticLexicon::tokens_for_key(const std::string& key) const {
    auto it = index_.find(key);
    return it == index_.end() ? nullptr : &it->second;
}

bool PhoneticLexicon::contains(std::string_view token) const {
    const auto folded = case_fold(token);
    const auto* bucket = tokens_for_key(phonetic_key(folded));
    return bucket && std::binary_search(bucket->begin(), bucket->end(), folded);
}

std::vector<std::string> filter_homophones(std::string_view original,
                                           const std::vector<std::string>& candidates,
                                           std::size_t max_edit) {
    const auto source = case_fold(original);
    const auto key = phonetic_key(source);
    std::vector<std::string> out;
    if (key.empty()) {
        return out;
    }
    std::unordered_set<std::string> seen;
    for (const auto& raw : candidates) {
        const auto folded = case_fold(trim(raw));
        const auto tokens = tokenize(folded);
        if (tokens.size() != 1 || tokens[0].text != folded) {
            continue;
        }
        if (folded == source || phonetic_key(folded) != key) {
            continue;
        }
        if (edit_distance(folded, source) > max_edit) {
            continue;
        }
        if (seen.insert(folded).second) {
            out.push_back(folded);
        }
    }
    return out;
}

std::vector<std::string> homophones_local(std::string_view token, const PhoneticLexicon& lexicon,
                                          std::size_t max_edit) {
    const auto source = case_fold(token);
    const auto* bucket = lexicon.tokens_for_key(phonetic_key(source));
    if (!bucket) {
        return {};
    }
    auto out = filter_homophones(source, *bucket, max_edit);
    std::vector<std::pair<std::size_t, std::string>> ranked;
    ranked.reserve(out.size());
    for (auto& w : out) {
        ranked.emplace_back(edit_distance(w, source), std::move(w));
    }
    std::sort(ranked.begin(), ranked.end());
    out.clear();
    for (auto& r : ranked) {
        out.push_back(std::move(r.second));
    }
    return out;
}

RemoteHomophoneClient::RemoteHomophoneClient(std::string base_url, std::filesystem::path cache_dir,
                                             std::chrono::milliseconds timeout)
    : cache_dir_(std::move(cache_dir)), timeout_(timeout) {
    const auto scheme_end = base_url.find("://");
    const auto host_start = scheme_end == std::string::npos ? 0 : scheme_end + 3;
    const auto path_start = base_url.find('/', host_start);
    if (path_start == std::string::npos) {
        scheme_host_ = base_url;
        path_ = "/";
    } else {
        scheme_host_ = base_url.substr(0, path_start);
        path_ = base_url.substr(path_start);
    }
    if (scheme_host_.empty() || host_start >= scheme_host_.size()) {
        throw std::invalid_argument("invalid homophone service URL: " + base_url);
    }
}

std::filesystem::path RemoteHomophoneClient::cache_path(std::string_view token) const {
    return cache_dir_ / (safe_file_name(case_fold(token)) + ".json");
}

std::size_t RemoteHomophoneClient::network_calls() const {
    std::lock_guard lock(cache_mutex_);
    return network_calls_;
}

std::optional<std::vector<std::string>> RemoteHomophoneClient::parse_response(
    std::string_view body) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(body);
    } catch (const nlohmann::json::parse_error&) {
        return std::nullopt;
    }
    if (!j.is_array()) {
        return std::nullopt;
    }
    std::vector<std::string> words;
    for (const auto& item : j) {
        if (!item.is_object()) {
            return std::nullopt;
        }
        auto it = item.find("word");
        if (it == item.end() || !it->is_string()) {
            return std::nullopt;
        }
        words.push_back(it->get<std::string>());
    }
    return words;
}

RemoteLookup RemoteHomophoneClient::lookup(std::string_view token) const {
    RemoteLookup result;
    const auto folded = case_fold(token);
    const auto path = cache_path(folded);

    std::error_code ec;
    if (std::filesystem::exists(path, ec)) {
        std::ifstream in(path, std::ios::binary);
        std::stringstream body;
        body << in.rdbuf();
        auto words = parse_response(body.str());
        if (!words) {
            result.error = "malformed cached response in " + path.string();
            return result;
        }
        result.ok = true;
        result.from_cache = true;
        result.words = std::move(*words);
        return result;
    }

    httplib::Client client(scheme_host_);
    const auto secs = timeout_.count() / 1000;
    const auto usecs = (timeout_.count() % 1000) * 1000;
    client.set_connection_timeout(secs, usecs);
    client.set_read_timeout(secs, usecs);
    {
        std::lock_guard lock(cache_mutex_);
        ++network_calls_;
    }
    httplib::Params params{{"sl", folded}};
    auto res = client.Get(path_, params, httplib::Headers{});
    if (!res) {
        result.error = "request failed: " + httplib::to_string(res.error());
        return result;
    }
    if (res->status != 200) {
        result.error = "HTTP status " + std::to_string(res->status);
        return result;
    }
    auto words = parse_response(res->body);
    if (!words) {
        result.error = "malformed response";
        return result;
    }

    {
        std::lock_guard lock(cache_mutex_);
        std::filesystem::create_directories(cache_dir_, ec);
        const auto tmp = path.string() + ".tmp";
        {
            std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
            out << res->body;
        }
        std::filesystem::rename(tmp, path, ec);
    }
    result.ok = true;
    result.words = std::move(*words);
    return result;
}

std::vector<std::string> HomophoneSource::homophones(std::string_view token,
                                                     std::vector<std::string>* warnings) const {
    if (remote_) {
        auto r = remote_->lookup(token);
        if (r.ok) {
            return filter_homophones(token, r.words, max_edit_);
        }
        if (warnings) {
            warnings->push_back("remote homophone lookup for '" + case_fold(token) +
                                "' failed (" + r.error + "), using local lexicon");
        }
    }
    if (lexicon_) {
        return homophones_local(token, *lexicon_, max_edit_);
    }
    return {};
}

} // namespace fqbank
