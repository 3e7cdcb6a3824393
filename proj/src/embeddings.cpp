#include "fqbank/embeddings.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>

#include <json.hpp>

#include "fqbank/text.hpp"

namespace fqbank {
namespace {

std::vector<std::string_view> split_spaces(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) {
            ++i;
        }
        const std::size_t start = i;
        while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') {
            ++i;
        }
        if (i > start) {
            fields.push_back(line.substr(start, i - start));
        }
    }
    return fields;
}

bool parse_float(std::string_view s, float& out) {
    const auto* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), end, out);
    return ec == std::errc() && ptr == end;
}

bool all_digits(std::string_view s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

} // namespace

VectorStore VectorStore::parse(std::istream& in, std::size_t dimension,
                               std::vector<std::string>* warnings) {
    if (dimension == 0) {
        throw std::invalid_argument("vector dimension must be positive");
    }
    VectorStore store(dimension);
    std::string line;
    std::size_t line_no = 0;
    std::size_t rejected = 0;
    std::vector<float> values(dimension);
    while (std::getline(in, line)) {
        ++line_no;
        const auto fields = split_spaces(line);
        if (fields.empty()) {
            continue;
        }
        if (line_no == 1 && fields.size() == 2 && all_digits(fields[0]) && all_digits(fields[1])) {
            continue; // word2vec-style "count dim" header
        }
        if (fields.size() != dimension + 1) {
            ++rejected;
            if (warnings) {
                warnings->push_back("vectors line " + std::to_string(line_no) + ": expected " +
                                    std::to_string(dimension) + " values, got " +
                                    std::to_string(fields.size() - 1));
            }
            continue;
        }
        bool ok = true;
        for (std::size_t k = 0; k < dimension && ok; ++k) {
            ok = parse_float(fields[k + 1], values[k]);
        }
        if (!ok) {
            ++rejected;
            if (warnings) {
                warnings->push_back("vectors line " + std::to_string(line_no) + ": non-numeric value");
            }
            continue;
        }
        store.add(fields[0], values);
    }
    if (store.size() == 0 && rejected > 0) {
        throw VectorLoadError("no vectors of dimension " + std::to_string(dimension) + " (" +
                              std::to_string(rejected) + " lines rejected)");
    }
    return store;
}

VectorStore VectorStore::load(const std::filesystem::path& path, std::size_t dimension,
                              std::vector<std::string>* warnings) {
    std::ifstream in(path);
    if (!in) {
        throw VectorLoadError("cannot open vectors: " + path.string());
    }
    return parse(in, dimension, warnings);
}

bool VectorStore::add(std::string_view token, std::span<const float> values) {
    if (values.size() != dimension_) {
        throw std::invalid_argument("vector dimension mismatch");
    }
    auto [it, inserted] = rows_.emplace(case_fold(token), rows_.size());
    if (!inserted) {
        return false;
    }
    data_.insert(data_.end(), values.begin(), values.end());
    return true;
}

std::span<const float> VectorStore::find(std::string_view folded_token) const {
    auto it = rows_.find(std::string(folded_token));
    if (it == rows_.end()) {
        return {};
    }
    return std::span<const float>(data_.data() + it->second * dimension_, dimension_);
}

PooledEmbedding embed_mean(std::string_view text, const VectorStore& store) {
    PooledEmbedding out;
    out.vector.assign(store.dimension(), 0.0);
    for (const auto& token : tokenize_words(text)) {
        ++out.token_count;
        const auto v = store.find(token);
        if (v.empty()) {
            ++out.oov_count;
            continue;
        }
        for (std::size_t k = 0; k < v.size(); ++k) {
            out.vector[k] += static_cast<double>(v[k]);
        }
    }
    if (out.token_count > 0) {
        const double n = static_cast<double>(out.token_count);
        for (auto& x : out.vector) {
            x /= n;
        }
    }
    return out;
}

double cosine(std::span<const double> u, std::span<const double> v) {
    if (u.size() != v.size()) {
        throw std::invalid_argument("cosine: dimension mismatch (" + std::to_string(u.size()) + " vs " +
                                    std::to_string(v.size()) + ")");
    }
    double dot = 0.0;
    double nu = 0.0;
    double nv = 0.0;
    for (std::size_t k = 0; k < u.size(); ++k) {
        dot += u[k] * v[k];
        nu += u[k] * u[k];
        nv += v[k] * v[k];
    }
    if (nu == 0.0 || nv == 0.0) {
        return 0.0;
    }
    return std::clamp(dot / (std::sqrt(nu) * std::sqrt(nv)), -1.0, 1.0);
}

VocabularyCoverage vocabulary_coverage(const std::vector<std::string>& texts, const VectorStore& store) {
    VocabularyCoverage cov;
    for (const auto& text : texts) {
        for (const auto& token : tokenize_words(text)) {
            ++cov.tokens;
            if (!store.find(token).empty()) {
                ++cov.in_vocabulary;
            }
        }
    }
    return cov;
}

SentenceVectors SentenceVectors::parse(std::istream& in) {
    SentenceVectors out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r\n") == std::string::npos) {
            continue;
        }
        try {
            const auto j = nlohmann::json::parse(line);
            auto values = j.at("values").get<std::vector<double>>();
            if (values.empty()) {
                throw VectorLoadError("empty vector");
            }
            out.add(j.at("text").get<std::string>(), std::move(values));
        } catch (const nlohmann::json::exception& e) {
            throw VectorLoadError("sentence vectors line " + std::to_string(line_no) + ": " + e.what());
        } catch (const std::exception& e) {
            throw VectorLoadError("sentence vectors line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return out;
}

SentenceVectors SentenceVectors::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw VectorLoadError("cannot open sentence vectors: " + path.string());
    }
    return parse(in);
}

void SentenceVectors::add(std::string_view text, std::vector<double> values) {
    if (dimension_ == 0) {
        dimension_ = values.size();
    } else if (values.size() != dimension_) {
        throw VectorLoadError("dimension " + std::to_string(values.size()) + " differs from " +
                              std::to_string(dimension_));
    }
    table_.emplace(normalize_whitespace(text), std::move(values));
}

std::optional<std::span<const double>> SentenceVectors::lookup(std::string_view text) const {
    auto it = table_.find(normalize_whitespace(text));
    if (it == table_.end()) {
        return std::nullopt;
    }
    return std::span<const double>(it->second);
}

} // namespace fqbank
