#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace fqbank {

class VectorLoadError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Static word vectors keyed by folded token.
class VectorStore {
public:
    explicit VectorStore(std::size_t dimension = 300) : dimension_(dimension) {}

    /// Text format, one "token v1 ... vD" per line. A leading "count dim"
    /// header line is skipped. Lines of the wrong arity are rejected with a
    /// warning; duplicate tokens keep the first vector. Throws when the file
    /// has content but no line of the expected dimension.
    static VectorStore parse(std::istream& in, std::size_t dimension = 300,
                             std::vector<std::string>* warnings = nullptr);
    static VectorStore load(const std::filesystem::path& path, std::size_t dimension = 300,
                            std::vector<std::string>* warnings = nullptr);

    /// False if the token is already present.
    bool add(std::string_view token, std::span<const float> values);

    /// Empty span for out-of-vocabulary tokens.
    std::span<const float> find(std::string_view folded_token) const;

    std::size_t dimension() const { return dimension_; }
    std::size_t size() const { return rows_.size(); }

private:
    std::size_t dimension_;
    std::unordered_map<std::string, std::size_t> rows_;
    std::vector<float> data_;
};

struct PooledEmbedding {
    std::vector<double> vector;
    std::size_t token_count = 0;
    std::size_t oov_count = 0;
};

/// Mean over all tokens; OOV tokens contribute zero vectors and still count
/// in the denominator. Empty text gives the zero vector.
PooledEmbedding embed_mean(std::string_view text, const VectorStore& store);

/// Cosine similarity clamped to [-1, 1]; 0 when either vector has zero norm.
/// Throws std::invalid_argument on a dimension mismatch.
double cosine(std::span<const double> u, std::span<const double> v);

struct VocabularyCoverage {
    std::size_t tokens = 0;
    std::size_t in_vocabulary = 0;
    double fraction() const {
        return tokens == 0 ? 0.0 : static_cast<double>(in_vocabulary) / static_cast<double>(tokens);
    }
};

VocabularyCoverage vocabulary_coverage(const std::vector<std::string>& texts, const VectorStore& store);

/// Precomputed sentence vectors, looked up by whitespace-normalized text.
class SentenceVectors {
public:
    /// Line records {"text": ..., "values": [...]}. All vectors must share
    /// one dimension; any inconsistency is a VectorLoadError.
    static SentenceVectors parse(std::istream& in);
    static SentenceVectors load(const std::filesystem::path& path);

    void add(std::string_view text, std::vector<double> values);

    /// Missing text is the scorer-skip signal.
    std::optional<std::span<const double>> lookup(std::string_view text) const;

    std::size_t dimension() const { return dimension_; }
    std::size_t size() const { return table_.size(); }

private:
    std::size_t dimension_ = 0;
    std::unordered_map<std::string, std::vector<double>> table_;
};

} // namespace fqbank
