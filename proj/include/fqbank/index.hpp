#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace fqbank {

struct Conversation;

struct BankDocument {
    std::string doc_id;
    std::string text;
    std::string conversation_id;

    bool operator==(const BankDocument&) const = default;
};

/// Question repository searched by the index.
struct QuestionBank {
    std::vector<BankDocument> documents;

    /// Line records {doc_id, text, conversation_id}.
    static QuestionBank parse(std::istream& in);
    static QuestionBank load(const std::filesystem::path& path);
    /// Every rewritten question, doc_id "<conversation_id>#<turn>".
    static QuestionBank from_conversations(const std::vector<Conversation>& conversations);

    void write(std::ostream& out) const;
};

struct Bm25Params {
    double k1 = 1.2;
    double b = 0.75;

    bool operator==(const Bm25Params&) const = default;
};

struct Posting {
    std::uint32_t doc = 0; // ordinal in doc_id order
    std::uint32_t tf = 0;

    bool operator==(const Posting&) const = default;
};

struct SearchHit {
    std::string doc_id;
    double score = 0.0;
};

class IndexError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Okapi BM25 over a question bank:
///   score(q, d) = sum over query tokens t of
///       idf(t) * tf * (k1 + 1) / (tf + k1 * (1 - b + b * dl / avgdl))
///   idf(t) = ln(1 + (N - df + 0.5) / (df + 0.5))
/// Repeated query tokens contribute once per occurrence.
class InvertedIndex {
public:
    InvertedIndex() = default;

    /// Throws IndexError on a duplicate doc_id.
    static InvertedIndex build(const QuestionBank& bank, Bm25Params params = {});

    double bm25_score(std::string_view query, std::string_view doc_id) const;

    /// Top-k matches by descending score, ties by ascending doc_id.
    /// Zero-score documents are never returned.
    std::vector<SearchHit> search(std::string_view query, std::size_t k = 20) const;

    double idf(const std::string& term) const;
    std::size_t doc_frequency(const std::string& term) const;
    std::size_t doc_count() const { return docs_.size(); }
    double avg_doc_length() const { return avg_doc_length_; }
    std::size_t doc_length(std::string_view doc_id) const;
    const std::vector<Posting>* postings(const std::string& term) const;
    const std::map<std::string, std::vector<Posting>>& terms() const { return postings_; }
    const std::vector<BankDocument>& documents() const { return docs_; }
    const Bm25Params& params() const { return params_; }

    /// Line-based format: a version tag line, then JSON lines for the header,
    /// the documents and the postings.
    void save(std::ostream& out) const;
    static InvertedIndex load(std::istream& in);

    bool operator==(const InvertedIndex&) const = default;

private:
    std::size_t ordinal(std::string_view doc_id) const;
    double term_weight(double idf, std::uint32_t tf, std::uint32_t doc_length) const;

    Bm25Params params_;
    std::vector<BankDocument> docs_; // sorted by doc_id
    std::vector<std::uint32_t> doc_lengths_;
    double avg_doc_length_ = 0.0;
    std::map<std::string, std::vector<Posting>> postings_;
};

} // namespace fqbank
