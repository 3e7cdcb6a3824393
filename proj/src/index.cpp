#include "fqbank/index.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <unordered_map>

#include <json.hpp>

#include "fqbank/corpus.hpp"
#include "fqbank/text.hpp"

namespace fqbank {
namespace {

constexpr std::string_view kFormatTag = "fqbank-index\t1";

using nlohmann::json;

} // namespace

QuestionBank QuestionBank::parse(std::istream& in) {
    QuestionBank bank;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r\n") == std::string::npos) {
            continue;
        }
        try {
            const auto j = json::parse(line);
            BankDocument doc;
            doc.doc_id = j.at("doc_id").get<std::string>();
            doc.text = j.at("text").get<std::string>();
            doc.conversation_id = j.value("conversation_id", std::string());
            bank.documents.push_back(std::move(doc));
        } catch (const json::exception& e) {
            throw FormatError("question bank line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return bank;
}

QuestionBank QuestionBank::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open question bank: " + path.string());
    }
    return parse(in);
}

QuestionBank QuestionBank::from_conversations(const std::vector<Conversation>& conversations) {
    QuestionBank bank;
    for (const auto& conv : conversations) {
        for (std::size_t t = 0; t < conv.turns.size(); ++t) {
            bank.documents.push_back({make_sample_id(conv.conversation_id, t + 1),
                                      conv.turns[t].question_rewritten, conv.conversation_id});
        }
    }
    return bank;
}

void QuestionBank::write(std::ostream& out) const {
    for (const auto& d : documents) {
        nlohmann::ordered_json j;
        j["doc_id"] = d.doc_id;
        j["text"] = d.text;
        j["conversation_id"] = d.conversation_id;
        out << j.dump() << '\n';
    }
}

InvertedIndex InvertedIndex::build(const QuestionBank& bank, Bm25Params params) {
    InvertedIndex index;
    index.params_ = params;
    index.docs_ = bank.documents;
    std::stable_sort(index.docs_.begin(), index.docs_.end(),
                     [](const BankDocument& a, const BankDocument& b) { return a.doc_id < b.doc_id; });
    for (std::size_t i = 1; i < index.docs_.size(); ++i) {
        if (index.docs_[i].doc_id == index.docs_[i - 1].doc_id) {
            throw IndexError("duplicate doc_id '" + index.docs_[i].doc_id + "'");
        }
    }
    index.doc_lengths_.reserve(index.docs_.size());
    double total = 0.0;
    for (std::size_t d = 0; d < index.docs_.size(); ++d) {
        const auto words = tokenize_words(index.docs_[d].text);
        std::map<std::string, std::uint32_t> tf;
        for (const auto& w : words) {
            ++tf[w];
        }
        for (const auto& [term, count] : tf) {
            index.postings_[term].push_back({static_cast<std::uint32_t>(d), count});
        }
        index.doc_lengths_.push_back(static_cast<std::uint32_t>(words.size()));
        total += static_cast<double>(words.size());
    }
    index.avg_doc_length_ = index.docs_.empty() ? 0.0 : total / static_cast<double>(index.docs_.size());
    return index;
}

std::size_t InvertedIndex::ordinal(std::string_view doc_id) const {
    auto it = std::lower_bound(docs_.begin(), docs_.end(), doc_id,
                               [](const BankDocument& d, std::string_view id) { return d.doc_id < id; });
    if (it == docs_.end() || it->doc_id != doc_id) {
        throw IndexError("unknown doc_id '" + std::string(doc_id) + "'");
    }
    return static_cast<std::size_t>(it - docs_.begin());
}

const std::vector<Posting>* InvertedIndex::postings(const std::string& term) const {
    auto it = postings_.find(term);
    return it == postings_.end() ? nullptr : &it->second;
}

std::size_t InvertedIndex::doc_frequency(const std::string& term) const {
    const auto* p = postings(term);
    return p ? p->size() : 0;
}

double InvertedIndex::idf(const std::string& term) const {
    const double n = static_cast<double>(docs_.size());
    const double df = static_cast<double>(doc_frequency(term));
    return std::log(1.0 + (n - df + 0.5) / (df + 0.5));
}

std::size_t InvertedIndex::doc_length(std::string_view doc_id) const {
    return doc_lengths_[ordinal(doc_id)];
}

double InvertedIndex::term_weight(double idf, std::uint32_t tf, std::uint32_t doc_length) const {
    const double f = static_cast<double>(tf);
    const double norm = avg_doc_length_ > 0.0 ? static_cast<double>(doc_length) / avg_doc_length_ : 0.0;
    return idf * f * (params_.k1 + 1.0) / (f + params_.k1 * (1.0 - params_.b + params_.b * norm));
}

double InvertedIndex::bm25_score(std::string_view query, std::string_view doc_id) const {
    const auto d = static_cast<std::uint32_t>(ordinal(doc_id));
    double score = 0.0;
    for (const auto& term : tokenize_words(query)) {
        const auto* plist = postings(term);
        if (!plist) {
            continue;
        }
        auto it = std::lower_bound(plist->begin(), plist->end(), d,
                                   [](const Posting& p, std::uint32_t doc) { return p.doc < doc; });
        if (it != plist->end() && it->doc == d) {
            score += term_weight(idf(term), it->tf, doc_lengths_[d]);
        }
    }
    return score;
}

std::vector<SearchHit> InvertedIndex::search(std::string_view query, std::size_t k) const {
    if (k == 0) {
        throw std::invalid_argument("search: k must be at least 1");
    }
    std::unordered_map<std::uint32_t, double> acc;
    for (const auto& term : tokenize_words(query)) {
        const auto* plist = postings(term);
        if (!plist) {
            continue;
        }
        const double w = idf(term);
        for (const auto& p : *plist) {
            acc[p.doc] += term_weight(w, p.tf, doc_lengths_[p.doc]);
        }
    }
    std::vector<std::pair<std::uint32_t, double>> scored;
    scored.reserve(acc.size());
    for (const auto& [doc, score] : acc) {
        if (score > 0.0) {
            scored.emplace_back(doc, score);
        }
    }
    // Ordinals follow doc_id order, so the ordinal breaks ties by doc_id.
    std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) {
            return a.second > b.second;
        }
        return a.first < b.first;
    });
    if (scored.size() > k) {
        scored.resize(k);
    }
    std::vector<SearchHit> hits;
    hits.reserve(scored.size());
    for (const auto& [doc, score] : scored) {
        hits.push_back({docs_[doc].doc_id, score});
    }
    return hits;
}

void InvertedIndex::save(std::ostream& out) const {
    out << kFormatTag << '\n';
    nlohmann::ordered_json header;
    header["k1"] = params_.k1;
    header["b"] = params_.b;
    header["docs"] = docs_.size();
    header["terms"] = postings_.size();
    header["avg_doc_length"] = avg_doc_length_;
    out << header.dump() << '\n';
    for (std::size_t d = 0; d < docs_.size(); ++d) {
        out << json::array({docs_[d].doc_id, docs_[d].conversation_id, docs_[d].text, doc_lengths_[d]}).dump()
            << '\n';
    }
    for (const auto& [term, plist] : postings_) {
        json pj = json::array();
        for (const auto& p : plist) {
            pj.push_back(json::array({p.doc, p.tf}));
        }
        out << json::array({term, std::move(pj)}).dump() << '\n';
    }
}

InvertedIndex InvertedIndex::load(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != kFormatTag) {
        throw IndexError("not an index file (expected version tag '" + std::string(kFormatTag) + "')");
    }
    InvertedIndex index;
    try {
        if (!std::getline(in, line)) {
            throw IndexError("truncated index: missing header");
        }
        const auto header = json::parse(line);
        index.params_.k1 = header.at("k1").get<double>();
        index.params_.b = header.at("b").get<double>();
        index.avg_doc_length_ = header.at("avg_doc_length").get<double>();
        const auto n_docs = header.at("docs").get<std::size_t>();
        const auto n_terms = header.at("terms").get<std::size_t>();
        for (std::size_t d = 0; d < n_docs; ++d) {
            if (!std::getline(in, line)) {
                throw IndexError("truncated index: missing documents");
            }
            const auto j = json::parse(line);
            index.docs_.push_back({j.at(0).get<std::string>(), j.at(2).get<std::string>(),
                                   j.at(1).get<std::string>()});
            index.doc_lengths_.push_back(j.at(3).get<std::uint32_t>());
        }
        for (std::size_t t = 0; t < n_terms; ++t) {
            if (!std::getline(in, line)) {
                throw IndexError("truncated index: missing postings");
            }
            const auto j = json::parse(line);
            auto& plist = index.postings_[j.at(0).get<std::string>()];
            for (const auto& p : j.at(1)) {
                plist.push_back({p.at(0).get<std::uint32_t>(), p.at(1).get<std::uint32_t>()});
            }
        }
    } catch (const json::exception& e) {
        throw IndexError(std::string("malformed index: ") + e.what());
    }
    return index;
}

} // namespace fqbank
