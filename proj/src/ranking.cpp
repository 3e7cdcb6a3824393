#include "fqbank/ranking.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>

#include "fqbank/parallel.hpp"

namespace fqbank {

std::vector<std::optional<double>> WordVectorScorer::score(const Sample& sample) const {
    const auto context = embed_mean(context_text(sample.context, max_answer_tokens_), store_);
    std::vector<std::optional<double>> scores;
    scores.reserve(sample.candidates.size());
    for (const auto& c : sample.candidates) {
        scores.emplace_back(cosine(context.vector, embed_mean(c.text, store_).vector));
    }
    return scores;
}

std::vector<std::optional<double>> SentenceVectorScorer::score(const Sample& sample) const {
    std::vector<std::optional<double>> scores(sample.candidates.size());
    const auto context = vectors_.lookup(context_text(sample.context, max_answer_tokens_));
    if (!context) {
        return scores;
    }
    for (std::size_t i = 0; i < sample.candidates.size(); ++i) {
        if (auto v = vectors_.lookup(sample.candidates[i].text)) {
            scores[i] = cosine(*context, *v);
        }
    }
    return scores;
}

std::vector<std::optional<double>> Bm25Scorer::score(const Sample& sample) const {
    QuestionBank bank;
    for (const auto& c : sample.candidates) {
        bank.documents.push_back({c.candidate_id, c.text, sample.sample_id});
    }
    const auto index = InvertedIndex::build(bank, params_);
    std::string query;
    for (const auto& q : sample.context.questions()) {
        query += q;
        query += ' ';
    }
    std::vector<std::optional<double>> scores;
    scores.reserve(sample.candidates.size());
    for (const auto& c : sample.candidates) {
        scores.emplace_back(index.bm25_score(query, c.candidate_id));
    }
    return scores;
}

std::vector<std::optional<double>> ExternalScorer::score(const Sample& sample) const {
    std::vector<std::optional<double>> scores;
    std::vector<std::string> missing;
    for (const auto& c : sample.candidates) {
        scores.push_back(table_.find(sample.sample_id, c.candidate_id));
        if (!scores.back()) {
            missing.push_back(sample.sample_id + "/" + c.candidate_id);
        }
    }
    if (!missing.empty()) {
        std::string names;
        for (const auto& m : missing) {
            names += (names.empty() ? "" : ", ") + m;
        }
        throw ScoreCoverageError("score file has no score for " + names);
    }
    return scores;
}

std::size_t RankedList::unscored() const {
    return static_cast<std::size_t>(
        std::count_if(ranked.begin(), ranked.end(), [](const RankedEntry& e) { return !e.score; }));
}

RankedList rank_scores(const Sample& sample, const std::vector<std::optional<double>>& scores) {
    if (scores.size() != sample.candidates.size()) {
        throw std::invalid_argument("scorer returned " + std::to_string(scores.size()) + " scores for " +
                                    std::to_string(sample.candidates.size()) + " candidates");
    }
    RankedList list;
    list.sample_id = sample.sample_id;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        const auto& c = sample.candidates[i];
        std::optional<double> s = scores[i];
        if (s && std::isnan(*s)) {
            s.reset();
        }
        list.ranked.push_back({c.candidate_id, c.label, s});
    }
    std::sort(list.ranked.begin(), list.ranked.end(), [](const RankedEntry& a, const RankedEntry& b) {
        if (a.score.has_value() != b.score.has_value()) {
            return a.score.has_value();
        }
        if (a.score && *a.score != *b.score) {
            return *a.score > *b.score;
        }
        return a.candidate_id < b.candidate_id;
    });
    for (std::size_t i = 0; i < list.ranked.size(); ++i) {
        if (list.ranked[i].label == Label::valid) {
            list.rank_of_valid = i + 1;
            break;
        }
    }
    return list;
}

RankedList rank(const Sample& sample, const Scorer& scorer) {
    return rank_scores(sample, scorer.score(sample));
}

std::vector<RankedList> rank_all(const std::vector<Sample>& samples, const Scorer& scorer,
                                 std::size_t workers) {
    std::vector<RankedList> out(samples.size());
    parallel_for(samples.size(), workers, [&](std::size_t i) { out[i] = rank(samples[i], scorer); });
    return out;
}

nlohmann::ordered_json ranked_to_json(const RankedList& list) {
    nlohmann::ordered_json j;
    j["sample_id"] = list.sample_id;
    auto& ranked = j["ranked"] = nlohmann::ordered_json::array();
    for (const auto& e : list.ranked) {
        nlohmann::ordered_json entry;
        entry["candidate_id"] = e.candidate_id;
        entry["label"] = std::string(to_string(e.label));
        if (e.score) {
            entry["score"] = *e.score;
        } else {
            entry["score"] = nullptr;
            entry["unscored"] = true;
        }
        ranked.push_back(std::move(entry));
    }
    j["rank_of_valid"] = list.rank_of_valid;
    return j;
}

RankedList ranked_from_json(const nlohmann::json& j) {
    RankedList list;
    list.sample_id = j.at("sample_id").get<std::string>();
    for (const auto& e : j.at("ranked")) {
        RankedEntry entry;
        entry.candidate_id = e.at("candidate_id").get<std::string>();
        const auto label_name = e.at("label").get<std::string>();
        auto label = parse_label(label_name);
        if (!label) {
            throw FormatError("unknown label: " + label_name);
        }
        entry.label = *label;
        if (!e.at("score").is_null()) {
            entry.score = e.at("score").get<double>();
        }
        list.ranked.push_back(std::move(entry));
    }
    for (std::size_t i = 0; i < list.ranked.size(); ++i) {
        if (list.ranked[i].label == Label::valid) {
            list.rank_of_valid = i + 1;
            break;
        }
    }
    if (j.contains("rank_of_valid") && j.at("rank_of_valid").get<std::size_t>() != list.rank_of_valid) {
        throw FormatError("rank_of_valid disagrees with the order for " + list.sample_id);
    }
    return list;
}

void write_ranked(std::ostream& out, const std::vector<RankedList>& lists) {
    for (const auto& list : lists) {
        out << ranked_to_json(list).dump() << '\n';
    }
}

std::vector<RankedList> read_ranked(std::istream& in) {
    std::vector<RankedList> lists;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r\n") == std::string::npos) {
            continue;
        }
        try {
            lists.push_back(ranked_from_json(nlohmann::json::parse(line)));
        } catch (const nlohmann::json::exception& e) {
            throw FormatError("ranked line " + std::to_string(line_no) + ": " + e.what());
        } catch (const FormatError& e) {
            throw FormatError("ranked line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return lists;
}

} // namespace fqbank
