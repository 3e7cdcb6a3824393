#include "fqbank/exchange.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

#include <json.hpp>

#include "fqbank/text.hpp"

namespace fqbank {

std::string joined_text(const DialogContext& context, std::string_view candidate,
                        std::size_t max_answer_tokens) {
    std::string out;
    auto turn = [&](const std::string& q, const std::string& a) {
        out += normalize_whitespace(q);
        const auto answer = truncate_tokens(a, max_answer_tokens);
        if (!answer.empty()) {
            out += ' ';
            out += answer;
        }
        out += ' ';
        out += kSeparator;
        out += ' ';
    };
    for (const auto& qa : context.history) {
        turn(qa.question, qa.answer);
    }
    turn(context.current_question, context.current_answer);
    out += normalize_whitespace(candidate);
    return out;
}

void write_exchange(std::ostream& out, const std::vector<Sample>& samples, bool blind,
                    std::size_t max_answer_tokens) {
    for (const auto& s : samples) {
        for (const auto& c : s.candidates) {
            nlohmann::ordered_json j;
            j["sample_id"] = s.sample_id;
            j["candidate_id"] = c.candidate_id;
            j["joined_text"] = joined_text(s.context, c.text, max_answer_tokens);
            if (!blind) {
                j["label"] = c.label == Label::valid ? 1 : 0;
            }
            out << j.dump() << '\n';
        }
    }
}

std::vector<ExchangeRecord> read_exchange(std::istream& in) {
    std::vector<ExchangeRecord> records;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r\n") == std::string::npos) {
            continue;
        }
        try {
            const auto j = nlohmann::json::parse(line);
            ExchangeRecord r;
            r.sample_id = j.at("sample_id").get<std::string>();
            r.candidate_id = j.at("candidate_id").get<std::string>();
            r.joined_text = j.at("joined_text").get<std::string>();
            if (j.contains("label")) {
                r.label = j.at("label").get<int>();
            }
            records.push_back(std::move(r));
        } catch (const nlohmann::json::exception& e) {
            throw FormatError("exchange line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return records;
}

void write_scores(std::ostream& out, const std::vector<ScoreRecord>& records) {
    for (const auto& r : records) {
        nlohmann::ordered_json j;
        j["sample_id"] = r.sample_id;
        j["candidate_id"] = r.candidate_id;
        j["score"] = r.score;
        out << j.dump() << '\n';
    }
}

ScoreTable ScoreTable::parse(std::istream& in) {
    ScoreTable table;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r\n") == std::string::npos) {
            continue;
        }
        try {
            const auto j = nlohmann::json::parse(line);
            const auto& score = j.at("score");
            if (!score.is_number()) {
                throw ScoreFileError("score is not a number");
            }
            table.add(j.at("sample_id").get<std::string>(), j.at("candidate_id").get<std::string>(),
                      score.get<double>());
        } catch (const nlohmann::json::exception& e) {
            throw ScoreFileError("score line " + std::to_string(line_no) + ": " + e.what());
        } catch (const ScoreFileError& e) {
            throw ScoreFileError("score line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return table;
}

ScoreTable ScoreTable::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ScoreFileError("cannot open score file: " + path);
    }
    return parse(in);
}

void ScoreTable::add(std::string sample_id, std::string candidate_id, double score) {
    if (!std::isfinite(score) || score < 0.0 || score > 1.0) {
        throw ScoreFileError("score " + std::to_string(score) + " for " + sample_id + "/" + candidate_id +
                             " outside [0, 1]");
    }
    auto key = std::make_pair(std::move(sample_id), std::move(candidate_id));
    if (scores_.contains(key)) {
        throw ScoreFileError("duplicate score for " + key.first + "/" + key.second);
    }
    scores_.emplace(std::move(key), score);
}

std::optional<double> ScoreTable::find(std::string_view sample_id, std::string_view candidate_id) const {
    auto it = scores_.find(std::make_pair(std::string(sample_id), std::string(candidate_id)));
    if (it == scores_.end()) {
        return std::nullopt;
    }
    return it->second;
}

std::vector<std::string> ScoreTable::missing_pairs(const std::vector<Sample>& samples) const {
    std::vector<std::string> missing;
    for (const auto& s : samples) {
        for (const auto& c : s.candidates) {
            if (!find(s.sample_id, c.candidate_id)) {
                missing.push_back(s.sample_id + "/" + c.candidate_id);
            }
        }
    }
    return missing;
}

} // namespace fqbank
