#include "fqbank/eval.hpp"

#include <algorithm>
#include <cstdio>
#include <ostream>
#include <stdexcept>

#include <json.hpp>

namespace fqbank {
namespace {

void require_valid(const std::vector<RankedList>& lists) {
    if (lists.empty()) {
        throw std::invalid_argument("no ranked lists to evaluate");
    }
    for (const auto& list : lists) {
        if (list.rank_of_valid == 0) {
            throw std::invalid_argument("ranked list " + list.sample_id + " has no valid candidate");
        }
    }
}

std::string fixed(double value, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, value);
    return buf;
}

} // namespace

double mrr(const std::vector<RankedList>& lists) {
    require_valid(lists);
    double sum = 0.0;
    for (const auto& list : lists) {
        sum += 1.0 / static_cast<double>(list.rank_of_valid);
    }
    return sum / static_cast<double>(lists.size());
}

double hit_ratio(const std::vector<RankedList>& lists, std::size_t k) {
    if (k == 0) {
        throw std::invalid_argument("hit ratio needs k >= 1");
    }
    require_valid(lists);
    const auto hits = std::count_if(lists.begin(), lists.end(),
                                    [k](const RankedList& l) { return l.rank_of_valid <= k; });
    return 100.0 * static_cast<double>(hits) / static_cast<double>(lists.size());
}

std::optional<std::map<Label, LabelDistribution>> confounder_distribution(
    const std::vector<RankedList>& lists, double theta_low, double theta_high) {
    std::map<Label, LabelDistribution> out;
    std::map<Label, std::pair<std::size_t, std::size_t>> tails;
    for (const auto& list : lists) {
        for (const auto& e : list.ranked) {
            if (!e.score) {
                continue;
            }
            const double s = *e.score;
            if (!(s >= 0.0 && s <= 1.0)) {
                return std::nullopt;
            }
            auto& d = out[e.label];
            ++d.count;
            const auto bin = std::min(kHistogramBins - 1, static_cast<std::size_t>(s * kHistogramBins));
            ++d.histogram[bin];
            auto& [below, above] = tails[e.label];
            below += s < theta_low ? 1 : 0;
            above += s > theta_high ? 1 : 0;
        }
    }
    for (auto& [label, d] : out) {
        const auto n = static_cast<double>(d.count);
        d.fraction_below = static_cast<double>(tails[label].first) / n;
        d.fraction_above = static_cast<double>(tails[label].second) / n;
    }
    return out;
}

EvalReport evaluate(const std::vector<RankedList>& lists, const std::vector<std::size_t>& ks,
                    double theta_low, double theta_high) {
    EvalReport report;
    report.sample_count = lists.size();
    report.mrr = mrr(lists);
    for (std::size_t k : ks) {
        report.hit_ratio[k] = hit_ratio(lists, k);
    }
    report.theta_low = theta_low;
    report.theta_high = theta_high;
    report.distribution = confounder_distribution(lists, theta_low, theta_high);
    for (const auto& list : lists) {
        report.unscored_candidates += list.unscored();
    }
    return report;
}

void write_report_jsonl(std::ostream& out, const EvalReport& report) {
    nlohmann::ordered_json summary;
    summary["sample_count"] = report.sample_count;
    summary["mrr"] = report.mrr;
    auto& hr = summary["hit_ratio"] = nlohmann::ordered_json::object();
    for (const auto& [k, v] : report.hit_ratio) {
        hr[std::to_string(k)] = v;
    }
    summary["unscored_candidates"] = report.unscored_candidates;
    summary["theta_low"] = report.theta_low;
    summary["theta_high"] = report.theta_high;
    summary["distribution"] = report.distribution.has_value();
    out << summary.dump() << '\n';
    if (!report.distribution) {
        return;
    }
    for (const auto& [label, d] : *report.distribution) {
        nlohmann::ordered_json j;
        j["label"] = std::string(to_string(label));
        j["count"] = d.count;
        j["fraction_below"] = d.fraction_below;
        j["fraction_above"] = d.fraction_above;
        j["histogram"] = d.histogram;
        out << j.dump() << '\n';
    }
}

std::string format_report_table(const EvalReport& report) {
    std::string out;
    out += "samples            " + std::to_string(report.sample_count) + "\n";
    out += "MRR                " + fixed(report.mrr, 4) + "\n";
    for (const auto& [k, v] : report.hit_ratio) {
        std::string name = "HitRatio@" + std::to_string(k);
        name.resize(std::max<std::size_t>(name.size() + 1, 19), ' ');
        out += name + fixed(v, 2) + "\n";
    }
    if (report.unscored_candidates > 0) {
        out += "unscored           " + std::to_string(report.unscored_candidates) + "\n";
    }
    if (!report.distribution) {
        out += "score distribution: scores outside [0, 1], rank metrics only\n";
        return out;
    }
    char line[160];
    std::snprintf(line, sizeof line, "\n%-20s %8s %10s %10s\n", "label", "count",
                  ("<" + fixed(report.theta_low, 2)).c_str(), (">" + fixed(report.theta_high, 2)).c_str());
    out += line;
    for (const auto& [label, d] : *report.distribution) {
        std::snprintf(line, sizeof line, "%-20s %8zu %10s %10s\n", std::string(to_string(label)).c_str(),
                      d.count, fixed(d.fraction_below, 4).c_str(), fixed(d.fraction_above, 4).c_str());
        out += line;
    }
    return out;
}

void write_histogram_csv(std::ostream& out, const EvalReport& report) {
    out << "label,bin,lower,upper,count\n";
    if (!report.distribution) {
        return;
    }
    for (const auto& [label, d] : *report.distribution) {
        for (std::size_t b = 0; b < kHistogramBins; ++b) {
            out << to_string(label) << ',' << b << ','
                << fixed(static_cast<double>(b) / kHistogramBins, 2) << ','
                << fixed(static_cast<double>(b + 1) / kHistogramBins, 2) << ',' << d.histogram[b] << '\n';
        }
    }
}

} // namespace fqbank
