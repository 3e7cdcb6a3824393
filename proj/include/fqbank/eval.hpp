#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fqbank/ranking.hpp"

namespace fqbank {

inline constexpr std::size_t kHistogramBins = 20;

/// Mean reciprocal rank of the valid candidate. Throws std::invalid_argument
/// on an empty input or a list without a valid candidate.
double mrr(const std::vector<RankedList>& lists);

/// Percentage of lists whose valid candidate ranks within the top k (k >= 1).
double hit_ratio(const std::vector<RankedList>& lists, std::size_t k);

struct LabelDistribution {
    std::size_t count = 0;
    double fraction_below = 0.0;
    double fraction_above = 0.0;
    std::array<std::size_t, kHistogramBins> histogram{}; // equal-width bins over [0, 1]
};

/// Per-label score summary over scored candidates, valid included. Labels
/// with no scored candidate are omitted. nullopt when any score lies outside
/// [0, 1], since thresholds are meaningless on an arbitrary scale.
std::optional<std::map<Label, LabelDistribution>> confounder_distribution(
    const std::vector<RankedList>& lists, double theta_low = 0.1, double theta_high = 0.4);

struct EvalReport {
    std::size_t sample_count = 0;
    double mrr = 0.0;
    std::map<std::size_t, double> hit_ratio;
    double theta_low = 0.1;
    double theta_high = 0.4;
    std::optional<std::map<Label, LabelDistribution>> distribution;
    std::size_t unscored_candidates = 0;
};

EvalReport evaluate(const std::vector<RankedList>& lists, const std::vector<std::size_t>& ks = {1, 3},
                    double theta_low = 0.1, double theta_high = 0.4);

/// Line records: one summary line, then one line per label.
void write_report_jsonl(std::ostream& out, const EvalReport& report);
std::string format_report_table(const EvalReport& report);
/// label,bin,lower,upper,count
void write_histogram_csv(std::ostream& out, const EvalReport& report);

} // namespace fqbank
