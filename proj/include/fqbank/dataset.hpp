#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "fqbank/confounders.hpp"
#include "fqbank/corpus.hpp"

namespace fqbank {

struct DatasetResult {
    std::vector<AssembledSample> samples; // conversation order, then turn order
    std::vector<std::string> warnings;
};

/// Skeletons and confounders for every conversation. Conversations are
/// spread over `workers` threads; the result does not depend on the count.
DatasetResult build_dataset(const std::vector<Conversation>& conversations,
                            const GenerationResources& resources, const GeneratorConfig& config,
                            std::size_t workers = 1);

/// Corpus accounting. A "dialog" is one sample: its context turns are the
/// utterance/response pairs, and confounder counts are averaged per sample.
struct DatasetStats {
    std::size_t dialogs = 0;
    std::size_t turns = 0;
    std::size_t utterance_tokens = 0;
    std::size_t response_tokens = 0;
    std::array<std::size_t, kLabelCount> label_counts{};

    std::size_t confounders() const;
    double per_dialog(std::size_t count) const;
    double tokens_per_utterance() const;
    double tokens_per_response() const;
};

DatasetStats compute_stats(const std::vector<Sample>& samples);

/// Two-column table, one row per quantity with a "- per dialog" line under
/// each confounder row. `fold_partial` reports partial entity matches
/// inside the irrelevant entity row.
std::string format_stats_table(const DatasetStats& stats, bool fold_partial = false);

void write_audit(std::ostream& out, const std::vector<AssembledSample>& samples);

} // namespace fqbank
