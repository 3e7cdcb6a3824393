#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <string_view>
#include <utility>
#include <vector>

namespace fqbank {

/// Seeded generator with a portable draw sequence. The engine output is fixed
/// by the standard; the bounded draw and the shuffle are done here because the
/// standard distributions differ between library implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    /// Uniform integer in [0, n). `n` must be positive.
    std::size_t index(std::size_t n);

    template <typename T>
    void shuffle(std::vector<T>& items) {
        for (std::size_t i = items.size(); i > 1; --i) {
            const std::size_t j = index(i);
            using std::swap;
            swap(items[i - 1], items[j]);
        }
    }

private:
    std::mt19937_64 engine_;
};

/// Per-item seed derived from the run seed and a stable key (e.g. sample id),
/// so results do not depend on scheduling order.
std::uint64_t derive_seed(std::uint64_t run_seed, std::string_view key);

} // namespace fqbank
