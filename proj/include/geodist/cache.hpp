#pragma once

#include "geodist/collections.hpp"
#include "geodist/harness.hpp"

#include <mutex>
#include <string>

namespace geodist {

struct DiscriminantData {
    Discriminant d;
    ClassGroup group;
    PellSolution pell;
    RegulatorData reg;
};

DiscriminantData compute_discriminant_data(i64 d);

// One JSON document per discriminant under cache_dir, named <d>.json and
// invalidated by schema_version. Writes go through a temp file + rename.
class DiscCache {
public:
    DiscCache(std::string cache_dir, bool enabled = true)
        : dir_(std::move(cache_dir)), enabled_(enabled) {}

    DiscriminantData get(i64 d);

    // Provider view for the harness; safe to call from worker threads.
    CollectionProvider provider();

    const std::string& dir() const { return dir_; }

    static constexpr int kSchemaVersion = 1;

private:
    DiscriminantData load_file(i64 d);
    void store_file(const DiscriminantData& data);

    std::string dir_;
    bool enabled_;
    std::mutex mu_;
};

// Log-spaced fundamental discriminants in [lo, hi]: nearest fundamental to
// each grid target, deduplicated upward. Deterministic.
std::vector<i64> log_spaced_fundamental(i64 lo, i64 hi, int count);

} // namespace geodist
