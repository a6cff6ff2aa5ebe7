#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "broucke/stability.hpp"

namespace broucke {

struct SweepConfig {
    double m1_min = 0.005;
    double m1_max = 1.465;
    double step = 0.005;
    double energy = -1.0;
    double tol = 1e-12;
    double delta = 1e-3;
    double m1_limit = 1.465;  // masses above this are recorded as out_of_range
    std::filesystem::path out_dir;
    unsigned workers = 0;     // 0: hardware concurrency
    bool resume = false;
    bool svg = true;

    void validate() const;
    std::vector<double> grid() const;
};

/// $BROUCKE_OUT_DIR if set, otherwise ./broucke_out.
std::filesystem::path default_out_dir();

/// One record per grid mass, ordered by m1. `previous` records with status ok
/// are reused instead of recomputed.
std::vector<StabilityRecord> run_sweep(const SweepConfig& cfg, const std::vector<StabilityRecord>& previous = {});

/// Writes sweep.csv, the per-figure .dat files and, if enabled, SVG plots.
void emit_outputs(const std::vector<StabilityRecord>& records, const SweepConfig& cfg);

extern const char* const kCsvHeader;
std::string csv_row(const StabilityRecord& rec);
void write_csv(const std::filesystem::path& path, const std::vector<StabilityRecord>& records);
std::vector<StabilityRecord> read_csv(const std::filesystem::path& path);

/// Re-renders the .dat and .svg files from records (used by `plot`).
void write_plots(const std::vector<StabilityRecord>& records, const std::filesystem::path& dir, bool svg);

Degeneracy degeneracy_from_string(const std::string& s);

/// A run of adjacent grid masses sharing a repeated-eigenvalue condition, found
/// either by a delta flag on a record or by a sign change of the condition
/// between neighbouring grid points.
struct DegenerateNeighborhood {
    double m1_lo = 0.0;
    double m1_hi = 0.0;
    std::vector<std::string> causes;
};

std::vector<DegenerateNeighborhood> degeneracy_census(const std::vector<StabilityRecord>& records, double lo,
                                                      double hi);

}  // namespace broucke
