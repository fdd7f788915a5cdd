#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "firmsim/config.hpp"
#include "firmsim/dynamics.hpp"
#include "firmsim/grid.hpp"

namespace firmsim {

/**
 * Runs one configuration and writes its result files into out_dir:
 *   timeseries.csv      step,n_old,n_new,n_total,l_index,growth_rate,moves_existing,moves_vacant
 *   ranksize_final.csv  rank,x,y,count
 *   snapshot_final.csv  x,y,count_old,count_new (one row per cell)
 *   snapshot_NNNNN.csv  same schema, every snapshot_every steps when > 0
 *   summary.json        final population by type, final L, growth fit
 * Throws std::runtime_error("IoFailure: ...") with path context on write errors.
 */
RunResult run_scenario(const SimConfig& cfg, const std::filesystem::path& out_dir,
                       std::int64_t snapshot_every = 0);

enum class RasterChannel : std::uint8_t { Old, New, Total };

/**
 * Writes a grayscale PGM (P2) image of a census snapshot. Pixels are
 * log-scaled: round(255 * log(1+count) / log(1+max_count)); an empty grid
 * renders all black.
 */
void render_raster(const PopulationGrid& snapshot, const std::filesystem::path& out_path, RasterChannel channel);

void write_snapshot_csv(const PopulationGrid& grid, const std::filesystem::path& path);
PopulationGrid read_snapshot_csv(const std::filesystem::path& path);

SimConfig load_config_file(const std::filesystem::path& path);
void save_config_file(const SimConfig& cfg, const std::filesystem::path& path);

// --- Relocation-lottery sweep ---------------------------------------------

struct SweepSpec {
    SimConfig base;
    std::vector<double> lambda2_percent;  // e.g. {7, 11, 15, 19}
    std::vector<double> lambda3_percent;  // e.g. {0.2, 0.3, 0.4, 0.5}
    int replicates = 4;
    std::int64_t base_seed = 0;
};

struct SweepRow {
    double lambda2 = 0.0;  // probability, already divided by 100
    double lambda3 = 0.0;
    int replicate = 0;
    std::uint64_t seed = 0;
    double final_l = 0.0;
    std::int64_t final_n = 0;
};

struct SweepMean {
    double lambda2 = 0.0;
    double lambda3 = 0.0;
    double mean_l = 0.0;
    double mean_n = 0.0;
};

struct SweepResult {
    std::vector<SweepRow> rows;    // ordered by (lambda2 index, lambda3 index, replicate)
    std::vector<SweepMean> means;  // one per (lambda2, lambda3) pair
};

// Pure function of the lambda values themselves, so rerunning any single
// sweep cell in isolation reproduces the exact seed (and row) the full
// sweep used.
std::uint64_t derive_sweep_seed(std::int64_t base_seed, double lambda2_percent, double lambda3_percent,
                                int replicate);

/**
 * Runs |lambda2| x |lambda3| x replicates simulations. lambda1 is recomputed
 * as 1 - lambda2 - lambda3 for every cell. Runs execute concurrently up to
 * FIRMSIM_THREADS (default: hardware concurrency); each run owns its state
 * and stream, so the result is independent of scheduling.
 */
SweepResult run_sweep(const SweepSpec& spec);

// run_sweep plus sweep.csv / sweep_means.csv in out_dir.
SweepResult run_sweep(const SweepSpec& spec, const std::filesystem::path& out_dir);

}  // namespace firmsim
