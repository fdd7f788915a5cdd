#include "firmsim/harness.hpp"

#include <json.hpp>

#include <atomic>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "firmsim/metrics.hpp"

namespace firmsim {

namespace {

namespace fs = std::filesystem;

[[noreturn]] void io_failure(const fs::path& path, const char* what) {
    throw std::runtime_error(std::string("IoFailure: ") + what + " " + path.string());
}

std::ofstream open_out(const fs::path& path) {
    std::ofstream os(path);
    if (!os) io_failure(path, "cannot open for writing:");
    return os;
}

void finish(std::ofstream& os, const fs::path& path) {
    os.flush();
    if (!os) io_failure(path, "write failed:");
}

// Shortest-ish representation that still parses back to the same double.
std::string fmt_full(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

void write_timeseries(const std::vector<StepReport>& reports, const fs::path& path) {
    auto os = open_out(path);
    os << "step,n_old,n_new,n_total,l_index,growth_rate,moves_existing,moves_vacant\n";
    for (const StepReport& r : reports) {
        os << r.step << ',' << r.n_old << ',' << r.n_new << ',' << (r.n_old + r.n_new) << ',' << fmt(r.l_index)
           << ',' << fmt(r.realized_growth_rate) << ',' << r.n_moves_existing << ',' << r.n_moves_vacant << '\n';
    }
    finish(os, path);
}

void write_ranksize(const std::vector<RankedCity>& ranked, const fs::path& path) {
    auto os = open_out(path);
    os << "rank,x,y,count\n";
    for (size_t i = 0; i < ranked.size(); ++i) {
        os << (i + 1) << ',' << ranked[i].cell.x << ',' << ranked[i].cell.y << ',' << ranked[i].count << '\n';
    }
    finish(os, path);
}

int thread_budget() {
    if (const char* env = std::getenv("FIRMSIM_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v >= 1) return static_cast<int>(v);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

}  // namespace

RunResult run_scenario(const SimConfig& cfg, const fs::path& out_dir, std::int64_t snapshot_every) {
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) io_failure(out_dir, "cannot create directory:");

    RunResult result = run(cfg, snapshot_every);

    write_timeseries(result.reports, out_dir / "timeseries.csv");
    write_ranksize(rank_size(result.final_state.census), out_dir / "ranksize_final.csv");
    for (const auto& [step, grid] : result.snapshots) {
        char name[32];
        std::snprintf(name, sizeof name, "snapshot_%05lld.csv", static_cast<long long>(step));
        write_snapshot_csv(grid, out_dir / name);
    }
    write_snapshot_csv(result.final_state.census, out_dir / "snapshot_final.csv");

    const ClusterIndex final_l = cluster_index(result.final_state.census, cfg.metric_distance);
    const std::int64_t fit_lo = std::min<std::int64_t>(50, cfg.steps);
    const PowerLawFit fit = growth_fit(result.reports, fit_lo, cfg.steps);

    nlohmann::json summary{
        {"n_old", result.final_state.n_old},
        {"n_new", result.final_state.n_new},
        {"n_total", result.final_state.n_old + result.final_state.n_new},
        {"l_index", final_l.l_value},
        {"k_value", final_l.k_value},
        {"growth_fit",
         {{"slope", fit.slope},
          {"intercept", fit.intercept},
          {"r_squared", fit.r_squared},
          {"degenerate", fit.degenerate},
          {"window", {fit_lo, cfg.steps}}}},
        {"seed", cfg.seed},
        {"steps", cfg.steps},
        {"rng_version", "xoshiro256++/v1"},
    };
    const fs::path summary_path = out_dir / "summary.json";
    auto os = open_out(summary_path);
    os << summary.dump(2) << '\n';
    finish(os, summary_path);

    return result;
}

void render_raster(const PopulationGrid& snapshot, const fs::path& out_path, RasterChannel channel) {
    const std::vector<std::int64_t>& counts = channel == RasterChannel::Old   ? snapshot.count_old
                                              : channel == RasterChannel::New ? snapshot.count_new
                                                                              : snapshot.count_total;
    std::int64_t max_count = 0;
    for (std::int64_t c : counts) max_count = std::max(max_count, c);
    const double denom = max_count > 0 ? std::log1p(static_cast<double>(max_count)) : 1.0;

    auto os = open_out(out_path);
    os << "P2\n" << snapshot.width << ' ' << snapshot.height << "\n255\n";
    for (int y = 0; y < snapshot.height; ++y) {
        for (int x = 0; x < snapshot.width; ++x) {
            const std::int64_t c = counts[static_cast<size_t>(y) * snapshot.width + x];
            const long pixel =
                max_count > 0 ? std::lround(255.0 * std::log1p(static_cast<double>(c)) / denom) : 0;
            os << pixel << (x + 1 == snapshot.width ? '\n' : ' ');
        }
    }
    finish(os, out_path);
}

void write_snapshot_csv(const PopulationGrid& grid, const fs::path& path) {
    auto os = open_out(path);
    os << "x,y,count_old,count_new\n";
    for (int y = 0; y < grid.height; ++y) {
        for (int x = 0; x < grid.width; ++x) {
            const size_t idx = static_cast<size_t>(y) * grid.width + x;
            os << x << ',' << y << ',' << grid.count_old[idx] << ',' << grid.count_new[idx] << '\n';
        }
    }
    finish(os, path);
}

PopulationGrid read_snapshot_csv(const fs::path& path) {
    std::ifstream is(path);
    if (!is) io_failure(path, "cannot open for reading:");
    std::string line;
    if (!std::getline(is, line) || line != "x,y,count_old,count_new") {
        io_failure(path, "not a snapshot csv (bad header):");
    }
    struct Row {
        int x, y;
        long long old_c, new_c;
    };
    std::vector<Row> rows;
    int max_x = -1, max_y = -1;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        Row r{};
        if (std::sscanf(line.c_str(), "%d,%d,%lld,%lld", &r.x, &r.y, &r.old_c, &r.new_c) != 4 || r.x < 0 ||
            r.y < 0 || r.old_c < 0 || r.new_c < 0) {
            io_failure(path, "malformed snapshot row in:");
        }
        max_x = std::max(max_x, r.x);
        max_y = std::max(max_y, r.y);
        rows.push_back(r);
    }
    if (rows.empty()) io_failure(path, "snapshot csv has no rows:");

    PopulationGrid grid(max_x + 1, max_y + 1);
    for (const Row& r : rows) {
        const size_t idx = static_cast<size_t>(r.y) * grid.width + r.x;
        grid.count_old[idx] = r.old_c;
        grid.count_new[idx] = r.new_c;
        grid.count_total[idx] = r.old_c + r.new_c;
    }
    return grid;
}

SimConfig load_config_file(const fs::path& path) {
    std::ifstream is(path);
    if (!is) io_failure(path, "cannot open for reading:");
    std::stringstream buffer;
    buffer << is.rdbuf();
    return config_from_json(buffer.str());
}

void save_config_file(const SimConfig& cfg, const fs::path& path) {
    auto os = open_out(path);
    os << config_to_json(cfg) << '\n';
    finish(os, path);
}

std::uint64_t derive_sweep_seed(std::int64_t base_seed, double lambda2_percent, double lambda3_percent,
                                int replicate) {
    std::uint64_t x = static_cast<std::uint64_t>(base_seed);
    x = splitmix64(x) ^ std::bit_cast<std::uint64_t>(lambda2_percent);
    x = splitmix64(x) ^ std::bit_cast<std::uint64_t>(lambda3_percent);
    x = splitmix64(x) ^ (0x94d049bb133111ebULL * (static_cast<std::uint64_t>(replicate) + 1));
    return splitmix64(x);
}

SweepResult run_sweep(const SweepSpec& spec) {
    if (spec.replicates < 1) throw std::invalid_argument("sweep replicates must be >= 1");

    struct Task {
        SimConfig cfg;
        SweepRow row;
    };
    std::vector<Task> tasks;
    for (size_t i2 = 0; i2 < spec.lambda2_percent.size(); ++i2) {
        for (size_t i3 = 0; i3 < spec.lambda3_percent.size(); ++i3) {
            for (int rep = 0; rep < spec.replicates; ++rep) {
                SimConfig cfg = spec.base;
                cfg.lambda2 = spec.lambda2_percent[i2] / 100.0;
                cfg.lambda3 = spec.lambda3_percent[i3] / 100.0;
                cfg.lambda1 = 1.0 - cfg.lambda2 - cfg.lambda3;
                const std::uint64_t seed =
                    derive_sweep_seed(spec.base_seed, spec.lambda2_percent[i2], spec.lambda3_percent[i3], rep);
                cfg.seed = static_cast<std::int64_t>(seed);
                require_valid(cfg);
                tasks.push_back({cfg, SweepRow{cfg.lambda2, cfg.lambda3, rep, seed, 0.0, 0}});
            }
        }
    }

    const int workers = std::min<int>(thread_budget(), static_cast<int>(tasks.size()));
    std::atomic<size_t> next{0};
    auto work = [&] {
        for (;;) {
            const size_t i = next.fetch_add(1);
            if (i >= tasks.size()) return;
            RunResult result = run(tasks[i].cfg);
            tasks[i].row.final_n = result.final_state.n_old + result.final_state.n_new;
            tasks[i].row.final_l =
                cluster_index(result.final_state.census, tasks[i].cfg.metric_distance).l_value;
        }
    };
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }

    SweepResult result;
    result.rows.reserve(tasks.size());
    for (const Task& t : tasks) result.rows.push_back(t.row);

    for (size_t i2 = 0; i2 < spec.lambda2_percent.size(); ++i2) {
        for (size_t i3 = 0; i3 < spec.lambda3_percent.size(); ++i3) {
            const size_t base = (i2 * spec.lambda3_percent.size() + i3) * spec.replicates;
            SweepMean mean;
            mean.lambda2 = result.rows[base].lambda2;
            mean.lambda3 = result.rows[base].lambda3;
            double l_sum = 0.0, n_sum = 0.0;
            for (int rep = 0; rep < spec.replicates; ++rep) {
                l_sum += result.rows[base + rep].final_l;
                n_sum += static_cast<double>(result.rows[base + rep].final_n);
            }
            mean.mean_l = l_sum / spec.replicates;
            mean.mean_n = n_sum / spec.replicates;
            result.means.push_back(mean);
        }
    }
    return result;
}

SweepResult run_sweep(const SweepSpec& spec, const fs::path& out_dir) {
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) io_failure(out_dir, "cannot create directory:");

    SweepResult result = run_sweep(spec);

    const fs::path rows_path = out_dir / "sweep.csv";
    auto rows_os = open_out(rows_path);
    rows_os << "lambda2,lambda3,replicate,seed,final_l,final_n\n";
    for (const SweepRow& r : result.rows) {
        rows_os << fmt_full(r.lambda2) << ',' << fmt_full(r.lambda3) << ',' << r.replicate << ',' << r.seed << ','
                << fmt_full(r.final_l) << ',' << r.final_n << '\n';
    }
    finish(rows_os, rows_path);

    const fs::path means_path = out_dir / "sweep_means.csv";
    auto means_os = open_out(means_path);
    means_os << "lambda2,lambda3,mean_l,mean_n,replicates\n";
    for (const SweepMean& m : result.means) {
        means_os << fmt_full(m.lambda2) << ',' << fmt_full(m.lambda3) << ',' << fmt_full(m.mean_l) << ','
                 << fmt_full(m.mean_n) << ',' << spec.replicates << '\n';
    }
    finish(means_os, means_path);

    return result;
}

}  // namespace firmsim
