#pragma once

#include <string>
#include <vector>

#include "agrisim/config.hpp"
#include "agrisim/metrics.hpp"
#include "agrisim/trainer.hpp"

namespace agrisim {

// Per-algorithm aggregate across seeds.
struct AlgoSummary {
    std::string algorithm;
    int runs = 0;
    double final_reward_mean = 0.0;  // mean return over the final window
    double final_reward_std = 0.0;   // across seeds
    double recognition_mean = 0.0, recognition_std = 0.0;
    double collection_mean = 0.0, collection_std = 0.0;
    double energy_mean = 0.0;
    double completion_mean = 0.0;
    double inference_ms_mean = 0.0;
};

struct RunRecord {
    std::string algorithm;
    std::uint64_t seed = 0;
    std::string dir;
    bool ok = false;
    std::string error;
    std::vector<RewardRow> curve;
    std::vector<EpisodeMetrics> metrics;
    double inference_ms = 0.0;
};

struct ExperimentResult {
    std::vector<RunRecord> runs;
    std::vector<AlgoSummary> summaries;
    std::string output_dir;
};

// One (algorithm, seed) run: RL training or baseline planning+execution.
// Writes the run directory's artifacts.
RunRecord run_single(const ExperimentConfig& cfg, const std::string& algorithm,
                     std::uint64_t seed);

// Fans out every (algorithm, seed) pair, then writes summary.csv and
// report.txt. Individual run failures are recorded and do not stop the
// experiment.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

std::vector<AlgoSummary> summarize(const std::vector<RunRecord>& runs,
                                   int final_window = 50);

// Human-readable ordering report with pairwise deltas.
std::string compare_algorithms(const std::vector<AlgoSummary>& summaries);

// Rebuild summary.csv + report.txt from the CSV artifacts in a run
// directory tree. Refuses to aggregate across differing config hashes.
ExperimentResult export_summary(const std::string& run_root);

// CSV I/O. Every file starts with "# config_hash=<hex>".
void write_learning_curve_csv(const std::string& path, const std::string& hash,
                              const std::vector<RewardRow>& rows);
void write_metrics_csv(const std::string& path, const std::string& hash,
                       const std::vector<EpisodeMetrics>& rows);
void write_trajectories_csv(const std::string& path, const std::string& hash,
                            const std::vector<TrajectoryRow>& rows);
void write_summary_csv(const std::string& path, const std::string& hash,
                       const std::vector<AlgoSummary>& rows);

struct CsvFile {
    std::string hash;
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};
CsvFile read_csv(const std::string& path);

}  // namespace agrisim
