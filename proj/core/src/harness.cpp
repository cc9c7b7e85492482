#include "agrisim/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "agrisim/baselines.hpp"

namespace agrisim {

namespace fs = std::filesystem;

namespace {

std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    return f;
}

bool is_baseline(const std::string& algo) {
    return algo == "aco" || algo == "pso" || algo == "ga";
}

double mean_of(const std::vector<double>& v) {
    if (v.empty()) return 0.0;
    double s = 0;
    for (double x : v) s += x;
    return s / v.size();
}

double std_of(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    const double m = mean_of(v);
    double s = 0;
    for (double x : v) s += (x - m) * (x - m);
    return std::sqrt(s / (v.size() - 1));
}

void write_timing(const std::string& path, double inference_ms) {
    auto f = open_out(path);
    f << "inference_ms=" << fmt(inference_ms) << "\n";
}

double read_timing(const std::string& path) {
    std::ifstream f(path);
    std::string line;
    if (f && std::getline(f, line) && line.rfind("inference_ms=", 0) == 0)
        return std::stod(line.substr(13));
    return 0.0;
}

}  // namespace

void write_learning_curve_csv(const std::string& path, const std::string& hash,
                              const std::vector<RewardRow>& rows) {
    auto f = open_out(path);
    f << "# config_hash=" << hash << "\n";
    f << "episode,agent,reward,mimicry\n";
    for (const auto& r : rows)
        f << r.episode << ',' << r.agent << ',' << fmt(r.reward) << ','
          << (r.mimicry ? 1 : 0) << "\n";
}

void write_metrics_csv(const std::string& path, const std::string& hash,
                       const std::vector<EpisodeMetrics>& rows) {
    auto f = open_out(path);
    f << "# config_hash=" << hash << "\n";
    // Inference latency is wall-clock and lives in timing.txt so that
    // re-running an identical config reproduces this file bit for bit.
    f << "algorithm,seed,episode,agent_count,energy_j,recognition_pct,"
         "collection_pct,completion_s\n";
    for (const auto& m : rows)
        f << m.algorithm << ',' << m.seed << ',' << m.episode << ','
          << m.agent_count << ',' << fmt(m.energy_j) << ','
          << fmt(m.recognition_pct) << ',' << fmt(m.collection_pct) << ','
          << fmt(m.completion_s) << "\n";
}

void write_trajectories_csv(const std::string& path, const std::string& hash,
                            const std::vector<TrajectoryRow>& rows) {
    auto f = open_out(path);
    f << "# config_hash=" << hash << "\n";
    f << "episode,step,uav,row,col,action,reward,battery\n";
    for (const auto& t : rows)
        f << t.episode << ',' << t.step << ',' << t.uav << ',' << t.row << ','
          << t.col << ',' << t.action << ',' << fmt(t.reward) << ','
          << fmt(t.battery) << "\n";
}

void write_summary_csv(const std::string& path, const std::string& hash,
                       const std::vector<AlgoSummary>& rows) {
    auto f = open_out(path);
    f << "# config_hash=" << hash << "\n";
    f << "algorithm,runs,final_reward_mean,final_reward_std,recognition_mean,"
         "recognition_std,collection_mean,collection_std,energy_mean,"
         "completion_mean\n";
    for (const auto& s : rows)
        f << s.algorithm << ',' << s.runs << ',' << fmt(s.final_reward_mean) << ','
          << fmt(s.final_reward_std) << ',' << fmt(s.recognition_mean) << ','
          << fmt(s.recognition_std) << ',' << fmt(s.collection_mean) << ','
          << fmt(s.collection_std) << ',' << fmt(s.energy_mean) << ','
          << fmt(s.completion_mean) << "\n";
}

CsvFile read_csv(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open: " + path);
    CsvFile out;
    std::string line;
    if (!std::getline(f, line) || line.rfind("# config_hash=", 0) != 0)
        throw std::runtime_error(path + ": missing config hash line");
    out.hash = line.substr(14);
    auto split = [](const std::string& s) {
        std::vector<std::string> cells;
        std::stringstream ss(s);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        return cells;
    };
    if (std::getline(f, line)) out.header = split(line);
    while (std::getline(f, line))
        if (!line.empty()) out.rows.push_back(split(line));
    return out;
}

RunRecord run_single(const ExperimentConfig& cfg, const std::string& algorithm,
                     std::uint64_t seed) {
    RunRecord rec;
    rec.algorithm = algorithm;
    rec.seed = seed;
    rec.dir = cfg.output_dir + "/" + algorithm + "_seed" + std::to_string(seed);
    const std::string hash = config_hash_hex(cfg);
    try {
        fs::create_directories(rec.dir);
        std::vector<TrajectoryRow> trajectories;

        if (is_baseline(algorithm)) {
            const std::uint64_t env_seed = mix_seed(seed, 0xba5e);
            FarmEnv env(cfg.env, env_seed);
            const PlanningInstance inst =
                make_planning_instance(env, cfg.baseline.density_threshold);
            Rng rng(mix_seed(seed, 0x9a));
            const auto t0 = std::chrono::steady_clock::now();
            RoutePlan plan;
            if (algorithm == "aco")
                plan = plan_aco(inst, cfg.baseline.aco, rng);
            else if (algorithm == "pso")
                plan = plan_pso(inst, cfg.baseline.pso, rng);
            else
                plan = plan_ga(inst, cfg.baseline.ga, rng);
            const auto t1 = std::chrono::steady_clock::now();

            env.reset(env_seed);
            EpisodeMetrics m = execute_plan(env, plan);
            m.episode = 0;
            m.algorithm = algorithm;
            m.seed = seed;
            const double plan_ms =
                std::chrono::duration<double, std::milli>(t1 - t0).count();
            const double steps = std::max(1.0, m.completion_s / cfg.env.dt);
            rec.inference_ms = plan_ms / steps;
            m.inference_ms = rec.inference_ms;
            rec.metrics = {m};
        } else {
            TrainingArtifacts art =
                train(cfg.env, cfg.trainer, cfg.imitation,
                      algorithm_from_string(algorithm), seed);
            rec.curve = std::move(art.learning_curve);
            rec.metrics = std::move(art.eval_metrics);
            rec.inference_ms = art.inference_ms;
            trajectories = std::move(art.eval_trajectories);

            fs::create_directories(rec.dir + "/checkpoints");
            for (const AgentPolicy& a : art.agents) {
                const std::string stem =
                    rec.dir + "/checkpoints/agent" + std::to_string(a.id);
                save_checkpoint(a.q.online, stem + "_online.ckpt");
                save_checkpoint(a.q.target, stem + "_target.ckpt");
                save_checkpoint(a.q.mid, stem + "_mid.ckpt");
            }
        }

        write_learning_curve_csv(rec.dir + "/learning_curve.csv", hash, rec.curve);
        write_metrics_csv(rec.dir + "/metrics.csv", hash, rec.metrics);
        write_trajectories_csv(rec.dir + "/trajectories.csv", hash, trajectories);
        write_timing(rec.dir + "/timing.txt", rec.inference_ms);
        open_out(rec.dir + "/config.resolved.json")
            << config_to_json(cfg).dump(2) << "\n";
        rec.ok = true;
    } catch (const std::exception& e) {
        rec.ok = false;
        rec.error = e.what();
    }
    return rec;
}

std::vector<AlgoSummary> summarize(const std::vector<RunRecord>& runs,
                                   int final_window) {
    std::map<std::string, std::vector<const RunRecord*>> by_algo;
    std::vector<std::string> order;
    for (const auto& r : runs) {
        if (!r.ok) continue;
        if (!by_algo.contains(r.algorithm)) order.push_back(r.algorithm);
        by_algo[r.algorithm].push_back(&r);
    }

    std::vector<AlgoSummary> out;
    for (const auto& algo : order) {
        const auto& group = by_algo[algo];
        AlgoSummary s;
        s.algorithm = algo;
        s.runs = static_cast<int>(group.size());
        std::vector<double> finals, recs, cols, energies, comps, infs;
        for (const RunRecord* r : group) {
            if (!r->curve.empty()) {
                int max_ep = 0;
                for (const auto& row : r->curve) max_ep = std::max(max_ep, row.episode);
                const int lo = std::max(1, max_ep - final_window + 1);
                std::vector<double> window;
                for (const auto& row : r->curve)
                    if (row.episode >= lo) window.push_back(row.reward);
                finals.push_back(mean_of(window));
            }
            std::vector<double> rr, cc, ee, tt;
            for (const auto& m : r->metrics) {
                rr.push_back(m.recognition_pct);
                cc.push_back(m.collection_pct);
                ee.push_back(m.energy_j);
                tt.push_back(m.completion_s);
            }
            recs.push_back(mean_of(rr));
            cols.push_back(mean_of(cc));
            energies.push_back(mean_of(ee));
            comps.push_back(mean_of(tt));
            infs.push_back(r->inference_ms);
        }
        s.final_reward_mean = mean_of(finals);
        s.final_reward_std = std_of(finals);
        s.recognition_mean = mean_of(recs);
        s.recognition_std = std_of(recs);
        s.collection_mean = mean_of(cols);
        s.collection_std = std_of(cols);
        s.energy_mean = mean_of(energies);
        s.completion_mean = mean_of(comps);
        s.inference_ms_mean = mean_of(infs);
        out.push_back(s);
    }
    return out;
}

std::string compare_algorithms(const std::vector<AlgoSummary>& summaries) {
    std::ostringstream os;
    os << "algorithm comparison (" << summaries.size() << " algorithms)\n";
    for (const auto& s : summaries) {
        os << "  " << s.algorithm << ": runs=" << s.runs
           << " final_reward=" << s.final_reward_mean << "+-" << s.final_reward_std
           << " recognition%=" << s.recognition_mean << "+-" << s.recognition_std
           << " collection%=" << s.collection_mean << "+-" << s.collection_std
           << " energy_J=" << s.energy_mean
           << " completion_s=" << s.completion_mean
           << " inference_ms=" << s.inference_ms_mean << "\n";
    }
    os << "pairwise deltas (row - column)\n";
    for (size_t i = 0; i < summaries.size(); ++i) {
        for (size_t j = 0; j < summaries.size(); ++j) {
            if (i == j) continue;
            const auto& a = summaries[i];
            const auto& b = summaries[j];
            os << "  " << a.algorithm << " - " << b.algorithm
               << ": d_final_reward=" << a.final_reward_mean - b.final_reward_mean
               << " d_recognition=" << a.recognition_mean - b.recognition_mean
               << " d_collection=" << a.collection_mean - b.collection_mean << "\n";
        }
    }
    return os.str();
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
    validate(cfg);
    ExperimentResult res;
    res.output_dir = cfg.output_dir;
    fs::create_directories(cfg.output_dir);
    open_out(cfg.output_dir + "/config.resolved.json")
        << config_to_json(cfg).dump(2) << "\n";

    std::vector<std::string> failures;
    for (const auto& algo : cfg.algorithms) {
        for (std::uint64_t seed : cfg.seeds) {
            RunRecord rec = run_single(cfg, algo, seed);
            if (!rec.ok)
                failures.push_back(rec.dir + ": " + rec.error);
            res.runs.push_back(std::move(rec));
        }
    }
    if (!failures.empty()) {
        auto f = open_out(cfg.output_dir + "/failures.txt");
        for (const auto& line : failures) f << line << "\n";
    }

    res.summaries = summarize(res.runs);
    write_summary_csv(cfg.output_dir + "/summary.csv", config_hash_hex(cfg),
                      res.summaries);
    open_out(cfg.output_dir + "/report.txt") << compare_algorithms(res.summaries);
    return res;
}

ExperimentResult export_summary(const std::string& run_root) {
    ExperimentResult res;
    res.output_dir = run_root;
    std::string hash;
    std::vector<fs::path> dirs;
    for (const auto& entry : fs::directory_iterator(run_root))
        if (entry.is_directory() && fs::exists(entry.path() / "metrics.csv"))
            dirs.push_back(entry.path());
    std::sort(dirs.begin(), dirs.end());
    if (dirs.empty())
        throw std::runtime_error("export_summary: no run directories under " + run_root);

    for (const auto& dir : dirs) {
        RunRecord rec;
        rec.dir = dir.string();
        const CsvFile metrics = read_csv((dir / "metrics.csv").string());
        if (hash.empty()) hash = metrics.hash;
        if (metrics.hash != hash)
            throw std::runtime_error(
                "export_summary: refusing to aggregate mixed config hashes (" +
                rec.dir + ")");
        for (const auto& row : metrics.rows) {
            EpisodeMetrics m;
            m.algorithm = row[0];
            m.seed = std::stoull(row[1]);
            m.episode = std::stoi(row[2]);
            m.agent_count = std::stoi(row[3]);
            m.energy_j = std::stod(row[4]);
            m.recognition_pct = std::stod(row[5]);
            m.collection_pct = std::stod(row[6]);
            m.completion_s = std::stod(row[7]);
            rec.metrics.push_back(std::move(m));
        }
        if (!rec.metrics.empty()) {
            rec.algorithm = rec.metrics[0].algorithm;
            rec.seed = rec.metrics[0].seed;
        }
        if (fs::exists(dir / "learning_curve.csv")) {
            const CsvFile curve = read_csv((dir / "learning_curve.csv").string());
            if (curve.hash != hash)
                throw std::runtime_error(
                    "export_summary: refusing to aggregate mixed config hashes (" +
                    rec.dir + ")");
            for (const auto& row : curve.rows)
                rec.curve.push_back({std::stoi(row[0]), std::stoi(row[1]),
                                     std::stod(row[2]), row[3] == "1"});
        }
        rec.inference_ms = read_timing((dir / "timing.txt").string());
        rec.ok = true;
        res.runs.push_back(std::move(rec));
    }

    res.summaries = summarize(res.runs);
    write_summary_csv(run_root + "/summary.csv", hash, res.summaries);
    open_out(run_root + "/report.txt") << compare_algorithms(res.summaries);
    return res;
}

}  // namespace agrisim
