#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <functional>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "config.hpp"
#include "errors.hpp"
#include "memory.hpp"
#include "random.hpp"

namespace qnet {

enum class ExperimentKind { overprinting, noise_sweep, threshold_sweep, size_sweep, gamma_sweep, sweep };

inline const char* to_string(ExperimentKind k) {
    switch (k) {
        case ExperimentKind::overprinting: return "overprinting";
        case ExperimentKind::noise_sweep: return "noise_sweep";
        case ExperimentKind::threshold_sweep: return "threshold_sweep";
        case ExperimentKind::size_sweep: return "size_sweep";
        case ExperimentKind::gamma_sweep: return "gamma_sweep";
        case ExperimentKind::sweep: return "sweep";
    }
    return "?";
}

inline std::optional<ExperimentKind> experiment_kind(const std::string& s) {
    for (auto k : {ExperimentKind::overprinting, ExperimentKind::noise_sweep, ExperimentKind::threshold_sweep,
                   ExperimentKind::size_sweep, ExperimentKind::gamma_sweep})
        if (s == to_string(k)) return k;
    return std::nullopt;
}

struct ExperimentSpec {
    ExperimentKind kind = ExperimentKind::overprinting;
    std::size_t k_patterns = 5;
    std::vector<std::uint64_t> seeds;
    std::string grid_name;
    std::vector<double> grid_values;
    double flip_fraction = 0.1;
    std::size_t target = 2;  // memory probed by threshold-style reports
    RunConfig config;        // lattice / dynamics / anneal / write / recall bundles
    std::size_t jobs = 1;

    void validate() const {
        if (seeds.empty()) throw ValidationError("experiment.seeds", "must not be empty");
        if (k_patterns < 1) throw ValidationError("experiment.k_patterns", "must be >= 1");
        if (grid_values.empty()) throw ValidationError("experiment.grid", "must not be empty");
        for (double v : grid_values)
            if (!std::isfinite(v)) throw ValidationError("experiment.grid", "values must be finite");
    }
};

inline std::vector<double> default_grid(ExperimentKind kind, double flip_fraction) {
    switch (kind) {
        case ExperimentKind::overprinting: return {0.0, flip_fraction};
        case ExperimentKind::noise_sweep: return {0.0, 0.05, 0.1, 0.15, 0.2, 0.3};
        case ExperimentKind::threshold_sweep: {
            std::vector<double> v;
            for (int i = 0; i <= 10; ++i) v.push_back(0.2 * i);
            return v;
        }
        case ExperimentKind::size_sweep: return {6.0, 10.0, 20.0};
        case ExperimentKind::gamma_sweep: return {0.0, 0.1, 0.2, 0.5, 1.0};
        case ExperimentKind::sweep: return {};
    }
    return {};
}

inline const char* grid_name(ExperimentKind kind) {
    switch (kind) {
        case ExperimentKind::overprinting:
        case ExperimentKind::noise_sweep: return "flip_fraction";
        case ExperimentKind::threshold_sweep: return "cue_strength";
        case ExperimentKind::size_sweep: return "L";
        case ExperimentKind::gamma_sweep: return "gamma";
        case ExperimentKind::sweep: return "";
    }
    return "";
}

inline ExperimentSpec spec_from_config(const RunConfig& cfg, ExperimentKind kind,
                                       std::optional<std::vector<double>> grid = std::nullopt) {
    ExperimentSpec s;
    s.kind = kind;
    s.k_patterns = cfg.experiment.k_patterns;
    for (std::size_t i = 0; i < cfg.experiment.n_seeds; ++i) s.seeds.push_back(cfg.seed + i);
    s.grid_name = grid_name(kind);
    s.grid_values = grid ? *grid : default_grid(kind, cfg.experiment.flip_fraction);
    s.flip_fraction = cfg.experiment.flip_fraction;
    s.target = std::min<std::size_t>(2, s.k_patterns - 1);
    s.config = cfg;
    s.jobs = cfg.experiment.jobs;
    return s;
}

struct MemoryOutcome {
    std::size_t memory_index = 0;
    long selected = -1;  // -1: gate closed, ambiguous, or not a recall row
    double overlap = 0.0;
    double code = 0.0;
    bool success = false;
};

// One (seed, grid point) cell.
struct RunRecord {
    std::uint64_t seed = 0;
    double grid_value = 0.0;
    std::vector<MemoryOutcome> outcomes;
    double accuracy = 0.0;
    bool first_memory_success = false;
    std::vector<std::vector<double>> crosstalk;
    double crosstalk_mean_abs = 0.0;
    double persistence_rate = 1.0;
    double fidelity_mean = 0.0;
    std::vector<double> m_codes;  // code number of each record, in write order
    double wall_ms = 0.0;
};

struct SeedAudit {
    std::uint64_t seed = 0;
    std::size_t writes = 0;
    std::size_t recalls = 0;
};

struct GridSummary {
    double grid_value = 0.0;
    std::size_t runs = 0;
    double accuracy = 0.0;
    double first_memory_rate = 0.0;
    double crosstalk_mean_abs = 0.0;
    double persistence_rate = 0.0;
    double fidelity_mean = 0.0;
};

struct ExperimentReport {
    ExperimentSpec spec;
    std::vector<RunRecord> records;  // sorted by (seed, grid index)
    std::vector<SeedAudit> audit;
    std::vector<GridSummary> summary;
    std::optional<double> threshold;                // first grid value with success > 0.5
    std::optional<double> persistence_onset_gamma;  // below it, persistence fails for most runs
};

namespace detail {

using Clock = std::chrono::steady_clock;

inline double ms_since(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

struct SeedRun {
    MemoryNet net;
    std::vector<Pattern> patterns;
    std::vector<double> fidelity;
    std::vector<bool> persisted;
    double write_ms = 0.0;
};

// Fresh normal-state net; k random patterns written in order. Patterns that
// fail to persist are not stored (and are reported as such).
inline SeedRun write_patterns(const RunConfig& cfg, std::size_t k, std::uint64_t seed, SeedAudit& audit) {
    const auto t0 = Clock::now();
    SeedRun run{MemoryNet(cfg.make_store(), derive_seed(seed, 2)), {}, {}, {}, 0.0};
    Rng pattern_rng(derive_seed(seed, 1));
    Rng write_rng(derive_seed(seed, 3));
    for (std::size_t i = 0; i < k; ++i) {
        run.patterns.push_back(random_pattern(cfg.lattice, pattern_rng));
        ++audit.writes;
        try {
            const WriteOutcome w = run.net.write(run.patterns.back(), write_rng);
            run.fidelity.push_back(w.fidelity);
            run.persisted.push_back(true);
        } catch (const PersistenceFailure& e) {
            run.fidelity.push_back(e.fidelity());
            run.persisted.push_back(false);
        }
    }
    run.write_ms = ms_since(t0);
    return run;
}

inline std::vector<double> record_codes(const MemoryStore& s) {
    std::vector<double> out;
    for (const auto& r : s.records) out.push_back(r.code.value);
    return out;
}

// Recall every stored memory from a cue with the given flip fraction.
inline RunRecord recall_all(const SeedRun& run, const RecallParams& params, double flip, std::uint64_t seed,
                            std::uint64_t stream, SeedAudit& audit) {
    const auto t0 = Clock::now();
    RunRecord rec;
    rec.seed = seed;
    const MemoryStore& store = run.net.store();
    Rng rng(derive_seed(seed, stream));
    std::size_t hits = 0;
    for (std::size_t k = 0; k < store.size(); ++k) {
        const Pattern& stored = store.records[k].snapshot;
        const Pattern cue = flip > 0.0 ? flip_bits(stored, flip, rng) : stored;
        MemoryOutcome o;
        o.memory_index = k;
        o.code = store.records[k].code.value;
        ++audit.recalls;
        try {
            const RecallResult r = recall(store, cue, params, rng);
            o.selected = static_cast<long>(r.selected);
            o.overlap = r.overlaps[k];
            o.success = r.selected == k;
        } catch (const AmbiguousRecall& e) {
            o.overlap = e.overlaps()[k];
        } catch (const BelowThreshold&) {
        }
        hits += o.success ? 1 : 0;
        rec.outcomes.push_back(o);
    }
    rec.accuracy = store.empty() ? 0.0 : static_cast<double>(hits) / static_cast<double>(store.size());
    rec.first_memory_success = !rec.outcomes.empty() && rec.outcomes.front().success;
    rec.crosstalk = crosstalk_matrix(store);
    rec.crosstalk_mean_abs = mean_abs_offdiagonal(rec.crosstalk);
    rec.m_codes = record_codes(store);
    std::size_t kept = 0;
    double fid = 0.0;
    for (std::size_t i = 0; i < run.persisted.size(); ++i) {
        kept += run.persisted[i] ? 1 : 0;
        fid += run.fidelity[i];
    }
    rec.persistence_rate = run.persisted.empty() ? 1.0 : static_cast<double>(kept) / run.persisted.size();
    rec.fidelity_mean = run.fidelity.empty() ? 0.0 : fid / static_cast<double>(run.fidelity.size());
    rec.wall_ms = ms_since(t0);
    return rec;
}

using CellRunner = std::function<std::vector<RunRecord>(std::uint64_t seed, SeedAudit& audit)>;

inline void run_seeds(const ExperimentSpec& spec, const CellRunner& cell, ExperimentReport& report) {
    std::vector<std::vector<RunRecord>> per_seed(spec.seeds.size());
    std::vector<SeedAudit> audits(spec.seeds.size());
    std::mutex err_mu;
    std::exception_ptr failure;
    auto worker = [&](std::size_t first, std::size_t stride) {
        for (std::size_t i = first; i < spec.seeds.size(); i += stride) {
            try {
                audits[i].seed = spec.seeds[i];
                per_seed[i] = cell(spec.seeds[i], audits[i]);
            } catch (...) {
                std::lock_guard lock(err_mu);
                if (!failure) failure = std::current_exception();
            }
        }
    };
    const std::size_t jobs = std::max<std::size_t>(1, std::min(spec.jobs, spec.seeds.size()));
    if (jobs == 1) {
        worker(0, 1);
    } else {
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < jobs; ++t) pool.emplace_back(worker, t, jobs);
        for (auto& th : pool) th.join();
    }
    if (failure) std::rethrow_exception(failure);
    for (std::size_t i = 0; i < spec.seeds.size(); ++i) {
        for (auto& r : per_seed[i]) report.records.push_back(std::move(r));
        report.audit.push_back(audits[i]);
    }
}

inline void summarize(ExperimentReport& report) {
    const auto& grid = report.spec.grid_values;
    for (double g : grid) {
        GridSummary s;
        s.grid_value = g;
        for (const auto& r : report.records) {
            if (r.grid_value != g) continue;
            ++s.runs;
            s.accuracy += r.accuracy;
            s.first_memory_rate += r.first_memory_success ? 1.0 : 0.0;
            s.crosstalk_mean_abs += r.crosstalk_mean_abs;
            s.persistence_rate += r.persistence_rate;
            s.fidelity_mean += r.fidelity_mean;
        }
        if (s.runs > 0) {
            const double n = static_cast<double>(s.runs);
            s.accuracy /= n;
            s.first_memory_rate /= n;
            s.crosstalk_mean_abs /= n;
            s.persistence_rate /= n;
            s.fidelity_mean /= n;
        }
        report.summary.push_back(s);
    }
    if (report.spec.kind == ExperimentKind::threshold_sweep) {
        for (const auto& s : report.summary)
            if (s.accuracy > 0.5) {
                report.threshold = s.grid_value;
                break;
            }
    }
    if (report.spec.kind == ExperimentKind::gamma_sweep) {
        // Smallest gamma from which persistence holds in most runs onward.
        std::vector<GridSummary> sorted = report.summary;
        std::sort(sorted.begin(), sorted.end(),
                  [](const GridSummary& a, const GridSummary& b) { return a.grid_value < b.grid_value; });
        for (std::size_t i = sorted.size(); i-- > 0;) {
            if (sorted[i].persistence_rate < 0.5) break;
            report.persistence_onset_gamma = sorted[i].grid_value;
        }
    }
}

}  // namespace detail

// Writes k random patterns per seed, then recalls each memory once per grid
// point (cue flip fraction; 0 is the clean cue).
inline ExperimentReport run_overprinting(const ExperimentSpec& spec) {
    spec.validate();
    ExperimentReport report{spec, {}, {}, {}, std::nullopt, std::nullopt};
    detail::run_seeds(
        spec,
        [&](std::uint64_t seed, SeedAudit& audit) {
            detail::SeedRun run = detail::write_patterns(spec.config, spec.k_patterns, seed, audit);
            std::vector<RunRecord> out;
            for (std::size_t g = 0; g < spec.grid_values.size(); ++g) {
                RunRecord r = detail::recall_all(run, spec.config.recall, spec.grid_values[g], seed, 1000 + g, audit);
                r.grid_value = spec.grid_values[g];
                r.wall_ms += run.write_ms;
                out.push_back(std::move(r));
            }
            return out;
        },
        report);
    detail::summarize(report);
    return report;
}

inline ExperimentReport run_noise_sweep(const ExperimentSpec& spec) { return run_overprinting(spec); }

// Success rate of noisy-cue recall per cue strength.
inline ExperimentReport run_threshold_sweep(const ExperimentSpec& spec) {
    spec.validate();
    ExperimentReport report{spec, {}, {}, {}, std::nullopt, std::nullopt};
    detail::run_seeds(
        spec,
        [&](std::uint64_t seed, SeedAudit& audit) {
            detail::SeedRun run = detail::write_patterns(spec.config, spec.k_patterns, seed, audit);
            std::vector<RunRecord> out;
            for (std::size_t g = 0; g < spec.grid_values.size(); ++g) {
                RecallParams rp = spec.config.recall;
                rp.cue_strength = spec.grid_values[g];
                // same cue noise and annealing stream at every grid point
                RunRecord r = detail::recall_all(run, rp, spec.flip_fraction, seed, 1000, audit);
                r.grid_value = spec.grid_values[g];
                out.push_back(std::move(r));
            }
            return out;
        },
        report);
    detail::summarize(report);
    return report;
}

// Generic one-parameter sweep: for each value, `apply` edits a copy of the
// configuration; every seed then writes k patterns and recalls each from a
// noisy cue.
inline ExperimentReport run_param_sweep(const ExperimentSpec& spec,
                                        const std::function<void(RunConfig&, double)>& apply) {
    spec.validate();
    ExperimentReport report{spec, {}, {}, {}, std::nullopt, std::nullopt};
    std::vector<RunConfig> configs;
    for (double v : spec.grid_values) {
        RunConfig c = spec.config;
        apply(c, v);
        validate(c);
        configs.push_back(std::move(c));
    }
    detail::run_seeds(
        spec,
        [&](std::uint64_t seed, SeedAudit& audit) {
            std::vector<RunRecord> out;
            for (std::size_t g = 0; g < configs.size(); ++g) {
                detail::SeedRun run = detail::write_patterns(configs[g], spec.k_patterns, seed, audit);
                RunRecord r = detail::recall_all(run, configs[g].recall, spec.flip_fraction, seed, 1000, audit);
                r.grid_value = spec.grid_values[g];
                r.wall_ms += run.write_ms;
                out.push_back(std::move(r));
            }
            return out;
        },
        report);
    detail::summarize(report);
    return report;
}

// Cross-talk and noisy-cue accuracy per lattice size.
inline ExperimentReport run_size_sweep(const ExperimentSpec& spec) {
    for (double v : spec.grid_values)
        if (!(v >= 1.0) || v != std::floor(v)) throw ValidationError("L", "grid values must be positive integers");
    return run_param_sweep(spec, [](RunConfig& c, double v) { c.lattice.size = static_cast<std::size_t>(v); });
}

// Writing fidelity and persistence per Weiss constant. One row per write:
// overlap is the writing fidelity, success whether the record persisted.
inline ExperimentReport run_gamma_sweep(const ExperimentSpec& spec) {
    spec.validate();
    ExperimentReport report{spec, {}, {}, {}, std::nullopt, std::nullopt};
    std::vector<RunConfig> configs;
    for (double v : spec.grid_values) {
        RunConfig c = spec.config;
        c.dynamics.gamma = v;
        validate(c);
        configs.push_back(std::move(c));
    }
    detail::run_seeds(
        spec,
        [&](std::uint64_t seed, SeedAudit& audit) {
            std::vector<RunRecord> out;
            for (std::size_t g = 0; g < configs.size(); ++g) {
                detail::SeedRun run = detail::write_patterns(configs[g], spec.k_patterns, seed, audit);
                RunRecord r;
                r.seed = seed;
                r.grid_value = spec.grid_values[g];
                const MemoryStore& store = run.net.store();
                std::size_t stored = 0, kept = 0;
                double fid = 0.0;
                for (std::size_t i = 0; i < run.patterns.size(); ++i) {
                    MemoryOutcome o;
                    o.memory_index = i;
                    o.overlap = run.fidelity[i];
                    o.success = run.persisted[i];
                    if (run.persisted[i]) o.code = store.records[stored++].code.value;
                    kept += o.success ? 1 : 0;
                    fid += o.overlap;
                    r.outcomes.push_back(o);
                }
                const double n = static_cast<double>(run.patterns.size());
                r.persistence_rate = static_cast<double>(kept) / n;
                r.fidelity_mean = fid / n;
                r.accuracy = r.persistence_rate;
                r.first_memory_success = !r.outcomes.empty() && r.outcomes.front().success;
                r.crosstalk = crosstalk_matrix(store);
                r.crosstalk_mean_abs = mean_abs_offdiagonal(r.crosstalk);
                r.m_codes = detail::record_codes(store);
                r.wall_ms = run.write_ms;
                out.push_back(std::move(r));
            }
            return out;
        },
        report);
    detail::summarize(report);
    return report;
}

inline ExperimentReport run_experiment(const ExperimentSpec& spec) {
    switch (spec.kind) {
        case ExperimentKind::overprinting: return run_overprinting(spec);
        case ExperimentKind::noise_sweep: return run_noise_sweep(spec);
        case ExperimentKind::threshold_sweep: return run_threshold_sweep(spec);
        case ExperimentKind::size_sweep: return run_size_sweep(spec);
        case ExperimentKind::gamma_sweep: return run_gamma_sweep(spec);
        case ExperimentKind::sweep: break;
    }
    throw ValidationError("experiment", "generic sweeps go through run_param_sweep");
}

// Number of grid points where the curve drops relative to the running max.
inline std::size_t monotonicity_violations(const std::vector<double>& curve, double tol = 0.0) {
    std::size_t v = 0;
    double best = -1e300;
    for (double x : curve) {
        if (x + tol < best) ++v;
        best = std::max(best, x);
    }
    return v;
}

}  // namespace qnet
