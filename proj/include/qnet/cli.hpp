#pragma once

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "config.hpp"
#include "experiments.hpp"
#include "memory.hpp"
#include "pattern_io.hpp"
#include "report.hpp"
#include "store_json.hpp"

#ifndef QNET_VERSION
#define QNET_VERSION "0.0.0"
#endif

namespace qnet::cli {

enum ExitCode : int {
    kOk = 0,
    kFailure = 1,
    kInvalid = 2,
    kBelowThreshold = 3,
    kAmbiguous = 4,
};

namespace detail {

struct Common {
    std::string config_path;
    std::optional<std::uint64_t> seed;
};

inline RunConfig resolve_config(const Common& c, std::ostream& out) {
    RunConfig cfg = c.config_path.empty() ? parse_config("") : load_config(c.config_path);
    if (const char* env = std::getenv("QNET_SEED"); env && *env) {
        const auto v = parse_unsigned(env);
        if (!v) throw ValidationError("QNET_SEED", "must be a nonnegative integer");
        cfg.seed = *v;
    }
    if (c.seed) cfg.seed = *c.seed;
    out << "seed: " << cfg.seed << "\n";
    return cfg;
}

inline Provenance provenance(const RunConfig& cfg) { return {QNET_VERSION, config_hash(cfg), cfg.seed}; }

inline std::vector<double> parse_values(const std::string& csv) {
    std::vector<double> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto v = parse_double(qnet::detail::trim(item));
        if (!v) throw ValidationError("--values", "not a number: '" + item + "'");
        out.push_back(*v);
    }
    if (out.empty()) throw ValidationError("--values", "must list at least one value");
    return out;
}

inline void write_report(const ExperimentReport& r, const RunConfig& cfg, const std::string& dir, std::ostream& out) {
    std::filesystem::create_directories(dir);
    const Provenance prov = provenance(cfg);
    const auto csv = (std::filesystem::path(dir) / "results.csv").string();
    const auto js = (std::filesystem::path(dir) / "summary.json").string();
    write_text_file(csv, report_csv(r, prov));
    write_text_file(js, report_summary_json(r, prov).dump(2) + "\n");
    for (const auto& s : r.summary)
        out << r.spec.grid_name << "=" << format_double(s.grid_value) << " accuracy=" << format_double(s.accuracy)
            << " first_memory=" << format_double(s.first_memory_rate)
            << " persistence=" << format_double(s.persistence_rate) << "\n";
    out << "wrote " << csv << " and " << js << "\n";
}

inline int cmd_write(const Common& common, const std::string& pattern_path, const std::string& store_path,
                     std::ostream& out) {
    const RunConfig cfg = resolve_config(common, out);
    const Pattern pattern = load_pattern(pattern_path);
    MemoryStore store = std::filesystem::exists(store_path) ? load_store(store_path) : cfg.make_store();
    require_shape(pattern.bits, store.lattice, "pattern");
    // The net rests in the last recorded state, or in the normal state.
    const DoubletField field = store.empty() ? new_field(store.lattice, NormalRandom{}, cfg.seed)
                                             : new_field(store.lattice, store.records.back().snapshot);
    Rng rng(derive_seed(cfg.seed, store.size()));
    const WriteOutcome w = write(store, pattern, field, rng);
    const Provenance prov = provenance(cfg);
    save_store(store_path, w.store, &prov);
    out << "recorded memory " << w.record.written_at << " code M=" << format_double(w.record.code.value)
        << " fidelity=" << format_double(w.fidelity) << " persistence=" << format_double(w.persistence) << "\n";
    return kOk;
}

inline int cmd_recall(const Common& common, const std::string& cue_path, const std::string& store_path,
                      const std::string& out_path, std::ostream& out) {
    const RunConfig cfg = resolve_config(common, out);
    const Pattern cue = load_pattern(cue_path);
    const MemoryStore store = load_store(store_path);
    Rng rng(cfg.seed);
    json j;
    j["provenance"] = to_json(provenance(cfg));
    int code = kOk;
    try {
        const RecallResult r = recall(store, cue, cfg.recall, rng);
        j["outcome"] = "recalled";
        j["selected"] = r.selected;
        j["code"] = to_json(r.code);
        j["pattern"] = pattern_rows(r.pattern);
        j["overlaps"] = r.overlaps;
        j["trajectory"] = trajectory_json(r.trajectory);
        out << "selected memory " << r.selected << " code M=" << format_double(r.code.value)
            << " overlap=" << format_double(r.overlaps[r.selected]) << "\n";
    } catch (const BelowThreshold& e) {
        j["outcome"] = "below_threshold";
        j["message"] = e.what();
        code = kBelowThreshold;
    } catch (const AmbiguousRecall& e) {
        j["outcome"] = "ambiguous";
        j["message"] = e.what();
        j["overlaps"] = e.overlaps();
        code = kAmbiguous;
    }
    if (!out_path.empty()) write_text_file(out_path, j.dump(2) + "\n");
    return code;
}

inline int cmd_experiment(const Common& common, const std::string& kind_name, const std::string& dir,
                          const std::string& values, std::optional<std::size_t> jobs, std::ostream& out) {
    const auto kind = experiment_kind(kind_name);
    if (!kind) throw ValidationError("experiment", "unknown kind '" + kind_name + "'");
    RunConfig cfg = resolve_config(common, out);
    if (jobs) cfg.experiment.jobs = *jobs;
    std::optional<std::vector<double>> grid;
    if (!values.empty()) grid = parse_values(values);
    const ExperimentReport r = run_experiment(spec_from_config(cfg, *kind, grid));
    write_report(r, cfg, dir.empty() ? cfg.output_dir : dir, out);
    return kOk;
}

inline int cmd_sweep(const Common& common, const std::string& param, const std::string& values,
                     const std::string& dir, std::optional<std::size_t> jobs, std::ostream& out) {
    RunConfig cfg = resolve_config(common, out);
    if (jobs) cfg.experiment.jobs = *jobs;
    get_config_value(cfg, param);  // rejects unknown keys up front
    ExperimentSpec spec = spec_from_config(cfg, ExperimentKind::sweep, parse_values(values));
    spec.grid_name = param;
    const ExperimentReport r = run_param_sweep(spec, [&](RunConfig& c, double v) {
        set_config_value(c, param, format_double(v));
        if (param == "write.b0") c.recall.eps_thr = 0.1 * v;
    });
    write_report(r, cfg, dir.empty() ? cfg.output_dir : dir, out);
    return kOk;
}

inline int cmd_evolve(const Common& common, const std::string& pattern_path, std::size_t steps,
                      std::size_t record_every, const std::string& out_path, std::ostream& out) {
    const RunConfig cfg = resolve_config(common, out);
    const DoubletField f = new_field(cfg.lattice, NormalRandom{}, cfg.seed);
    ExternalField b(cfg.lattice);
    if (!pattern_path.empty()) {
        const Pattern p = load_pattern(pattern_path);
        require_shape(p.bits, cfg.lattice, "pattern");
        b = ExternalField::from_pattern(p, cfg.write.b0);
    }
    const Propagator prop(cfg.lattice, cfg.dynamics);
    const auto [final_field, traj] = prop.evolve(f, b, steps, record_every);
    write_text_file(out_path, trajectory_csv(traj, provenance(cfg)));
    out << "final M=" << format_double(order_parameter(final_field).value)
        << " norm=" << format_double(total_norm(final_field)) << "\n";
    return kOk;
}

}  // namespace detail

// Command-line front end. Returns the process exit code.
inline int cli_main(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    CLI::App app{"qnet: doublet-field lattice memory simulator", "qnet"};
    app.require_subcommand(1);
    app.set_version_flag("--version", QNET_VERSION);

    detail::Common common;
    std::optional<std::size_t> jobs;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", common.config_path, "key = value configuration file");
        sub->add_option("--seed", common.seed, "overrides QNET_SEED and the config seed");
    };

    std::string pattern_path, store_path, cue_path, out_path, kind, dir, values, param;
    std::size_t steps = 1000, record_every = 10;

    auto* w = app.add_subcommand("write", "record a pattern into a store");
    add_common(w);
    w->add_option("--pattern", pattern_path, "pattern file")->required();
    w->add_option("--store", store_path, "store JSON (created if missing)")->required();

    auto* r = app.add_subcommand("recall", "recall a memory from a cue");
    add_common(r);
    r->add_option("--cue", cue_path, "cue pattern file")->required();
    r->add_option("--store", store_path, "store JSON")->required();
    r->add_option("--out", out_path, "result JSON");

    auto* e = app.add_subcommand("experiment", "run a seeded experiment");
    add_common(e);
    e->add_option("kind", kind, "overprinting | noise_sweep | threshold_sweep | size_sweep | gamma_sweep")->required();
    e->add_option("--out", dir, "output directory");
    e->add_option("--values", values, "comma-separated grid values");
    e->add_option("--jobs", jobs, "parallel seeds");

    auto* s = app.add_subcommand("sweep", "sweep one configuration key");
    add_common(s);
    s->add_option("--param", param, "dotted configuration key")->required();
    s->add_option("--values", values, "comma-separated values")->required();
    s->add_option("--out", dir, "output directory");
    s->add_option("--jobs", jobs, "parallel seeds");

    auto* ev = app.add_subcommand("evolve", "integrate the field and write its trajectory CSV");
    add_common(ev);
    ev->add_option("--pattern", pattern_path, "input pattern driving b_z = +-b0");
    ev->add_option("--steps", steps, "number of steps");
    ev->add_option("--record-every", record_every, "sampling stride");
    ev->add_option("--out", out_path, "trajectory CSV")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& ex) {
        return app.exit(ex, out, err);
    } catch (const CLI::CallForVersion& ex) {
        return app.exit(ex, out, err);
    } catch (const CLI::ParseError& ex) {
        app.exit(ex, out, err);
        err << app.help();
        return kInvalid;
    }

    try {
        if (w->parsed()) return detail::cmd_write(common, pattern_path, store_path, out);
        if (r->parsed()) return detail::cmd_recall(common, cue_path, store_path, out_path, out);
        if (e->parsed()) return detail::cmd_experiment(common, kind, dir, values, jobs, out);
        if (s->parsed()) return detail::cmd_sweep(common, param, values, dir, jobs, out);
        if (ev->parsed()) return detail::cmd_evolve(common, pattern_path, steps, record_every, out_path, out);
    } catch (const BelowThreshold& ex) {
        err << "error: " << ex.what() << "\n";
        return kBelowThreshold;
    } catch (const Ambiguous& ex) {
        err << "error: " << ex.what() << "\n";
        return kAmbiguous;
    } catch (const ValidationError& ex) {
        err << "error: " << ex.what() << "\n";
        return kInvalid;
    } catch (const UnknownKey& ex) {
        err << "error: " << ex.what() << "\n";
        return kInvalid;
    } catch (const ParseError& ex) {
        err << "error: " << ex.what() << "\n";
        return kInvalid;
    } catch (const ShapeError& ex) {
        err << "error: " << ex.what() << "\n";
        return kInvalid;
    } catch (const BadHeader& ex) {
        err << "error: " << ex.what() << "\n";
        return kInvalid;
    } catch (const BadDimensions& ex) {
        err << "error: " << ex.what() << "\n";
        return kInvalid;
    } catch (const BadCharacter& ex) {
        err << "error: " << ex.what() << "\n";
        return kInvalid;
    } catch (const EmptyStore& ex) {
        err << "error: " << ex.what() << "\n";
        return kInvalid;
    } catch (const std::exception& ex) {
        err << "error: " << ex.what() << "\n";
        return kFailure;
    }
    return kInvalid;
}

}  // namespace qnet::cli
