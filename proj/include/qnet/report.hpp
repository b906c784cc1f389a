#pragma once

#include <string>

#include <json.hpp>

#include "dynamics.hpp"
#include "experiments.hpp"
#include "format.hpp"
#include "store_json.hpp"

namespace qnet {

// Report CSV: one row per seed x grid point x memory, preceded by a single
// '#' provenance comment line.
inline constexpr const char* kReportColumns =
    "kind,seed,grid_param,grid_value,memory_index,selected,overlap,M_code,success,wall_ms";

inline std::string provenance_comment(const Provenance& p) {
    return "# qnet " + p.tool_version + " config_hash=" + p.config_hash + " seed=" + std::to_string(p.seed) + "\n";
}

inline std::string report_csv(const ExperimentReport& r, const Provenance& prov) {
    std::string out = provenance_comment(prov);
    out += kReportColumns;
    out += '\n';
    const std::string kind = to_string(r.spec.kind);
    for (const auto& rec : r.records) {
        for (const auto& o : rec.outcomes) {
            out += kind + ',' + std::to_string(rec.seed) + ',' + r.spec.grid_name + ',' + format_double(rec.grid_value) +
                   ',' + std::to_string(o.memory_index) + ',' + std::to_string(o.selected) + ',' +
                   format_double(o.overlap) + ',' + format_double(o.code) + ',' + (o.success ? "1" : "0") + ',' +
                   format_double(rec.wall_ms) + '\n';
        }
    }
    return out;
}

inline json report_summary_json(const ExperimentReport& r, const Provenance& prov) {
    json j;
    j["provenance"] = to_json(prov);
    j["kind"] = to_string(r.spec.kind);
    j["k_patterns"] = r.spec.k_patterns;
    j["seeds"] = r.spec.seeds;
    j["flip_fraction"] = r.spec.flip_fraction;
    j["grid_param"] = r.spec.grid_name;
    j["grid_values"] = r.spec.grid_values;
    j["config"] = echo_config(r.spec.config);
    json summary = json::array();
    for (const auto& s : r.summary)
        summary.push_back({{"grid_value", s.grid_value},
                           {"runs", s.runs},
                           {"accuracy", s.accuracy},
                           {"first_memory_rate", s.first_memory_rate},
                           {"crosstalk_mean_abs", s.crosstalk_mean_abs},
                           {"persistence_rate", s.persistence_rate},
                           {"fidelity_mean", s.fidelity_mean}});
    j["summary"] = std::move(summary);
    json audit = json::array();
    for (const auto& a : r.audit) audit.push_back({{"seed", a.seed}, {"writes", a.writes}, {"recalls", a.recalls}});
    j["audit"] = std::move(audit);
    j["threshold"] = r.threshold ? json(*r.threshold) : json(nullptr);
    j["persistence_onset_gamma"] = r.persistence_onset_gamma ? json(*r.persistence_onset_gamma) : json(nullptr);
    json runs = json::array();
    for (const auto& rec : r.records)
        runs.push_back({{"seed", rec.seed},
                        {"grid_value", rec.grid_value},
                        {"accuracy", rec.accuracy},
                        {"first_memory_success", rec.first_memory_success},
                        {"crosstalk", rec.crosstalk},
                        {"crosstalk_mean_abs", rec.crosstalk_mean_abs},
                        {"persistence_rate", rec.persistence_rate},
                        {"fidelity_mean", rec.fidelity_mean},
                        {"m_codes", rec.m_codes},
                        {"wall_ms", rec.wall_ms}});
    j["runs"] = std::move(runs);
    return j;
}

// Trajectory CSV columns: t, M, norm, mx, my, mz.
inline std::string trajectory_csv(const Trajectory& t, const Provenance& prov) {
    std::string out = provenance_comment(prov);
    out += "t,M,norm,mx,my,mz\n";
    for (std::size_t i = 0; i < t.size(); ++i) {
        out += format_double(t.times[i]) + ',' + format_double(t.m_values[i].value) + ',' + format_double(t.norms[i]) +
               ',' + format_double(t.net_mags[i].mx) + ',' + format_double(t.net_mags[i].my) + ',' +
               format_double(t.net_mags[i].mz) + '\n';
    }
    return out;
}

inline json trajectory_json(const Trajectory& t) {
    json rows = json::array();
    for (std::size_t i = 0; i < t.size(); ++i)
        rows.push_back({{"t", t.times[i]},
                        {"M", t.m_values[i].value},
                        {"norm", t.norms[i]},
                        {"mx", t.net_mags[i].mx},
                        {"my", t.net_mags[i].my},
                        {"mz", t.net_mags[i].mz}});
    return rows;
}

}  // namespace qnet
