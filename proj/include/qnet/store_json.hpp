#pragma once

#include <string>

#include <json.hpp>

#include "annealing.hpp"
#include "errors.hpp"
#include "memory.hpp"
#include "pattern_io.hpp"

namespace qnet {

using json = nlohmann::json;

struct Provenance {
    std::string tool_version;
    std::string config_hash;
    std::uint64_t seed = 0;
};

inline json to_json(const Provenance& p) {
    return {{"tool_version", p.tool_version}, {"config_hash", p.config_hash}, {"seed", p.seed}};
}

inline json to_json(const OrderParameter& m) { return {{"M", m.value}, {"n_u", m.n_u}, {"n_d", m.n_d}}; }

namespace detail {

inline json site_json(const LatticeConfig& cfg, std::size_t i) {
    const Site s = cfg.site(i);
    return json::array({s.row, s.col});
}

inline std::size_t site_from_json(const LatticeConfig& cfg, const json& j) {
    if (!j.is_array() || j.size() != 2) throw ValidationError("weights", "site must be [row, col]");
    const Site s{j[0].get<std::size_t>(), j[1].get<std::size_t>()};
    cfg.check(s);
    return cfg.index(s);
}

inline Pattern pattern_from_json(const json& rows, const LatticeConfig& cfg, const char* what) {
    Pattern p = pattern_from_rows(rows.get<std::vector<std::string>>());
    if (p.config.size != cfg.size) throw ShapeError(std::string(what) + " does not match the lattice");
    p.config = cfg;
    return p;
}

}  // namespace detail

// {lattice, params, weights (pair-indexed), records[...]}; doubles are
// written in shortest round-trip form so a load/save cycle is bit-exact.
inline json store_to_json(const MemoryStore& s, const Provenance* prov = nullptr) {
    json j;
    j["format"] = "qnet-store";
    j["version"] = 1;
    if (prov) j["provenance"] = to_json(*prov);
    j["lattice"] = {{"L", s.lattice.size}, {"boundary", to_string(s.lattice.boundary)}, {"spacing", s.lattice.spacing}};
    j["params"] = {
        {"dynamics",
         {{"dt", s.dynamics.dt},
          {"kinetic_coeff", s.dynamics.kinetic_coeff},
          {"mu", s.dynamics.mu},
          {"gamma", s.dynamics.gamma},
          {"n_steps", s.dynamics.n_steps}}},
        {"anneal",
         {{"t0", s.schedule.t0},
          {"alpha", s.schedule.alpha},
          {"t_min", s.schedule.t_min},
          {"sweeps_per_temp", s.schedule.sweeps_per_temp}}},
        {"write",
         {{"b0", s.write.b0},
          {"eta", s.write.eta},
          {"w_max", s.write.w_max},
          {"field_coupling", s.write.field_coupling},
          {"persistence", s.write.persistence}}},
        {"recall",
         {{"cue_strength", s.recall.cue_strength},
          {"eps_thr", s.recall.eps_thr},
          {"ambiguity_margin", s.recall.ambiguity_margin}}},
    };
    json weights = json::array();
    for (std::size_t k = 0; k < s.weights.bonds(); ++k) {
        const auto [a, b] = s.weights.pair(k);
        weights.push_back({{"a", detail::site_json(s.lattice, a)}, {"b", detail::site_json(s.lattice, b)}, {"w", s.weights[k]}});
    }
    j["weights"] = std::move(weights);
    json records = json::array();
    for (const auto& r : s.records)
        records.push_back({{"code", to_json(r.code)},
                           {"snapshot", pattern_rows(r.snapshot)},
                           {"mirror", pattern_rows(r.mirror)},
                           {"written_at", r.written_at}});
    j["records"] = std::move(records);
    return j;
}

inline MemoryStore store_from_json(const json& j) {
    try {
        if (j.value("format", "") != "qnet-store") throw ValidationError("format", "not a qnet store document");
        LatticeConfig cfg;
        cfg.size = j.at("lattice").at("L").get<std::size_t>();
        cfg.boundary = boundary_from_string(j.at("lattice").at("boundary").get<std::string>());
        cfg.spacing = j.at("lattice").at("spacing").get<double>();
        cfg.validate();

        const json& p = j.at("params");
        DynamicsParams dyn;
        dyn.dt = p.at("dynamics").at("dt").get<double>();
        dyn.kinetic_coeff = p.at("dynamics").at("kinetic_coeff").get<double>();
        dyn.mu = p.at("dynamics").at("mu").get<double>();
        dyn.gamma = p.at("dynamics").at("gamma").get<double>();
        dyn.n_steps = p.at("dynamics").at("n_steps").get<std::size_t>();
        AnnealSchedule sched;
        sched.t0 = p.at("anneal").at("t0").get<double>();
        sched.alpha = p.at("anneal").at("alpha").get<double>();
        sched.t_min = p.at("anneal").at("t_min").get<double>();
        sched.sweeps_per_temp = p.at("anneal").at("sweeps_per_temp").get<std::size_t>();
        WriteParams wp;
        wp.b0 = p.at("write").at("b0").get<double>();
        wp.eta = p.at("write").at("eta").get<double>();
        wp.w_max = p.at("write").at("w_max").get<double>();
        wp.field_coupling = p.at("write").at("field_coupling").get<double>();
        wp.persistence = p.at("write").at("persistence").get<double>();
        RecallParams rp;
        rp.cue_strength = p.at("recall").at("cue_strength").get<double>();
        rp.eps_thr = p.at("recall").at("eps_thr").get<double>();
        rp.ambiguity_margin = p.at("recall").at("ambiguity_margin").get<double>();
        dyn.validate();
        sched.validate();
        wp.validate();
        rp.validate();

        MemoryStore s(cfg, dyn, sched, wp, rp);
        for (const auto& w : j.at("weights")) {
            const std::size_t a = detail::site_from_json(cfg, w.at("a"));
            const std::size_t b = detail::site_from_json(cfg, w.at("b"));
            s.weights.set(a, b, w.at("w").get<double>());
        }
        for (const auto& r : j.at("records")) {
            MemoryRecord rec;
            rec.snapshot = detail::pattern_from_json(r.at("snapshot"), cfg, "snapshot");
            rec.mirror = detail::pattern_from_json(r.at("mirror"), cfg, "mirror");
            rec.written_at = r.at("written_at").get<std::size_t>();
            rec.code = order_parameter(rec.snapshot);
            const json& code = r.at("code");
            if (code.at("M").get<double>() != rec.code.value || code.at("n_u").get<std::size_t>() != rec.code.n_u ||
                code.at("n_d").get<std::size_t>() != rec.code.n_d)
                throw ValidationError("records.code", "does not match the snapshot's order parameter");
            if (rec.written_at != s.records.size())
                throw ValidationError("records.written_at", "indices must be dense from 0");
            s.records.push_back(std::move(rec));
        }
        return s;
    } catch (const json::exception& e) {
        throw ValidationError("store", e.what());
    }
}

inline void save_store(const std::string& path, const MemoryStore& s, const Provenance* prov = nullptr) {
    write_text_file(path, store_to_json(s, prov).dump(2) + "\n");
}

inline MemoryStore load_store(const std::string& path) {
    json j;
    try {
        j = json::parse(read_text_file(path));
    } catch (const json::parse_error& e) {
        throw ParseError(0, std::string("store JSON: ") + e.what());
    }
    return store_from_json(j);
}

}  // namespace qnet
