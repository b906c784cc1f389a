#pragma once

#include <functional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "annealing.hpp"
#include "dynamics.hpp"
#include "errors.hpp"
#include "format.hpp"
#include "lattice.hpp"
#include "memory.hpp"
#include "pattern_io.hpp"

namespace qnet {

struct ExperimentSettings {
    std::size_t k_patterns = 5;
    std::size_t n_seeds = 20;  // seeds run from `seed` upward
    double flip_fraction = 0.1;
    std::size_t jobs = 1;
};

struct RunConfig {
    LatticeConfig lattice;
    DynamicsParams dynamics;
    AnnealSchedule anneal;
    WriteParams write;
    RecallParams recall;
    ExperimentSettings experiment;
    std::uint64_t seed = 1;
    std::string output_dir = ".";

    MemoryStore make_store() const { return MemoryStore(lattice, dynamics, anneal, write, recall); }
};

namespace detail {

struct ConfigKey {
    std::string_view name;
    std::function<void(RunConfig&, std::string_view)> set;
    std::function<std::string(const RunConfig&)> get;
};

inline double need_double(std::string_view key, std::string_view v) {
    auto d = parse_double(v);
    if (!d) throw ValidationError(std::string(key), "expected a number, got '" + std::string(v) + "'");
    return *d;
}

inline std::uint64_t need_unsigned(std::string_view key, std::string_view v) {
    auto d = parse_unsigned(v);
    if (!d) throw ValidationError(std::string(key), "expected a nonnegative integer, got '" + std::string(v) + "'");
    return *d;
}

#define QNET_REAL_KEY(NAME, FIELD)                                                                   \
    ConfigKey {                                                                                      \
        NAME, [](RunConfig& c, std::string_view v) { c.FIELD = need_double(NAME, v); },             \
            [](const RunConfig& c) { return format_double(c.FIELD); }                               \
    }
#define QNET_COUNT_KEY(NAME, FIELD)                                                                  \
    ConfigKey {                                                                                      \
        NAME, [](RunConfig& c, std::string_view v) { c.FIELD = need_unsigned(NAME, v); },           \
            [](const RunConfig& c) { return std::to_string(c.FIELD); }                              \
    }

inline const std::vector<ConfigKey>& config_keys() {
    static const std::vector<ConfigKey> keys = {
        QNET_COUNT_KEY("lattice.L", lattice.size),
        ConfigKey{"lattice.boundary",
                  [](RunConfig& c, std::string_view v) { c.lattice.boundary = boundary_from_string(std::string(v)); },
                  [](const RunConfig& c) { return std::string(to_string(c.lattice.boundary)); }},
        QNET_REAL_KEY("lattice.spacing", lattice.spacing),
        QNET_REAL_KEY("dynamics.dt", dynamics.dt),
        QNET_REAL_KEY("dynamics.kinetic_coeff", dynamics.kinetic_coeff),
        QNET_REAL_KEY("dynamics.mu", dynamics.mu),
        QNET_REAL_KEY("dynamics.gamma", dynamics.gamma),
        QNET_COUNT_KEY("dynamics.n_steps", dynamics.n_steps),
        QNET_REAL_KEY("anneal.t0", anneal.t0),
        QNET_REAL_KEY("anneal.alpha", anneal.alpha),
        QNET_REAL_KEY("anneal.t_min", anneal.t_min),
        QNET_COUNT_KEY("anneal.sweeps_per_temp", anneal.sweeps_per_temp),
        QNET_REAL_KEY("write.b0", write.b0),
        QNET_REAL_KEY("write.eta", write.eta),
        QNET_REAL_KEY("write.w_max", write.w_max),
        QNET_REAL_KEY("write.field_coupling", write.field_coupling),
        QNET_REAL_KEY("write.persistence", write.persistence),
        QNET_REAL_KEY("recall.cue_strength", recall.cue_strength),
        QNET_REAL_KEY("recall.eps_thr", recall.eps_thr),
        QNET_REAL_KEY("recall.ambiguity_margin", recall.ambiguity_margin),
        QNET_COUNT_KEY("experiment.k_patterns", experiment.k_patterns),
        QNET_COUNT_KEY("experiment.n_seeds", experiment.n_seeds),
        QNET_REAL_KEY("experiment.flip_fraction", experiment.flip_fraction),
        QNET_COUNT_KEY("experiment.jobs", experiment.jobs),
        QNET_COUNT_KEY("seed", seed),
        ConfigKey{"output.dir", [](RunConfig& c, std::string_view v) { c.output_dir = std::string(v); },
                  [](const RunConfig& c) { return c.output_dir; }},
    };
    return keys;
}

#undef QNET_REAL_KEY
#undef QNET_COUNT_KEY

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

}  // namespace detail

inline void validate(const RunConfig& c) {
    c.lattice.validate();
    c.dynamics.validate();
    if (c.dynamics.n_steps < 1) throw ValidationError("dynamics.n_steps", "must be >= 1");
    c.anneal.validate();
    c.write.validate();
    c.recall.validate();
    const double limit = stability_limit(c.dynamics, c.write.b0);
    if (c.dynamics.dt > limit)
        throw ValidationError("dynamics.dt", "must be <= 0.1/(4 kinetic_coeff + |mu| (b0 + gamma)) = " +
                                                 format_double(limit));
    if (c.experiment.k_patterns < 1) throw ValidationError("experiment.k_patterns", "must be >= 1");
    if (c.experiment.n_seeds < 1) throw ValidationError("experiment.n_seeds", "must be >= 1");
    if (!(c.experiment.flip_fraction >= 0.0 && c.experiment.flip_fraction <= 1.0))
        throw ValidationError("experiment.flip_fraction", "must lie in [0,1]");
    if (c.experiment.jobs < 1) throw ValidationError("experiment.jobs", "must be >= 1");
}

// Sets one dotted key from its textual value (no cross-field validation).
inline void set_config_value(RunConfig& c, std::string_view key, std::string_view value) {
    for (const auto& k : detail::config_keys()) {
        if (k.name == key) {
            k.set(c, value);
            return;
        }
    }
    throw UnknownKey(std::string(key));
}

inline std::string get_config_value(const RunConfig& c, std::string_view key) {
    for (const auto& k : detail::config_keys())
        if (k.name == key) return k.get(c);
    throw UnknownKey(std::string(key));
}

// Flat "key = value" document with dotted section keys and '#' comments.
// Omitted keys keep their defaults; recall.eps_thr defaults to 0.1 * write.b0.
inline RunConfig parse_config(std::string_view text) {
    RunConfig c;
    std::set<std::string, std::less<>> seen;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t end = std::min(text.find('\n', pos), text.size());
        std::string_view line = text.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = detail::trim(line);
        if (line.empty()) {
            if (end == text.size()) break;
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) throw ParseError(line_no, "expected 'key = value'");
        const std::string_view key = detail::trim(line.substr(0, eq));
        const std::string_view value = detail::trim(line.substr(eq + 1));
        if (key.empty()) throw ParseError(line_no, "missing key");
        if (value.empty()) throw ParseError(line_no, "missing value for '" + std::string(key) + "'");
        if (!seen.insert(std::string(key)).second)
            throw ParseError(line_no, "duplicate key '" + std::string(key) + "'");
        set_config_value(c, key, value);
        if (end == text.size()) break;
    }
    if (!seen.contains("recall.eps_thr")) c.recall.eps_thr = 0.1 * c.write.b0;
    validate(c);
    return c;
}

inline RunConfig load_config(const std::string& path) { return parse_config(read_text_file(path)); }

// Effective configuration, every key, in canonical order.
inline std::string echo_config(const RunConfig& c) {
    std::string out;
    for (const auto& k : detail::config_keys()) {
        out += k.name;
        out += " = ";
        out += k.get(c);
        out += '\n';
    }
    return out;
}

inline std::string config_hash(const RunConfig& c) { return fnv1a_hex(echo_config(c)); }

}  // namespace qnet
