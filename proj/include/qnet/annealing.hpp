#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "dynamics.hpp"
#include "errors.hpp"
#include "field.hpp"
#include "lattice.hpp"
#include "random.hpp"

namespace qnet {

// Heat-bath acceptance: probability that a unit occupies the level that
// lies e above the other one.
inline double fermi(double e, double t) {
    if (!(t > 0.0)) throw InvalidTemperature("temperature must be > 0, got " + std::to_string(t));
    const double x = e / t;
    if (x > 700.0) return 0.0;
    if (x < -700.0) return 1.0;
    return 1.0 / (1.0 + std::exp(x));
}

struct AnnealSchedule {
    double t0 = 2.0;
    double alpha = 0.9;
    double t_min = 0.01;
    std::size_t sweeps_per_temp = 5;

    void validate() const {
        if (!(t0 > 0.0)) throw ValidationError("anneal.t0", "must be > 0");
        if (!(alpha > 0.0 && alpha < 1.0)) throw ValidationError("anneal.alpha", "must lie in (0,1)");
        if (!(t_min > 0.0)) throw ValidationError("anneal.t_min", "must be > 0");
        if (!(t_min < t0)) throw ValidationError("anneal.t_min", "must be < anneal.t0");
        if (sweeps_per_temp < 1) throw ValidationError("anneal.sweeps_per_temp", "must be >= 1");
    }

    std::size_t rungs() const {
        return static_cast<std::size_t>(std::ceil(std::log(t_min / t0) / std::log(alpha)));
    }

    double temperature(std::size_t rung) const {
        return std::max(t0 * std::pow(alpha, static_cast<double>(rung)), t_min);
    }
};

// Nonnegative couplings on the distinct nearest-neighbour pairs.
class BondWeights {
public:
    struct Link {
        std::size_t site;
        std::size_t bond;
    };

    BondWeights() = default;
    explicit BondWeights(const LatticeConfig& cfg, double fill = 0.0)
        : pairs_(neighbor_pairs(cfg)), weights_(pairs_.size(), fill), links_(cfg.sites()) {
        for (std::size_t k = 0; k < pairs_.size(); ++k) {
            links_[pairs_[k].first].push_back({pairs_[k].second, k});
            links_[pairs_[k].second].push_back({pairs_[k].first, k});
        }
    }

    std::size_t bonds() const noexcept { return pairs_.size(); }
    std::pair<std::size_t, std::size_t> pair(std::size_t k) const { return pairs_[k]; }
    double& operator[](std::size_t k) { return weights_[k]; }
    double operator[](std::size_t k) const { return weights_[k]; }
    const std::vector<Link>& links(std::size_t site) const { return links_[site]; }
    const std::vector<double>& values() const noexcept { return weights_; }

    // Weight of the unordered pair {a, b}; non-neighbours have none.
    double weight(std::size_t a, std::size_t b) const {
        for (const auto& l : links_.at(a))
            if (l.site == b) return weights_[l.bond];
        throw IndexError("sites " + std::to_string(a) + " and " + std::to_string(b) +
                         " are not nearest neighbours");
    }

    void set(std::size_t a, std::size_t b, double w) {
        for (const auto& l : links_.at(a))
            if (l.site == b) {
                weights_[l.bond] = w;
                return;
            }
        throw IndexError("sites " + std::to_string(a) + " and " + std::to_string(b) +
                         " are not nearest neighbours");
    }

    friend bool operator==(const BondWeights& a, const BondWeights& b) {
        return a.pairs_ == b.pairs_ && a.weights_ == b.weights_;
    }

private:
    std::vector<std::pair<std::size_t, std::size_t>> pairs_;
    std::vector<double> weights_;
    std::vector<std::vector<Link>> links_;
};

// Per-site scalar multiplying the kinetic coupling: summed incident weight
// over the maximal coordination number (4 on the square lattice).
inline Grid<double> connectivity_potential(const BondWeights& w, const LatticeConfig& cfg) {
    Grid<double> v(cfg.size);
    for (std::size_t i = 0; i < cfg.sites(); ++i) {
        double sum = 0.0;
        for (const auto& l : w.links(i)) sum += w[l.bond];
        v[i] = sum / 4.0;
    }
    return v;
}

// Net-wide mean of the per-site mean connection strength.
inline double weiss_from_weights(const BondWeights& w, const LatticeConfig& cfg) {
    double total = 0.0;
    for (std::size_t i = 0; i < cfg.sites(); ++i) {
        const auto& ls = w.links(i);
        if (ls.empty()) continue;
        double sum = 0.0;
        for (const auto& l : ls) sum += w[l.bond];
        total += sum / static_cast<double>(ls.size());
    }
    return total / static_cast<double>(cfg.sites());
}

// Discrete unit layer: s = +1 is u/on, s = -1 is d/off.
struct SpinState {
    LatticeConfig config;
    std::vector<int> spins;
    BondWeights weights;

    SpinState() = default;
    explicit SpinState(const LatticeConfig& cfg, int fill = 1)
        : config(cfg), spins(cfg.sites(), fill), weights(cfg) {}

    static SpinState from_pattern(const Pattern& p, BondWeights w) {
        SpinState s;
        s.config = p.config;
        s.spins.resize(p.sites());
        for (std::size_t i = 0; i < p.sites(); ++i) s.spins[i] = p.spin(i);
        s.weights = std::move(w);
        return s;
    }

    static SpinState random(const LatticeConfig& cfg, BondWeights w, Rng& rng) {
        SpinState s(cfg);
        for (auto& v : s.spins) v = rng.coin() ? 1 : -1;
        s.weights = std::move(w);
        return s;
    }

    Pattern to_pattern() const {
        Pattern p(config);
        for (std::size_t i = 0; i < spins.size(); ++i) p.bits[i] = spins[i] > 0 ? 1 : 0;
        return p;
    }

    double mean() const {
        long sum = 0;
        for (int s : spins) sum += s;
        return static_cast<double>(sum) / static_cast<double>(spins.size());
    }
};

namespace detail {

inline double coupling_sum(const SpinState& st, std::size_t i) {
    double sum = 0.0;
    for (const auto& l : st.weights.links(i)) sum += st.weights[l.bond] * st.spins[l.site];
    return sum;
}

}  // namespace detail

// h = b_z + gamma * mean(s) + sum_j w_ij s_j
inline double local_field(const SpinState& st, std::size_t i, double b_z, double gamma) {
    return b_z + gamma * st.mean() + detail::coupling_sum(st, i);
}

// Energy increase of flipping the site: 2 s h.
inline double local_gap(const SpinState& st, Site site, double b_z, double gamma) {
    st.config.check(site);
    const std::size_t i = st.config.index(site);
    return 2.0 * st.spins[i] * local_field(st, i, b_z, gamma);
}

// E(s) = -sum_i s_i (b_i + h_i) / 2
//      = -sum_i b_i s_i - sum_bonds w s s - gamma (sum s)^2 / (2N)
inline double energy(const SpinState& st, const Grid<double>& b_z, double gamma) {
    const double n = static_cast<double>(st.spins.size());
    double sum_s = 0.0, field = 0.0, bonds = 0.0;
    for (std::size_t i = 0; i < st.spins.size(); ++i) {
        sum_s += st.spins[i];
        field += b_z[i] * st.spins[i];
    }
    for (std::size_t k = 0; k < st.weights.bonds(); ++k) {
        const auto [a, b] = st.weights.pair(k);
        bonds += st.weights[k] * st.spins[a] * st.spins[b];
    }
    return -field - bonds - gamma * sum_s * sum_s / (2.0 * n);
}

enum class UpdateOrder { row_major, random };

// One heat-bath pass: each visited site becomes +1 with probability
// 1 / (1 + exp(-2h/t)) = fermi(-2h, t), given the current neighbours.
inline void glauber_sweep_inplace(SpinState& st, const Grid<double>& b_z, double gamma, double t, Rng& rng,
                                  UpdateOrder order = UpdateOrder::row_major) {
    if (!(t > 0.0)) throw InvalidTemperature("temperature must be > 0, got " + std::to_string(t));
    require_shape(b_z, st.config, "glauber_sweep");
    const std::size_t n = st.spins.size();
    const double inv_n = 1.0 / static_cast<double>(n);
    long sum = 0;
    for (int s : st.spins) sum += s;
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t i = order == UpdateOrder::row_major ? k : rng.index(n);
        const double h = b_z[i] + gamma * static_cast<double>(sum) * inv_n + detail::coupling_sum(st, i);
        const int next = rng.uniform() < fermi(-2.0 * h, t) ? 1 : -1;
        sum += next - st.spins[i];
        st.spins[i] = next;
    }
}

inline SpinState glauber_sweep(SpinState st, const ExternalField& b_ext, double gamma, double t, Rng& rng,
                               UpdateOrder order = UpdateOrder::row_major) {
    glauber_sweep_inplace(st, b_ext.bz, gamma, t, rng, order);
    return st;
}

struct AnnealResult {
    SpinState state;
    std::vector<double> energy_trace;  // mean energy per rung
};

// Geometric annealing. The optional hook runs after each rung (rung index,
// temperature, state) and may modify the drive for the next rung; the
// hybrid write loop uses it to interleave field dynamics.
using RungHook = std::function<void(std::size_t, double, SpinState&, Grid<double>&)>;

inline AnnealResult anneal(SpinState st, Grid<double> b_z, double gamma, const AnnealSchedule& schedule,
                           Rng& rng, const RungHook& hook = {}, UpdateOrder order = UpdateOrder::row_major) {
    schedule.validate();
    AnnealResult out;
    const std::size_t rungs = schedule.rungs();
    out.energy_trace.reserve(rungs);
    for (std::size_t r = 0; r < rungs; ++r) {
        const double t = schedule.temperature(r);
        double e_sum = 0.0;
        for (std::size_t s = 0; s < schedule.sweeps_per_temp; ++s) {
            glauber_sweep_inplace(st, b_z, gamma, t, rng, order);
            e_sum += energy(st, b_z, gamma);
        }
        out.energy_trace.push_back(e_sum / static_cast<double>(schedule.sweeps_per_temp));
        if (hook) hook(r, t, st, b_z);
    }
    out.state = std::move(st);
    return out;
}

inline AnnealResult anneal(SpinState st, const ExternalField& b_ext, double gamma,
                           const AnnealSchedule& schedule, Rng& rng) {
    return anneal(std::move(st), b_ext.bz, gamma, schedule, rng);
}

}  // namespace qnet
