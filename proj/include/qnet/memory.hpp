#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "annealing.hpp"
#include "dynamics.hpp"
#include "errors.hpp"
#include "field.hpp"
#include "random.hpp"

namespace qnet {

struct WriteParams {
    double b0 = 1.0;              // input field amplitude
    double eta = 0.01;            // Hebbian rate
    double w_max = 1.0;           // weight ceiling
    double field_coupling = 0.5;  // drive on a unit from its own doublet asymmetry
    double persistence = 0.99;    // overlap required once the input is removed

    void validate() const {
        if (!(b0 > 0.0)) throw ValidationError("write.b0", "must be > 0");
        if (!(eta >= 0.0)) throw ValidationError("write.eta", "must be >= 0");
        if (!(w_max > 0.0)) throw ValidationError("write.w_max", "must be > 0");
        if (!(field_coupling >= 0.0)) throw ValidationError("write.field_coupling", "must be >= 0");
        if (!(persistence >= -1.0 && persistence <= 1.0))
            throw ValidationError("write.persistence", "must lie in [-1,1]");
    }
};

struct RecallParams {
    double cue_strength = 1.0;
    double eps_thr = 0.1;  // energy threshold per site; default is 0.1 b0
    double ambiguity_margin = 0.05;

    void validate() const {
        if (!(cue_strength >= 0.0)) throw ValidationError("recall.cue_strength", "must be >= 0");
        if (!(eps_thr >= 0.0)) throw ValidationError("recall.eps_thr", "must be >= 0");
        if (!(ambiguity_margin >= 0.0 && ambiguity_margin < 1.0))
            throw ValidationError("recall.ambiguity_margin", "must lie in [0,1)");
    }
};

struct MemoryRecord {
    OrderParameter code;  // the memory's code number M
    Pattern snapshot;
    Pattern mirror;  // replication copy used as the read probe
    std::size_t written_at = 0;

    friend bool operator==(const MemoryRecord& a, const MemoryRecord& b) {
        return a.code == b.code && a.snapshot == b.snapshot && a.mirror == b.mirror &&
               a.written_at == b.written_at;
    }
};

struct MemoryStore {
    LatticeConfig lattice;
    DynamicsParams dynamics;
    AnnealSchedule schedule;
    WriteParams write;
    RecallParams recall;
    BondWeights weights;
    std::vector<MemoryRecord> records;

    MemoryStore() = default;
    MemoryStore(const LatticeConfig& cfg, const DynamicsParams& dyn, const AnnealSchedule& sched,
                const WriteParams& wp, const RecallParams& rp)
        : lattice(cfg), dynamics(dyn), schedule(sched), write(wp), recall(rp), weights(cfg) {}

    std::size_t size() const noexcept { return records.size(); }
    bool empty() const noexcept { return records.empty(); }
};

// q = (1/N) sum_i s_i (2 mirror_i - 1)
inline double mirror_overlap(const SpinState& st, const MemoryRecord& rec) {
    if (st.spins.size() != rec.mirror.sites() || st.config.size != rec.mirror.config.size)
        throw ShapeError("mirror_overlap: state and mirror differ in shape");
    long sum = 0;
    for (std::size_t i = 0; i < st.spins.size(); ++i) sum += st.spins[i] * rec.mirror.spin(i);
    return static_cast<double>(sum) / static_cast<double>(st.spins.size());
}

inline std::vector<std::vector<double>> crosstalk_matrix(const MemoryStore& store) {
    const std::size_t k = store.size();
    std::vector<std::vector<double>> c(k, std::vector<double>(k, 1.0));
    for (std::size_t a = 0; a < k; ++a)
        for (std::size_t b = a + 1; b < k; ++b)
            c[a][b] = c[b][a] = pattern_overlap(store.records[a].snapshot, store.records[b].snapshot);
    return c;
}

inline double mean_abs_offdiagonal(const std::vector<std::vector<double>>& c) {
    const std::size_t k = c.size();
    if (k < 2) return 0.0;
    double sum = 0.0;
    for (std::size_t a = 0; a < k; ++a)
        for (std::size_t b = 0; b < k; ++b)
            if (a != b) sum += std::abs(c[a][b]);
    return sum / static_cast<double>(k * (k - 1));
}

namespace detail {

// Normalised doublet asymmetry mz / rho of every unit, in [-1, 1].
inline Grid<double> activation(const DoubletField& f) {
    Grid<double> a(f.config().size);
    for (std::size_t i = 0; i < f.sites(); ++i) {
        const double rho = site_density(f, i);
        a[i] = rho > 0.0 ? site_magnetization(f, i).mz / rho : 0.0;
    }
    return a;
}

// Drive the unit layer sees: external b_z plus the field's activation.
inline Grid<double> drive(const ExternalField& b, const DoubletField& f, double coupling) {
    Grid<double> out = b.bz;
    if (coupling == 0.0) return out;
    const Grid<double> a = activation(f);
    for (std::size_t i = 0; i < out.count(); ++i) out[i] += coupling * a[i];
    return out;
}

// Moves every unit's doublet onto the pure level picked by its spin,
// keeping the site density and the phase of the surviving component.
inline void imprint(DoubletField& f, const SpinState& st) {
    for (std::size_t i = 0; i < f.sites(); ++i) {
        const double amp = std::sqrt(site_density(f, i));
        const cplx keep = st.spins[i] > 0 ? f.u(i) : f.d(i);
        const cplx phase = std::abs(keep) > 0.0 ? keep / std::abs(keep) : cplx(1.0);
        if (st.spins[i] > 0)
            f.set(i, amp * phase, 0.0);
        else
            f.set(i, 0.0, amp * phase);
    }
}

inline double spin_overlap(const SpinState& st, const Pattern& p) {
    long sum = 0;
    for (std::size_t i = 0; i < st.spins.size(); ++i) sum += st.spins[i] * p.spin(i);
    return static_cast<double>(sum) / static_cast<double>(st.spins.size());
}

}  // namespace detail

struct WriteOutcome {
    MemoryStore store;
    MemoryRecord record;
    DoubletField field;
    double fidelity = 0.0;     // overlap(snapshot, input pattern)
    double persistence = 0.0;  // overlap after the input was removed
};

// Records a pattern. The net is driven by b_z = +-b0 while the unit layer is
// annealed; after every rung the doublet field takes the units' levels and
// evolves for dynamics.n_steps under the input. The converged configuration
// becomes a new record, the Hebbian weights are updated, and the state must
// survive removal of the input. The input store is never modified.
inline WriteOutcome write(const MemoryStore& store, const Pattern& pattern, const DoubletField& field,
                          Rng& rng) {
    const LatticeConfig& cfg = store.lattice;
    require_shape(pattern.bits, cfg, "write pattern");
    if (!(field.config() == cfg)) throw ShapeError("write: field lattice differs from store");
    store.write.validate();
    store.schedule.validate();

    const double coupling = store.write.field_coupling;
    const ExternalField input = ExternalField::from_pattern(pattern, store.write.b0);
    const Propagator prop(cfg, store.dynamics, connectivity_potential(store.weights, cfg));

    DoubletField net = field;
    SpinState units = SpinState::from_pattern(binarize(net), store.weights);
    const RungHook interleave = [&](std::size_t, double, SpinState& st, Grid<double>& b_z) {
        detail::imprint(net, st);
        net = prop.evolve(std::move(net), input, store.dynamics.n_steps, store.dynamics.n_steps + 1).first;
        b_z = detail::drive(input, net, coupling);
    };
    anneal(std::move(units), detail::drive(input, net, coupling), store.dynamics.gamma, store.schedule, rng,
           interleave);

    WriteOutcome out{store, {}, {}, 0.0, 0.0};
    MemoryRecord rec;
    rec.snapshot = binarize(net);
    rec.mirror = rec.snapshot;
    rec.code = order_parameter(rec.snapshot);
    rec.written_at = store.records.size();
    out.fidelity = pattern_overlap(rec.snapshot, pattern);

    // Hebbian increment on the lattice bonds.
    BondWeights& w = out.store.weights;
    for (std::size_t k = 0; k < w.bonds(); ++k) {
        const auto [a, b] = w.pair(k);
        const double inc = store.write.eta * rec.snapshot.spin(a) * rec.snapshot.spin(b);
        w[k] = std::clamp(w[k] + inc, 0.0, store.write.w_max);
    }

    // Input off: free evolution, then a zero-input anneal rung at t_min.
    const ExternalField none(cfg);
    const Propagator free_prop(cfg, store.dynamics, connectivity_potential(w, cfg));
    net = free_prop.evolve(std::move(net), none, store.dynamics.n_steps, store.dynamics.n_steps + 1).first;
    SpinState after = SpinState::from_pattern(rec.snapshot, w);
    const Grid<double> hold = detail::drive(none, net, coupling);
    for (std::size_t s = 0; s < store.schedule.sweeps_per_temp; ++s)
        glauber_sweep_inplace(after, hold, store.dynamics.gamma, store.schedule.t_min, rng);
    out.persistence = detail::spin_overlap(after, rec.snapshot);
    if (out.persistence < store.write.persistence)
        throw PersistenceFailure("recorded state decays after input removal: overlap " +
                                 std::to_string(out.persistence) + " < " +
                                 std::to_string(store.write.persistence),
                                 out.fidelity, out.persistence);
    detail::imprint(net, after);

    out.store.records.push_back(rec);
    out.record = std::move(rec);
    out.field = std::move(net);
    return out;
}

struct RecallResult {
    std::size_t selected = 0;
    OrderParameter code;
    Pattern pattern;
    std::vector<double> overlaps;
    Trajectory trajectory;  // per annealing rung; time axis is the rung index
    SpinState state;        // annealed unit layer before condensation
    DoubletField field;     // net field after condensation into the selected memory
};

class AmbiguousRecall : public Ambiguous {
public:
    AmbiguousRecall(std::vector<double> overlaps, const std::string& what)
        : Ambiguous(what), overlaps_(std::move(overlaps)) {}
    const std::vector<double>& overlaps() const noexcept { return overlaps_; }

private:
    std::vector<double> overlaps_;
};

// Reads a memory. The cue must carry at least eps_thr energy per site.
// The unit layer starts in the normal state and is annealed under the
// scaled cue; every record's mirror then probes the annealed state and the
// clear winner is condensed into the net field.
inline RecallResult recall(const MemoryStore& store, const Pattern& cue, const RecallParams& params, Rng& rng) {
    if (store.empty()) throw EmptyStore("recall: store holds no memories");
    require_shape(cue.bits, store.lattice, "recall cue");
    params.validate();
    const double cue_energy = params.cue_strength * store.write.b0;
    if (!(cue_energy >= params.eps_thr))
        throw BelowThreshold("cue energy " + std::to_string(cue_energy) + " below threshold " +
                             std::to_string(params.eps_thr));

    const LatticeConfig& cfg = store.lattice;
    const ExternalField field_in = ExternalField::from_pattern(cue, cue_energy);
    RecallResult res;
    const double n = static_cast<double>(cfg.sites());
    const RungHook observe = [&](std::size_t rung, double, SpinState& st, Grid<double>&) {
        const OrderParameter m = order_parameter(st.to_pattern());
        res.trajectory.record(static_cast<double>(rung + 1), m, n, {0.0, 0.0, st.mean()});
    };
    SpinState start = SpinState::random(cfg, store.weights, rng);
    res.trajectory.record(0.0, order_parameter(start.to_pattern()), n, {0.0, 0.0, start.mean()});
    AnnealResult annealed =
        anneal(std::move(start), field_in.bz, store.dynamics.gamma, store.schedule, rng, observe);

    res.overlaps.reserve(store.size());
    for (const auto& rec : store.records) res.overlaps.push_back(mirror_overlap(annealed.state, rec));

    std::size_t best = 0;
    for (std::size_t k = 1; k < res.overlaps.size(); ++k)
        if (std::abs(res.overlaps[k]) > std::abs(res.overlaps[best])) best = k;
    double runner_up = 0.0;
    for (std::size_t k = 0; k < res.overlaps.size(); ++k)
        if (k != best) runner_up = std::max(runner_up, std::abs(res.overlaps[k]));
    const double lead = std::abs(res.overlaps[best]) - runner_up;
    if (lead < params.ambiguity_margin)
        throw AmbiguousRecall(res.overlaps, "no clear memory: lead " + std::to_string(lead) + " < margin " +
                                                std::to_string(params.ambiguity_margin));

    const MemoryRecord& rec = store.records[best];
    res.selected = best;
    res.pattern = rec.snapshot;
    res.code = order_parameter(res.pattern);
    res.state = std::move(annealed.state);
    res.field = new_field(cfg, res.pattern);
    return res;
}

// A running net: the store plus the current doublet field.
class MemoryNet {
public:
    MemoryNet(MemoryStore store, std::uint64_t seed)
        : store_(std::move(store)), field_(new_field(store_.lattice, NormalRandom{}, seed)) {}
    MemoryNet(MemoryStore store, DoubletField field) : store_(std::move(store)), field_(std::move(field)) {}

    const MemoryStore& store() const noexcept { return store_; }
    const DoubletField& field() const noexcept { return field_; }
    std::size_t writes() const noexcept { return writes_; }
    std::size_t recalls() const noexcept { return recalls_; }

    WriteOutcome write(const Pattern& pattern, Rng& rng) {
        ++writes_;
        WriteOutcome out = qnet::write(store_, pattern, field_, rng);
        store_ = out.store;
        field_ = out.field;
        return out;
    }

    RecallResult recall(const Pattern& cue, const RecallParams& params, Rng& rng) {
        ++recalls_;
        RecallResult res = qnet::recall(store_, cue, params, rng);
        field_ = res.field;
        return res;
    }

private:
    MemoryStore store_;
    DoubletField field_;
    std::size_t writes_ = 0;
    std::size_t recalls_ = 0;
};

}  // namespace qnet
