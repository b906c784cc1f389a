#pragma once

#include <cmath>
#include <optional>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "field.hpp"
#include "lattice.hpp"

namespace qnet {

struct DynamicsParams {
    double dt = 0.01;
    double kinetic_coeff = 1.0;  // hbar^2 / 2m with hbar = 1, m = 1/2
    double mu = 1.0;
    double gamma = 0.2;  // Weiss constant
    std::size_t n_steps = 10;  // steps per evolve call

    void validate() const {
        if (!(dt > 0.0)) throw ValidationError("dynamics.dt", "must be > 0");
        if (!(kinetic_coeff > 0.0)) throw ValidationError("dynamics.kinetic_coeff", "must be > 0");
        if (!std::isfinite(mu)) throw ValidationError("dynamics.mu", "must be finite");
        if (!(gamma >= 0.0) || !std::isfinite(gamma))
            throw ValidationError("dynamics.gamma", "must be >= 0");
    }
};

// Largest admissible dt for a given peak external field strength.
inline double stability_limit(const DynamicsParams& p, double b_max) {
    return 0.1 / (4.0 * p.kinetic_coeff + std::abs(p.mu) * (b_max + p.gamma));
}

struct ExternalField {
    Grid<double> bx, by, bz;

    ExternalField() = default;
    explicit ExternalField(const LatticeConfig& cfg) : bx(cfg.size), by(cfg.size), bz(cfg.size) {}

    static ExternalField uniform(const LatticeConfig& cfg, double x, double y, double z) {
        ExternalField b(cfg);
        for (std::size_t i = 0; i < cfg.sites(); ++i) {
            b.bx[i] = x;
            b.by[i] = y;
            b.bz[i] = z;
        }
        return b;
    }

    // b_z = +amplitude where the bit is 1, -amplitude where it is 0.
    static ExternalField from_pattern(const Pattern& p, double amplitude) {
        ExternalField b(p.config);
        for (std::size_t i = 0; i < p.sites(); ++i) b.bz[i] = p.bits[i] ? amplitude : -amplitude;
        return b;
    }

    std::size_t size() const noexcept { return bz.size(); }

    double max_magnitude() const {
        double m = 0.0;
        for (std::size_t i = 0; i < bz.count(); ++i)
            m = std::max(m, std::sqrt(bx[i] * bx[i] + by[i] * by[i] + bz[i] * bz[i]));
        return m;
    }

    void validate(const LatticeConfig& cfg) const {
        require_shape(bx, cfg, "external field bx");
        require_shape(by, cfg, "external field by");
        require_shape(bz, cfg, "external field bz");
        for (const auto* g : {&bx, &by, &bz})
            for (double v : *g)
                if (!std::isfinite(v)) throw ValidationError("external field", "entries must be finite");
    }
};

struct Trajectory {
    std::vector<double> times;
    std::vector<OrderParameter> m_values;
    std::vector<double> norms;
    std::vector<Magnetization> net_mags;

    std::size_t size() const noexcept { return times.size(); }

    void record(double t, const OrderParameter& m, double norm, const Magnetization& mag) {
        times.push_back(t);
        m_values.push_back(m);
        norms.push_back(norm);
        net_mags.push_back(mag);
    }
};

// Five-point stencil (sum of neighbours - 4 centre) / spacing^2. Open edges
// mirror the centre value (zero flux).
inline Grid<double> laplacian(const Grid<double>& g, const LatticeConfig& cfg) {
    require_shape(g, cfg, "laplacian");
    const std::size_t L = cfg.size;
    const bool wrap = cfg.boundary == Boundary::periodic;
    const double inv_a2 = 1.0 / (cfg.spacing * cfg.spacing);
    Grid<double> out(L);
    auto at = [&](std::size_t r, std::size_t c, long dr, long dc) {
        long rr = static_cast<long>(r) + dr;
        long cc = static_cast<long>(c) + dc;
        const long n = static_cast<long>(L);
        if (rr < 0 || rr >= n || cc < 0 || cc >= n) {
            if (!wrap) return g(r, c);
            rr = (rr + n) % n;
            cc = (cc + n) % n;
        }
        return g(static_cast<std::size_t>(rr), static_cast<std::size_t>(cc));
    };
    for (std::size_t r = 0; r < L; ++r)
        for (std::size_t c = 0; c < L; ++c)
            out(r, c) = (at(r, c, -1, 0) + at(r, c, 1, 0) + at(r, c, 0, -1) + at(r, c, 0, 1) -
                         4.0 * g(r, c)) *
                        inv_a2;
    return out;
}

// Bragg-Williams mean field: every site sees B_ext plus gamma times the
// lattice-averaged magnetization vector.
inline ExternalField effective_field(const DoubletField& f, const ExternalField& b_ext, double gamma) {
    b_ext.validate(f.config());
    ExternalField out = b_ext;
    if (gamma == 0.0) return out;
    const Magnetization m = net_magnetization(f);
    for (std::size_t i = 0; i < out.bz.count(); ++i) {
        out.bx[i] += gamma * m.mx;
        out.by[i] += gamma * m.my;
        out.bz[i] += gamma * m.mz;
    }
    return out;
}

// Norm-preserving Strang-split integrator for
//   i dpsi/dt = [-k lap + mu sigma.B_total] psi.
// The spin part is applied as the exact per-site SU(2) exponential. The
// kinetic part is split into stencil bonds; each bond is a two-site
// exchange whose exponential is exact (the antisymmetric mode picks up a
// phase), swept forward then backward for second order. Every sub-step is
// unitary, so the total norm is conserved to rounding.
//
// An optional connectivity potential V scales each bond by (V_i + V_j)/2.
class Propagator {
public:
    Propagator(const LatticeConfig& cfg, const DynamicsParams& p,
               std::optional<Grid<double>> connectivity = std::nullopt)
        : config_(cfg), params_(p), bonds_(stencil_bonds(cfg)) {
        cfg.validate();
        p.validate();
        const double inv_a2 = 1.0 / (cfg.spacing * cfg.spacing);
        if (connectivity) require_shape(*connectivity, cfg, "connectivity potential");
        half_phase_.reserve(bonds_.size());
        for (auto [i, j] : bonds_) {
            const double weight = connectivity ? 0.5 * ((*connectivity)[i] + (*connectivity)[j]) : 1.0;
            const double kappa = p.kinetic_coeff * weight * inv_a2;
            half_phase_.push_back(std::polar(1.0, -2.0 * kappa * 0.5 * p.dt));
        }
    }

    const DynamicsParams& params() const noexcept { return params_; }

    DoubletField step(const DoubletField& in, const ExternalField& b_ext) const {
        if (!(in.config() == config_)) throw ShapeError("step: field lattice differs from propagator");
        const double limit = stability_limit(params_, b_ext.max_magnitude());
        if (params_.dt > limit)
            throw UnstableStep("dt = " + std::to_string(params_.dt) + " exceeds stability limit " +
                               std::to_string(limit));
        const ExternalField b = effective_field(in, b_ext, params_.gamma);

        const std::size_t n = in.sites();
        std::vector<cplx> u(n), d(n);
        for (std::size_t i = 0; i < n; ++i) {
            u[i] = in.u(i);
            d[i] = in.d(i);
        }
        spin_rotation(u, d, b, 0.5 * params_.dt);
        for (std::size_t k = 0; k < bonds_.size(); ++k) exchange(u, d, k);
        for (std::size_t k = bonds_.size(); k-- > 0;) exchange(u, d, k);
        spin_rotation(u, d, b, 0.5 * params_.dt);

        DoubletField out(config_);
        for (std::size_t i = 0; i < n; ++i) out.set(i, u[i], d[i]);
        return out;
    }

    std::pair<DoubletField, Trajectory> evolve(DoubletField f, const ExternalField& b_ext,
                                               std::size_t n_steps, std::size_t record_every) const {
        if (record_every < 1) throw ValidationError("record_every", "must be >= 1");
        Trajectory traj;
        traj.record(0.0, order_parameter(f), total_norm(f), net_magnetization(f));
        for (std::size_t s = 1; s <= n_steps; ++s) {
            f = step(f, b_ext);
            if (s % record_every == 0)
                traj.record(static_cast<double>(s) * params_.dt, order_parameter(f), total_norm(f),
                            net_magnetization(f));
        }
        return {std::move(f), std::move(traj)};
    }

private:
    void spin_rotation(std::vector<cplx>& u, std::vector<cplx>& d, const ExternalField& b,
                       double tau) const {
        const cplx i_unit{0.0, 1.0};
        for (std::size_t s = 0; s < u.size(); ++s) {
            const double bx = b.bx[s], by = b.by[s], bz = b.bz[s];
            const double mag = std::sqrt(bx * bx + by * by + bz * bz);
            if (mag == 0.0) continue;
            // exp(-i theta n.sigma) = cos(theta) - i sin(theta) n.sigma
            const double theta = params_.mu * mag * tau;
            const double cs = std::cos(theta);
            const double sn = std::sin(theta) / mag;
            const cplx a00 = cs - i_unit * sn * bz;
            const cplx a01 = -i_unit * sn * cplx(bx, -by);
            const cplx a10 = -i_unit * sn * cplx(bx, by);
            const cplx a11 = cs + i_unit * sn * bz;
            const cplx uu = u[s], dd = d[s];
            u[s] = a00 * uu + a01 * dd;
            d[s] = a10 * uu + a11 * dd;
        }
    }

    void exchange(std::vector<cplx>& u, std::vector<cplx>& d, std::size_t k) const {
        const auto [i, j] = bonds_[k];
        const cplx ph = half_phase_[k];
        for (auto* comp : {&u, &d}) {
            auto& v = *comp;
            const cplx mean = 0.5 * (v[i] + v[j]);
            const cplx half_diff = 0.5 * (v[i] - v[j]) * ph;
            v[i] = mean + half_diff;
            v[j] = mean - half_diff;
        }
    }

    LatticeConfig config_;
    DynamicsParams params_;
    std::vector<std::pair<std::size_t, std::size_t>> bonds_;
    std::vector<cplx> half_phase_;
};

inline DoubletField step(const DoubletField& f, const ExternalField& b_ext, const DynamicsParams& p) {
    return Propagator(f.config(), p).step(f, b_ext);
}

inline std::pair<DoubletField, Trajectory> evolve(const DoubletField& f, const ExternalField& b_ext,
                                                  const DynamicsParams& p, std::size_t record_every = 1) {
    return Propagator(f.config(), p).evolve(f, b_ext, p.n_steps, record_every);
}

}  // namespace qnet
