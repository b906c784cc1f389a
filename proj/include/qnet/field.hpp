#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <string>

#include "errors.hpp"
#include "lattice.hpp"
#include "random.hpp"

namespace qnet {

using cplx = std::complex<double>;

// Binary L x L configuration: 1 = unit on (u), 0 = unit off (d).
struct Pattern {
    LatticeConfig config;
    Grid<std::uint8_t> bits;

    Pattern() = default;
    explicit Pattern(const LatticeConfig& cfg, std::uint8_t fill = 0)
        : config(cfg), bits(cfg.size, fill) {}

    std::size_t sites() const noexcept { return bits.count(); }
    int spin(std::size_t i) const noexcept { return bits[i] ? 1 : -1; }

    friend bool operator==(const Pattern& a, const Pattern& b) { return a.bits == b.bits; }
};

inline Pattern checkerboard(const LatticeConfig& cfg) {
    Pattern p(cfg);
    for (std::size_t r = 0; r < cfg.size; ++r)
        for (std::size_t c = 0; c < cfg.size; ++c) p.bits(r, c) = ((r + c) % 2 == 0) ? 1 : 0;
    return p;
}

// Independent fair coin per site.
inline Pattern random_pattern(const LatticeConfig& cfg, Rng& rng) {
    Pattern p(cfg);
    for (auto& b : p.bits) b = rng.coin() ? 1 : 0;
    return p;
}

// Flips round(fraction * N) distinct sites chosen uniformly.
inline Pattern flip_bits(const Pattern& p, double fraction, Rng& rng) {
    const std::size_t n = p.sites();
    const auto k = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n)));
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    Pattern out = p;
    for (std::size_t i = 0; i < k && i < n; ++i) {
        const std::size_t j = i + rng.index(n - i);
        std::swap(order[i], order[j]);
        out.bits[order[i]] ^= 1;
    }
    return out;
}

// Normalised spin overlap (1/N) sum (2a-1)(2b-1), in [-1, 1].
inline double pattern_overlap(const Pattern& a, const Pattern& b) {
    if (a.bits.size() != b.bits.size()) throw ShapeError("pattern_overlap: shape mismatch");
    long sum = 0;
    for (std::size_t i = 0; i < a.sites(); ++i) sum += a.spin(i) * b.spin(i);
    return static_cast<double>(sum) / static_cast<double>(a.sites());
}

struct Magnetization {
    double mx = 0.0;
    double my = 0.0;
    double mz = 0.0;

    double norm() const { return std::sqrt(mx * mx + my * my + mz * mz); }
    friend bool operator==(const Magnetization&, const Magnetization&) = default;
};

struct OrderParameter {
    double value = 0.0;
    std::size_t n_u = 0;
    std::size_t n_d = 0;

    static OrderParameter from_counts(std::size_t n_u, std::size_t n_d) {
        const double diff = static_cast<double>(n_u) - static_cast<double>(n_d);
        return {0.5 * std::abs(diff), n_u, n_d};
    }
    friend bool operator==(const OrderParameter&, const OrderParameter&) = default;
};

inline OrderParameter order_parameter(const Pattern& p) {
    std::size_t up = 0;
    for (auto b : p.bits) up += b ? 1 : 0;
    return OrderParameter::from_counts(up, p.sites() - up);
}

// Complex doublet (psi_u, psi_d) per site, held as four real component grids.
class DoubletField {
public:
    DoubletField() = default;
    explicit DoubletField(const LatticeConfig& cfg)
        : config_(cfg), re_u_(cfg.size), im_u_(cfg.size), re_d_(cfg.size), im_d_(cfg.size) {}

    const LatticeConfig& config() const noexcept { return config_; }
    std::size_t sites() const noexcept { return re_u_.count(); }

    cplx u(std::size_t i) const { return {re_u_[i], im_u_[i]}; }
    cplx d(std::size_t i) const { return {re_d_[i], im_d_[i]}; }

    void set(std::size_t i, cplx u, cplx d) {
        re_u_[i] = u.real();
        im_u_[i] = u.imag();
        re_d_[i] = d.real();
        im_d_[i] = d.imag();
    }

    const Grid<double>& re_u() const noexcept { return re_u_; }
    const Grid<double>& im_u() const noexcept { return im_u_; }
    const Grid<double>& re_d() const noexcept { return re_d_; }
    const Grid<double>& im_d() const noexcept { return im_d_; }

    bool finite() const {
        for (const auto* g : {&re_u_, &im_u_, &re_d_, &im_d_})
            for (double v : *g)
                if (!std::isfinite(v)) return false;
        return true;
    }

    friend bool operator==(const DoubletField&, const DoubletField&) = default;

private:
    LatticeConfig config_;
    Grid<double> re_u_, im_u_, re_d_, im_d_;
};

struct NormalRandom {};

// Normal state: unit spinors with independent, Bloch-sphere-uniform
// orientation and a random global phase per site.
inline DoubletField new_field(const LatticeConfig& cfg, NormalRandom, std::uint64_t seed) {
    cfg.validate();
    DoubletField f(cfg);
    Rng rng(seed);
    for (std::size_t i = 0; i < f.sites(); ++i) {
        const double cos_theta = rng.uniform(-1.0, 1.0);
        const double phi = rng.uniform(0.0, 2.0 * std::numbers::pi);
        const double chi = rng.uniform(0.0, 2.0 * std::numbers::pi);
        const double a = std::sqrt(0.5 * (1.0 + cos_theta));
        const double b = std::sqrt(0.5 * (1.0 - cos_theta));
        f.set(i, std::polar(a, chi), std::polar(b, chi + phi));
    }
    return f;
}

inline DoubletField new_field(const LatticeConfig& cfg, const Pattern& pattern) {
    cfg.validate();
    require_shape(pattern.bits, cfg, "new_field");
    DoubletField f(cfg);
    for (std::size_t i = 0; i < f.sites(); ++i) {
        if (pattern.bits[i])
            f.set(i, 1.0, 0.0);
        else
            f.set(i, 0.0, 1.0);
    }
    return f;
}

inline Magnetization site_magnetization(const DoubletField& f, std::size_t i) {
    const cplx u = f.u(i);
    const cplx d = f.d(i);
    const cplx ud = std::conj(u) * d;
    return {2.0 * ud.real(), 2.0 * ud.imag(), std::norm(u) - std::norm(d)};
}

inline Magnetization local_magnetization(const DoubletField& f, Site s) {
    f.config().check(s);
    return site_magnetization(f, f.config().index(s));
}

inline Magnetization net_magnetization(const DoubletField& f) {
    Magnetization m;
    for (std::size_t i = 0; i < f.sites(); ++i) {
        const Magnetization s = site_magnetization(f, i);
        m.mx += s.mx;
        m.my += s.my;
        m.mz += s.mz;
    }
    const double n = static_cast<double>(f.sites());
    return {m.mx / n, m.my / n, m.mz / n};
}

inline double site_density(const DoubletField& f, std::size_t i) {
    return std::norm(f.u(i)) + std::norm(f.d(i));
}

inline double total_norm(const DoubletField& f) {
    double sum = 0.0;
    for (std::size_t i = 0; i < f.sites(); ++i) sum += site_density(f, i);
    return sum;
}

// Sign of mz decides the unit state; mz == 0 counts as u.
inline bool is_up(const DoubletField& f, std::size_t i) {
    return std::norm(f.u(i)) - std::norm(f.d(i)) >= 0.0;
}

inline Pattern binarize(const DoubletField& f) {
    Pattern p(f.config());
    for (std::size_t i = 0; i < f.sites(); ++i) p.bits[i] = is_up(f, i) ? 1 : 0;
    return p;
}

inline OrderParameter order_parameter(const DoubletField& f) {
    std::size_t up = 0;
    for (std::size_t i = 0; i < f.sites(); ++i) up += is_up(f, i) ? 1 : 0;
    return OrderParameter::from_counts(up, f.sites() - up);
}

// 2x2 complex matrix [[a, b], [c, d]] acting on (psi_u, psi_d).
struct SU2Element {
    cplx a{1.0}, b{0.0}, c{0.0}, d{1.0};

    static SU2Element identity() { return {}; }

    // exp(-i angle/2 n.sigma) for a unit axis n.
    static SU2Element from_axis_angle(double nx, double ny, double nz, double angle) {
        const double len = std::sqrt(nx * nx + ny * ny + nz * nz);
        nx /= len;
        ny /= len;
        nz /= len;
        const double cs = std::cos(0.5 * angle);
        const double sn = std::sin(0.5 * angle);
        const cplx i{0.0, 1.0};
        return {cs - i * sn * nz, -i * sn * cplx(nx, -ny), -i * sn * cplx(nx, ny), cs + i * sn * nz};
    }

    // i sigma_x scaled into SU(2): exchanges u and d up to phase.
    static SU2Element flip() { return {0.0, cplx(0.0, 1.0), cplx(0.0, 1.0), 0.0}; }

    static SU2Element random(Rng& rng) {
        // Haar measure via a uniform unit quaternion.
        const double u1 = rng.uniform(), u2 = rng.uniform(), u3 = rng.uniform();
        const double s1 = std::sqrt(1.0 - u1), s2 = std::sqrt(u1);
        const double t1 = 2.0 * std::numbers::pi * u2, t2 = 2.0 * std::numbers::pi * u3;
        const cplx alpha = std::polar(s1, t1);
        const cplx beta = std::polar(s2, t2);
        return {alpha, -std::conj(beta), beta, std::conj(alpha)};
    }

    cplx det() const { return a * d - b * c; }

    bool is_special_unitary(double tol = 1e-12) const {
        // U^dagger U = I and det U = 1
        const cplx p00 = std::conj(a) * a + std::conj(c) * c;
        const cplx p01 = std::conj(a) * b + std::conj(c) * d;
        const cplx p11 = std::conj(b) * b + std::conj(d) * d;
        return std::abs(p00 - 1.0) <= tol && std::abs(p01) <= tol && std::abs(p11 - 1.0) <= tol &&
               std::abs(det() - 1.0) <= tol;
    }
};

inline DoubletField su2_rotate(const DoubletField& f, const SU2Element& r) {
    if (!r.is_special_unitary()) throw InvalidRotation("rotation is not in SU(2) to 1e-12");
    DoubletField out(f.config());
    for (std::size_t i = 0; i < f.sites(); ++i) {
        const cplx u = f.u(i), d = f.d(i);
        out.set(i, r.a * u + r.b * d, r.c * u + r.d * d);
    }
    return out;
}

}  // namespace qnet
