#include "kdvsm/whitham.hpp"

#include <cmath>
#include <stdexcept>

#include "kdvsm/elliptic.hpp"
#include "kdvsm/quadrature.hpp"

namespace kdvsm::whitham {

using elliptic::ellip_E;
using elliptic::ellip_K;
using elliptic::jacobi_cn;
using elliptic::jacobi_zeta;

namespace {
// Below this distance from m = 0 or m = 1 the generic velocity expressions
// lose all significance; dispatch to the closed-form limit branch.
constexpr double kDegenerateTol = 1e-10;
} // namespace

Genus1State::Genus1State(double l1, double l2, double l3)
    : lambda1(l1), lambda2(l2), lambda3(l3) {
    if (!(l1 <= l2 && l2 <= l3))
        throw std::invalid_argument("Genus1State: invariants must be ordered l1 <= l2 <= l3");
}

double Genus1State::modulus() const {
    const double d = lambda3 - lambda1;
    if (d == 0.0) return 0.0;
    return (lambda2 - lambda1) / d;
}

double CnoidalParams::phase_speed() const {
    return 2.0 * (state.lambda1 + state.lambda2 + state.lambda3);
}

double CnoidalParams::wavelength() const {
    const double d = state.lambda3 - state.lambda1;
    if (d <= 0.0)
        throw std::domain_error("wavelength: degenerate state, l3 must exceed l1");
    return 2.0 * ellip_K(state.modulus()) / std::sqrt(d);
}

double cnoidal_eval(const CnoidalParams& p, double x, double t) {
    const auto& s = p.state;
    const double d = s.lambda3 - s.lambda1;
    if (d <= 0.0)
        throw std::domain_error("cnoidal_eval: degenerate state, l3 must exceed l1");
    const double arg = 2.0 * std::sqrt(d) * (x - p.phase_speed() * t) + p.xi0;
    const double cn = jacobi_cn(arg, s.modulus());
    return s.lambda1 - s.lambda2 + s.lambda3 + 2.0 * (s.lambda2 - s.lambda1) * cn * cn;
}

double cnoidal_mean(const Genus1State& s) {
    const double d = s.lambda3 - s.lambda1;
    if (d <= 0.0)
        throw std::domain_error("cnoidal_mean: degenerate state, l3 must exceed l1");
    const double m = s.modulus();
    if (1.0 - m < kDegenerateTol)
        throw std::domain_error("cnoidal_mean: K(m) diverges at the soliton limit");
    return s.lambda1 + s.lambda2 - s.lambda3 + 2.0 * d * ellip_E(m) / ellip_K(m);
}

Velocities whitham_velocities(const Genus1State& s) {
    const double l1 = s.lambda1, l2 = s.lambda2, l3 = s.lambda3;
    const double m = s.modulus();

    if (m < kDegenerateTol) {
        // harmonic limit l2 -> l1: the merged pair rides at 12 l12 - 6 l3
        // (the m -> 0 limit of the generic expressions)
        return {12.0 * l1 - 6.0 * l3, 12.0 * l2 - 6.0 * l3, 6.0 * l3};
    }
    if (1.0 - m < kDegenerateTol) {
        // soliton limit l2 -> l3
        return {6.0 * l1, 2.0 * l1 + 4.0 * l2, 2.0 * l1 + 4.0 * l3};
    }

    const double V = 2.0 * (l1 + l2 + l3);
    const double K = ellip_K(m), E = ellip_E(m);
    const double d21 = l2 - l1, d32 = l3 - l2;
    Velocities v;
    v.v1 = V - 4.0 * d21 * K / (K - E);
    v.v2 = V - 4.0 * d21 * (1.0 - m) * K / (E - (1.0 - m) * K);
    v.v3 = V + 4.0 * d32 * K / E;
    if (!(v.v1 <= v.v2 && v.v2 <= v.v3))
        throw std::runtime_error("whitham_velocities: ordering violated");
    return v;
}

namespace {

// Moment integrals of the two-phase system over band i (1: [l1,l2],
// 2: [l3,l4]) with the collapsed square-root weight removed by
// mu = a + (b-a) sin^2(theta).
double band_moment(const std::array<double, 5>& l, int band, int j, double lk) {
    const double a = (band == 1) ? l[0] : l[2];
    const double b = (band == 1) ? l[1] : l[3];
    auto f = [&](double th) {
        const double s = std::sin(th);
        const double mu = a + (b - a) * s * s;
        double rest = 1.0;
        for (int idx = 0; idx < 5; ++idx) {
            if (band == 1 && idx < 2) continue;
            if (band == 2 && (idx == 2 || idx == 3)) continue;
            rest *= std::abs(mu - l[idx]);
        }
        double muj = 1.0;
        for (int p = 0; p < j; ++p) muj *= mu;
        return 2.0 * (lk - mu) * muj / std::sqrt(rest);
    };
    auto r = quadrature::integrate(f, 0.0, M_PI_2, 1e-9, 1e-14);
    if (!r.converged)
        throw std::runtime_error("genus2_velocity: band moment quadrature did not converge");
    return r.value;
}

} // namespace

double genus2_velocity(const Genus2State& s, int k) {
    if (k < 1 || k > 5) throw std::invalid_argument("genus2_velocity: k must be in 1..5");
    for (int i = 0; i + 1 < 5; ++i)
        if (!(s.lambda[i] < s.lambda[i + 1]))
            throw std::invalid_argument("genus2_velocity: invariants must be strictly ordered");

    // work in the frame with lambda1 = 0; the velocity transforms by 6 c
    // under translation, so this pins Galilean covariance to rounding level
    const double shift = s.lambda[0];
    std::array<double, 5> l;
    for (int i = 0; i < 5; ++i) l[i] = s.lambda[i] - shift;

    const double lk = l[k - 1];
    const double i10 = band_moment(l, 1, 0, lk);
    const double i11 = band_moment(l, 1, 1, lk);
    const double i12 = band_moment(l, 1, 2, lk);
    const double i20 = band_moment(l, 2, 0, lk);
    const double i21 = band_moment(l, 2, 1, lk);
    const double i22 = band_moment(l, 2, 2, lk);

    double sum = 0.0;
    for (double li : l) sum += li;
    const double num = i22 * i10 - i20 * i12;
    const double den = i21 * i10 - i20 * i11;
    return -6.0 * sum + 12.0 * lk + 12.0 * num / den + 6.0 * shift;
}

double v45_limit(double l1, double l2, double l3, double l45) {
    if (!(l1 <= l2 && l2 <= l3))
        throw std::invalid_argument("v45_limit: need l1 <= l2 <= l3");
    if (!(l45 > l3)) throw std::domain_error("v45_limit: need l45 > l3");

    const double m = (l3 > l1) ? (l2 - l1) / (l3 - l1) : 0.0;
    const double sum3 = l1 + l2 + l3;
    if (1.0 - m < kDegenerateTol) return 2.0 * l1 + 4.0 * l45; // soliton-train limit

    const double sin2psi = (l45 - l3) / (l45 - l2);
    const double psi = std::asin(std::sqrt(sin2psi));
    const double W = std::sqrt((l45 - l2) * (l3 - l1) / ((l45 - l3) * (l45 - l1)));
    const double Z = jacobi_zeta(psi, m);
    return 2.0 * sum3 + 4.0 * (l45 - l2) / (1.0 - W * Z);
}

double v23_limit(double l1, double l23, double l4, double l5) {
    if (!(l1 <= l23 && l23 <= l4 && l4 <= l5))
        throw std::invalid_argument("v23_limit: need l1 <= l23 <= l4 <= l5");
    const double m23 = (l4 - l1) / (l5 - l1);
    // collapsed band merged with a surrounding band edge: genus-1 speeds remain
    if (l23 == l1) return whitham_velocities(Genus1State(l1, l4, l5)).v1;
    if (l23 == l4) return embed_speed_lw(l1, l23, l5);

    const double psi = std::asin(std::sqrt((l23 - l1) / (l4 - l1)));
    const double Z = jacobi_zeta(psi, m23);
    const double pref =
        (l5 - l23) * std::sqrt((l4 - l23) * (l23 - l1) / ((l5 - l1) * (l5 - l23)));
    return 2.0 * (l1 + l4 + l5) - 4.0 * pref / Z;
}

double embed_speed_rw(double l1, double l23) {
    if (!(l23 >= l1)) throw std::domain_error("embed_speed_rw: need l23 >= l1");
    return 2.0 * l1 + 4.0 * l23;
}

double embed_speed_lw(double l1, double l23, double l5) {
    if (!(l1 <= l23 && l23 <= l5))
        throw std::domain_error("embed_speed_lw: need l1 <= l23 <= l5");
    const double me = (l5 > l1) ? (l23 - l1) / (l5 - l1) : 0.0;
    if (me < kDegenerateTol) return 12.0 * l1 - 6.0 * l5; // harmonic branch
    if (1.0 - me < kDegenerateTol)
        throw std::domain_error("embed_speed_lw: singular at l23 = l5");
    const double K = ellip_K(me), E = ellip_E(me);
    return 2.0 * (l1 + l23 + l5)
         - 4.0 * (l23 - l1) * (1.0 - me) * K / (E - (1.0 - me) * K);
}

} // namespace kdvsm::whitham
