#include "kdvsm/meanfield.hpp"

#include <cmath>
#include <stdexcept>

#include "kdvsm/elliptic.hpp"
#include "kdvsm/quadrature.hpp"
#include "kdvsm/whitham.hpp"

namespace kdvsm::meanfield {

using elliptic::ellip_E;
using elliptic::ellip_K;

WellSpec::WellSpec(double U0_, double l_) : U0(U0_), l(l_) {
    if (!(U0 < 0.0)) throw std::invalid_argument("WellSpec: U0 must be negative");
    if (!(l > 0.0)) throw std::invalid_argument("WellSpec: l must be positive");
}

double critical_time(const WellSpec& w) { return w.l / (-4.0 * w.U0); }

CurvePoint dsw_edge_parametric(const WellSpec& w, double m) {
    if (!(m > 0.0 && m < 1.0))
        throw std::domain_error("dsw_edge_parametric: m must lie in (0,1)");
    const double mu = ellip_E(m) / ellip_K(m);
    const double den = (2.0 - m) * mu - 2.0 * (1.0 - m);
    if (den <= 0.0)
        throw std::runtime_error("dsw_edge_parametric: singular parameter");
    const double sm = std::sqrt(m);
    // the paper writes t with l/(4 U0 sqrt(m)); the positive-time branch
    // through (t*, -l/2) requires l/(-4 U0 sqrt(m))
    const double t = (1.0 + (1.0 - m) * (1.0 - mu) / den) * w.l / (-4.0 * w.U0 * sm);
    const double x = -(1.0 + 3.0 * m * (1.0 - m) / den) * w.l / (2.0 * sm);
    return {t, x};
}

namespace {

// Invert t(m) of the parametric DSW-side boundary; t(m) decreases from
// infinity (m -> 0) to t* (m -> 1).
double dsw_edge_x_at_time(const WellSpec& w, double t) {
    double lo = 1e-12, hi = 1.0 - 1e-12;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (dsw_edge_parametric(w, mid).t > t)
            lo = mid;
        else
            hi = mid;
    }
    return dsw_edge_parametric(w, 0.5 * (lo + hi)).x;
}

} // namespace

RegionBoundaries boundaries(const WellSpec& w, double t) {
    if (!(t > 0.0)) throw std::domain_error("boundaries: t must be positive");
    RegionBoundaries b;
    b.t = t;
    b.x_L = 12.0 * w.U0 * t;
    b.x_R = w.l;
    const double ts = critical_time(w);
    if (t < ts) {
        b.regime = Regime::pre_critical;
        b.x_P = 2.0 * w.U0 * t;
        b.x_P_prime = w.l + 6.0 * w.U0 * t;
    } else {
        b.regime = Regime::post_critical;
        b.x_P = w.l - 1.5 * std::pow(std::sqrt(-4.0 * w.U0) * w.l, 2.0 / 3.0) * std::cbrt(t);
        b.x_P_prime = dsw_edge_x_at_time(w, t);
    }
    return b;
}

double rw_profile(const WellSpec& w, double x, double t) {
    if (!(t > 0.0)) throw std::domain_error("rw_profile: t must be positive");
    if (x >= w.l) return 0.0;
    const double fan = (x - w.l) / (6.0 * t);
    return std::max(w.U0, fan);
}

double edp_potential(double l1, double l2, const WellSpec& w) {
    if (!(l1 <= l2 && l2 <= 0.0))
        throw std::invalid_argument("edp_potential: need l1 <= l2 <= 0");
    if (l2 == 0.0) return w.l; // empty integration interval
    if (l1 == l2 && l1 != w.U0)
        throw std::domain_error("edp_potential: integral diverges at l1 == l2 off the well floor");

    // beta = l2 cos^2(theta) removes both inverse-square-root endpoints;
    // d beta / sqrt((-beta)(beta - l2)) = 2 d theta
    auto f = [&](double th) {
        const double c = std::cos(th);
        const double beta = l2 * c * c;
        const double num = beta - w.U0;
        const double den = beta - l1;
        if (den <= 0.0) return 1.0; // only reachable when l1 == l2 == U0
        return std::sqrt(num / den);
    };
    auto r = quadrature::integrate(f, 0.0, M_PI_2, 1e-10, 1e-14);
    if (!r.converged)
        throw std::runtime_error("edp_potential: quadrature did not converge");
    return w.l - (w.l / M_PI) * 2.0 * r.value;
}

namespace {

// d/dm K(m) and wavelength L = 2 K(m)/sqrt(-l1) for the l3 = 0 system
double dK_dm(double m) {
    const double K = ellip_K(m), E = ellip_E(m);
    return (E - (1.0 - m) * K) / (2.0 * m * (1.0 - m));
}

struct WavelengthL {
    double value, d1, d2; // L and its partials in l1, l2
};

WavelengthL wavelength_l3zero(double l1, double l2) {
    const double m = (l2 - l1) / (-l1);
    const double K = ellip_K(m);
    const double s = std::sqrt(-l1);
    const double Kp = dK_dm(m);
    WavelengthL L;
    L.value = 2.0 * K / s;
    const double dm_dl1 = l2 / (l1 * l1);
    const double dm_dl2 = 1.0 / (-l1);
    L.d1 = 2.0 * Kp * dm_dl1 / s + K * std::pow(-l1, -1.5);
    L.d2 = 2.0 * Kp * dm_dl2 / s;
    return L;
}

} // namespace

double interaction_time(double l1, double l2, const WellSpec& w) {
    if (!(l1 < l2 && l2 <= 0.0 && l1 < 0.0))
        throw std::invalid_argument("interaction_time: need l1 < l2 <= 0, l1 < 0");

    const auto v = whitham::whitham_velocities(whitham::Genus1State(l1, l2, 0.0));
    if (v.v1 == v.v2)
        throw std::runtime_error("interaction_time: characteristics coincide");

    auto fval = [&](double a, double b) { return edp_potential(a, b, w); };

    // central difference in lambda_j, falling back to a second-order
    // backward stencil when lambda2 + h would leave the domain
    auto df = [&](int j, double h) {
        if (j == 1)
            return (fval(l1 + h, l2) - fval(l1 - h, l2)) / (2.0 * h);
        if (l2 + h <= 0.0)
            return (fval(l1, l2 + h) - fval(l1, l2 - h)) / (2.0 * h);
        return (3.0 * fval(l1, l2) - 4.0 * fval(l1, l2 - h) + fval(l1, l2 - 2.0 * h))
               / (2.0 * h);
    };
    // Richardson: (4 D(h/2) - D(h)) / 3
    const double h = std::min(1e-5 * std::abs(w.U0), 0.25 * (l2 - l1));
    const double f1 = (4.0 * df(1, 0.5 * h) - df(1, h)) / 3.0;
    const double f2 = (4.0 * df(2, 0.5 * h) - df(2, h)) / 3.0;

    const double f = edp_potential(l1, l2, w);
    const auto L = wavelength_l3zero(l1, l2);
    const double w1 = f - L.value / L.d1 * f1;
    const double w2 = f - L.value / L.d2 * f2;
    return (w1 - w2) / (v.v2 - v.v1);
}

double lw_mean(double l1, double l2, double l3) {
    if (!(l2 >= l1)) throw std::invalid_argument("lw_mean: need l2 >= l1");
    return l2 - l1 + l3;
}

} // namespace kdvsm::meanfield
