// Adaptive Gauss-Kronrod (G7,K15) quadrature on [a,b] with recursive
// bisection. Integrands are expected to be finite on the closed interval;
// endpoint square-root singularities must be removed by substitution before
// calling (the callers in this library do so).

#ifndef KDVSM_QUADRATURE_HPP
#define KDVSM_QUADRATURE_HPP

#include <cmath>
#include <utility>

namespace kdvsm::quadrature {

struct Result {
    double value = 0.0;
    double error = 0.0;
    bool converged = true;
};

namespace detail {

// K15 nodes (positive half) and weights; G7 weights on the shared nodes.
inline constexpr double kNodes[8] = {
    0.000000000000000000, 0.207784955007898468, 0.405845151377397167,
    0.586087235467691130, 0.741531185599394440, 0.864864423359769073,
    0.949107912342758525, 0.991455371120812639};
inline constexpr double kWeights[8] = {
    0.209482141084727828, 0.204432940075298892, 0.190350578064785410,
    0.169004726639267903, 0.140653259715525919, 0.104790010322250184,
    0.063092092629978553, 0.022935322010529225};
inline constexpr double gWeights[4] = {
    0.417959183673469388, 0.381830050505118945, 0.279705391489276668,
    0.129484966168869693};

template <typename F>
std::pair<double, double> gk15(F& f, double a, double b) {
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    double fv[15];
    fv[7] = f(c);
    for (int i = 1; i < 8; ++i) {
        fv[7 - i] = f(c - h * kNodes[i]);
        fv[7 + i] = f(c + h * kNodes[i]);
    }
    double resk = kWeights[0] * fv[7];
    double resg = gWeights[0] * fv[7];
    for (int i = 1; i < 8; ++i) {
        resk += kWeights[i] * (fv[7 - i] + fv[7 + i]);
        if (i % 2 == 0) resg += gWeights[i / 2] * (fv[7 - i] + fv[7 + i]);
    }
    resk *= h;
    resg *= h;
    return {resk, std::abs(resk - resg)};
}

template <typename F>
void adapt(F& f, double a, double b, double tol, int depth, Result& out) {
    auto [v, e] = gk15(f, a, b);
    if (e <= tol || depth <= 0) {
        out.value += v;
        out.error += e;
        if (e > tol && depth <= 0) out.converged = false;
        return;
    }
    const double c = 0.5 * (a + b);
    adapt(f, a, c, 0.5 * tol, depth - 1, out);
    adapt(f, c, b, 0.5 * tol, depth - 1, out);
}

} // namespace detail

template <typename F>
Result integrate(F&& f, double a, double b,
                 double rel_tol = 1e-10, double abs_tol = 1e-13,
                 int max_depth = 24) {
    auto [v0, e0] = detail::gk15(f, a, b);
    const double tol = std::max(abs_tol, rel_tol * std::abs(v0));
    if (e0 <= tol) return {v0, e0, true};
    Result out;
    detail::adapt(f, a, b, tol, max_depth, out);
    return out;
}

} // namespace kdvsm::quadrature

#endif
