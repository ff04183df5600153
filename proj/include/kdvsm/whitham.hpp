// Cnoidal waves of u_t + 6 u u_x + u_xxx = 0 in Riemann-invariant form,
// genus-1 modulation (Whitham) characteristic velocities with their harmonic
// and soliton limits, and the genus-2 velocities evaluated by quadrature
// together with the two band-collapse limit speeds used for trial solitons.

#ifndef KDVSM_WHITHAM_HPP
#define KDVSM_WHITHAM_HPP

#include <array>

namespace kdvsm::whitham {

// Ordered Riemann triple lambda1 <= lambda2 <= lambda3.
struct Genus1State {
    double lambda1, lambda2, lambda3;

    Genus1State(double l1, double l2, double l3);

    // m = (l2-l1)/(l3-l1), defined as 0 for the fully degenerate triple.
    double modulus() const;
};

struct CnoidalParams {
    Genus1State state;
    double xi0 = 0.0; // phase offset

    // V = 2(l1+l2+l3)
    double phase_speed() const;
    // L = 2K(m)/sqrt(l3-l1); requires l3 > l1 and m < 1
    double wavelength() const;
};

// u = l1 - l2 + l3 + 2(l2-l1) cn^2(2 sqrt(l3-l1) (x - V t) + xi0, m).
double cnoidal_eval(const CnoidalParams& p, double x, double t);

// <u> = l1 + l2 - l3 + 2(l3-l1) E(m)/K(m); requires m < 1.
double cnoidal_mean(const Genus1State& s);

struct Velocities {
    double v1, v2, v3;
};

// Genus-1 characteristic speeds; dispatches to the closed-form limit branch
// when m or 1-m is below 1e-10 (the generic expressions are 0/0 there).
// Harmonic limit: v1 = v2 = 12 l1 - 6 l3, v3 = 6 l3.
// Soliton limit:  v1 = 6 l1, v2 = v3 = 2 l1 + 4 l3.
Velocities whitham_velocities(const Genus1State& s);

// Ordered invariants lambda1 <= ... <= lambda5.
struct Genus2State {
    std::array<double, 5> lambda;
};

// v_k of the two-phase modulation system, k in 1..5, by adaptive quadrature
// of the band moment integrals (endpoint singularities removed by a sin^2
// substitution). Requires strictly ordered invariants.
double genus2_velocity(const Genus2State& s, int k);

// Speed of a collapsed top band lambda4 -> lambda5 =: lambda45 (trial soliton
// riding a cnoidal wave (l1,l2,l3)); requires l45 > l3.
double v45_limit(double l1, double l2, double l3, double l45);

// Speed of a collapsed interior band lambda2 -> lambda3 =: lambda23 embedded
// in the gap of the cnoidal wave (l1,l4,l5).
double v23_limit(double l1, double l23, double l4, double l5);

// lambda4 -> lambda23 embedding limits: speed of the collapsed band once the
// surrounding band edge reaches it.
double embed_speed_rw(double l1, double l23);
double embed_speed_lw(double l1, double l23, double l5);

} // namespace kdvsm::whitham

#endif
