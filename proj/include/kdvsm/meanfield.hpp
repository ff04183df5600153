// Geometry of the mean field evolved from the bare rectangular well: region
// boundaries before and after the critical time, the rarefaction profile,
// the hodograph (Euler-Darboux-Poisson) description of the interaction
// region boundary, and the linear-wave-train mean.

#ifndef KDVSM_MEANFIELD_HPP
#define KDVSM_MEANFIELD_HPP

namespace kdvsm::meanfield {

// Rectangular well of depth U0 < 0 on 0 < x < l.
struct WellSpec {
    double U0, l;
    WellSpec(double U0_, double l_);
};

// t* = l / (-4 U0): the moment the plateau between DSW and RW closes.
double critical_time(const WellSpec& w);

enum class Regime { pre_critical, post_critical };

struct RegionBoundaries {
    double x_L;       // zero background / DSW
    double x_P;       // DSW / plateau, or (post-critical) LW / RW
    double x_P_prime; // plateau / RW, or (post-critical) DSW / LW
    double x_R;       // RW / zero background (fixed at l)
    double t;
    Regime regime;
};

// Pre-critical: x_L = 12 U0 t, x_P = 2 U0 t, x_P' = l + 6 U0 t, x_R = l.
// Post-critical: x_P follows the cube-root law l - (3/2)(sqrt(-4U0) l)^(2/3) t^(1/3),
// x_P' follows the parametric DSW-side boundary; positions of x_P and x_P'
// swap order, the LW region being [x_P', x_P].
RegionBoundaries boundaries(const WellSpec& w, double t);

struct CurvePoint {
    double t, x;
};

// Point of the interaction-region / DSW boundary at modulus m in (0,1).
// The curve emanates from the critical point (t*, -l/2) as m -> 1 and
// approaches the DSW harmonic edge 12 U0 t as m -> 0.
CurvePoint dsw_edge_parametric(const WellSpec& w, double m);

// Mean field of the rarefaction fan: U0 left of the fan, (x-l)/(6t) inside,
// 0 right of x = l.
double rw_profile(const WellSpec& w, double x, double t);

// Euler-Darboux-Poisson potential
//   f = l - (l/pi) Int_{l2}^{0} sqrt(U0-b) db / sqrt(b (b-l2)(b-l1)),
// real on the admissible branch, for U0 <= l1 <= l2 <= 0.
double edp_potential(double l1, double l2, const WellSpec& w);

// Time at which the interaction-region characteristic carries (l1, l2),
// via t = (w1 - w2)/(v2 - v1) with w_j = f - (L/d_j L) d_j f and the
// derivatives taken by central differences.
double interaction_time(double l1, double l2, const WellSpec& w);

// Mean of the modulated linear wave train, <u> = l2 - l1 + l3.
double lw_mean(double l1, double l2, double l3 = 0.0);

} // namespace kdvsm::meanfield

#endif
