// Solitonic modulation analytics: adiabatic invariants, transmission and
// phase relations, tunnel/embed classification, piecewise trajectory plans
// for the trial soliton, and a characteristic ODE integrator over a
// prescribed mean field.

#ifndef KDVSM_SOLITON_HPP
#define KDVSM_SOLITON_HPP

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "kdvsm/meanfield.hpp"

namespace kdvsm::soliton {

struct NonTransmissible : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// q = 4 ubar + 2 a, conserved through slow background variation.
double q_invariant(double a, double ubar);

// C = 6 ubar + 2 a = 2 ubar + q.
double soliton_speed(double a, double ubar);

// p = 1/sqrt(4 ubar - q); admissible only where 4 ubar - q > 0. Transmission
// bookkeeping uses ratios of p, see phase_shift.
double p_factor(double q, double ubar);

// Amplitude after crossing from background u_in to u_out with q conserved:
// a_out = a_in + 2 (u_in - u_out). Throws NonTransmissible if a_out <= 0.
double transmit(double a_in, double u_in, double u_out);

struct PhaseShift {
    double k_out;
    double delta_x;
};

// Wavenumber and phase bookkeeping from the invariance of r = k p:
// k_out = k_in p(q,u_in)/p(q,u_out), x_plus = x_minus k_in/k_out.
// Computed ratio-first, so backgrounds on the soliton side (4u - q < 0)
// are admissible as long as both sides have the same sign.
// x_minus is measured relative to the interaction origin (the discontinuity
// the soliton crosses; x = l for a well-interior soliton exiting through
// the rarefaction fan).
PhaseShift phase_shift(double k_in, double q, double u_in, double u_out, double x_minus);

enum class OutcomeKind { Tunnel, EmbedRW, EmbedLW, EmbedDSW, NoInteraction };

std::string to_string(OutcomeKind k);

// Table of outcomes by initial position and amplitude. eps separates the
// DSW- from the LW-embedding branch (a0 <= eps -> EmbedDSW).
OutcomeKind classify(double a0, double x0, const meanfield::WellSpec& w, double eps);

// Approximate threshold amplitude below which a left-placed soliton crosses
// the post-critical linear-wave region: a_L = (l + 2 x0) U0 / l.
double critical_amplitude_lw(double x0, const meanfield::WellSpec& w);

// Piecewise trajectory law x(t) = A + B t + C t^(1/3) on [t_begin, t_end).
struct TrajectorySegment {
    std::string region;
    double t_begin, t_end;
    double A, B, C;

    double eval(double t) const { return A + B * t + C * std::cbrt(t); }
};

struct TrajectoryPlan {
    std::vector<TrajectorySegment> segments;
    double T1 = 0, T2 = 0, T3 = 0, T4 = 0; // junction times where defined
    bool valid = true;
    // time window in which the soliton crosses the DSW (excluded from
    // trajectory error metrics; the transit law there is approximate)
    double dsw_window_begin = 0, dsw_window_end = 0;
    std::string note;

    double eval(double t) const;
};

// Left-placed soliton (x0 < 0) crossing DSW, plateau and RW in sequence.
// Marked invalid when the plateau vanishes before the soliton leaves it
// (T3 > t*); the caller should then integrate trajectory_ode instead.
TrajectoryPlan trajectory_left(double a_L, double x0, const meanfield::WellSpec& w);

// Well-interior soliton (0 < x0 < l), all outcome branches.
TrajectoryPlan trajectory_well(double a_M, double x0, const meanfield::WellSpec& w, double eps);

struct PathSample {
    double t, x, a;
};

struct OdeResult {
    std::vector<PathSample> samples;
    bool embedded = false;
    double embed_t = 0, embed_x = 0;
};

using MeanField = std::function<double(double x, double t)>;

// Integrates dx/dt = 2 ubar(x,t) + q0 (classical RK4) with q0 fixed by the
// initial data; a(t) = (q0 - 4 ubar)/2 along the path. Stops with an
// embedding event when the amplitude collapses to a <= 0.
OdeResult trajectory_ode(double a0, double x0, const MeanField& ubar,
                         double t_end, double dt);

// Region-composite analytic mean field of the evolving well: rarefaction fan
// on the RW side, U0 on the plateau, zero elsewhere (DSW and LW regions are
// replaced by the left background, following the transit approximation).
double composite_mean(const meanfield::WellSpec& w, double x, double t);

} // namespace kdvsm::soliton

#endif
