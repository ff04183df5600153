// Direct solver for u_t + 6 u u_x + u_xxx = 0 on a periodic domain:
// Fourier collocation, the dispersive term advanced exactly by an
// integrating factor, the nonlinear term by classical RK4, 2/3-rule
// dealiasing. Initial data is the regularized well plus a sech^2 soliton.

#ifndef KDVSM_SIM_HPP
#define KDVSM_SIM_HPP

#include <optional>
#include <string>
#include <vector>

#include "kdvsm/meanfield.hpp"

namespace kdvsm::sim {

struct Grid {
    double x_min, x_max;
    int n; // power of two, >= 256

    double length() const { return x_max - x_min; }
    double dx() const { return length() / n; }
    double x(int i) const { return x_min + i * dx(); }
};

void validate(const Grid& g);

struct WaveField {
    Grid grid;
    double t = 0.0;
    std::vector<double> u;
};

struct SolverConfig {
    double dt = 1e-3;
    double dealias_fraction = 2.0 / 3.0;
    double smoothing_delta = 0.5; // well-edge regularization width
    double sample_interval = 0.1;
    double cfl_safety = 0.9;      // dt <= cfl_safety * dx / max(1, 6 max|u|)
    double blowup_factor = 100.0; // abort when max|u| exceeds this times max|u0|
};

// u0(x) = U(x) + a sech^2(sqrt(a/2)(x - x0)), the well smoothed over
// smoothing_delta by unit tanh steps. Requires x0 and the well to sit inside
// the grid with a margin of at least ten soliton widths.
WaveField build_initial(const std::optional<meanfield::WellSpec>& well,
                        double a0, double x0, const Grid& g, double smoothing_delta);

struct EvolveResult {
    std::vector<WaveField> snapshots; // every sample_interval, including t = 0
    double boundary_max_abs = 0.0;    // wrap diagnostic: max |u| within 5 points of the ends
};

EvolveResult evolve(const WaveField& initial, double t_end, const SolverConfig& cfg);

struct Conserved {
    double mass, momentum, energy;
};

// integral u dx, integral u^2 dx, integral (u^3 - u_x^2 / 2) dx; u_x spectral.
Conserved conserved_quantities(const WaveField& f);

// Snapshot dump, columns x,u after a "# t=<time>" header line.
void write_csv(const WaveField& f, const std::string& path);

} // namespace kdvsm::sim

#endif
