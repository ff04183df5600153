#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "kdvsm/sim.hpp"

using namespace kdvsm::sim;
using kdvsm::meanfield::WellSpec;

namespace {

double peak_position(const WaveField& f) {
    int ipk = 0;
    for (int i = 1; i < f.grid.n; ++i)
        if (f.u[i] > f.u[ipk]) ipk = i;
    double x = f.grid.x(ipk);
    if (ipk > 0 && ipk < f.grid.n - 1) {
        const double ym = f.u[ipk - 1], y0 = f.u[ipk], yp = f.u[ipk + 1];
        const double den = ym - 2.0 * y0 + yp;
        if (den < 0.0) x += 0.5 * (ym - yp) / den * f.grid.dx();
    }
    return x;
}

double peak_value(const WaveField& f) {
    double v = f.u[0];
    for (double u : f.u) v = std::max(v, u);
    return v;
}

} // namespace

TEST_CASE("grid validation") {
    CHECK_THROWS_AS(validate(Grid{-10.0, 10.0, 100}), std::invalid_argument);
    CHECK_THROWS_AS(validate(Grid{-10.0, 10.0, 300}), std::invalid_argument);
    CHECK_NOTHROW(validate(Grid{-10.0, 10.0, 512}));
}

TEST_CASE("initial data") {
    Grid g{-128.0, 128.0, 2048};
    // pure soliton
    const auto sol = build_initial(std::nullopt, 2.0, 5.0, g, 0.5);
    CHECK(peak_value(sol) == doctest::Approx(2.0).epsilon(1e-4));
    CHECK(peak_position(sol) == doctest::Approx(5.0).epsilon(1e-3));
    // bare well
    WellSpec w(-1.0, 20.0);
    const auto bare = build_initial(w, 0.0, 0.0, g, 0.5);
    const int mid = (int)((10.0 - g.x_min) / g.dx());
    CHECK(bare.u[mid] == doctest::Approx(-1.0).epsilon(1e-6));
    CHECK(std::abs(bare.u[0]) < 1e-12);
    CHECK(std::abs(bare.u[g.n - 1]) < 1e-12);
    // margin guard
    CHECK_THROWS_AS(build_initial(std::nullopt, 2.0, 127.0, g, 0.5), std::invalid_argument);

    // smoothing converges to the ideal well in L1 as delta -> 0
    auto l1_err = [&](double delta) {
        const auto f = build_initial(w, 0.0, 0.0, g, delta);
        double err = 0.0;
        for (int i = 0; i < g.n; ++i) {
            const double x = g.x(i);
            const double ideal = (x > 0.0 && x < w.l) ? w.U0 : 0.0;
            err += std::abs(f.u[i] - ideal) * g.dx();
        }
        return err;
    };
    const double e1 = l1_err(1.0), e2 = l1_err(0.5), e3 = l1_err(0.25);
    CHECK(e2 < e1);
    CHECK(e3 < e2);
    CHECK(e3 < 0.5);
}

TEST_CASE("conserved quantities of known fields") {
    Grid g{-128.0, 128.0, 2048};
    WaveField zero{g, 0.0, std::vector<double>(g.n, 0.0)};
    const auto cz = conserved_quantities(zero);
    CHECK(cz.mass == doctest::Approx(0.0));
    CHECK(cz.momentum == doctest::Approx(0.0));
    CHECK(cz.energy == doctest::Approx(0.0));

    // soliton a sech^2(beta x), beta = sqrt(a/2):
    // mass 2a/beta, momentum (4/3)a^2/beta, energy (16/15)a^2 (a/beta - beta/2)
    const double a = 2.0, beta = std::sqrt(0.5 * a);
    const auto sol = build_initial(std::nullopt, a, 0.0, g, 0.5);
    const auto cs = conserved_quantities(sol);
    CHECK(cs.mass == doctest::Approx(2.0 * a / beta).epsilon(1e-10));
    CHECK(cs.mass == doctest::Approx(4.0).epsilon(1e-10));
    CHECK(cs.momentum == doctest::Approx(4.0 / 3.0 * a * a / beta).epsilon(1e-10));
    CHECK(cs.energy == doctest::Approx(16.0 / 15.0 * a * a * (a / beta - 0.5 * beta)).epsilon(1e-8));
}

TEST_CASE("exact soliton propagation") {
    Grid g{-128.0, 128.0, 4096};
    const double a = 2.0;
    const auto f0 = build_initial(std::nullopt, a, -20.0, g, 0.5);
    SolverConfig cfg;
    cfg.dt = 1e-3;
    cfg.sample_interval = 0.5;
    const auto ev = evolve(f0, 10.0, cfg);
    const auto& fT = ev.snapshots.back();
    CHECK(fT.t == doctest::Approx(10.0));

    // amplitude within 1%, position within 0.5% of the traveled distance
    CHECK(peak_value(fT) == doctest::Approx(a).epsilon(0.01));
    const double expect_x = -20.0 + 2.0 * a * 10.0;
    CHECK(std::abs(peak_position(fT) - expect_x) < 0.005 * (2.0 * a * 10.0));

    // conservation drift
    const auto c0 = conserved_quantities(ev.snapshots.front());
    const auto c1 = conserved_quantities(fT);
    CHECK(std::abs(c1.mass - c0.mass) / std::abs(c0.mass) < 1e-6);
    CHECK(std::abs(c1.momentum - c0.momentum) / std::abs(c0.momentum) < 1e-6);

    // wrap guard: nothing reaches the domain ends
    CHECK(ev.boundary_max_abs < 1e-6 * a);
}

TEST_CASE("zero data stays zero") {
    Grid g{-64.0, 64.0, 1024};
    WaveField zero{g, 0.0, std::vector<double>(g.n, 0.0)};
    SolverConfig cfg;
    cfg.dt = 1e-3;
    cfg.sample_interval = 0.5;
    const auto ev = evolve(zero, 1.0, cfg);
    for (double v : ev.snapshots.back().u) CHECK(std::abs(v) < 1e-14);
}

TEST_CASE("stability precondition") {
    Grid g{-64.0, 64.0, 1024};
    const auto f0 = build_initial(std::nullopt, 2.0, 0.0, g, 0.5);
    SolverConfig cfg;
    cfg.dt = 0.05; // far beyond the advective bound
    CHECK_THROWS_AS(evolve(f0, 1.0, cfg), std::invalid_argument);
}

TEST_CASE("bare well short evolution shows the five-region structure") {
    Grid g{-256.0, 256.0, 8192};
    WellSpec w(-1.0, 20.0);
    const auto f0 = build_initial(w, 0.0, 0.0, g, 0.5);
    SolverConfig cfg;
    cfg.dt = 1e-3;
    cfg.sample_interval = 0.5;
    const auto ev = evolve(f0, 3.0, cfg);
    const auto& f = ev.snapshots.back();

    auto u_at = [&](double x) { return f.u[(int)((x - g.x_min) / g.dx())]; };
    // plateau at the floor between x_P and x_P'
    CHECK(u_at(-1.0) == doctest::Approx(w.U0).epsilon(0.05));
    // fan midpoint near the interpolated value
    CHECK(u_at(11.0) == doctest::Approx((11.0 - 20.0) / 18.0).epsilon(0.15));
    // small outside (the smoothed step sheds weak precursor radiation)
    CHECK(std::abs(u_at(30.0)) < 0.05);
    CHECK(std::abs(u_at(-60.0)) < 0.15);
    // DSW oscillations present left of the plateau: find a crest above the floor
    double crest = -10.0;
    for (double x = -40.0; x < -7.0; x += 0.05) crest = std::max(crest, u_at(x));
    CHECK(crest > 0.5); // lead crest reaches far above the background
}

TEST_CASE("time reversal on a short smooth run") {
    Grid g{-64.0, 64.0, 1024};
    WaveField f0{g, 0.0, std::vector<double>(g.n)};
    for (int i = 0; i < g.n; ++i) {
        const double x = g.x(i);
        f0.u[i] = 0.3 * std::exp(-x * x / 16.0);
    }
    SolverConfig cfg;
    cfg.dt = 5e-4;
    cfg.sample_interval = 0.5;
    const double T = 1.0;
    const auto fwd = evolve(f0, T, cfg);

    // mirror x -> -x, evolve again, mirror back: recovers the initial data
    WaveField mir{g, 0.0, std::vector<double>(g.n)};
    for (int i = 0; i < g.n; ++i) mir.u[i] = fwd.snapshots.back().u[(g.n - i) % g.n];
    const auto back = evolve(mir, T, cfg);
    double max_err = 0.0;
    for (int i = 0; i < g.n; ++i) {
        const double recovered = back.snapshots.back().u[(g.n - i) % g.n];
        max_err = std::max(max_err, std::abs(recovered - f0.u[i]));
    }
    CHECK(max_err < 1e-4);
}

TEST_CASE("spatial resolution convergence") {
    const double a = 2.0, x0 = -20.0, T = 5.0;
    auto run = [&](int n) {
        Grid g{-128.0, 128.0, n};
        SolverConfig cfg;
        cfg.dt = 5e-4;
        cfg.sample_interval = 1.0;
        return peak_position(evolve(build_initial(std::nullopt, a, x0, g, 0.5), T, cfg)
                                 .snapshots.back());
    };
    const double coarse = run(2048), fine = run(4096);
    const double dx_coarse = 256.0 / 2048;
    CHECK(std::abs(fine - coarse) < 0.1 * dx_coarse);
}
