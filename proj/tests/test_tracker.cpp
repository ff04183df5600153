#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "kdvsm/sim.hpp"
#include "kdvsm/tracker.hpp"

using namespace kdvsm;
using namespace kdvsm::tracker;

namespace {

sim::WaveField synthetic(const sim::Grid& g, double t,
                         const std::function<double(double)>& fn) {
    sim::WaveField f{g, t, std::vector<double>(g.n)};
    for (int i = 0; i < g.n; ++i) f.u[i] = fn(g.x(i));
    return f;
}

double sech2(double s) {
    const double c = 1.0 / std::cosh(s);
    return c * c;
}

} // namespace

TEST_CASE("detect_soliton on synthetic fields") {
    sim::Grid g{-100.0, 100.0, 4096};
    // exact soliton on zero background
    const auto f1 = synthetic(g, 0.0, [](double x) {
        return 2.0 * sech2(std::sqrt(1.0) * (x - 7.0));
    });
    const auto p1 = detect_soliton(f1, 7.5, 10.0, 0.1);
    REQUIRE(p1.flag == DetectFlag::ok);
    CHECK(std::abs(p1.a_meas - 2.0) < 1e-3);
    CHECK(std::abs(p1.x_peak - 7.0) < 0.5 * g.dx());

    // tall soliton on the well floor
    const auto f2 = synthetic(g, 0.0, [](double x) {
        return -1.0 + 10.0 * sech2(std::sqrt(5.0) * (x - 3.0));
    });
    const auto p2 = detect_soliton(f2, 3.0, 10.0, 0.5);
    REQUIRE(p2.flag == DetectFlag::ok);
    CHECK(std::abs(p2.a_meas - 10.0) < 1e-2);
    CHECK(std::abs(p2.ubar_local - (-1.0)) < 1e-3);

    // flat field: nothing to find
    const auto f3 = synthetic(g, 0.0, [](double) { return -0.3; });
    CHECK(detect_soliton(f3, 0.0, 20.0, 0.05).flag == DetectFlag::no_peak);

    // two comparable peaks: ambiguous
    const auto f4 = synthetic(g, 0.0, [](double x) {
        return 1.0 * sech2(x - 2.0) + 0.8 * sech2(x + 6.0);
    });
    CHECK(detect_soliton(f4, 0.0, 15.0, 0.05).flag == DetectFlag::ambiguous);
}

TEST_CASE("detection invariances") {
    sim::Grid g{-100.0, 100.0, 4096};
    for (double shift : {-31.4, 0.0, 12.7}) {
        const auto f = synthetic(g, 0.0, [&](double x) {
            return 1.5 * sech2(std::sqrt(0.75) * (x - shift));
        });
        const auto p = detect_soliton(f, shift + 0.4, 8.0, 0.05);
        REQUIRE(p.flag == DetectFlag::ok);
        CHECK(std::abs(p.x_peak - shift) < 0.5 * g.dx());
    }
    // adding a constant re-estimates the background, amplitude unchanged
    const auto fa = synthetic(g, 0.0, [](double x) { return 1.5 * sech2(x); });
    const auto fb = synthetic(g, 0.0, [](double x) { return 0.37 + 1.5 * sech2(x); });
    const auto pa = detect_soliton(fa, 0.0, 8.0, 0.05);
    const auto pb = detect_soliton(fb, 0.0, 8.0, 0.05);
    CHECK(std::abs(pa.a_meas - pb.a_meas) < 1e-6);
}

TEST_CASE("track follows a free soliton") {
    sim::Grid g{-128.0, 128.0, 2048};
    const double a = 2.0;
    const auto f0 = sim::build_initial(std::nullopt, a, -40.0, g, 0.5);
    sim::SolverConfig cfg;
    cfg.dt = 1e-3;
    cfg.sample_interval = 0.25;
    const auto ev = sim::evolve(f0, 5.0, cfg);

    TrackConfig tc;
    tc.x0 = -40.0;
    tc.a0 = a;
    tc.speed_hint = 2.0 * a;
    const auto pts = track(ev.snapshots, tc);
    REQUIRE(pts.size() == ev.snapshots.size());
    for (size_t i = 1; i < pts.size(); ++i) CHECK(pts[i].t > pts[i - 1].t);

    // least-squares speed within 1% of 2a
    double st = 0, sx = 0, stt = 0, stx = 0;
    int n = 0;
    for (const auto& p : pts) {
        if (p.flag != DetectFlag::ok) continue;
        st += p.t; sx += p.x_peak; stt += p.t * p.t; stx += p.t * p.x_peak; ++n;
    }
    REQUIRE(n > 10);
    const double slope = (n * stx - st * sx) / (n * stt - st * st);
    CHECK(std::abs(slope - 2.0 * a) / (2.0 * a) < 0.01);

    // no-well control: phase shift compatible with zero
    const double dx = measure_phase_shift(pts, -40.0, -1000.0, 0.2);
    CHECK(std::abs(dx) < g.dx());
}

TEST_CASE("phase shift needs a long enough tail") {
    std::vector<TrackPoint> pts;
    for (int i = 0; i <= 100; ++i) {
        TrackPoint p;
        p.t = 0.1 * i;
        p.x_peak = -10.0 + 4.0 * p.t;
        p.flag = DetectFlag::ok;
        pts.push_back(p);
    }
    CHECK_THROWS_AS(measure_phase_shift(pts, -10.0, 25.0, 0.2), InsufficientTail);
    CHECK(std::abs(measure_phase_shift(pts, -10.0, -5.0, 0.2)) < 1e-9);
}

TEST_CASE("edges on a synthetic bare-well snapshot") {
    // mimic the t = 3 structure: DSW on [-36,-6] with its lead soliton
    // whose right flank departs the floor near -6, plateau, fan [2,20]
    sim::Grid g{-256.0, 256.0, 8192};
    meanfield::WellSpec w(-1.0, 20.0);
    const double t = 3.0;
    const auto f = synthetic(g, t, [&](double x) {
        if (x < -36.0) return 0.0;
        if (x < -11.0) {
            // modulated train, amplitude growing toward the soliton edge
            const double s = (x + 36.0) / (36.0 - 11.0);
            return -s + s * 2.0 * std::cos(2.0 * (x + 36.0)) * 0.5 * (1 - std::cos(M_PI * s));
        }
        if (x < -4.0) return -1.0 + 2.0 * sech2(x + 8.5); // lead crest at x = -8.5
        if (x < 2.0) return -1.0;
        if (x < 20.0) return (x - 20.0) / 18.0;
        return 0.0;
    });
    const auto e = measure_edges(f, w);
    REQUIRE(e.x_R);
    CHECK(std::abs(*e.x_R - 20.0) < 0.5);
    REQUIRE(e.x_P_prime);
    // the 5%-departure convention sits 0.05 * 6 |U0| t right of the ideal corner
    CHECK(std::abs(*e.x_P_prime - 2.9) < 0.2);
    REQUIRE(e.x_P);
    // departure point of the lead flank above the floor: -8.5 + arcsech
    CHECK(std::abs(*e.x_P - (-5.97)) < 0.3);
    REQUIRE(e.x_L);
    CHECK(std::abs(*e.x_L - (-36.0)) < 4.5); // threshold crossing bias of the taper
}

TEST_CASE("track csv dump") {
    std::vector<TrackPoint> pts(3);
    pts[0] = {0.0, 1.0, 2.0, 0.0, DetectFlag::ok};
    pts[1] = {1.0, 5.0, 2.0, 0.0, DetectFlag::ambiguous};
    pts[2] = {2.0, 9.0, 2.0, 0.0, DetectFlag::no_peak};
    write_track_csv(pts, "/tmp/kdvsm_track_test.csv");
    std::FILE* fp = std::fopen("/tmp/kdvsm_track_test.csv", "r");
    REQUIRE(fp);
    char line[256];
    REQUIRE(std::fgets(line, sizeof line, fp));
    CHECK(std::string(line) == "t,x_peak,a_meas,ubar_local,flag\n");
    std::fclose(fp);
}
