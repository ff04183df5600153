#include "kdvsm/soliton.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "kdvsm/whitham.hpp"

namespace kdvsm::soliton {

using meanfield::WellSpec;

double q_invariant(double a, double ubar) {
    if (!(a > 0.0)) throw std::domain_error("q_invariant: amplitude must be positive");
    return 4.0 * ubar + 2.0 * a;
}

double soliton_speed(double a, double ubar) {
    if (!(a >= 0.0)) throw std::domain_error("soliton_speed: amplitude must be nonnegative");
    return 6.0 * ubar + 2.0 * a;
}

double p_factor(double q, double ubar) {
    const double arg = 4.0 * ubar - q;
    if (!(arg > 0.0))
        throw std::domain_error("p_factor: inadmissible background (4 ubar - q <= 0)");
    return 1.0 / std::sqrt(arg);
}

double transmit(double a_in, double u_in, double u_out) {
    if (!(a_in > 0.0)) throw std::domain_error("transmit: amplitude must be positive");
    const double a_out = a_in + 2.0 * (u_in - u_out);
    if (a_out <= 0.0)
        throw NonTransmissible("transmit: no transmission, a_out = "
                               + std::to_string(a_out));
    return a_out;
}

PhaseShift phase_shift(double k_in, double q, double u_in, double u_out, double x_minus) {
    const double num = q - 4.0 * u_out;
    const double den = q - 4.0 * u_in;
    if (!(num * den > 0.0))
        throw std::domain_error("phase_shift: inadmissible background pair");
    const double ratio = std::sqrt(num / den); // p(q,u_in)/p(q,u_out)
    PhaseShift r;
    r.k_out = k_in * ratio;
    const double x_plus = (r.k_out != 0.0) ? x_minus * k_in / r.k_out : x_minus;
    r.delta_x = x_plus - x_minus;
    return r;
}

std::string to_string(OutcomeKind k) {
    switch (k) {
        case OutcomeKind::Tunnel: return "Tunnel";
        case OutcomeKind::EmbedRW: return "EmbedRW";
        case OutcomeKind::EmbedLW: return "EmbedLW";
        case OutcomeKind::EmbedDSW: return "EmbedDSW";
        case OutcomeKind::NoInteraction: return "NoInteraction";
    }
    return "?";
}

OutcomeKind classify(double a0, double x0, const WellSpec& w, double eps) {
    if (!(a0 > 0.0)) throw std::domain_error("classify: amplitude must be positive");
    if (x0 < 0.0) return OutcomeKind::Tunnel;
    if (x0 >= w.l) return OutcomeKind::NoInteraction;
    const double a_thresh = -2.0 * w.U0;
    const double tol = 1e-12 * std::max(1.0, a_thresh);
    if (std::abs(a0 - a_thresh) <= tol) return OutcomeKind::EmbedRW;
    if (a0 > a_thresh) return OutcomeKind::Tunnel;
    if (a0 <= eps) return OutcomeKind::EmbedDSW;
    return OutcomeKind::EmbedLW;
}

double critical_amplitude_lw(double x0, const WellSpec& w) {
    if (!(x0 < 0.0)) throw std::domain_error("critical_amplitude_lw: need x0 < 0");
    return (w.l + 2.0 * x0) * w.U0 / w.l;
}

double TrajectoryPlan::eval(double t) const {
    if (segments.empty()) throw std::logic_error("TrajectoryPlan: empty plan");
    for (const auto& s : segments)
        if (t < s.t_end || &s == &segments.back()) return s.eval(t);
    return segments.back().eval(t);
}

TrajectoryPlan trajectory_left(double a_L, double x0, const WellSpec& w) {
    if (!(a_L > 0.0 && x0 < 0.0))
        throw std::domain_error("trajectory_left: need a_L > 0 and x0 < 0");
    const double U0 = w.U0, l = w.l;
    TrajectoryPlan p;
    p.T1 = -x0 / (2.0 * a_L - 12.0 * U0);
    p.T2 = p.T1 * (6.0 * U0 - a_L) / (U0 - a_L);
    p.T3 = (l + 2.0 * a_L * p.T2) / (2.0 * a_L - 4.0 * U0);
    p.T4 = p.T3 * std::pow((a_L - 2.0 * U0) / a_L, 1.5);
    p.dsw_window_begin = p.T1;
    p.dsw_window_end = p.T2;

    const double inf = std::numeric_limits<double>::infinity();
    p.segments.push_back({"L", 0.0, p.T1, x0, 2.0 * a_L, 0.0});
    p.segments.push_back({"DSW", p.T1, p.T2, (12.0 * U0 - 2.0 * a_L) * p.T1, 2.0 * a_L, 0.0});
    p.segments.push_back({"plateau", p.T2, p.T3, -2.0 * a_L * p.T2, 2.0 * (a_L + U0), 0.0});
    p.segments.push_back({"RW", p.T3, p.T4, l, 3.0 * a_L,
                          -3.0 * (a_L - 2.0 * U0) * std::pow(p.T3, 2.0 / 3.0)});
    p.segments.push_back({"R", p.T4, inf, l - 2.0 * a_L * p.T4, 2.0 * a_L, 0.0});

    const double ts = meanfield::critical_time(w);
    if (p.T3 > ts) {
        p.valid = false;
        p.note = "plateau vanishes before the soliton leaves it (T3 > t*); "
                 "path crosses the LW region, use trajectory_ode";
    }
    return p;
}

TrajectoryPlan trajectory_well(double a_M, double x0, const WellSpec& w, double eps) {
    if (!(x0 > 0.0 && x0 < w.l))
        throw std::domain_error("trajectory_well: need 0 < x0 < l");
    const OutcomeKind kind = classify(a_M, x0, w, eps);
    const double U0 = w.U0, l = w.l;
    const double ts = meanfield::critical_time(w);
    const double inf = std::numeric_limits<double>::infinity();
    const double plateau_speed = 6.0 * U0 + 2.0 * a_M;

    TrajectoryPlan p;
    if (kind == OutcomeKind::Tunnel || kind == OutcomeKind::EmbedRW) {
        // soliton overtakes the fan corner at t_arr = (l - x0)/(2 a_M),
        // always before t* on these branches
        const double t_arr = (l - x0) / (2.0 * a_M);
        p.T1 = t_arr;
        p.segments.push_back({"plateau", 0.0, t_arr, x0, plateau_speed, 0.0});
        const double C_rw = -3.0 * a_M * std::pow(t_arr, 2.0 / 3.0);
        if (kind == OutcomeKind::EmbedRW) {
            p.segments.push_back({"RW", t_arr, inf, l, 6.0 * U0 + 3.0 * a_M, C_rw});
            p.note = "embedded in the rarefaction fan";
            return p;
        }
        const double a_R = a_M + 2.0 * U0;
        const double t_exit = std::pow(a_M / a_R, 1.5) * t_arr;
        p.T2 = t_exit;
        p.segments.push_back({"RW", t_arr, t_exit, l, 6.0 * U0 + 3.0 * a_M, C_rw});
        p.segments.push_back({"R", t_exit, inf, l - 2.0 * a_R * t_exit, 2.0 * a_R, 0.0});
        return p;
    }
    if (kind == OutcomeKind::NoInteraction) {
        p.segments.push_back({"R", 0.0, inf, x0, 2.0 * a_M, 0.0});
        return p;
    }

    // embedding branches drift left relative to the shrinking plateau
    const double t_hit = x0 / (-4.0 * U0 - 2.0 * a_M); // reaches x_P
    const double t_arr = (l - x0) / (2.0 * a_M);       // fan corner reaches soliton
    const double t_entry = std::min({t_hit, t_arr, ts});
    p.T1 = t_entry;
    p.segments.push_back({"plateau", 0.0, t_entry, x0, plateau_speed, 0.0});
    const double x_entry = x0 + plateau_speed * t_entry;
    if (kind == OutcomeKind::EmbedDSW) {
        const double v = 2.0 * U0; // local DSW-edge speed
        p.segments.push_back({"DSW", t_entry, inf, x_entry - v * t_entry, v, 0.0});
        p.note = "embedded in the DSW region (advected at the edge speed)";
    } else {
        const double v = whitham::embed_speed_lw(U0, U0 + 0.5 * a_M, 0.0);
        p.segments.push_back({"LW", t_entry, inf, x_entry - v * t_entry, v, 0.0});
        p.note = "embedded in the LW region (advected at embed_speed_lw)";
    }
    return p;
}

OdeResult trajectory_ode(double a0, double x0, const MeanField& ubar,
                         double t_end, double dt) {
    if (!(a0 > 0.0)) throw std::domain_error("trajectory_ode: amplitude must be positive");
    if (!(dt > 0.0 && t_end > 0.0))
        throw std::domain_error("trajectory_ode: need positive dt and t_end");

    const double q0 = 4.0 * ubar(x0, 0.0) + 2.0 * a0;
    auto speed = [&](double x, double t) { return 2.0 * ubar(x, t) + q0; };
    auto amp = [&](double x, double t) { return 0.5 * (q0 - 4.0 * ubar(x, t)); };

    OdeResult r;
    double x = x0, t = 0.0;
    r.samples.push_back({t, x, a0});
    const long nsteps = std::lround(t_end / dt);
    for (long i = 0; i < nsteps; ++i) {
        const double k1 = speed(x, t);
        const double k2 = speed(x + 0.5 * dt * k1, t + 0.5 * dt);
        const double k3 = speed(x + 0.5 * dt * k2, t + 0.5 * dt);
        const double k4 = speed(x + dt * k3, t + dt);
        x += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        t = (i + 1) * dt;
        const double a = amp(x, t);
        r.samples.push_back({t, x, a});
        if (a <= 0.0) {
            r.embedded = true;
            r.embed_t = t;
            r.embed_x = x;
            break;
        }
    }
    return r;
}

double composite_mean(const WellSpec& w, double x, double t) {
    if (t <= 0.0) return (x > 0.0 && x < w.l) ? w.U0 : 0.0;
    if (x >= w.l) return 0.0;
    if (t < meanfield::critical_time(w)) {
        if (x >= w.l + 6.0 * w.U0 * t) return meanfield::rw_profile(w, x, t);
        if (x >= 2.0 * w.U0 * t) return w.U0;
        return 0.0; // DSW and left background
    }
    const double x_P =
        w.l - 1.5 * std::pow(std::sqrt(-4.0 * w.U0) * w.l, 2.0 / 3.0) * std::cbrt(t);
    if (x >= x_P) return meanfield::rw_profile(w, x, t);
    return 0.0; // LW, DSW and left background
}

} // namespace kdvsm::soliton
