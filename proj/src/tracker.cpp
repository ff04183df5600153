#include "kdvsm/tracker.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace kdvsm::tracker {

namespace {

double median_of(std::vector<double> v) {
    if (v.empty()) return 0.0;
    const size_t mid = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + mid, v.end());
    return v[mid];
}

int clamp_index(const sim::Grid& g, double x) {
    int i = (int)std::floor((x - g.x_min) / g.dx());
    return std::clamp(i, 0, g.n - 1);
}

} // namespace

TrackPoint detect_soliton(const sim::WaveField& f, double hint_center,
                          double hint_halfwidth, double prominence_threshold) {
    const sim::Grid& g = f.grid;
    TrackPoint pt;
    pt.t = f.t;
    const int i0 = clamp_index(g, hint_center - hint_halfwidth);
    const int i1 = clamp_index(g, hint_center + hint_halfwidth);
    if (i1 - i0 < 4) return pt; // window too small: no_peak

    int ipk = i0;
    for (int i = i0; i <= i1; ++i)
        if (f.u[i] > f.u[ipk]) ipk = i;

    std::vector<double> win(f.u.begin() + i0, f.u.begin() + i1 + 1);
    const double base = median_of(win);
    const double prominence = f.u[ipk] - base;
    if (prominence < prominence_threshold) return pt;

    // parabolic sub-grid refinement
    double x_pk = g.x(ipk), u_pk = f.u[ipk];
    if (ipk > 0 && ipk < g.n - 1) {
        const double ym = f.u[ipk - 1], y0 = f.u[ipk], yp = f.u[ipk + 1];
        const double denom = ym - 2.0 * y0 + yp;
        if (denom < 0.0) {
            const double s = 0.5 * (ym - yp) / denom;
            x_pk += s * g.dx();
            u_pk = y0 - 0.25 * (ym - yp) * s;
        }
    }

    // local background: median over bands two to four soliton-widths out on
    // both sides (full width 2 sqrt(2/a): far enough that the sech^2 tails
    // are below 1e-3 of the amplitude)
    const double w = 2.0 * std::sqrt(2.0 / std::max(prominence, 0.05));
    std::vector<double> bg;
    for (int side = -1; side <= 1; side += 2) {
        const int ja = clamp_index(g, x_pk + side * 4.0 * w);
        const int jb = clamp_index(g, x_pk + side * 2.0 * w);
        for (int j = std::min(ja, jb); j <= std::max(ja, jb); ++j) bg.push_back(f.u[j]);
    }
    pt.ubar_local = median_of(bg);
    pt.x_peak = x_pk;
    pt.a_meas = u_pk - pt.ubar_local;
    pt.flag = DetectFlag::ok;

    // a second local maximum of comparable prominence marks ambiguity
    const int sep = std::max(2, (int)std::ceil(2.0 * w / g.dx()));
    for (int i = std::max(i0 + 1, 1); i < std::min(i1, g.n - 1); ++i) {
        if (std::abs(i - ipk) < sep) continue;
        if (f.u[i] > f.u[i - 1] && f.u[i] >= f.u[i + 1]
            && f.u[i] - pt.ubar_local >= 0.6 * pt.a_meas) {
            pt.flag = DetectFlag::ambiguous;
            break;
        }
    }
    return pt;
}

std::vector<TrackPoint> track(const std::vector<sim::WaveField>& snaps,
                              const TrackConfig& cfg) {
    std::vector<TrackPoint> out;
    if (snaps.empty()) return out;
    for (size_t i = 1; i < snaps.size(); ++i)
        if (!(snaps[i].t > snaps[i - 1].t))
            throw std::invalid_argument("track: snapshots must be strictly time-ordered");

    const double threshold = cfg.prominence_frac * cfg.a0;
    double last_x = cfg.x0, drift = cfg.speed_hint, last_t = snaps.front().t;
    double last_a = cfg.a0;
    double widen = 1.0;
    bool have_last = false;

    for (const auto& f : snaps) {
        const double dt_pred = f.t - last_t;
        const double hint = last_x + drift * dt_pred;
        const double halfwidth =
            widen * std::max({cfg.base_halfwidth, 2.0 * std::abs(drift) * dt_pred,
                              6.0 / std::sqrt(std::max(cfg.a0, 0.5))});
        TrackPoint pt = detect_soliton(f, hint, halfwidth, threshold);
        if (pt.flag == DetectFlag::ok && have_last && dt_pred > 0.0) {
            // continuity gates: a taller foreign structure drifting into the
            // window must not steal the track
            const double implied = std::abs(pt.x_peak - last_x) / dt_pred;
            const bool amp_ok = pt.a_meas >= cfg.amp_band_lo * last_a &&
                                pt.a_meas <= cfg.amp_band_hi * last_a;
            if (implied > cfg.speed_cap || !amp_ok) pt.flag = DetectFlag::ambiguous;
        }
        if (pt.flag == DetectFlag::ok) {
            if (have_last && f.t > last_t)
                drift = (pt.x_peak - last_x) / (f.t - last_t);
            last_x = pt.x_peak;
            last_t = f.t;
            last_a = pt.a_meas;
            have_last = true;
            widen = 1.0;
        } else {
            // dead-reckon the window forward and widen it until re-acquired
            last_x = hint;
            last_t = f.t;
            widen = std::min(widen * 1.3, 3.0);
        }
        out.push_back(pt);
    }
    return out;
}

std::optional<double> find_train_defect(const sim::WaveField& f,
                                        double zone_lo, double zone_hi) {
    const sim::Grid& g = f.grid;
    const int i0 = clamp_index(g, zone_lo), i1 = clamp_index(g, zone_hi);

    // crest list with sub-grid positions
    struct Crest {
        double x, h;
    };
    std::vector<Crest> crests;
    for (int i = std::max(1, i0); i < std::min(i1, g.n - 1); ++i) {
        if (!(f.u[i] > f.u[i - 1] && f.u[i] >= f.u[i + 1])) continue;
        double x = g.x(i), h = f.u[i];
        const double den = f.u[i - 1] - 2.0 * f.u[i] + f.u[i + 1];
        if (den < 0.0) x += 0.5 * (f.u[i - 1] - f.u[i + 1]) / den * g.dx();
        crests.push_back({x, h});
    }
    if (crests.size() < 9) return std::nullopt;

    // height anomaly against the local median of surrounding crests (the
    // train envelope varies slowly; the defect is a localized dropout)
    double best_score = 0.0, best_x = 0.0;
    for (size_t i = 4; i + 4 < crests.size(); ++i) {
        std::vector<double> nb;
        for (int off = -4; off <= 4; ++off)
            if (off != 0) nb.push_back(crests[i + off].h);
        const double med = median_of(nb);
        if (med <= 0.1) continue;
        const double score = (med - crests[i].h) / med;
        if (score > best_score) {
            best_score = score;
            best_x = crests[i].x;
        }
    }
    if (best_score > 0.45) return best_x;
    return std::nullopt;
}

namespace {

// least-squares line through (t, x) pairs
struct LineFit {
    double slope = 0.0, intercept = 0.0;
};

LineFit fit_line(const std::vector<double>& t, const std::vector<double>& x) {
    const size_t n = t.size();
    double st = 0, sx = 0, stt = 0, stx = 0;
    for (size_t i = 0; i < n; ++i) {
        st += t[i];
        sx += x[i];
        stt += t[i] * t[i];
        stx += t[i] * x[i];
    }
    const double d = n * stt - st * st;
    LineFit f;
    f.slope = (n * stx - st * sx) / d;
    f.intercept = (sx * stt - st * stx) / d;
    return f;
}

} // namespace

EdgeSet measure_edges(const sim::WaveField& f, const meanfield::WellSpec& w,
                      const EdgeConfig& cfg) {
    const sim::Grid& g = f.grid;
    EdgeSet e;
    e.t = f.t;
    const double absU = std::abs(w.U0);
    const double wiggle = 0.02 * absU;

    // locate the fan: the rightmost long monotone descent (marching left)
    // whose u-extent clears the radiation scale. Precursor radiation breaks
    // into short runs; LW oscillations sit further left.
    int i_run_hi = -1;
    double run_min = 0.0, run_max = 0.0;
    int i_seed = -1;
    for (int i = g.n - 1; i >= 0; --i) {
        const double u = f.u[i];
        if (i_run_hi < 0 || u > run_min + wiggle) {
            i_run_hi = i;
            run_min = run_max = u;
            continue;
        }
        run_min = std::min(run_min, u);
        run_max = std::max(run_max, u);
        if (run_max - run_min >= 0.18 * absU && run_min <= -0.15 * absU) {
            i_seed = i;
            break;
        }
    }
    if (i_seed < 0) return e;

    // collect the fit band [0.88 U0, 0.12 U0]: continue left while the
    // descent holds, and take the part of the located run right of the seed
    std::vector<double> fan_x, fan_u;
    int i_stop = -1;
    for (int i = i_run_hi; i > i_seed; --i) {
        const double u = f.u[i];
        if (u <= 0.12 * w.U0 && u >= 0.88 * w.U0) {
            fan_x.push_back(g.x(i));
            fan_u.push_back(u);
        }
    }
    double u_prev = f.u[i_seed];
    for (int i = i_seed; i >= 0; --i) {
        const double u = f.u[i];
        if (u > u_prev + wiggle) { i_stop = i; break; }
        u_prev = std::min(u_prev, u);
        if (u < 0.88 * w.U0) { i_stop = i; break; }
        if (u <= 0.12 * w.U0) {
            fan_x.push_back(g.x(i));
            fan_u.push_back(u);
        }
    }
    const bool have_fan = fan_x.size() >= 8;
    LineFit fan;
    if (have_fan) fan = fit_line(fan_x, fan_u);

    // x_R: fan line extrapolated to the far-field level (threshold crossings
    // overshoot by the dispersive corner width)
    if (have_fan && fan.slope > 0.0) e.x_R = -fan.intercept / fan.slope;

    // plateau: longest run at the floor level left of the fan
    const double scan_lo = (i_stop >= 0 ? g.x(i_stop) : g.x_min) - std::max(20.0, w.l)
                         - 6.0 * absU * f.t;
    double run_start = 0.0, best_lo = 0.0, best_hi = -1.0;
    bool in_run = false;
    const int j0 = clamp_index(g, scan_lo);
    const int j1 = i_stop >= 0 ? i_stop : clamp_index(g, 0.0);
    for (int j = j0; j <= j1; ++j) {
        if (std::abs(f.u[j] - w.U0) <= 0.06 * absU) {
            if (!in_run) { in_run = true; run_start = g.x(j); }
            if (g.x(j) - run_start > best_hi - best_lo) {
                best_lo = run_start;
                best_hi = g.x(j);
            }
        } else {
            in_run = false;
        }
    }
    const bool have_plateau = best_hi - best_lo >= 1.5;

    auto departure_scan = [&](double x_from, int dir, double level) -> std::optional<double> {
        // first u > level marching from x_from in direction dir, interpolated
        int i = clamp_index(g, x_from);
        for (; i > 1 && i < g.n - 1; i += dir) {
            if (f.u[i] > level) {
                const int ip = i - dir;
                const double w1 = (level - f.u[ip]) / (f.u[i] - f.u[ip]);
                return g.x(ip) + w1 * (g.x(i) - g.x(ip));
            }
        }
        return std::nullopt;
    };

    if (have_plateau) {
        // plateau/fan corner and plateau/DSW edge: departure of u above the
        // floor by 5% of the depth, scanning outward from the plateau
        const double mid = 0.5 * (best_lo + best_hi);
        const double level = w.U0 + 0.05 * absU;
        e.x_P_prime = departure_scan(mid, +1, level);
        e.x_P = departure_scan(mid, -1, level);
    } else if (have_fan) {
        // post-critical: oscillation onset along the fan marks the LW/RW
        // boundary; the residual threshold sits just above the fit noise
        const double onset = 0.012 * absU;
        double r_prev = 0.0;
        for (int i = i_seed; i > 1; --i) {
            const double r = std::abs(f.u[i] - (fan.intercept + fan.slope * g.x(i)));
            if (r > onset) {
                const double w1 = (onset - r_prev) / (r - r_prev);
                e.x_P = g.x(i + 1) - w1 * g.dx();
                break;
            }
            r_prev = r;
            if (f.u[i] < w.U0) break;
        }
    }

    // x_L: leftmost sustained oscillation clearly above the precursor
    // radiation (bursty radiation spikes are skipped by requiring the
    // envelope to stay up over a trailing stretch)
    const double lead_thresh = cfg.osc_threshold_frac * absU;
    const int half = std::max(1, (int)std::lround(2.0 / g.dx()));
    const int span = std::max(1, (int)std::lround(8.0 / g.dx()));
    std::vector<double> env(g.n, 0.0);
    for (int i = 0; i < g.n; ++i) {
        double m = 0.0;
        for (int j = std::max(0, i - half); j <= std::min(g.n - 1, i + half); ++j)
            m = std::max(m, std::abs(f.u[j]));
        env[i] = m;
    }
    for (int i = 0; i < g.n - span - 1; ++i) {
        if (std::abs(f.u[i]) <= lead_thresh) continue;
        double lowest = 1e300;
        for (int j = i; j <= i + span; j += half) lowest = std::min(lowest, env[j]);
        if (lowest > 0.7 * lead_thresh) {
            e.x_L = g.x(i);
            break;
        }
    }
    return e;
}

double plateau_width(const sim::WaveField& f, const meanfield::WellSpec& w,
                     double tol_frac, double min_width) {
    const sim::Grid& g = f.grid;
    const double tol = tol_frac * std::abs(w.U0);
    // restrict to the span where the plateau can live: between the DSW edge
    // and the fan foot, with a safety margin for the lead-crest width
    const double lo = 2.0 * w.U0 * f.t;
    const double hi = w.l + 6.0 * w.U0 * f.t + 0.5;
    double best = 0.0, run_start = 0.0;
    bool in_run = false;
    for (int i = clamp_index(g, lo); i <= clamp_index(g, hi); ++i) {
        if (std::abs(f.u[i] - w.U0) < tol) {
            if (!in_run) {
                in_run = true;
                run_start = g.x(i);
            }
            best = std::max(best, g.x(i) - run_start);
        } else {
            in_run = false;
        }
    }
    return best >= min_width ? best : 0.0;
}

double measure_phase_shift(const std::vector<TrackPoint>& points, double x0,
                           double exit_x, double min_tail_fraction) {
    if (points.empty()) throw std::invalid_argument("measure_phase_shift: empty track");
    const double t_begin = points.front().t, t_end = points.back().t;
    std::vector<double> t, x;
    for (const auto& p : points)
        if (p.flag == DetectFlag::ok && p.x_peak > exit_x) {
            t.push_back(p.t);
            x.push_back(p.x_peak);
        }
    if (t.size() < 4 || (t_end - t.front()) < min_tail_fraction * (t_end - t_begin))
        throw InsufficientTail("measure_phase_shift: post-exit track spans less than "
                               + std::to_string(min_tail_fraction) + " of the run");
    // asymptotic estimate: the freshly exited soliton is still shedding its
    // dressing, so fit only the second half of the post-exit stretch
    const double t_mid = 0.5 * (t.front() + t.back());
    std::vector<double> tl, xl;
    for (size_t i = 0; i < t.size(); ++i)
        if (t[i] >= t_mid) {
            tl.push_back(t[i]);
            xl.push_back(x[i]);
        }
    const LineFit fit = fit_line(tl, xl);
    return fit.intercept - x0; // reference: free flight from (0, x0) at the fitted slope
}

void write_track_csv(const std::vector<TrackPoint>& points, const std::string& path) {
    std::FILE* fp = std::fopen(path.c_str(), "w");
    if (!fp) throw std::runtime_error("write_track_csv: cannot open " + path);
    std::fprintf(fp, "t,x_peak,a_meas,ubar_local,flag\n");
    for (const auto& p : points) {
        const char* flag = p.flag == DetectFlag::ok        ? "ok"
                         : p.flag == DetectFlag::ambiguous ? "ambiguous"
                                                           : "no_peak";
        std::fprintf(fp, "%.17g,%.17g,%.17g,%.17g,%s\n", p.t, p.x_peak, p.a_meas,
                     p.ubar_local, flag);
    }
    std::fclose(fp);
}

} // namespace kdvsm::tracker
