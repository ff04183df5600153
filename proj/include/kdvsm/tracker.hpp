// Measurement of simulation output: soliton position and amplitude by
// sub-grid peak detection, region-edge detection for the bare-well geometry,
// and the empirical phase shift against a free-flight reference.

#ifndef KDVSM_TRACKER_HPP
#define KDVSM_TRACKER_HPP

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "kdvsm/meanfield.hpp"
#include "kdvsm/sim.hpp"

namespace kdvsm::tracker {

enum class DetectFlag { ok, no_peak, ambiguous };

struct TrackPoint {
    double t = 0.0;
    double x_peak = 0.0;
    double a_meas = 0.0;
    double ubar_local = 0.0;
    DetectFlag flag = DetectFlag::no_peak;
};

// Peak of u inside [hint_center - hint_halfwidth, hint_center + hint_halfwidth]:
// parabolic sub-grid position, local background from the median of u over
// bands two to four soliton-widths away on both sides, amplitude above that
// background. no_peak when the prominence stays below the threshold,
// ambiguous when a second comparable peak (>= 60% prominence) is present.
TrackPoint detect_soliton(const sim::WaveField& f, double hint_center,
                          double hint_halfwidth, double prominence_threshold);

struct TrackConfig {
    double x0 = 0.0;            // initial soliton position
    double a0 = 1.0;            // initial amplitude (sets the prominence scale)
    double speed_hint = 0.0;    // initial drift estimate
    double prominence_frac = 0.05; // threshold = prominence_frac * a0
    double base_halfwidth = 4.0;
    double speed_cap = 40.0;    // candidates implying faster motion are rejected
    double amp_band_lo = 0.35;  // accepted amplitude range relative to the
    double amp_band_hi = 3.0;   // last confirmed amplitude
};

// Chains detections through time-ordered snapshots; the next window is
// centered on the previous position advanced by the estimated drift.
// Candidate peaks are gated by implied speed and amplitude continuity, so a
// taller foreign structure entering the window does not steal the track.
// Failed detections are kept (flagged), never silently interpolated.
std::vector<TrackPoint> track(const std::vector<sim::WaveField>& snaps,
                              const TrackConfig& cfg);

// A soliton trapped in the modulated crest train appears as a localized
// defect (a crest far below its neighbors, or a spacing gap). Returns the
// defect position inside [zone_lo, zone_hi] of the given snapshot, if one
// stands out against the local crest statistics.
std::optional<double> find_train_defect(const sim::WaveField& f,
                                        double zone_lo, double zone_hi);

struct EdgeSet {
    double t = 0.0;
    std::optional<double> x_L, x_P, x_P_prime, x_R;
};

struct EdgeConfig {
    double edge_threshold_frac = 0.02; // of |U0|, locates the fan from the right
    double osc_threshold_frac = 0.15;  // of |U0|, x_L must clear the precursor radiation
};

// Bare-well region edges of one snapshot. x_R from the fan-line fit
// extrapolated to the far-field level; while the plateau exists, x_P_prime
// and x_P are the departure points of u above the floor scanning outward
// from the plateau; afterwards x_P is the oscillation onset along the fan
// (LW/RW boundary); x_L is the leftmost oscillation exceeding the
// threshold. Missing structure leaves the edge unset.
EdgeSet measure_edges(const sim::WaveField& f, const meanfield::WellSpec& w,
                      const EdgeConfig& cfg = {});

// Measured plateau width around the floor level; 0 once no contiguous run
// of at least min_width at |u - U0| < tol_frac |U0| remains between the DSW
// and the fan foot.
double plateau_width(const sim::WaveField& f, const meanfield::WellSpec& w,
                     double tol_frac = 0.1, double min_width = 2.0);

struct InsufficientTail : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Offset of the post-interaction straight-line fit against free flight from
// (t=0, x0) at the fitted slope. Uses samples with x_peak > exit_x; throws
// InsufficientTail when those span less than min_tail_fraction of the run.
double measure_phase_shift(const std::vector<TrackPoint>& points, double x0,
                           double exit_x, double min_tail_fraction = 0.2);

// CSV dump: t,x_peak,a_meas,ubar_local,flag.
void write_track_csv(const std::vector<TrackPoint>& points, const std::string& path);

} // namespace kdvsm::tracker

#endif
