// Scenario catalog, end-to-end prediction-vs-simulation comparison,
// amplitude sweeps for the outcome classification table, and report/plot
// emission (CSV, JSON, SVG).

#ifndef KDVSM_HARNESS_HPP
#define KDVSM_HARNESS_HPP

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "kdvsm/meanfield.hpp"
#include "kdvsm/sim.hpp"
#include "kdvsm/soliton.hpp"
#include "kdvsm/tracker.hpp"

namespace kdvsm::harness {

struct Tolerances {
    double traj_rmse_frac = 0.05; // of the measured traversal
    double amp_rel = 0.05;
    double phase_abs = 2.0;
    double edge_rel = 0.10;
    double tstar_rel = 0.15;
    double mass_drift = 1e-6;
    double momentum_drift = 1e-6;
};

struct Scenario {
    std::string label = "custom";
    std::optional<meanfield::WellSpec> well;
    double a0 = 0.0; // 0 = bare well
    double x0 = 0.0;
    double t_end = 10.0;
    std::vector<double> report_times;
    sim::Grid grid{-700.0, 700.0, 16384};
    sim::SolverConfig solver{};
    double eps_dsw = 0.1; // EmbedDSW/EmbedLW split, default 0.05 * (-2 U0)
    Tolerances tol{};
    std::string output_dir = "out";
    bool dump_snapshots = false; // write snapshots/t<time>.csv during simulation
    std::string note;
};

// Built-in scenarios keyed to the reference runs: FIG1 (bare well) and the
// trial-soliton cases FIG5..FIG10.
std::vector<Scenario> catalog();

// Scenario by label from the catalog; throws when unknown.
Scenario scenario_by_label(const std::string& label);

// JSON config round trip (schema: U0, l, a0, x0, t_end, grid{...},
// solver{...}, tolerances{...}, output_dir).
Scenario scenario_from_json(const nlohmann::json& j);
nlohmann::ordered_json scenario_to_json(const Scenario& s);
Scenario load_config(const std::string& path);

enum class RunMode { predict, simulate, compare };

struct EdgeComparison {
    double t;
    std::string edge;
    double predicted;
    std::optional<double> measured;
    std::optional<double> rel_err;
};

struct ComparisonReport {
    Scenario scenario;
    RunMode mode;
    nlohmann::ordered_json json; // the full serializable report

    // analytics
    bool have_prediction = false;
    std::string class_pred;
    double amp_pred = 0.0, phase_pred = 0.0;
    soliton::TrajectoryPlan plan;
    bool plan_is_primary = false; // plan valid and used for the RMSE metric
    std::vector<soliton::PathSample> ode_path;

    // measurement
    bool have_measurement = false;
    std::vector<tracker::TrackPoint> trackpoints;
    std::string class_meas;
    std::optional<double> amp_meas, phase_meas, plateau_vanish_t;
    std::vector<EdgeComparison> edges;
    double mass_drift = 0.0, momentum_drift = 0.0, boundary_max_abs = 0.0;
    nlohmann::ordered_json json_extras = nlohmann::ordered_json::object();

    // comparison metrics
    std::optional<double> traj_rmse, traj_rmse_frac, amp_rel_err, phase_err;
    bool class_match = false;
    bool passed = false;
    std::vector<std::string> failures;
};

ComparisonReport run_scenario(const Scenario& s, RunMode mode,
                              bool write_files = false);

struct SweepRow {
    double a0;
    std::string predicted, measured;
    bool match = false;
    bool boundary_case = false; // |a0 + 2 U0| small: EmbedRW vs marginal tunnel
    bool acceptable = false;
    std::optional<double> amp_meas, final_x;
    std::string note;
};

struct SweepResult {
    std::vector<SweepRow> rows;
    double eps_empirical = 0.0; // largest amplitude measured as EmbedDSW
    bool all_acceptable = false;
};

SweepResult sweep(const std::vector<double>& amps, const Scenario& tmpl,
                  bool write_files = false);

// Emits report.json, trajectory.csv, boundaries.csv, track.csv and
// overlay.svg under <output_dir>/<label>/.
void render(const ComparisonReport& r);

} // namespace kdvsm::harness

#endif
