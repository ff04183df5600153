// kdvsm: soliton / mean-field interaction toolkit for the KdV equation.
//
//   kdvsm predict  <scenario|config.json>   analytics only
//   kdvsm simulate <scenario|config.json>   direct numerics only
//   kdvsm compare  <scenario|config.json>   both plus comparison metrics
//   kdvsm sweep    --amps a1,a2,...         classification sweep over a template
//   kdvsm selftest                          quick internal consistency checks
//
// Exit code 0 iff every requested comparison passed its tolerances.

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "kdvsm/elliptic.hpp"
#include "kdvsm/harness.hpp"
#include "kdvsm/whitham.hpp"

using namespace kdvsm;

namespace {

harness::Scenario resolve_scenario(const std::string& arg) {
    if (arg.size() > 5 && arg.substr(arg.size() - 5) == ".json")
        return harness::load_config(arg);
    return harness::scenario_by_label(arg);
}

void print_report(const harness::ComparisonReport& r) {
    std::printf("%s\n", r.json.dump(2).c_str());
}

int run_selftest() {
    int bad = 0;
    auto check = [&](bool ok, const char* what) {
        std::printf("%s  %s\n", ok ? "ok  " : "FAIL", what);
        if (!ok) ++bad;
    };

    using namespace elliptic;
    check(std::abs(ellip_K(0.0) - M_PI_2) < 1e-14, "K(0) = pi/2");
    check(std::abs(ellip_E(1.0) - 1.0) < 1e-14, "E(1) = 1");
    const double m = 0.37;
    const double legendre = ellip_E(m) * ellip_K(1 - m) + ellip_E(1 - m) * ellip_K(m)
                          - ellip_K(m) * ellip_K(1 - m);
    check(std::abs(legendre - M_PI_2) < 1e-12, "Legendre relation");
    check(std::abs(jacobi_cn(0.7, 0.0) - std::cos(0.7)) < 1e-12, "cn(u,0) = cos u");

    whitham::Genus1State st(-1.0, -0.4, 0.2);
    const auto v = whitham::whitham_velocities(st);
    check(v.v1 <= v.v2 && v.v2 <= v.v3, "velocity ordering");

    meanfield::WellSpec w(-1.0, 20.0);
    const double ts = meanfield::critical_time(w);
    check(std::abs(ts - 5.0) < 1e-14, "t* = 5 for U0=-1, l=20");
    const auto pre = meanfield::boundaries(w, ts * (1.0 - 1e-9));
    const auto post = meanfield::boundaries(w, ts * (1.0 + 1e-9));
    check(std::abs(pre.x_P - post.x_P) < 1e-6, "x_P continuous at t*");

    // short solver smoke: exact soliton keeps its speed
    harness::Scenario s;
    s.label = "selftest_soliton";
    s.a0 = 2.0;
    s.x0 = 0.0;
    s.t_end = 2.0;
    s.grid = {-128.0, 128.0, 1024};
    auto rep = harness::run_scenario(s, harness::RunMode::compare, false);
    bool amp_ok = rep.amp_rel_err && *rep.amp_rel_err < 0.02;
    check(amp_ok, "soliton amplitude retained over t=2");
    check(rep.momentum_drift < 1e-7, "momentum drift");

    std::printf(bad == 0 ? "selftest passed\n" : "selftest FAILED (%d)\n", bad);
    return bad == 0 ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"KdV soliton / mean-field interaction toolkit"};
    app.require_subcommand(1);

    std::string scenario_arg, template_arg = "FIG7", amps_arg, output_dir;

    auto add_common = [&](CLI::App* c, bool needs_scenario) {
        if (needs_scenario)
            c->add_option("scenario", scenario_arg, "catalog label or config.json path")
                ->required();
        c->add_option("--output-dir", output_dir, "directory for emitted files");
    };

    CLI::App* cmd_predict = app.add_subcommand("predict", "analytics only");
    add_common(cmd_predict, true);
    CLI::App* cmd_simulate = app.add_subcommand("simulate", "direct numerics only");
    add_common(cmd_simulate, true);
    CLI::App* cmd_compare = app.add_subcommand("compare", "prediction vs simulation");
    add_common(cmd_compare, true);
    CLI::App* cmd_sweep = app.add_subcommand("sweep", "amplitude classification sweep");
    cmd_sweep->add_option("--amps", amps_arg, "comma-separated amplitudes")->required();
    cmd_sweep->add_option("--template", template_arg, "template scenario label or config");
    cmd_sweep->add_option("--output-dir", output_dir, "directory for emitted files");
    CLI::App* cmd_selftest = app.add_subcommand("selftest", "internal consistency checks");

    CLI11_PARSE(app, argc, argv);

    try {
        if (cmd_selftest->parsed()) return run_selftest();

        if (cmd_sweep->parsed()) {
            harness::Scenario tmpl = resolve_scenario(template_arg);
            if (!output_dir.empty()) tmpl.output_dir = output_dir;
            std::vector<double> amps;
            std::string token;
            for (char ch : amps_arg + ",") {
                if (ch == ',') {
                    if (!token.empty()) amps.push_back(std::stod(token));
                    token.clear();
                } else {
                    token += ch;
                }
            }
            auto result = harness::sweep(amps, tmpl, true);
            std::printf("a0        predicted   measured    acceptable\n");
            for (const auto& row : result.rows)
                std::printf("%-9g %-11s %-11s %s %s\n", row.a0, row.predicted.c_str(),
                            row.measured.c_str(), row.acceptable ? "yes" : "NO",
                            row.note.c_str());
            std::printf("empirical eps boundary estimate: %g\n", result.eps_empirical);
            return result.all_acceptable ? 0 : 1;
        }

        harness::Scenario s = resolve_scenario(scenario_arg);
        if (!output_dir.empty()) s.output_dir = output_dir;
        harness::RunMode mode = cmd_predict->parsed()    ? harness::RunMode::predict
                                : cmd_simulate->parsed() ? harness::RunMode::simulate
                                                         : harness::RunMode::compare;
        auto rep = harness::run_scenario(s, mode, true);
        print_report(rep);
        if (mode == harness::RunMode::compare) return rep.passed ? 0 : 1;
        return 0;
    } catch (const std::exception& ex) {
        std::fprintf(stderr, "error: %s\n", ex.what());
        return 2;
    }
}
