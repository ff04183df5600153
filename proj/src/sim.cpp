#include "kdvsm/sim.hpp"

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <cstdio>
#include <stdexcept>

namespace kdvsm::sim {

void validate(const Grid& g) {
    if (!(g.x_max > g.x_min)) throw std::invalid_argument("Grid: empty domain");
    if (g.n < 256 || (g.n & (g.n - 1)) != 0)
        throw std::invalid_argument("Grid: n must be a power of two >= 256");
}

WaveField build_initial(const std::optional<meanfield::WellSpec>& well,
                        double a0, double x0, const Grid& g, double smoothing_delta) {
    validate(g);
    if (a0 < 0.0) throw std::invalid_argument("build_initial: negative amplitude");
    if (!(smoothing_delta > 0.0))
        throw std::invalid_argument("build_initial: smoothing_delta must be positive");

    const double width = (a0 > 0.0) ? 1.0 / std::sqrt(0.5 * a0) : smoothing_delta;
    const double margin = 10.0 * width;
    double lo = x0 - margin, hi = x0 + margin;
    if (well) {
        lo = std::min(lo, 0.0 - margin);
        hi = std::max(hi, well->l + margin);
    }
    if (a0 > 0.0 || well) {
        if (lo < g.x_min || hi > g.x_max)
            throw std::invalid_argument("build_initial: initial data too close to the domain ends");
    }

    WaveField f;
    f.grid = g;
    f.t = 0.0;
    f.u.resize(g.n);
    auto step = [](double s) { return 0.5 * (1.0 + std::tanh(s)); };
    for (int i = 0; i < g.n; ++i) {
        const double x = g.x(i);
        double u = 0.0;
        if (well)
            u += well->U0 * (step(x / smoothing_delta) - step((x - well->l) / smoothing_delta));
        if (a0 > 0.0) {
            const double s = std::sqrt(0.5 * a0) * (x - x0);
            const double c = 1.0 / std::cosh(s);
            u += a0 * c * c;
        }
        f.u[i] = u;
    }
    return f;
}

namespace {

// FFTW working set for one evolve() run. Spectra are stored normalized
// (forward transform divided by n), so c2r alone inverts.
struct Spectral {
    int n, nc;
    double inv_n;
    std::vector<double> k;             // wavenumbers of the r2c half-spectrum
    std::vector<double> real_buf;
    std::vector<std::complex<double>> cplx_buf;
    fftw_plan fwd, bwd;

    explicit Spectral(const Grid& g)
        : n(g.n), nc(g.n / 2 + 1), inv_n(1.0 / g.n), k(nc),
          real_buf(g.n), cplx_buf(nc) {
        const double dk = 2.0 * M_PI / g.length();
        for (int j = 0; j < nc; ++j) k[j] = j * dk;
        fwd = fftw_plan_dft_r2c_1d(n, real_buf.data(),
                                   reinterpret_cast<fftw_complex*>(cplx_buf.data()),
                                   FFTW_ESTIMATE);
        bwd = fftw_plan_dft_c2r_1d(n, reinterpret_cast<fftw_complex*>(cplx_buf.data()),
                                   real_buf.data(), FFTW_ESTIMATE);
    }
    ~Spectral() {
        fftw_destroy_plan(fwd);
        fftw_destroy_plan(bwd);
    }
    Spectral(const Spectral&) = delete;
    Spectral& operator=(const Spectral&) = delete;

    void forward(const std::vector<double>& u, std::vector<std::complex<double>>& uh) {
        real_buf = u;
        fftw_execute(fwd);
        uh.resize(nc);
        for (int j = 0; j < nc; ++j) uh[j] = cplx_buf[j] * inv_n;
    }
    void backward(const std::vector<std::complex<double>>& uh, std::vector<double>& u) {
        cplx_buf = uh;
        fftw_execute(bwd);
        u = real_buf;
    }
};

} // namespace

EvolveResult evolve(const WaveField& initial, double t_end, const SolverConfig& cfg) {
    validate(initial.grid);
    if ((int)initial.u.size() != initial.grid.n)
        throw std::invalid_argument("evolve: field length does not match grid");
    if (!(cfg.dt > 0.0)) throw std::invalid_argument("evolve: dt must be positive");
    if (!(cfg.dealias_fraction > 0.0 && cfg.dealias_fraction <= 1.0))
        throw std::invalid_argument("evolve: dealias_fraction outside (0,1]");
    if (!(cfg.sample_interval >= cfg.dt))
        throw std::invalid_argument("evolve: sample_interval must be >= dt");

    const Grid& g = initial.grid;
    double max_u0 = 0.0;
    for (double v : initial.u) max_u0 = std::max(max_u0, std::abs(v));
    const double cfl_limit = cfg.cfl_safety * g.dx() / std::max(1.0, 6.0 * max_u0);
    if (cfg.dt > cfl_limit)
        throw std::invalid_argument("evolve: dt exceeds the advective stability bound "
                                    + std::to_string(cfl_limit));

    Spectral sp(g);
    const int nc = sp.nc;
    const double h = cfg.dt;

    // exp(L h/2), exp(L h) with L = i k^3; dealias mask on the top modes
    std::vector<std::complex<double>> e_half(nc), e_full(nc);
    std::vector<double> mask(nc);
    const double k_cut = cfg.dealias_fraction * sp.k[nc - 1];
    for (int j = 0; j < nc; ++j) {
        const double k3 = sp.k[j] * sp.k[j] * sp.k[j];
        e_half[j] = std::exp(std::complex<double>(0.0, k3 * 0.5 * h));
        e_full[j] = std::exp(std::complex<double>(0.0, k3 * h));
        mask[j] = (sp.k[j] <= k_cut) ? 1.0 : 0.0;
    }

    std::vector<std::complex<double>> uh(nc), n1(nc), n2(nc), n3(nc), n4(nc), stage(nc);
    std::vector<double> u_phys(g.n), u_sq(g.n);
    sp.forward(initial.u, uh);
    for (int j = 0; j < nc; ++j) uh[j] *= mask[j];

    // N(uh) = -3 i k fft(u^2), dealiased
    auto nonlinear = [&](const std::vector<std::complex<double>>& in,
                         std::vector<std::complex<double>>& out) {
        sp.backward(in, u_phys);
        for (int i = 0; i < g.n; ++i) u_sq[i] = u_phys[i] * u_phys[i];
        sp.forward(u_sq, out);
        for (int j = 0; j < nc; ++j)
            out[j] *= std::complex<double>(0.0, -3.0 * sp.k[j]) * mask[j];
    };

    EvolveResult result;
    const long steps_per_sample = std::lround(cfg.sample_interval / cfg.dt);
    const long nsteps = std::lround(t_end / cfg.dt);

    auto emit = [&](long step) {
        WaveField f;
        f.grid = g;
        f.t = step * cfg.dt;
        sp.backward(uh, f.u);
        for (int i = 0; i < 5; ++i) {
            result.boundary_max_abs = std::max(result.boundary_max_abs, std::abs(f.u[i]));
            result.boundary_max_abs =
                std::max(result.boundary_max_abs, std::abs(f.u[g.n - 1 - i]));
        }
        double max_u = 0.0;
        for (double v : f.u) max_u = std::max(max_u, std::abs(v));
        if (max_u > cfg.blowup_factor * std::max(max_u0, 1e-30))
            throw std::runtime_error("evolve: blow-up detected at t = " + std::to_string(f.t)
                                     + ", max|u| = " + std::to_string(max_u));
        result.snapshots.push_back(std::move(f));
    };

    emit(0);
    for (long step = 0; step < nsteps; ++step) {
        nonlinear(uh, n1);
        for (int j = 0; j < nc; ++j) stage[j] = e_half[j] * (uh[j] + 0.5 * h * n1[j]);
        nonlinear(stage, n2);
        for (int j = 0; j < nc; ++j) stage[j] = e_half[j] * uh[j] + 0.5 * h * n2[j];
        nonlinear(stage, n3);
        for (int j = 0; j < nc; ++j) stage[j] = e_full[j] * uh[j] + h * e_half[j] * n3[j];
        nonlinear(stage, n4);
        for (int j = 0; j < nc; ++j)
            uh[j] = e_full[j] * uh[j]
                  + h / 6.0 * (e_full[j] * n1[j] + 2.0 * e_half[j] * (n2[j] + n3[j]) + n4[j]);
        if ((step + 1) % steps_per_sample == 0 || step + 1 == nsteps) emit(step + 1);
    }
    return result;
}

Conserved conserved_quantities(const WaveField& f) {
    validate(f.grid);
    const Grid& g = f.grid;
    Spectral sp(g);
    std::vector<std::complex<double>> uh(sp.nc);
    std::vector<double> ux(g.n);
    sp.forward(f.u, uh);
    for (int j = 0; j < sp.nc; ++j) uh[j] *= std::complex<double>(0.0, sp.k[j]);
    // the Nyquist derivative mode is dropped (its contribution is not
    // representable as a real signal derivative)
    uh[sp.nc - 1] = 0.0;
    sp.backward(uh, ux);

    Conserved c{0.0, 0.0, 0.0};
    for (int i = 0; i < g.n; ++i) {
        const double u = f.u[i];
        c.mass += u;
        c.momentum += u * u;
        c.energy += u * u * u - 0.5 * ux[i] * ux[i];
    }
    const double dx = g.dx();
    c.mass *= dx;
    c.momentum *= dx;
    c.energy *= dx;
    return c;
}

void write_csv(const WaveField& f, const std::string& path) {
    std::FILE* fp = std::fopen(path.c_str(), "w");
    if (!fp) throw std::runtime_error("write_csv: cannot open " + path);
    std::fprintf(fp, "# t=%.17g\n", f.t);
    for (int i = 0; i < f.grid.n; ++i)
        std::fprintf(fp, "%.17g,%.17g\n", f.grid.x(i), f.u[i]);
    std::fclose(fp);
}

} // namespace kdvsm::sim
