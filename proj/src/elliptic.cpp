#include "kdvsm/elliptic.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace kdvsm::elliptic {

namespace {

void require(bool ok, const std::string& msg) {
    if (!ok) throw std::domain_error("elliptic: " + msg);
}

} // namespace

// Carlson duplication algorithm, Numer. Math. 33 (1979). The error tolerance
// is chosen so the truncated Taylor tail is below 1e-16 relative.
double carlson_rf(double x, double y, double z) {
    require(x >= 0.0 && y >= 0.0 && z >= 0.0, "carlson_rf: negative argument");
    require(x + y > 0.0 && y + z > 0.0 && x + z > 0.0,
            "carlson_rf: more than one zero argument");
    double xn = x, yn = y, zn = z;
    double mu = 0.0, dx = 0.0, dy = 0.0, dz = 0.0;
    for (int it = 0; it < 200; ++it) {
        mu = (xn + yn + zn) / 3.0;
        dx = 2.0 - (mu + xn) / mu;
        dy = 2.0 - (mu + yn) / mu;
        dz = 2.0 - (mu + zn) / mu;
        if (std::abs(dx) < 1e-4 && std::abs(dy) < 1e-4 && std::abs(dz) < 1e-4) break;
        const double sx = std::sqrt(xn), sy = std::sqrt(yn), sz = std::sqrt(zn);
        const double lam = sx * (sy + sz) + sy * sz;
        xn = 0.25 * (xn + lam);
        yn = 0.25 * (yn + lam);
        zn = 0.25 * (zn + lam);
    }
    const double e2 = dx * dy - dz * dz;
    const double e3 = dx * dy * dz;
    const double s = 1.0 + e2 * (-0.1 + 3.0 / 44.0 * e3 + e2 / 24.0) + e3 / 14.0;
    return s / std::sqrt(mu);
}

double carlson_rd(double x, double y, double z) {
    require(x >= 0.0 && y >= 0.0 && z > 0.0, "carlson_rd: bad argument");
    require(x + y > 0.0, "carlson_rd: x and y both zero");
    double xn = x, yn = y, zn = z;
    double sum = 0.0, fac = 1.0;
    double mu = 0.0, dx = 0.0, dy = 0.0, dz = 0.0;
    for (int it = 0; it < 200; ++it) {
        mu = (xn + yn + 3.0 * zn) / 5.0;
        dx = (mu - xn) / mu;
        dy = (mu - yn) / mu;
        dz = (mu - zn) / mu;
        if (std::abs(dx) < 1e-4 && std::abs(dy) < 1e-4 && std::abs(dz) < 1e-4) break;
        const double sx = std::sqrt(xn), sy = std::sqrt(yn), sz = std::sqrt(zn);
        const double lam = sx * (sy + sz) + sy * sz;
        sum += fac / (sz * (zn + lam));
        fac *= 0.25;
        xn = 0.25 * (xn + lam);
        yn = 0.25 * (yn + lam);
        zn = 0.25 * (zn + lam);
    }
    const double ea = dx * dy;
    const double eb = dz * dz;
    const double ec = ea - eb;
    const double ed = ea - 6.0 * eb;
    const double ee = ed + 2.0 * ec;
    const double s = 1.0 + ed * (-3.0 / 14.0 + 9.0 / 88.0 * ed - 4.5 / 26.0 * dz * ee)
                   + dz * (ee / 6.0 + dz * (-9.0 / 22.0 * ec + 3.0 / 26.0 * dz * ea));
    return 3.0 * sum + fac * s / (mu * std::sqrt(mu));
}

double ellip_K(double m) {
    require(m >= 0.0 && m < 1.0, "ellip_K: m outside [0,1)");
    return carlson_rf(0.0, 1.0 - m, 1.0);
}

double ellip_E(double m) {
    require(m >= 0.0 && m <= 1.0, "ellip_E: m outside [0,1]");
    if (m == 1.0) return 1.0;
    if (m == 0.0) return M_PI_2;
    return carlson_rf(0.0, 1.0 - m, 1.0) - m / 3.0 * carlson_rd(0.0, 1.0 - m, 1.0);
}

double ellip_F_inc(double psi, double m) {
    require(psi >= 0.0 && psi <= M_PI_2 + 1e-12, "ellip_F_inc: psi outside [0,pi/2]");
    require(m >= 0.0 && m <= 1.0, "ellip_F_inc: m outside [0,1]");
    require(m < 1.0 || psi < M_PI_2, "ellip_F_inc: divergent at psi=pi/2, m=1");
    const double s = std::sin(psi), c = std::cos(psi);
    if (s == 0.0) return 0.0;
    return s * carlson_rf(c * c, 1.0 - m * s * s, 1.0);
}

double ellip_E_inc(double psi, double m) {
    require(psi >= 0.0 && psi <= M_PI_2 + 1e-12, "ellip_E_inc: psi outside [0,pi/2]");
    require(m >= 0.0 && m <= 1.0, "ellip_E_inc: m outside [0,1]");
    const double s = std::sin(psi), c = std::cos(psi);
    if (s == 0.0) return 0.0;
    const double s3 = s * s * s;
    if (m == 1.0) return s;
    return s * carlson_rf(c * c, 1.0 - m * s * s, 1.0)
         - m / 3.0 * s3 * carlson_rd(c * c, 1.0 - m * s * s, 1.0);
}

// Descending Landen (AGM) transformation for the Jacobi amplitude,
// Abramowitz & Stegun 16.4: a_{i+1} = (a_i+b_i)/2, c_{i+1} = (a_i-b_i)/2,
// phi_N = 2^N a_N u, then phi_{i-1} = (phi_i + asin((c_i/a_i) sin phi_i))/2.
double jacobi_cn(double u, double m) {
    require(std::isfinite(u), "jacobi_cn: non-finite argument");
    require(m >= 0.0 && m <= 1.0, "jacobi_cn: m outside [0,1]");
    if (m == 0.0) return std::cos(u);
    const double mc = 1.0 - m;
    if (mc < 1e-16) return 1.0 / std::cosh(u);

    constexpr int kMax = 24;
    double a[kMax], c[kMax];
    a[0] = 1.0;
    c[0] = std::sqrt(m);
    double b = std::sqrt(mc);
    int n = 0;
    while (n < kMax - 1 && std::abs(c[n]) > 1e-17 * a[n]) {
        a[n + 1] = 0.5 * (a[n] + b);
        c[n + 1] = 0.5 * (a[n] - b);
        b = std::sqrt(a[n] * b);
        ++n;
    }
    double phi = std::ldexp(a[n] * u, n);
    for (int i = n; i >= 1; --i) {
        const double s = c[i] / a[i] * std::sin(phi);
        phi = 0.5 * (phi + std::asin(std::max(-1.0, std::min(1.0, s))));
    }
    return std::cos(phi);
}

double jacobi_zeta(double psi, double m) {
    require(m >= 0.0 && m < 1.0, "jacobi_zeta: m outside [0,1)");
    return ellip_E_inc(psi, m) - ellip_E(m) / ellip_K(m) * ellip_F_inc(psi, m);
}

} // namespace kdvsm::elliptic
