// Complete and incomplete elliptic integrals, Jacobi cn and the Jacobi zeta
// function. All routines use the PARAMETER m in [0,1], never the modulus
// k = sqrt(m); the small-m series K ~ (pi/2)(1 + m/4 + ...) fixes this
// convention. Evaluation goes through Carlson symmetric forms R_F and R_D,
// which keep uniform accuracy over the whole parameter range; cn uses the
// descending Landen (AGM) recursion.
//
// K(m) at m >= 1 is a hard domain error, not a continuation.

#ifndef KDVSM_ELLIPTIC_HPP
#define KDVSM_ELLIPTIC_HPP

namespace kdvsm::elliptic {

// Carlson R_F(x,y,z): x,y,z >= 0, at most one zero.
double carlson_rf(double x, double y, double z);

// Carlson R_D(x,y,z): x,y >= 0 (at most one zero), z > 0.
double carlson_rd(double x, double y, double z);

// Complete elliptic integral of the first kind, 0 <= m < 1.
double ellip_K(double m);

// Complete elliptic integral of the second kind, 0 <= m <= 1.
double ellip_E(double m);

// Incomplete integrals F(psi|m), E(psi|m) for 0 <= psi <= pi/2.
// F requires m < 1 unless psi < pi/2; E admits m = 1.
double ellip_F_inc(double psi, double m);
double ellip_E_inc(double psi, double m);

// Jacobi cn(u, m) for finite u, 0 <= m <= 1.
double jacobi_cn(double u, double m);

// Jacobi zeta Z(psi, m) = E(psi|m) - (E(m)/K(m)) F(psi|m), 0 <= m < 1.
double jacobi_zeta(double psi, double m);

} // namespace kdvsm::elliptic

#endif
