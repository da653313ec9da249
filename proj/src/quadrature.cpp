#include "growthlab/quadrature.hpp"

#include <cmath>

namespace growthlab {

namespace {
// Standard QUADPACK dqk15 abscissae/weights, symmetrized to 15 entries.
constexpr double kx[8] = {
    .991455371120812639206854697526329, .949107912342758524526189684047851,
    .864864423359769072789712788640926, .741531185599394439863864773280788,
    .586087235467691130294144838258730, .405845151377397166906606412076961,
    .207784955007898467600689403773245, 0.0};
constexpr double kwk[8] = {
    .022935322010529224963732008058970, .063092092629978553290700663189204,
    .104790010322250183839876322541518, .140653259715525918745189590510238,
    .169004726639267902826583426598550, .190350578064785409913256402421014,
    .204432940075298892414161999234649, .209482141084727828012999174891714};
constexpr double kwg[4] = {
    .129484966168869693270611432679082, .279705391489276667901467771423780,
    .381830050505118944950369775488975, .417959183673469387755102040816327};
}  // namespace

const double GaussKronrod15::nodes[15] = {
    -kx[0], -kx[1], -kx[2], -kx[3], -kx[4], -kx[5], -kx[6], kx[7],
    kx[6],  kx[5],  kx[4],  kx[3],  kx[2],  kx[1],  kx[0]};
const double GaussKronrod15::wk[15] = {
    kwk[0], kwk[1], kwk[2], kwk[3], kwk[4], kwk[5], kwk[6], kwk[7],
    kwk[6], kwk[5], kwk[4], kwk[3], kwk[2], kwk[1], kwk[0]};
// Gauss nodes are the odd-indexed Kronrod nodes.
const double GaussKronrod15::wg[15] = {
    0.0, kwg[0], 0.0, kwg[1], 0.0, kwg[2], 0.0, kwg[3],
    0.0, kwg[2], 0.0, kwg[1], 0.0, kwg[0], 0.0};

namespace {
double simpson_rec(const std::function<double(double)>& f, double a, double b,
                   double fa, double fm, double fb, double whole, double tol,
                   int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::fabs(delta) <= 15.0 * tol)
        return left + right + delta / 15.0;
    return simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}
}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double tol, int max_depth) {
    if (a == b) return 0.0;
    const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return simpson_rec(f, a, b, fa, fm, fb, whole, tol, max_depth);
}

double trapezoid(const std::function<double(double)>& f, double a, double b, int n) {
    const double h = (b - a) / n;
    double s = 0.5 * (f(a) + f(b));
    for (int i = 1; i < n; ++i) s += f(a + i * h);
    return s * h;
}

}  // namespace growthlab
