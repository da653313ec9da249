#pragma once

#include <complex>
#include <vector>

namespace growthlab {

/// Sampled |F| along a ray: frequency grid (increasing), complex values,
/// per-point absolute error estimates from the quadrature.
struct DecaySeries {
    std::vector<double> freq;
    std::vector<std::complex<double>> value;
    std::vector<double> error;
    std::vector<double> direction;  // unit vector; empty for 1-D model series
};

}  // namespace growthlab
