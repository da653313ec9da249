#include "growthlab/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace growthlab {

namespace {
constexpr int kBases[8] = {2, 3, 5, 7, 11, 13, 17, 19};
}

HaltonSampler::HaltonSampler(int dim, std::uint64_t shift_seed) : dim_(dim) {
    if (dim < 1 || dim > 8)
        throw std::invalid_argument("HaltonSampler: dimension must be in [1, 8]");
    std::uint64_t state = shift_seed;
    dims_.resize(dim);
    for (int d = 0; d < dim; ++d) {
        dims_[d].base = kBases[d];
        dims_[d].shift = uniform01(state);
        dims_[d].digits.assign(1, 0);
        dims_[d].value = 0.0;
    }
}

void HaltonSampler::advance(DimState& d) {
    // Add 1 to the base-b counter and patch the radical inverse in place.
    // Recomputing the full inverse on carry keeps rounding drift bounded.
    const double b = double(d.base);
    std::size_t i = 0;
    while (i < d.digits.size() && d.digits[i] == d.base - 1) {
        d.digits[i] = 0;
        ++i;
    }
    if (i == d.digits.size())
        d.digits.push_back(1);
    else
        ++d.digits[i];
    if (i == 0) {
        d.value += 1.0 / b;
    } else {
        // A carry happened: recompute the radical inverse so rounding
        // drift from the incremental adds cannot accumulate.
        double v = 0.0;
        double scale = 1.0;
        for (std::size_t j = 0; j < d.digits.size(); ++j) {
            scale /= b;
            v += d.digits[j] * scale;
        }
        d.value = v;
    }
}

void HaltonSampler::fill(double* const* coords, std::size_t n, double lo, double hi) {
    const double width = hi - lo;
    for (std::size_t i = 0; i < n; ++i) {
        for (int d = 0; d < dim_; ++d) {
            advance(dims_[d]);
            double u = dims_[d].value + dims_[d].shift;
            if (u >= 1.0) u -= 1.0;
            coords[d][i] = lo + width * u;
        }
    }
}

}  // namespace growthlab
