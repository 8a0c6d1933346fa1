#include "pcnsim/gaussian.hpp"

#include <cmath>
#include <numbers>

namespace pcnsim {

Gaussian Gaussian::from_variance(double mean, double variance)
{
    return Gaussian{mean, std::sqrt(variance < 0.0 ? 0.0 : variance)};
}

Gaussian operator+(const Gaussian& a, const Gaussian& b)
{
    return Gaussian::from_variance(a.mean + b.mean, a.variance() + b.variance());
}

double log_density(const Gaussian& g, double x)
{
    const double var = g.variance();
    const double d = x - g.mean;
    return -0.5 * std::log(2.0 * std::numbers::pi * var) - d * d / (2.0 * var);
}

} // namespace pcnsim
