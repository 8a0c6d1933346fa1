#pragma once

namespace pcnsim {

/// Normal distribution parameterized by mean and standard deviation (ms).
struct Gaussian {
    double mean = 0.0;
    double std = 0.0;

    double variance() const { return std * std; }

    static Gaussian from_variance(double mean, double variance);

    friend bool operator==(const Gaussian&, const Gaussian&) = default;
};

/// Sum of independent normals: means and variances add.
Gaussian operator+(const Gaussian& a, const Gaussian& b);

/// Natural log of the density at x. Requires std > 0.
double log_density(const Gaussian& g, double x);

} // namespace pcnsim
