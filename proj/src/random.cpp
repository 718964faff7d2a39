#include "vertisplit/random.hpp"

#include <cmath>
#include <numeric>

#include "vertisplit/errors.hpp"

namespace vsplit {

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

double uniform01(Rng& rng) {
    // 53 random bits -> [0, 1)
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double standard_normal(Rng& rng) {
    // Marsaglia polar method; the second variate is discarded.
    for (;;) {
        const double u = 2.0 * uniform01(rng) - 1.0;
        const double v = 2.0 * uniform01(rng) - 1.0;
        const double s = u * u + v * v;
        if (s > 0.0 && s < 1.0) return u * std::sqrt(-2.0 * std::log(s) / s);
    }
}

double sample_gamma(double shape, Rng& rng) {
    if (!(shape > 0.0)) throw InvalidArgument("gamma shape must be positive");
    if (shape < 1.0) {
        const double g = sample_gamma(shape + 1.0, rng);
        double u = uniform01(rng);
        while (u <= 0.0) u = uniform01(rng);
        return g * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x = 0.0;
        double v = 0.0;
        do {
            x = standard_normal(rng);
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = uniform01(rng);
        if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
        if (u > 0.0 && std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
    }
}

std::vector<double> sample_dirichlet(const std::vector<double>& alphas, Rng& rng) {
    if (alphas.empty()) throw InvalidArgument("Dirichlet needs at least one parameter");
    for (double a : alphas)
        if (!(a > 0.0) || !std::isfinite(a))
            throw InvalidArgument("Dirichlet parameters must be positive and finite");
    if (alphas.size() == 1) return {1.0};

    std::vector<double> r(alphas.size());
    for (;;) {
        for (std::size_t i = 0; i < alphas.size(); ++i) r[i] = sample_gamma(alphas[i], rng);
        const double total = std::accumulate(r.begin(), r.end(), 0.0);
        // Tiny shapes can underflow every variate to zero; redraw.
        if (total > 0.0 && std::isfinite(total)) {
            for (double& x : r) x /= total;
            return r;
        }
    }
}

}  // namespace vsplit
