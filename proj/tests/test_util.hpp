#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "ews/dataset.hpp"

namespace testutil {

// Random dataset with a planted linear signal on the first feature.
inline ews::Dataset random_dataset(std::size_t n, std::size_t d, std::uint64_t seed, double signal = 1.5,
                                   bool discrete = false) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    ews::Dataset data;
    data.x = ews::Matrix(n, d);
    for (std::size_t i = 0; i < n; ++i) {
        double z = -0.5;
        for (std::size_t j = 0; j < d; ++j) {
            const double v = discrete ? std::floor(3 * unif(rng)) : normal(rng);
            data.x(i, j) = v;
            if (j == 0) z += signal * v;
            if (j == 1) z -= 0.5 * signal * v;
        }
        data.y.push_back(unif(rng) < 1.0 / (1.0 + std::exp(-z)) ? 1 : 0);
        data.w.push_back(0.5 + unif(rng));
    }
    // Guarantee both classes.
    data.y[0] = 1;
    data.y[1] = 0;
    return data;
}

}  // namespace testutil
