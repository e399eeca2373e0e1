#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace ews {

// All recoverable failures in the library surface as ews::Error.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Probabilities emitted by any model lie in [kProbEps, 1 - kProbEps].
inline constexpr double kProbEps = 1e-6;

// Years between the feature observation and the distress label.
inline constexpr int kDefaultHorizon = 2;

inline double sigmoid(double z) {
    if (z >= 0) {
        return 1.0 / (1.0 + std::exp(-z));
    }
    const double e = std::exp(z);
    return e / (1.0 + e);
}

inline double clip_probability(double p) {
    if (p < kProbEps) return kProbEps;
    if (p > 1.0 - kProbEps) return 1.0 - kProbEps;
    return p;
}

inline double logit(double p) { return std::log(p / (1.0 - p)); }

}  // namespace ews
