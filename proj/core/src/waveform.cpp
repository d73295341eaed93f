#include "pulsecomp/waveform.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace pulsecomp {

namespace {
constexpr double kPi = std::numbers::pi;
}

RVector tukey_window(Index n, double alpha) {
    if (n < 2) {
        throw std::invalid_argument("tukey_window: n must be >= 2");
    }
    if (alpha < 0.0 || alpha > 1.0) {
        throw std::domain_error("tukey_window: alpha must be in [0, 1]");
    }
    RVector w = RVector::Ones(n);
    if (alpha == 0.0) {
        return w;
    }
    for (Index k = 0; k < n; ++k) {
        const double x = static_cast<double>(k) / static_cast<double>(n - 1);
        if (x < alpha / 2.0) {
            w[k] = 0.5 * (1.0 + std::cos(2.0 * kPi / alpha * (x - alpha / 2.0)));
        } else if (x > 1.0 - alpha / 2.0) {
            w[k] = 0.5 * (1.0 + std::cos(2.0 * kPi / alpha * (x - 1.0 + alpha / 2.0)));
        }
    }
    return w;
}

Waveform generate_lfm(double bandwidth, double pulse_width, double sample_rate,
                      double taper_alpha) {
    if (bandwidth < 0.0) {
        throw std::invalid_argument("generate_lfm: bandwidth must be >= 0");
    }
    if (pulse_width <= 0.0 || sample_rate <= 0.0) {
        throw std::invalid_argument("generate_lfm: pulse_width and sample_rate must be > 0");
    }
    if (sample_rate < bandwidth) {
        throw std::invalid_argument(
            "generate_lfm: sample_rate below bandwidth aliases the sweep");
    }
    const Index n = static_cast<Index>(std::llround(pulse_width * sample_rate));
    if (n < 2) {
        throw std::invalid_argument("generate_lfm: fewer than 2 samples per pulse");
    }

    Waveform w;
    w.sample_rate = sample_rate;
    w.bandwidth = bandwidth;
    w.pulse_width = pulse_width;
    w.taper = tukey_window(n, taper_alpha);
    w.samples.resize(n);

    const double sweep_rate = bandwidth / pulse_width;  // Hz/s
    for (Index k = 0; k < n; ++k) {
        const double t = static_cast<double>(k) / sample_rate - pulse_width / 2.0;
        const double phase = kPi * sweep_rate * t * t;
        w.samples[k] = w.taper[k] * Complex(std::cos(phase), std::sin(phase));
    }
    return w;
}

double bezier_eval(std::span<const double> weights, double t) {
    if (weights.size() < 2) {
        throw std::invalid_argument("bezier_eval: need at least 2 control weights");
    }
    if (t < 0.0 || t > 1.0) {
        throw std::domain_error("bezier_eval: t must be in [0, 1]");
    }
    const int n = static_cast<int>(weights.size()) - 1;
    const double u = 1.0 - t;

    // Bernstein terms accumulated with a running binomial coefficient.
    // Powers of u are applied from the highest exponent down so each term
    // is formed without recomputing pow().
    double result = 0.0;
    double binom = 1.0;
    double t_pow = 1.0;  // t^i
    std::vector<double> u_pow(static_cast<std::size_t>(n) + 1);
    u_pow[0] = 1.0;
    for (int i = 1; i <= n; ++i) u_pow[i] = u_pow[i - 1] * u;
    for (int i = 0; i <= n; ++i) {
        result += binom * u_pow[n - i] * t_pow * weights[static_cast<std::size_t>(i)];
        // Multiply before dividing: every intermediate is an exact integer,
        // which keeps endpoint evaluation exact.
        binom = binom * static_cast<double>(n - i) / static_cast<double>(i + 1);
        t_pow *= t;
    }
    return result;
}

FrequencyFunction build_nlfm_frequency(const BezierGenome& genome, Index n_samples) {
    if (n_samples < 4 || n_samples % 2 != 0) {
        throw std::invalid_argument("build_nlfm_frequency: n_samples must be even and >= 4");
    }
    if (genome.bandwidth <= 0.0) {
        throw std::invalid_argument("build_nlfm_frequency: bandwidth must be > 0");
    }
    const double half_band = genome.bandwidth / 2.0;
    for (double w : genome.control_weights) {
        if (w < 0.0 || w > half_band) {
            throw std::domain_error(
                "build_nlfm_frequency: control weights must lie in [0, bandwidth/2]");
        }
    }

    // Fixed endpoints 0 and bandwidth/2 bracket the ten genome weights.
    std::array<double, BezierGenome::kFreeWeights + 2> control{};
    control[0] = 0.0;
    for (int i = 0; i < BezierGenome::kFreeWeights; ++i) {
        control[static_cast<std::size_t>(i) + 1] = genome.control_weights[static_cast<std::size_t>(i)];
    }
    control[BezierGenome::kFreeWeights + 1] = half_band;

    FrequencyFunction f;
    f.bandwidth = genome.bandwidth;
    f.values.resize(n_samples);

    // Midpoint sampling of t keeps the mirrored full-band sweep free of a
    // repeated center sample, so collinear control points reproduce a
    // single straight ramp across the whole pulse.
    const Index half = n_samples / 2;
    for (Index i = 0; i < half; ++i) {
        const double t = (static_cast<double>(i) + 0.5) / static_cast<double>(half);
        const double lower = bezier_eval(control, t) - half_band;
        f.values[i] = lower;
        f.values[n_samples - 1 - i] = -lower;
    }
    return f;
}

Waveform synthesize_nlfm(const FrequencyFunction& freq, double sample_rate) {
    if (freq.values.size() == 0) {
        throw std::invalid_argument("synthesize_nlfm: empty frequency function");
    }
    if (sample_rate <= 0.0) {
        throw std::invalid_argument("synthesize_nlfm: sample_rate must be > 0");
    }
    const Index n = freq.values.size();

    Waveform w;
    w.sample_rate = sample_rate;
    w.bandwidth = freq.bandwidth;
    w.pulse_width = static_cast<double>(n) / sample_rate;
    w.taper = RVector::Ones(n);
    w.samples.resize(n);

    double phase = 0.0;
    for (Index k = 0; k < n; ++k) {
        phase += 2.0 * kPi * freq.values[k] / sample_rate;
        w.samples[k] = Complex(std::cos(phase), std::sin(phase));
    }
    return w;
}

}  // namespace pulsecomp
