#include "pulsecomp/clean.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "ldlt_guard.hpp"
#include "pulsecomp/errors.hpp"

namespace pulsecomp {

namespace {

// Rank-deficiency guard for the LS systems.
constexpr double kMaxCondition = 1e12;
// The interference covariance is legitimately stiff: an 80 dB strong
// scatterer alone puts its condition near 1e13. Only refuse solves that
// are hopeless in double precision.
constexpr double kMaxCovarianceCondition = 1e15;

/// Interference-plus-noise covariance R = S diag(b) diag(b)^H S^H + sigma^2 I.
CMatrix interference_covariance(const ConvolutionMatrix& S,
                                const StrongScattererSet& strong, double noise_power) {
    const Index n_out = S.n_output();
    CMatrix r = noise_power * CMatrix::Identity(n_out, n_out);
    for (std::size_t i = 0; i < strong.cells.size(); ++i) {
        const Index cell = strong.cells[i];
        if (cell < 0 || cell >= S.n_filter) {
            throw std::invalid_argument("clean: strong-scatterer cell out of range");
        }
        const double power = std::norm(strong.amplitudes[static_cast<Index>(i)]);
        r.noalias() += power * (S.entries.col(cell) * S.entries.col(cell).adjoint());
    }
    return r;
}

Eigen::LLT<CMatrix> factorize_covariance(const CMatrix& r, const char* context) {
    Eigen::LLT<CMatrix> llt(r);
    if (llt.info() != Eigen::Success || !(llt.rcond() > 1.0 / kMaxCovarianceCondition)) {
        const double rc = llt.rcond();
        throw SingularSystemError(std::string(context) + ": covariance is near singular",
                                  rc > 0.0 ? 1.0 / rc : std::numeric_limits<double>::infinity());
    }
    return llt;
}

}  // namespace

CVector simulate_profile(const ConvolutionMatrix& S, const RangeScene& scene) {
    if (scene.impulse_response.size() != S.n_filter) {
        throw std::invalid_argument(
            "simulate_profile: scene length must equal the matrix column count");
    }
    if (scene.noise_power < 0.0) {
        throw std::invalid_argument("simulate_profile: noise power must be >= 0");
    }
    CVector y = S.entries * scene.impulse_response;
    if (scene.noise_power > 0.0) {
        std::mt19937_64 rng(scene.seed);
        std::normal_distribution<double> component(0.0, std::sqrt(scene.noise_power / 2.0));
        for (Index i = 0; i < y.size(); ++i) {
            const double re = component(rng);
            const double im = component(rng);
            y[i] += Complex(re, im);
        }
    }
    return y;
}

CVector ls_deconvolve(const ConvolutionMatrix& S, const CVector& y) {
    if (y.size() != S.n_output()) {
        throw std::invalid_argument("ls_deconvolve: profile length mismatch");
    }
    const CMatrix gram = S.entries.adjoint() * S.entries;
    const Eigen::LDLT<CMatrix> ldlt =
        detail::checked_ldlt(gram, kMaxCondition, "ls_deconvolve");
    return ldlt.solve(S.entries.adjoint() * y);
}

std::vector<DetectionResult> detect(const ConvolutionMatrix& S, const CVector& y,
                                    double noise_power, double eta) {
    if (!(noise_power > 0.0)) {
        throw std::invalid_argument("detect: noise power must be > 0");
    }
    if (!(eta > 0.0)) {
        throw std::invalid_argument("detect: threshold must be > 0");
    }
    if (y.size() != S.n_output()) {
        throw std::invalid_argument("detect: profile length mismatch");
    }
    const Index n_out = S.n_output();
    CMatrix whitener = S.entries * S.entries.adjoint();
    whitener += noise_power * CMatrix::Identity(n_out, n_out);
    const Eigen::LLT<CMatrix> llt = factorize_covariance(whitener, "detect");
    const CVector projected = S.entries.adjoint() * llt.solve(y);

    std::vector<DetectionResult> results;
    results.reserve(static_cast<std::size_t>(S.n_filter));
    for (Index k = 0; k < S.n_filter; ++k) {
        DetectionResult r;
        r.cell = k;
        r.amplitude_estimate = projected[k];
        r.statistic = std::abs(projected[k]);
        r.threshold = eta;
        r.detected = r.statistic > eta;
        results.push_back(r);
    }
    return results;
}

RVector pfa_thresholds(const ConvolutionMatrix& S, double noise_power, double pfa) {
    if (!(noise_power > 0.0)) {
        throw std::invalid_argument("pfa_thresholds: noise power must be > 0");
    }
    if (!(pfa > 0.0) || pfa >= 1.0) {
        throw std::invalid_argument("pfa_thresholds: pfa must be in (0, 1)");
    }
    const Index n_out = S.n_output();
    CMatrix whitener = S.entries * S.entries.adjoint();
    whitener += noise_power * CMatrix::Identity(n_out, n_out);
    const Eigen::LLT<CMatrix> llt = factorize_covariance(whitener, "pfa_thresholds");
    const CMatrix solved = llt.solve(S.entries);  // (S S^H + sigma^2 I)^-1 S

    // Under noise-only input the complex statistic at cell k is circular
    // Gaussian with total variance sigma^2 * (S^H M^-1 S)_kk, so its modulus
    // is Rayleigh and the quantile is closed-form.
    RVector eta(S.n_filter);
    for (Index k = 0; k < S.n_filter; ++k) {
        const double variance =
            noise_power * S.entries.col(k).dot(solved.col(k)).real();
        eta[k] = std::sqrt(-variance * std::log(pfa));
    }
    return eta;
}

std::vector<DetectionResult> detect_pfa(const ConvolutionMatrix& S, const CVector& y,
                                        double noise_power, double pfa) {
    const RVector eta = pfa_thresholds(S, noise_power, pfa);
    std::vector<DetectionResult> results = detect(S, y, noise_power, eta.maxCoeff());
    for (Index k = 0; k < S.n_filter; ++k) {
        auto& r = results[static_cast<std::size_t>(k)];
        r.threshold = eta[k];
        r.detected = r.statistic > eta[k];
    }
    return results;
}

CVector estimate_clean_all(const ConvolutionMatrix& S, const CVector& y,
                           const StrongScattererSet& strong, double noise_power,
                           bool normalized) {
    if (!(noise_power > 0.0)) {
        throw std::invalid_argument("estimate_clean: noise power must be > 0");
    }
    if (y.size() != S.n_output()) {
        throw std::invalid_argument("estimate_clean: profile length mismatch");
    }
    if (strong.amplitudes.size() != static_cast<Index>(strong.cells.size())) {
        throw std::invalid_argument("estimate_clean: strong set cells/amplitudes mismatch");
    }
    const CMatrix r = interference_covariance(S, strong, noise_power);
    const Eigen::LLT<CMatrix> llt = factorize_covariance(r, "estimate_clean");
    const CVector projected = S.entries.adjoint() * llt.solve(y);
    if (!normalized) {
        return projected;
    }
    const CMatrix solved = llt.solve(S.entries);
    CVector estimates(S.n_filter);
    for (Index k = 0; k < S.n_filter; ++k) {
        const Complex denom = S.entries.col(k).dot(solved.col(k));
        if (std::abs(denom) == 0.0) {
            throw SingularSystemError("estimate_clean: degenerate normalization",
                                      std::numeric_limits<double>::infinity());
        }
        estimates[k] = projected[k] / denom;
    }
    return estimates;
}

Complex estimate_clean(const ConvolutionMatrix& S, const CVector& y,
                       const StrongScattererSet& strong, double noise_power, Index cell,
                       bool normalized) {
    if (cell < 0 || cell >= S.n_filter) {
        throw std::invalid_argument("estimate_clean: cell out of range");
    }
    const CMatrix r = interference_covariance(S, strong, noise_power);
    const Eigen::LLT<CMatrix> llt = factorize_covariance(r, "estimate_clean");
    const Complex numerator = S.entries.col(cell).dot(llt.solve(y));
    if (!normalized) {
        return numerator;
    }
    const Complex denom = S.entries.col(cell).dot(llt.solve(S.entries.col(cell)));
    if (std::abs(denom) == 0.0) {
        throw SingularSystemError("estimate_clean: degenerate normalization",
                                  std::numeric_limits<double>::infinity());
    }
    return numerator / denom;
}

CVector clean_pipeline(const ConvolutionMatrix& S, const CVector& y, double noise_power,
                       double eta) {
    const std::vector<DetectionResult> detections = detect(S, y, noise_power, eta);

    // Strong scatterers: detections at least 20 dB above the median cell
    // statistic. The relative rule keeps the classification scale-free.
    std::vector<double> stats;
    stats.reserve(detections.size());
    for (const auto& d : detections) stats.push_back(d.statistic);
    std::vector<double> scratch = stats;
    const std::size_t mid = scratch.size() / 2;
    std::nth_element(scratch.begin(), scratch.begin() + static_cast<std::ptrdiff_t>(mid),
                     scratch.end());
    const double median = scratch[mid];
    const double strong_floor = 10.0 * median;  // +20 dB in amplitude

    StrongScattererSet strong;
    for (const auto& d : detections) {
        if (d.detected && d.statistic > strong_floor) {
            strong.cells.push_back(d.cell);
        }
    }

    if (!strong.empty()) {
        // Amplitudes of the strong cells by LS restricted to their columns.
        CMatrix sub(S.n_output(), static_cast<Index>(strong.cells.size()));
        for (std::size_t i = 0; i < strong.cells.size(); ++i) {
            sub.col(static_cast<Index>(i)) = S.entries.col(strong.cells[i]);
        }
        const CMatrix gram = sub.adjoint() * sub;
        const Eigen::LDLT<CMatrix> ldlt =
            detail::checked_ldlt(gram, kMaxCondition, "clean_pipeline strong cells");
        strong.amplitudes = ldlt.solve(sub.adjoint() * y);
    } else {
        strong.amplitudes = CVector();
    }

    return estimate_clean_all(S, y, strong, noise_power, /*normalized=*/true);
}

}  // namespace pulsecomp
