#pragma once

#include <cstdint>
#include <vector>

#include "pulsecomp/filter_design.hpp"
#include "pulsecomp/types.hpp"

namespace pulsecomp {

/// True scatterer impulse response over the range cells addressed by a
/// convolution matrix's columns, plus the receiver noise model.
struct RangeScene {
    CVector impulse_response;  // one complex amplitude per range cell
    double noise_power;        // sigma^2, linear
    std::uint64_t seed;
};

struct DetectionResult {
    Index cell;
    double statistic;            // |delta_k^H S^H (S S^H + sigma^2 I)^-1 y|
    double threshold;
    bool detected;
    Complex amplitude_estimate;  // the complex statistic before the modulus
};

/// Cells whose sidelobes are to be deconvolved, with their amplitudes.
struct StrongScattererSet {
    std::vector<Index> cells;
    CVector amplitudes;

    bool empty() const { return cells.empty(); }
};

/// y = S a + n with circular complex Gaussian noise of per-sample variance
/// noise_power, drawn deterministically from the scene seed.
CVector simulate_profile(const ConvolutionMatrix& S, const RangeScene& scene);

/// Least-squares estimate of the impulse response: solves the normal
/// equations (S^H S) a = S^H y.
CVector ls_deconvolve(const ConvolutionMatrix& S, const CVector& y);

/// Whitened matched-correlation test per cell against a common threshold.
std::vector<DetectionResult> detect(const ConvolutionMatrix& S, const CVector& y,
                                    double noise_power, double eta);

/// Per-cell thresholds achieving a given false-alarm probability under the
/// noise-only hypothesis (Rayleigh quantile of the cell statistic).
RVector pfa_thresholds(const ConvolutionMatrix& S, double noise_power, double pfa);

/// detect() with per-cell thresholds derived from a false-alarm probability.
std::vector<DetectionResult> detect_pfa(const ConvolutionMatrix& S, const CVector& y,
                                        double noise_power, double pfa);

/// Amplitude estimate at one cell with the strong scatterers' sidelobe
/// contributions absorbed into the interference covariance
/// R = S diag(b) diag(b)^H S^H + sigma^2 I. The normalized form divides by
/// the filter's response to a unit scatterer so an isolated target of
/// amplitude A estimates to ~A; normalized=false gives the raw projection.
Complex estimate_clean(const ConvolutionMatrix& S, const CVector& y,
                       const StrongScattererSet& strong, double noise_power, Index cell,
                       bool normalized = true);

/// Full profile of estimate_clean values over every cell (one shared
/// covariance factorization).
CVector estimate_clean_all(const ConvolutionMatrix& S, const CVector& y,
                           const StrongScattererSet& strong, double noise_power,
                           bool normalized = true);

/// Detect strong scatterers, estimate their amplitudes by restricted LS,
/// and re-estimate every cell with those sidelobes deconvolved.
CVector clean_pipeline(const ConvolutionMatrix& S, const CVector& y, double noise_power,
                       double eta);

}  // namespace pulsecomp
