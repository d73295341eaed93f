#pragma once

#include <array>
#include <span>

#include "pulsecomp/types.hpp"

namespace pulsecomp {

/// Complex baseband pulse with its design metadata. The taper is kept
/// separately because it doubles as the transmit amplitude weighting
/// that enters the SNR-loss metric.
struct Waveform {
    CVector samples;     // unit-amplitude carrier times taper
    double sample_rate;  // Hz
    double bandwidth;    // Hz
    double pulse_width;  // s
    RVector taper;       // per-sample amplitude weights in [0, 1]

    Index size() const { return samples.size(); }
    double energy() const { return samples.squaredNorm(); }
};

/// Instantaneous frequency versus sample index, centered on the band.
struct FrequencyFunction {
    RVector values;    // Hz, one per output sample
    double bandwidth;  // Hz
};

/// The ten free Bezier control-point weights shaping an NLFM frequency
/// function. The curve's first and last control points are fixed at 0
/// and bandwidth/2 and are not part of the genome.
struct BezierGenome {
    static constexpr int kFreeWeights = 10;

    std::array<double, kFreeWeights> control_weights;  // Hz, each in [0, bandwidth/2]
    double bandwidth;                                  // Hz
};

/// Tapered-cosine window with a flat section of fraction 1-alpha.
/// alpha=0 is rectangular, alpha=1 is a Hann window.
RVector tukey_window(Index n, double alpha);

/// Linear FM pulse sweeping -bandwidth/2 .. +bandwidth/2 over the pulse
/// width, sampled at sample_rate with a Tukey amplitude taper.
Waveform generate_lfm(double bandwidth, double pulse_width, double sample_rate,
                      double taper_alpha);

/// Bernstein-form Bezier curve of order weights.size()-1 evaluated at
/// t in [0, 1].
double bezier_eval(std::span<const double> weights, double t);

/// Samples the genome's Bezier curve over the first half of the pulse,
/// mirrors it with odd symmetry about the band center, and recenters the
/// result to span [-bandwidth/2, +bandwidth/2]. n_samples must be even.
FrequencyFunction build_nlfm_frequency(const BezierGenome& genome, Index n_samples);

/// Constant-modulus waveform whose phase is the cumulative sum of the
/// frequency function (rectangular integration). No amplitude taper.
Waveform synthesize_nlfm(const FrequencyFunction& freq, double sample_rate);

}  // namespace pulsecomp
