#pragma once

#include <span>
#include <vector>

#include "pulsecomp/types.hpp"
#include "pulsecomp/waveform.hpp"

namespace pulsecomp {

/// Banded transmit convolution matrix: column c carries the waveform at
/// rows c..c+N-1 and zeros elsewhere, so entries * W is the compressed
/// output of filter W. Size (N+L-1) x L.
struct ConvolutionMatrix {
    CMatrix entries;
    Index n_waveform;  // N
    Index n_filter;    // L
    std::vector<Index> mainlobe_rows;  // contiguous, odd length, centered on the peak row

    Index n_output() const { return entries.rows(); }
    Index center_row() const { return (n_waveform + n_filter - 2) / 2; }
    Index mainlobe_width() const { return static_cast<Index>(mainlobe_rows.size()); }

    /// Rows of entries outside the mainlobe set (the sidelobe map S_m).
    CMatrix sidelobe_rows() const;
};

enum class FilterProvenance { matched, min_isl, rls, external };

const char* to_string(FilterProvenance p);
FilterProvenance provenance_from_string(const std::string& s);

struct FilterWeights {
    CVector weights;
    FilterProvenance provenance = FilterProvenance::external;
    Complex mainlobe_constraint{0.0, 0.0};  // peak response the design was pinned to

    Index size() const { return weights.size(); }
};

struct CompressionMetrics {
    double isl_db;
    double psl_db;
    double snr_loss_db;
    Index mainlobe_width_samples;
};

/// Sidelobe energy and mainlobe peak magnitude of a compressed response.
struct ResponseSplit {
    double sidelobe_energy = 0.0;
    double mainlobe_peak = 0.0;
};

ResponseSplit split_response(const CVector& response, std::span<const Index> mainlobe);

/// Contiguous output rows centered on the peak-response row
/// floor((n_out-1)/2). Width must be odd.
std::vector<Index> mainlobe_rows(Index n_out, Index mainlobe_width);

ConvolutionMatrix build_convolution_matrix(const Waveform& w, Index filter_length,
                                           Index mainlobe_width = 3);

/// Waveform replica conjugated, time-reversed and zero-padded so that its
/// inner product with a length-L filter equals that filter's response at
/// the center output row. This is the constraint vector of the min-ISL
/// solve and, as-is, the padded matched filter.
CVector aligned_replica(const Waveform& w, Index filter_length);

/// Closed-form minimum-ISL mismatched filter: the unique W whose center-row
/// response equals alpha and whose sidelobe energy ||S_m W||^2 is minimal.
FilterWeights solve_min_isl(const ConvolutionMatrix& S, Complex alpha);

/// Time-reversed conjugate of the waveform, optionally zero-padded to
/// filter_length with the peak kept on the center output row.
FilterWeights matched_filter(const Waveform& w);
FilterWeights matched_filter(const Waveform& w, Index filter_length);

/// Full linear convolution of y_in with the filter taps.
CVector apply_filter(const FilterWeights& W, const CVector& y_in);

/// Sidelobe energy ||S_m W||^2 on a linear scale (the RLS trace form).
double isl_raw(const FilterWeights& W, const ConvolutionMatrix& S);

/// Integrated sidelobe level in dB, normalized to mainlobe peak power.
/// Returns -inf for an exactly sidelobe-free response.
double isl(const FilterWeights& W, const ConvolutionMatrix& S);

/// Peak sidelobe level of a compressed response in dB relative to the
/// mainlobe peak.
double psl(const CVector& response, std::span<const Index> mainlobe);

/// Normalized two-way SNR loss of transmit/receive amplitude weightings,
/// in dB (always <= 0).
double snr_loss(const RVector& w_t, const RVector& w_r);

/// ISL/PSL/SNR-loss of a filter against the waveform it was designed for.
CompressionMetrics compute_metrics(const Waveform& w, const FilterWeights& W,
                                   const ConvolutionMatrix& S);

}  // namespace pulsecomp
