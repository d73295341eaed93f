#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "pulsecomp/filter_design.hpp"
#include "pulsecomp/types.hpp"

namespace pulsecomp {

enum class DesiredShape { flat, triangular };

/// Sidelobe-free target output for the RLS training: zeros everywhere
/// except a centered mainlobe of odd width.
struct DesiredResponse {
    CVector values;  // length N+L-1
    Index mainlobe_width;
    Complex peak;
};

/// Exponentially-weighted RLS internal state. P starts at
/// regularization * I and is re-symmetrized after every update.
struct RlsState {
    CVector weights;
    CMatrix inverse_correlation;  // P
    double forgetting_factor;     // lambda in (0, 1]
    double regularization;        // delta > 0, P(0) = delta * I
    Index iteration = 0;
};

/// Per-iteration ISL record of an optimize run. Entry 0 is the ISL of the
/// initial weights; entry i the ISL after i update steps. best_iteration
/// is the argmin of the raw trace.
struct IslTrace {
    std::vector<double> raw;  // ||S_m W||^2
    std::vector<double> db;   // normalized to mainlobe peak power
    Index best_iteration = 0;
    FilterWeights best_weights;
};

/// RLS update produced a non-finite weight vector. Carries the iteration
/// index and whatever trace had been accumulated.
class DivergenceError : public std::runtime_error {
public:
    DivergenceError(Index iteration, IslTrace partial)
        : std::runtime_error("rls: non-finite update at iteration " +
                             std::to_string(iteration)),
          iteration_(iteration),
          partial_trace_(std::move(partial)) {}

    Index iteration() const { return iteration_; }
    const IslTrace& partial_trace() const { return partial_trace_; }

private:
    Index iteration_;
    IslTrace partial_trace_;
};

DesiredResponse build_desired_response(Index n_out, Index mainlobe_width, Complex peak,
                                       DesiredShape shape);

RlsState make_rls_state(Index filter_length, double forgetting_factor,
                        double regularization);

/// One exponentially-weighted RLS update against a single (row, desired)
/// training pair. The prediction is row^T * W (no conjugation), matching
/// the convolution-matrix product.
void rls_step(RlsState& state, const CVector& row, Complex desired);

/// Presents the rows of S cyclically against the desired response, records
/// the ISL of every visited weight vector (initialization included), and
/// returns the trace together with the minimum-ISL iterate.
IslTrace optimize(const ConvolutionMatrix& S, const DesiredResponse& d,
                  const FilterWeights& w_init, Index iterations,
                  double forgetting_factor, double regularization);

/// CSV table `iteration,isl_raw,isl_db,best` with best=1 on the
/// minimum-ISL row.
std::string export_trace(const IslTrace& trace);

}  // namespace pulsecomp
