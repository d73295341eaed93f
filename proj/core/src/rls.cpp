#include "pulsecomp/rls.hpp"

#include <cmath>
#include <limits>

#include "csv_format.hpp"

namespace pulsecomp {

namespace {

double trace_db(double raw, double peak) {
    if (peak == 0.0) {
        return std::numeric_limits<double>::infinity();
    }
    if (raw == 0.0) {
        return -std::numeric_limits<double>::infinity();
    }
    return 10.0 * std::log10(raw / (peak * peak));
}

}  // namespace

DesiredResponse build_desired_response(Index n_out, Index mainlobe_width, Complex peak,
                                       DesiredShape shape) {
    const std::vector<Index> rows = mainlobe_rows(n_out, mainlobe_width);
    const Index center = rows[rows.size() / 2];
    const double half_extent = static_cast<double>(mainlobe_width + 1) / 2.0;

    DesiredResponse d;
    d.mainlobe_width = mainlobe_width;
    d.peak = peak;
    d.values = CVector::Zero(n_out);
    for (Index r : rows) {
        if (shape == DesiredShape::flat) {
            d.values[r] = peak;
        } else {
            const double off = static_cast<double>(std::abs(r - center));
            d.values[r] = peak * (1.0 - off / half_extent);
        }
    }
    return d;
}

RlsState make_rls_state(Index filter_length, double forgetting_factor,
                        double regularization) {
    if (filter_length < 1) {
        throw std::invalid_argument("rls: filter_length must be >= 1");
    }
    if (!(forgetting_factor > 0.0) || forgetting_factor > 1.0) {
        throw std::invalid_argument("rls: forgetting factor must be in (0, 1]");
    }
    if (!(regularization > 0.0)) {
        throw std::invalid_argument("rls: regularization must be > 0");
    }
    RlsState state;
    state.weights = CVector::Zero(filter_length);
    state.inverse_correlation =
        regularization * CMatrix::Identity(filter_length, filter_length);
    state.forgetting_factor = forgetting_factor;
    state.regularization = regularization;
    state.iteration = 0;
    return state;
}

void rls_step(RlsState& state, const CVector& row, Complex desired) {
    const Index n = state.weights.size();
    if (row.size() != n) {
        throw std::invalid_argument("rls_step: row length does not match state");
    }
    const double lambda = state.forgetting_factor;

    const CVector pu = state.inverse_correlation * row.conjugate();
    const Complex excitation = row.transpose() * pu;  // row^T P row*
    const CVector gain = pu / (lambda + excitation);
    const Complex error = desired - Complex(row.transpose() * state.weights);

    state.weights += gain * error;
    state.inverse_correlation =
        (state.inverse_correlation - gain * (row.transpose() * state.inverse_correlation)) /
        lambda;
    // Keep P Hermitian against accumulated roundoff.
    state.inverse_correlation =
        0.5 * (state.inverse_correlation + state.inverse_correlation.adjoint()).eval();
    ++state.iteration;

    if (!state.weights.allFinite() || !state.inverse_correlation.allFinite()) {
        throw DivergenceError(state.iteration, IslTrace{});
    }
}

IslTrace optimize(const ConvolutionMatrix& S, const DesiredResponse& d,
                  const FilterWeights& w_init, Index iterations,
                  double forgetting_factor, double regularization) {
    if (iterations < 1) {
        throw std::invalid_argument("rls optimize: iterations must be >= 1");
    }
    if (w_init.size() != S.n_filter) {
        throw std::invalid_argument("rls optimize: initial weights do not match matrix");
    }
    if (d.values.size() != S.n_output()) {
        throw std::invalid_argument("rls optimize: desired response length mismatch");
    }

    RlsState state = make_rls_state(S.n_filter, forgetting_factor, regularization);
    state.weights = w_init.weights;

    IslTrace trace;
    trace.raw.reserve(static_cast<std::size_t>(iterations));
    trace.db.reserve(static_cast<std::size_t>(iterations));

    double best_raw = std::numeric_limits<double>::infinity();
    const Index n_rows = S.n_output();

    for (Index it = 0; it < iterations; ++it) {
        const CVector response = S.entries * state.weights;
        const ResponseSplit split = split_response(response, S.mainlobe_rows);
        trace.raw.push_back(split.sidelobe_energy);
        trace.db.push_back(trace_db(split.sidelobe_energy, split.mainlobe_peak));
        if (split.sidelobe_energy < best_raw) {
            best_raw = split.sidelobe_energy;
            trace.best_iteration = it;
            trace.best_weights.weights = state.weights;
        }
        if (it + 1 < iterations) {
            const Index r = it % n_rows;
            const CVector row = S.entries.row(r).transpose();
            try {
                rls_step(state, row, d.values[r]);
            } catch (const DivergenceError& e) {
                throw DivergenceError(e.iteration(), std::move(trace));
            }
        }
    }
    trace.best_weights.provenance = FilterProvenance::rls;
    trace.best_weights.mainlobe_constraint = d.peak;
    return trace;
}

std::string export_trace(const IslTrace& trace) {
    if (trace.raw.empty()) {
        throw std::invalid_argument("export_trace: empty trace");
    }
    std::string out = "iteration,isl_raw,isl_db,best\n";
    for (std::size_t i = 0; i < trace.raw.size(); ++i) {
        out += std::to_string(i);
        out += ',';
        out += detail::format_double(trace.raw[i]);
        out += ',';
        out += detail::format_double(trace.db[i]);
        out += ',';
        out += (static_cast<Index>(i) == trace.best_iteration) ? '1' : '0';
        out += '\n';
    }
    return out;
}

}  // namespace pulsecomp
