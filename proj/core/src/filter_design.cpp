#include "pulsecomp/filter_design.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "ldlt_guard.hpp"
#include "pulsecomp/errors.hpp"

namespace pulsecomp {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kMaxCondition = 1e12;

bool in_mainlobe(std::span<const Index> mainlobe, Index row) {
    return std::binary_search(mainlobe.begin(), mainlobe.end(), row);
}

}  // namespace

ResponseSplit split_response(const CVector& response, std::span<const Index> mainlobe) {
    ResponseSplit s;
    for (Index r = 0; r < response.size(); ++r) {
        const double mag2 = std::norm(response[r]);
        if (in_mainlobe(mainlobe, r)) {
            s.mainlobe_peak = std::max(s.mainlobe_peak, std::sqrt(mag2));
        } else {
            s.sidelobe_energy += mag2;
        }
    }
    return s;
}

const char* to_string(FilterProvenance p) {
    switch (p) {
        case FilterProvenance::matched: return "matched";
        case FilterProvenance::min_isl: return "min_isl";
        case FilterProvenance::rls: return "rls";
        case FilterProvenance::external: return "external";
    }
    return "external";
}

FilterProvenance provenance_from_string(const std::string& s) {
    if (s == "matched") return FilterProvenance::matched;
    if (s == "min_isl") return FilterProvenance::min_isl;
    if (s == "rls") return FilterProvenance::rls;
    if (s == "external") return FilterProvenance::external;
    throw std::invalid_argument("unknown filter provenance: " + s);
}

CMatrix ConvolutionMatrix::sidelobe_rows() const {
    CMatrix out(n_output() - mainlobe_width(), n_filter);
    Index dst = 0;
    for (Index r = 0; r < n_output(); ++r) {
        if (!in_mainlobe(mainlobe_rows, r)) {
            out.row(dst++) = entries.row(r);
        }
    }
    return out;
}

std::vector<Index> mainlobe_rows(Index n_out, Index mainlobe_width) {
    if (mainlobe_width < 1 || mainlobe_width % 2 == 0) {
        throw std::invalid_argument("mainlobe_rows: width must be odd and >= 1");
    }
    if (mainlobe_width > n_out) {
        throw std::invalid_argument("mainlobe_rows: width exceeds output length");
    }
    const Index center = (n_out - 1) / 2;
    const Index half = (mainlobe_width - 1) / 2;
    std::vector<Index> rows;
    rows.reserve(static_cast<std::size_t>(mainlobe_width));
    for (Index r = center - half; r <= center + half; ++r) {
        rows.push_back(r);
    }
    return rows;
}

ConvolutionMatrix build_convolution_matrix(const Waveform& w, Index filter_length,
                                           Index mainlobe_width) {
    const Index n = w.size();
    if (n < 1) {
        throw std::invalid_argument("build_convolution_matrix: empty waveform");
    }
    if (filter_length < 1) {
        throw std::invalid_argument("build_convolution_matrix: filter_length must be >= 1");
    }
    ConvolutionMatrix S;
    S.n_waveform = n;
    S.n_filter = filter_length;
    S.entries = CMatrix::Zero(n + filter_length - 1, filter_length);
    for (Index c = 0; c < filter_length; ++c) {
        S.entries.col(c).segment(c, n) = w.samples;
    }
    S.mainlobe_rows = mainlobe_rows(S.n_output(), mainlobe_width);
    return S;
}

CVector aligned_replica(const Waveform& w, Index filter_length) {
    const Index n = w.size();
    if (n < 1) {
        throw std::invalid_argument("aligned_replica: empty waveform");
    }
    if (filter_length < 1) {
        throw std::invalid_argument("aligned_replica: filter_length must be >= 1");
    }
    const Index center = (n + filter_length - 2) / 2;
    CVector replica = CVector::Zero(filter_length);
    const Index lo = std::max<Index>(0, center - n + 1);
    const Index hi = std::min<Index>(filter_length - 1, center);
    for (Index c = lo; c <= hi; ++c) {
        replica[c] = std::conj(w.samples[center - c]);
    }
    return replica;
}

FilterWeights solve_min_isl(const ConvolutionMatrix& S, Complex alpha) {
    Waveform holder;
    holder.samples = S.entries.col(0).head(S.n_waveform);
    const CVector replica = aligned_replica(holder, S.n_filter);

    FilterWeights result;
    result.provenance = FilterProvenance::min_isl;
    result.mainlobe_constraint = alpha;

    if (S.n_output() == S.mainlobe_width()) {
        // No sidelobe rows to suppress: any W meeting the peak constraint is
        // optimal, return the minimum-norm one.
        result.weights = alpha * replica / replica.squaredNorm();
        return result;
    }

    const CMatrix sidelobes = S.sidelobe_rows();
    const CMatrix gram = sidelobes.adjoint() * sidelobes;
    const Eigen::LDLT<CMatrix> ldlt =
        detail::checked_ldlt(gram, kMaxCondition, "solve_min_isl");

    const CVector direction = ldlt.solve(replica);
    const Complex denom = replica.dot(direction);  // replica^H * direction
    if (std::abs(denom) == 0.0) {
        throw SingularSystemError("solve_min_isl: degenerate peak constraint",
                                  std::numeric_limits<double>::infinity());
    }
    result.weights = (alpha / denom) * direction;
    return result;
}

FilterWeights matched_filter(const Waveform& w) {
    return matched_filter(w, w.size());
}

FilterWeights matched_filter(const Waveform& w, Index filter_length) {
    FilterWeights result;
    result.weights = aligned_replica(w, filter_length);
    result.provenance = FilterProvenance::matched;
    result.mainlobe_constraint = Complex(w.energy(), 0.0);
    return result;
}

CVector apply_filter(const FilterWeights& W, const CVector& y_in) {
    const Index ny = y_in.size();
    const Index nw = W.size();
    if (ny < 1) {
        throw std::invalid_argument("apply_filter: empty input");
    }
    if (nw < 1) {
        throw std::invalid_argument("apply_filter: empty filter");
    }
    CVector out = CVector::Zero(ny + nw - 1);
    for (Index r = 0; r < out.size(); ++r) {
        const Index lo = std::max<Index>(0, r - ny + 1);
        const Index hi = std::min<Index>(nw - 1, r);
        Complex acc = 0.0;
        for (Index c = lo; c <= hi; ++c) {
            acc += W.weights[c] * y_in[r - c];
        }
        out[r] = acc;
    }
    return out;
}

double isl_raw(const FilterWeights& W, const ConvolutionMatrix& S) {
    if (W.size() != S.n_filter) {
        throw std::invalid_argument("isl_raw: filter length does not match matrix");
    }
    const CVector response = S.entries * W.weights;
    return split_response(response, S.mainlobe_rows).sidelobe_energy;
}

double isl(const FilterWeights& W, const ConvolutionMatrix& S) {
    if (W.size() != S.n_filter) {
        throw std::invalid_argument("isl: filter length does not match matrix");
    }
    const CVector response = S.entries * W.weights;
    const ResponseSplit split = split_response(response, S.mainlobe_rows);
    if (split.mainlobe_peak == 0.0) {
        throw std::domain_error("isl: zero mainlobe response");
    }
    if (split.sidelobe_energy == 0.0) {
        return kNegInf;
    }
    return 10.0 * std::log10(split.sidelobe_energy / (split.mainlobe_peak * split.mainlobe_peak));
}

double psl(const CVector& response, std::span<const Index> mainlobe) {
    if (mainlobe.empty()) {
        throw std::invalid_argument("psl: empty mainlobe set");
    }
    double peak = 0.0;
    for (Index r : mainlobe) {
        if (r < 0 || r >= response.size()) {
            throw std::invalid_argument("psl: mainlobe index out of range");
        }
        peak = std::max(peak, std::abs(response[r]));
    }
    if (static_cast<Index>(mainlobe.size()) >= response.size()) {
        throw std::domain_error("psl: empty sidelobe region");
    }
    if (peak == 0.0) {
        throw std::domain_error("psl: zero mainlobe response");
    }
    std::vector<Index> sorted(mainlobe.begin(), mainlobe.end());
    std::sort(sorted.begin(), sorted.end());
    double worst = 0.0;
    for (Index r = 0; r < response.size(); ++r) {
        if (!std::binary_search(sorted.begin(), sorted.end(), r)) {
            worst = std::max(worst, std::abs(response[r]));
        }
    }
    if (worst == 0.0) {
        return kNegInf;
    }
    return 20.0 * std::log10(worst / peak);
}

double snr_loss(const RVector& w_t, const RVector& w_r) {
    if (w_t.size() != w_r.size() || w_t.size() < 1) {
        throw std::invalid_argument("snr_loss: weightings must have equal nonzero length");
    }
    const RVector product = w_t.cwiseProduct(w_r);
    const double sum = product.sum();
    const double sum_sq = product.squaredNorm();
    if (sum_sq == 0.0) {
        throw std::domain_error("snr_loss: all transmit/receive products are zero");
    }
    const double n = static_cast<double>(w_t.size());
    return 10.0 * std::log10(sum * sum / (n * sum_sq));
}

CompressionMetrics compute_metrics(const Waveform& w, const FilterWeights& W,
                                   const ConvolutionMatrix& S) {
    CompressionMetrics m;
    m.mainlobe_width_samples = S.mainlobe_width();
    m.isl_db = isl(W, S);

    const CVector response = S.entries * W.weights;
    m.psl_db = psl(response, S.mainlobe_rows);

    // Receive amplitude profile: the filter tap that weights transmit sample
    // n at the peak output lag.
    const Index center = S.center_row();
    RVector w_r = RVector::Zero(w.size());
    for (Index n = 0; n < w.size(); ++n) {
        const Index c = center - n;
        if (c >= 0 && c < W.size()) {
            w_r[n] = std::abs(W.weights[c]);
        }
    }
    m.snr_loss_db = snr_loss(w.taper, w_r);
    return m;
}

}  // namespace pulsecomp
