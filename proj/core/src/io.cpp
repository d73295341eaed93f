#include "pulsecomp/io.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "csv_format.hpp"

namespace pulsecomp::io {

namespace {

using nlohmann::json;
using detail::format_double;

std::string power_db(const Complex& v) {
    const double mag = std::abs(v);
    if (mag == 0.0) {
        return "-inf";
    }
    return format_double(20.0 * std::log10(mag));
}

/// dB values may legitimately be -inf; JSON has no infinity, so those
/// serialize as the string "-inf".
json db_field(double v) {
    if (std::isfinite(v)) return v;
    return v > 0.0 ? json("inf") : json("-inf");
}

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, sep)) fields.push_back(field);
    return fields;
}

/// Parses a CSV with the given header into rows of doubles.
std::vector<std::vector<double>> parse_numeric_csv(const std::string& text,
                                                   const std::string& expected_header) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != expected_header) {
        throw std::invalid_argument("csv: expected header '" + expected_header + "'");
    }
    std::vector<std::vector<double>> rows;
    const std::size_t n_fields = split(expected_header, ',').size();
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto fields = split(line, ',');
        if (fields.size() != n_fields) {
            throw std::invalid_argument("csv: malformed row '" + line + "'");
        }
        std::vector<double> row;
        row.reserve(fields.size());
        for (const auto& f : fields) {
            std::size_t used = 0;
            row.push_back(std::stod(f, &used));
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

std::string complex_rows_csv(const char* index_name, const CVector& values,
                             bool with_power) {
    std::string out = index_name;
    out += ",re,im";
    if (with_power) out += ",power_db";
    out += '\n';
    for (Index i = 0; i < values.size(); ++i) {
        out += std::to_string(i);
        out += ',';
        out += format_double(values[i].real());
        out += ',';
        out += format_double(values[i].imag());
        if (with_power) {
            out += ',';
            out += power_db(values[i]);
        }
        out += '\n';
    }
    return out;
}

}  // namespace

std::string waveform_csv(const Waveform& w) {
    return complex_rows_csv("index", w.samples, /*with_power=*/false);
}

std::string waveform_sidecar_json(const Waveform& w, double taper_alpha) {
    json j;
    j["sample_rate"] = w.sample_rate;
    j["bandwidth"] = w.bandwidth;
    j["pulse_width"] = w.pulse_width;
    j["taper_alpha"] = taper_alpha;
    return j.dump(2) + "\n";
}

std::string filter_csv(const FilterWeights& w) {
    return complex_rows_csv("index", w.weights, /*with_power=*/false);
}

std::string filter_meta_json(const FilterWeights& w, const CompressionMetrics* metrics) {
    json j;
    j["provenance"] = to_string(w.provenance);
    j["length"] = w.size();
    j["alpha"] = {{"re", w.mainlobe_constraint.real()}, {"im", w.mainlobe_constraint.imag()}};
    if (metrics != nullptr) {
        j["metrics"] = json::parse(metrics_json(*metrics));
    }
    return j.dump(2) + "\n";
}

std::string metrics_json(const CompressionMetrics& m) {
    json j;
    j["isl_db"] = db_field(m.isl_db);
    j["psl_db"] = db_field(m.psl_db);
    j["snr_loss_db"] = db_field(m.snr_loss_db);
    j["mainlobe_width_samples"] = m.mainlobe_width_samples;
    return j.dump(2) + "\n";
}

std::string response_csv(const CVector& response) {
    return complex_rows_csv("index", response, /*with_power=*/true);
}

std::string profile_csv(const CVector& cells) {
    return complex_rows_csv("cell", cells, /*with_power=*/true);
}

std::string detections_csv(const std::vector<DetectionResult>& detections) {
    std::string out = "cell,statistic,threshold,detected,estimate_re,estimate_im\n";
    for (const auto& d : detections) {
        out += std::to_string(d.cell);
        out += ',';
        out += format_double(d.statistic);
        out += ',';
        out += format_double(d.threshold);
        out += ',';
        out += d.detected ? '1' : '0';
        out += ',';
        out += format_double(d.amplitude_estimate.real());
        out += ',';
        out += format_double(d.amplitude_estimate.imag());
        out += '\n';
    }
    return out;
}

std::string scene_json(const RangeScene& scene) {
    json cells = json::array();
    for (Index i = 0; i < scene.impulse_response.size(); ++i) {
        if (scene.impulse_response[i] != Complex(0.0, 0.0)) {
            cells.push_back({{"index", i},
                             {"re", scene.impulse_response[i].real()},
                             {"im", scene.impulse_response[i].imag()}});
        }
    }
    json j;
    j["cells"] = cells;
    j["noise_power"] = scene.noise_power;
    j["seed"] = scene.seed;
    return j.dump(2) + "\n";
}

std::string history_csv(const GaHistory& history) {
    std::string out = "generation,best_db,avg_db,avg_distance\n";
    for (std::size_t g = 0; g < history.generations.size(); ++g) {
        const auto& s = history.generations[g];
        out += std::to_string(g);
        out += ',';
        out += format_double(s.best_db);
        out += ',';
        out += format_double(s.avg_db);
        out += ',';
        out += format_double(s.avg_distance);
        out += '\n';
    }
    return out;
}

std::string genome_json(const BezierGenome& genome, double fitness_db) {
    json j;
    j["bandwidth"] = genome.bandwidth;
    j["control_weights"] = genome.control_weights;
    j["fitness_db"] = db_field(fitness_db);
    return j.dump(2) + "\n";
}

std::string frequency_csv(const FrequencyFunction& f) {
    std::string out = "index,frequency_hz\n";
    for (Index i = 0; i < f.values.size(); ++i) {
        out += std::to_string(i);
        out += ',';
        out += format_double(f.values[i]);
        out += '\n';
    }
    return out;
}

Waveform parse_waveform(const std::string& csv_text, const std::string& sidecar_json) {
    const auto rows = parse_numeric_csv(csv_text, "index,re,im");
    if (rows.empty()) {
        throw std::invalid_argument("waveform csv: no samples");
    }
    const json meta = json::parse(sidecar_json);

    Waveform w;
    w.samples.resize(static_cast<Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        w.samples[static_cast<Index>(i)] = Complex(rows[i][1], rows[i][2]);
    }
    w.sample_rate = meta.at("sample_rate").get<double>();
    w.bandwidth = meta.at("bandwidth").get<double>();
    w.pulse_width = meta.at("pulse_width").get<double>();
    w.taper = tukey_window(w.samples.size(), meta.at("taper_alpha").get<double>());
    return w;
}

FilterWeights parse_filter(const std::string& csv_text, const std::string& meta_json) {
    const auto rows = parse_numeric_csv(csv_text, "index,re,im");
    if (rows.empty()) {
        throw std::invalid_argument("filter csv: no coefficients");
    }
    FilterWeights w;
    w.weights.resize(static_cast<Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        w.weights[static_cast<Index>(i)] = Complex(rows[i][1], rows[i][2]);
    }
    if (!meta_json.empty()) {
        const json meta = json::parse(meta_json);
        w.provenance = provenance_from_string(meta.at("provenance").get<std::string>());
        w.mainlobe_constraint = Complex(meta.at("alpha").at("re").get<double>(),
                                        meta.at("alpha").at("im").get<double>());
    }
    return w;
}

RangeScene parse_scene(const std::string& json_text, Index n_cells) {
    const json j = json::parse(json_text);
    RangeScene scene;
    scene.impulse_response = CVector::Zero(n_cells);
    for (const auto& cell : j.at("cells")) {
        const Index idx = cell.at("index").get<Index>();
        if (idx < 0 || idx >= n_cells) {
            throw std::invalid_argument("scene: cell index out of range");
        }
        scene.impulse_response[idx] =
            Complex(cell.at("re").get<double>(), cell.at("im").get<double>());
    }
    scene.noise_power = j.at("noise_power").get<double>();
    if (scene.noise_power < 0.0) {
        throw std::invalid_argument("scene: noise_power must be >= 0");
    }
    scene.seed = j.at("seed").get<std::uint64_t>();
    return scene;
}

BezierGenome parse_genome(const std::string& json_text) {
    const json j = json::parse(json_text);
    BezierGenome g;
    g.bandwidth = j.at("bandwidth").get<double>();
    const auto& weights = j.at("control_weights");
    if (weights.size() != BezierGenome::kFreeWeights) {
        throw std::invalid_argument("genome: expected 10 control weights");
    }
    for (std::size_t i = 0; i < g.control_weights.size(); ++i) {
        g.control_weights[i] = weights[i].get<double>();
    }
    return g;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot open for writing: " + path.string());
    }
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) {
        throw IoError("write failed: " + path.string());
    }
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open for reading: " + path.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) {
        throw IoError("read failed: " + path.string());
    }
    return buf.str();
}

}  // namespace pulsecomp::io
