#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>

#include "pulsecomp/bga.hpp"
#include "pulsecomp/clean.hpp"
#include "pulsecomp/filter_design.hpp"
#include "pulsecomp/rls.hpp"
#include "pulsecomp/types.hpp"
#include "pulsecomp/waveform.hpp"

namespace pulsecomp::io {

/// Filesystem-level failure (open/read/write), as opposed to malformed content.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// --- text <-> value ---------------------------------------------------

std::string waveform_csv(const Waveform& w);                       // index,re,im
std::string waveform_sidecar_json(const Waveform& w, double taper_alpha);
std::string filter_csv(const FilterWeights& w);                    // index,re,im
std::string filter_meta_json(const FilterWeights& w, const CompressionMetrics* metrics);
std::string metrics_json(const CompressionMetrics& m);
std::string response_csv(const CVector& response);                 // index,re,im,power_db
std::string profile_csv(const CVector& cells);                     // cell,re,im,power_db
std::string detections_csv(const std::vector<DetectionResult>& detections);
std::string scene_json(const RangeScene& scene);
std::string history_csv(const GaHistory& history);                 // generation,best_db,...
std::string genome_json(const BezierGenome& genome, double fitness_db);
std::string frequency_csv(const FrequencyFunction& f);             // index,frequency_hz

Waveform parse_waveform(const std::string& csv_text, const std::string& sidecar_json);
FilterWeights parse_filter(const std::string& csv_text, const std::string& meta_json);
RangeScene parse_scene(const std::string& json_text, Index n_cells);
BezierGenome parse_genome(const std::string& json_text);

// --- files ------------------------------------------------------------

void write_file(const std::filesystem::path& path, const std::string& content);
std::string read_file(const std::filesystem::path& path);

}  // namespace pulsecomp::io
