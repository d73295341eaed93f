#pragma once

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include "pulsecomp/types.hpp"
#include "pulsecomp/waveform.hpp"

namespace pulsecomp {

using GaRng = std::mt19937_64;

/// Waveform/filter pipeline parameters shared by every fitness evaluation.
struct NlfmDesignParams {
    double bandwidth = 5e6;      // Hz
    double pulse_width = 20e-6;  // s
    double sample_rate = 12e6;   // Hz
    Index filter_length = 0;     // 0 = twice the waveform length
    Index mainlobe_width = 3;
};

struct GaConfig {
    Index population_size = 200;
    double truncation_fraction = 0.40;
    double mutation_rate = 0.001;  // per-gene replacement probability
    Index max_generations = 100;
    Index stall_generations = 20;
    double stall_improvement_db = 0.01;
    bool elitism = true;
    std::uint64_t seed = 0;
    NlfmDesignParams waveform_params;
};

struct Individual {
    BezierGenome genome;
    double fitness = 0.0;  // ISL in dB, lower is better
    bool evaluated = false;
};

struct GenerationStats {
    double best_db;
    double avg_db;
    double avg_distance;  // mean pairwise Euclidean genome distance, Hz
};

struct GaHistory {
    std::vector<GenerationStats> generations;
    Individual best;
};

void validate(const GaConfig& config);

/// Waveform sample count implied by the design parameters (must be even
/// for the mirrored NLFM construction).
Index nlfm_sample_count(const NlfmDesignParams& params);
Index nlfm_filter_length(const NlfmDesignParams& params);

std::vector<Individual> init_population(const GaConfig& config);

/// Genome -> NLFM waveform -> min-ISL filter -> ISL in dB. Cached on the
/// individual; a singular filter solve yields +inf (the individual is
/// culled by selection).
double evaluate_fitness(Individual& individual, const GaConfig& config);

/// The ceil(fraction * size) lowest-fitness individuals, ties broken by
/// lexicographically smaller genome.
std::vector<Individual> select_truncation(const std::vector<Individual>& population,
                                          double fraction);

std::pair<BezierGenome, BezierGenome> crossover_single_point(const BezierGenome& p1,
                                                             const BezierGenome& p2,
                                                             GaRng& rng);

/// Each gene independently redrawn uniformly from [0, bandwidth/2] with
/// probability rate.
BezierGenome mutate(const BezierGenome& genome, double rate, GaRng& rng);

GaHistory evolve(const GaConfig& config);

}  // namespace pulsecomp
