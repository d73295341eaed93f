#include "pulsecomp/bga.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <numeric>
#include <stdexcept>
#include <thread>

#include "pulsecomp/errors.hpp"
#include "pulsecomp/filter_design.hpp"

namespace pulsecomp {

namespace {

bool genome_less(const BezierGenome& a, const BezierGenome& b) {
    return std::lexicographical_compare(a.control_weights.begin(), a.control_weights.end(),
                                        b.control_weights.begin(), b.control_weights.end());
}

double genome_distance(const BezierGenome& a, const BezierGenome& b) {
    double sum = 0.0;
    for (int g = 0; g < BezierGenome::kFreeWeights; ++g) {
        const double d = a.control_weights[static_cast<std::size_t>(g)] -
                         b.control_weights[static_cast<std::size_t>(g)];
        sum += d * d;
    }
    return std::sqrt(sum);
}

BezierGenome random_genome(double bandwidth, GaRng& rng) {
    std::uniform_real_distribution<double> gene(0.0, bandwidth / 2.0);
    BezierGenome g;
    g.bandwidth = bandwidth;
    for (auto& w : g.control_weights) w = gene(rng);
    return g;
}

std::vector<Individual> init_population_with(GaRng& rng, const GaConfig& config) {
    std::vector<Individual> population(static_cast<std::size_t>(config.population_size));
    for (auto& ind : population) {
        ind.genome = random_genome(config.waveform_params.bandwidth, rng);
    }
    return population;
}

/// Evaluates every unevaluated individual. Workers pull indices from a
/// shared counter; results land at their index so the outcome does not
/// depend on scheduling.
void evaluate_population(std::vector<Individual>& population, const GaConfig& config) {
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;

    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= population.size()) return;
            try {
                evaluate_fitness(population[i], config);
            } catch (...) {
                std::lock_guard<std::mutex> lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                return;
            }
        }
    };

    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const unsigned n_threads =
        static_cast<unsigned>(std::min<std::size_t>(hw, population.size()));
    if (n_threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> threads;
        threads.reserve(n_threads);
        for (unsigned t = 0; t < n_threads; ++t) threads.emplace_back(worker);
        for (auto& t : threads) t.join();
    }
    if (failure) std::rethrow_exception(failure);
}

std::size_t best_index(const std::vector<Individual>& population) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < population.size(); ++i) {
        if (population[i].fitness < population[best].fitness ||
            (population[i].fitness == population[best].fitness &&
             genome_less(population[i].genome, population[best].genome))) {
            best = i;
        }
    }
    return best;
}

GenerationStats population_stats(const std::vector<Individual>& population) {
    GenerationStats s{};
    s.best_db = std::numeric_limits<double>::infinity();
    double sum = 0.0;
    for (const auto& ind : population) {
        s.best_db = std::min(s.best_db, ind.fitness);
        sum += ind.fitness;
    }
    s.avg_db = sum / static_cast<double>(population.size());

    double dist = 0.0;
    std::size_t pairs = 0;
    for (std::size_t i = 0; i < population.size(); ++i) {
        for (std::size_t j = i + 1; j < population.size(); ++j) {
            dist += genome_distance(population[i].genome, population[j].genome);
            ++pairs;
        }
    }
    s.avg_distance = pairs > 0 ? dist / static_cast<double>(pairs) : 0.0;
    return s;
}

}  // namespace

void validate(const GaConfig& config) {
    if (config.population_size < 4 || config.population_size % 2 != 0) {
        throw std::invalid_argument("ga: population size must be even and >= 4");
    }
    if (!(config.truncation_fraction > 0.0) || config.truncation_fraction > 1.0) {
        throw std::invalid_argument("ga: truncation fraction must be in (0, 1]");
    }
    if (config.mutation_rate < 0.0 || config.mutation_rate > 1.0) {
        throw std::invalid_argument("ga: mutation rate must be in [0, 1]");
    }
    if (config.max_generations < 1 || config.stall_generations < 1) {
        throw std::invalid_argument("ga: generation counts must be >= 1");
    }
    const auto& p = config.waveform_params;
    if (!(p.bandwidth > 0.0) || !(p.pulse_width > 0.0) || !(p.sample_rate > 0.0)) {
        throw std::invalid_argument("ga: waveform parameters must be positive");
    }
    const Index n = nlfm_sample_count(p);
    if (n < 4 || n % 2 != 0) {
        throw std::invalid_argument(
            "ga: pulse_width * sample_rate must give an even sample count >= 4");
    }
}

Index nlfm_sample_count(const NlfmDesignParams& params) {
    return static_cast<Index>(std::llround(params.pulse_width * params.sample_rate));
}

Index nlfm_filter_length(const NlfmDesignParams& params) {
    return params.filter_length > 0 ? params.filter_length : 2 * nlfm_sample_count(params);
}

std::vector<Individual> init_population(const GaConfig& config) {
    validate(config);
    GaRng rng(config.seed);
    return init_population_with(rng, config);
}

double evaluate_fitness(Individual& individual, const GaConfig& config) {
    if (individual.evaluated) {
        return individual.fitness;
    }
    const auto& p = config.waveform_params;
    try {
        const FrequencyFunction freq =
            build_nlfm_frequency(individual.genome, nlfm_sample_count(p));
        const Waveform w = synthesize_nlfm(freq, p.sample_rate);
        const ConvolutionMatrix S =
            build_convolution_matrix(w, nlfm_filter_length(p), p.mainlobe_width);
        const FilterWeights weights = solve_min_isl(S, Complex(w.energy(), 0.0));
        individual.fitness = isl(weights, S);
    } catch (const SingularSystemError&) {
        individual.fitness = std::numeric_limits<double>::infinity();
    }
    individual.evaluated = true;
    return individual.fitness;
}

std::vector<Individual> select_truncation(const std::vector<Individual>& population,
                                          double fraction) {
    if (population.empty()) {
        throw std::invalid_argument("select_truncation: empty population");
    }
    if (!(fraction > 0.0) || fraction > 1.0) {
        throw std::invalid_argument("select_truncation: fraction must be in (0, 1]");
    }
    for (const auto& ind : population) {
        if (!ind.evaluated) {
            throw std::invalid_argument("select_truncation: population not fully evaluated");
        }
    }
    const auto count = static_cast<std::size_t>(
        std::ceil(fraction * static_cast<double>(population.size())));
    std::vector<Individual> sorted = population;
    std::sort(sorted.begin(), sorted.end(), [](const Individual& a, const Individual& b) {
        if (a.fitness != b.fitness) return a.fitness < b.fitness;
        return genome_less(a.genome, b.genome);
    });
    sorted.resize(std::min(count, sorted.size()));
    return sorted;
}

std::pair<BezierGenome, BezierGenome> crossover_single_point(const BezierGenome& p1,
                                                             const BezierGenome& p2,
                                                             GaRng& rng) {
    std::uniform_int_distribution<int> cut_dist(1, BezierGenome::kFreeWeights - 1);
    const int cut = cut_dist(rng);
    BezierGenome c1 = p1;
    BezierGenome c2 = p2;
    for (int g = cut; g < BezierGenome::kFreeWeights; ++g) {
        c1.control_weights[static_cast<std::size_t>(g)] =
            p2.control_weights[static_cast<std::size_t>(g)];
        c2.control_weights[static_cast<std::size_t>(g)] =
            p1.control_weights[static_cast<std::size_t>(g)];
    }
    return {c1, c2};
}

BezierGenome mutate(const BezierGenome& genome, double rate, GaRng& rng) {
    if (rate < 0.0 || rate > 1.0) {
        throw std::invalid_argument("mutate: rate must be in [0, 1]");
    }
    std::bernoulli_distribution hit(rate);
    std::uniform_real_distribution<double> gene(0.0, genome.bandwidth / 2.0);
    BezierGenome out = genome;
    for (auto& w : out.control_weights) {
        if (hit(rng)) {
            w = gene(rng);
        }
    }
    return out;
}

GaHistory evolve(const GaConfig& config) {
    validate(config);
    GaRng rng(config.seed);
    std::vector<Individual> population = init_population_with(rng, config);

    GaHistory history;
    history.best.fitness = std::numeric_limits<double>::infinity();
    history.best.evaluated = true;
    Index stall = 0;

    for (Index gen = 0; gen < config.max_generations; ++gen) {
        evaluate_population(population, config);
        history.generations.push_back(population_stats(population));

        const Individual& gen_best = population[best_index(population)];
        if (gen_best.fitness < history.best.fitness - config.stall_improvement_db) {
            stall = 0;
        } else {
            ++stall;
        }
        if (gen_best.fitness < history.best.fitness) {
            history.best = gen_best;
        }
        if (gen + 1 >= config.max_generations || stall >= config.stall_generations) {
            break;
        }

        const std::vector<Individual> pool =
            select_truncation(population, config.truncation_fraction);
        std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);

        std::vector<Individual> next;
        next.reserve(static_cast<std::size_t>(config.population_size));
        for (Index pair = 0; pair < config.population_size / 2; ++pair) {
            const std::size_t i = pick(rng);
            std::size_t j = pick(rng);
            while (pool.size() > 1 && j == i) j = pick(rng);
            auto [a, b] = crossover_single_point(pool[i].genome, pool[j].genome, rng);
            Individual child_a;
            child_a.genome = mutate(a, config.mutation_rate, rng);
            Individual child_b;
            child_b.genome = mutate(b, config.mutation_rate, rng);
            next.push_back(std::move(child_a));
            next.push_back(std::move(child_b));
        }
        if (config.elitism) {
            // The elite displaces the last child so the population size stays fixed.
            next.back() = gen_best;
        }
        population = std::move(next);
    }
    return history;
}

}  // namespace pulsecomp
