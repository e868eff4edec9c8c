#pragma once

#include "tnp/calibration.hpp"
#include "tnp/classifiers.hpp"
#include "tnp/tgmm.hpp"

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace tnp {

enum class Method { TLda, TLdaNp, VLda, TNn, TNnNp };

const std::vector<Method>& all_methods();
std::string method_name(Method m);
Method method_from_name(const std::string& name);

struct NnSettings {
    std::vector<std::size_t> tcl_ranks;  // empty = min(8, d_m) per mode
    std::size_t hidden = 64;
    std::size_t epochs = 100;
    std::size_t batch = 32;
    double rate = 1e-3;
};

enum class Distribution { Normal, StudentT };

struct ExperimentConfig {
    std::string id;
    Shape shape;
    std::vector<std::size_t> true_ranks;
    std::vector<std::size_t> working_ranks;
    double snr = 7.0;
    Distribution distribution = Distribution::Normal;
    int t_dof = 0;  // used when distribution == StudentT
    std::size_t n_train_total = 0;
    double eta = 1.0;  // n_1 / n_0
    std::size_t n_test_total = 0;
    std::size_t reps = 1;
    NpLevels levels;
    std::uint64_t base_seed = 0;
    std::vector<Method> methods;
    NnSettings nn;
    bool redraw_signal_per_rep = true;
    double dtip_epsilon = 1e-6;
    std::size_t dtip_max_iter = 50;
    double vlda_ridge_scale = 1e-3;

    void validate() const;
};

struct ClassSizes {
    std::size_t n0 = 0;
    std::size_t n1 = 0;
};

/// n1 = floor(total * eta / (1 + eta)), n0 = total - n1.
ClassSizes split_by_ratio(std::size_t total, double eta);

/// One repetition's data: true model, class-0 fit/calibration halves,
/// class-1 training data, and a fresh test set.
struct Instance {
    TgmmParams params;
    std::vector<DenseTensor> fit0;
    std::vector<DenseTensor> calib0;
    std::vector<DenseTensor> train1;
    std::vector<DenseTensor> test0;
    std::vector<DenseTensor> test1;
};

Instance generate_instance(const ExperimentConfig& config, RandomSource& rng);

struct Metrics {
    double type1 = 0.0;
    double type2 = 0.0;
    double accuracy = 0.0;
};

Metrics evaluate(const NpClassifier& classifier, const std::vector<DenseTensor>& test0,
                 const std::vector<DenseTensor>& test1);

struct RepetitionResult {
    std::size_t rep = 0;
    std::uint64_t seed = 0;
    std::map<Method, Metrics> per_method;
};

struct MethodAggregate {
    double mean_type1 = 0.0, sd_type1 = 0.0;
    double mean_type2 = 0.0, sd_type2 = 0.0;
    double mean_accuracy = 0.0, sd_accuracy = 0.0;
    double violation_rate = 0.0;
};

struct AggregateMetrics {
    std::map<Method, MethodAggregate> per_method;
};

struct ExperimentResult {
    ExperimentConfig config;
    std::vector<RepetitionResult> repetitions;
    AggregateMetrics aggregate;
};

/// Recomputes the aggregate block from stored repetition results.
AggregateMetrics aggregate_results(const std::vector<RepetitionResult>& reps, double alpha);

/// Runs all repetitions (in parallel across `workers` threads; results are
/// keyed by repetition index, so the output is independent of the worker
/// count). A failing repetition aborts the whole run with RepetitionError.
ExperimentResult run_experiment(const ExperimentConfig& config, unsigned workers = 0);

/// Configuration families mirroring the simulation studies. Scale "full"
/// uses 500 repetitions and a 60000-sample test set; "desk" uses 50 and 6000.
std::vector<ExperimentConfig> example_configs(const std::string& name, const std::string& scale);

const std::vector<std::string>& known_example_names();

}  // namespace tnp
