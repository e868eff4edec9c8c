#include "tnp/classifiers.hpp"
#include "tnp/dataset_io.hpp"
#include "tnp/errors.hpp"
#include "tnp/experiments.hpp"
#include "tnp/results_io.hpp"
#include "tnp/rng.hpp"
#include "tnp/run_config.hpp"
#include "tnp/tgmm.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

namespace fs = std::filesystem;
using tnp::io::format_real;

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitInvalid = 2;
constexpr int kExitCalibration = 3;

void write_text_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    out << text;
    if (!out) throw std::runtime_error("error writing '" + path.string() + "'");
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::invalid_argument("cannot open '" + path + "'");
    std::ostringstream text;
    text << in.rdbuf();
    return text.str();
}

int run_simulate(const std::string& config_path, const std::string& example,
                 const std::optional<std::string>& scale, const std::optional<std::uint64_t>& seed,
                 unsigned workers, const std::string& output_dir) {
    tnp::io::SimulationPlan plan;
    try {
        if (!example.empty()) {
            plan = tnp::io::plan_for_example(example, scale.value_or("desk"), seed.value_or(0));
        } else if (!config_path.empty()) {
            plan = tnp::io::load_simulation_config(config_path, scale, seed);
        } else {
            std::cerr << "simulate: provide a config file or --example\n";
            return kExitInvalid;
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "simulate: " << e.what() << "\n";
        return kExitInvalid;
    }

    std::vector<tnp::ExperimentResult> results;
    try {
        for (const auto& config : plan.configs) {
            results.push_back(tnp::run_experiment(config, workers));
            const auto& result = results.back();
            std::ostringstream line;
            line << result.config.id << ": reps=" << result.config.reps;
            for (tnp::Method m : result.config.methods) {
                const auto& agg = result.aggregate.per_method.at(m);
                line << " | " << tnp::method_name(m) << " acc=" << format_real(agg.mean_accuracy)
                     << " type1=" << format_real(agg.mean_type1)
                     << " vr=" << format_real(agg.violation_rate);
            }
            std::cout << line.str() << "\n";
        }

        fs::create_directories(output_dir);
        const auto rows = tnp::io::detail_rows(results);
        write_text_file(fs::path(output_dir) / "detail.csv", tnp::io::detail_csv(rows));
        write_text_file(fs::path(output_dir) / "aggregate.csv",
                        tnp::io::aggregate_csv(rows, plan.configs.front().levels.alpha));
    } catch (const tnp::RepetitionError& e) {
        std::cerr << "simulate: " << e.what() << "\n";
        return kExitRuntime;
    } catch (const std::invalid_argument& e) {
        std::cerr << "simulate: " << e.what() << "\n";
        return kExitInvalid;
    } catch (const std::exception& e) {
        std::cerr << "simulate: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitOk;
}

int run_gen(const std::string& config_path, const std::string& output_path) {
    try {
        tnp::io::SimulationPlan plan =
            tnp::io::load_simulation_config(config_path, std::nullopt, std::nullopt);
        const tnp::ExperimentConfig& config = plan.configs.front();

        tnp::RandomSource rng = tnp::RandomSource(config.base_seed).split(0);
        tnp::Instance instance = tnp::generate_instance(config, rng);

        tnp::io::TensorDataset dataset;
        dataset.shape = config.shape;
        for (auto& x : instance.fit0) dataset.samples.push_back({std::move(x), 0});
        for (auto& x : instance.calib0) dataset.samples.push_back({std::move(x), 0});
        for (auto& x : instance.train1) dataset.samples.push_back({std::move(x), 1});
        tnp::io::write_dataset(output_path, dataset);

        const tnp::OracleRule rule = tnp::oracle_rule(instance.params, config.levels.alpha);
        nlohmann::json truth;
        truth["shape"] = config.shape.dims();
        truth["alpha"] = config.levels.alpha;
        truth["snr"] = rule.snr;
        truth["oracle_threshold"] = rule.threshold;
        truth["true_b"] = rule.discriminant.vectorize();
        write_text_file(output_path + ".truth.json", truth.dump(2) + "\n");

        std::cout << "wrote " << dataset.samples.size() << " samples to " << output_path << "\n";
    } catch (const std::invalid_argument& e) {
        std::cerr << "gen: " << e.what() << "\n";
        return kExitInvalid;
    } catch (const std::exception& e) {
        std::cerr << "gen: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitOk;
}

struct FitOptions {
    std::string train_path;
    std::string method;
    std::string output_path;
    std::vector<std::size_t> ranks;
    double alpha = 0.05;
    double delta = 0.1;
    double epsilon = 1e-6;
    std::size_t max_iter = 50;
    double ridge_scale = 1e-3;
    std::vector<std::size_t> tcl_ranks;
    std::size_t hidden = 64;
    std::size_t epochs = 100;
    std::size_t batch = 32;
    double rate = 1e-3;
    std::uint64_t seed = 0;
};

int run_fit(const FitOptions& opt) {
    try {
        const tnp::io::TensorDataset dataset = tnp::io::read_dataset(opt.train_path);
        const tnp::Method method = tnp::method_from_name(opt.method);

        std::vector<tnp::DenseTensor> class0, class1;
        for (const auto& s : dataset.samples) {
            (s.label == 0 ? class0 : class1).push_back(s.tensor);
        }
        if (class0.empty() || class1.empty()) {
            throw tnp::EmptyClass("training data must contain both classes");
        }

        const bool needs_ranks = method == tnp::Method::TLda || method == tnp::Method::TLdaNp;
        if (needs_ranks && opt.ranks.empty()) {
            throw std::invalid_argument("--ranks is required for " + opt.method);
        }

        // Seeded 50/50 class-0 split; the later half calibrates.
        tnp::RandomSource rng(opt.seed);
        std::vector<tnp::DenseTensor> fit0 = class0, calib0;
        {
            tnp::RandomSource split_rng = rng.split(0);
            for (std::size_t i = fit0.size(); i > 1; --i) {
                std::swap(fit0[i - 1], fit0[split_rng.next_u64() % i]);
            }
            const std::size_t n_calib = fit0.size() / 2;
            calib0.assign(std::make_move_iterator(fit0.end() - n_calib),
                          std::make_move_iterator(fit0.end()));
            fit0.resize(fit0.size() - n_calib);
        }

        const tnp::NpLevels levels(opt.alpha, opt.delta);
        tnp::TnnArchitecture arch = opt.tcl_ranks.empty()
                                        ? tnp::TnnArchitecture::defaults_for(dataset.shape)
                                        : tnp::TnnArchitecture{opt.tcl_ranks, opt.hidden};
        arch.hidden = opt.hidden;
        tnp::OptimizerSettings optimizer;
        optimizer.rate = opt.rate;
        optimizer.batch_size = opt.batch;
        tnp::RandomSource nn_rng = rng.split(1);

        tnp::NpClassifier clf;
        switch (method) {
            case tnp::Method::TLda:
                clf = tnp::fit_tlda(dataset.samples, opt.ranks, opt.epsilon, opt.max_iter);
                break;
            case tnp::Method::TLdaNp:
                clf = tnp::fit_tlda_np(fit0, class1, calib0, opt.ranks, opt.epsilon,
                                       opt.max_iter, levels);
                break;
            case tnp::Method::VLda:
                clf = tnp::fit_vlda(dataset.samples, opt.ridge_scale);
                break;
            case tnp::Method::TNn:
                clf = tnp::fit_tnn(dataset.samples, arch, opt.epochs, optimizer, nn_rng);
                break;
            case tnp::Method::TNnNp:
                clf = tnp::fit_tnn_np(fit0, class1, calib0, arch, opt.epochs, optimizer, levels,
                                      nn_rng);
                break;
        }
        tnp::io::write_model(opt.output_path,
                             tnp::io::StoredModel{opt.method, dataset.shape, std::move(clf)});
        std::cout << "wrote model " << opt.output_path << "\n";
    } catch (const tnp::CalibrationSetTooSmall& e) {
        std::cerr << "fit: " << e.what() << " (need at least " << e.required()
                  << " class-0 calibration samples)\n";
        return kExitCalibration;
    } catch (const tnp::io::FormatError& e) {
        std::cerr << "fit: " << e.what() << "\n";
        return kExitInvalid;
    } catch (const tnp::EmptyClass& e) {
        std::cerr << "fit: " << e.what() << "\n";
        return kExitInvalid;
    } catch (const std::invalid_argument& e) {
        std::cerr << "fit: " << e.what() << "\n";
        return kExitInvalid;
    } catch (const std::out_of_range& e) {
        std::cerr << "fit: " << e.what() << "\n";
        return kExitInvalid;
    } catch (const std::exception& e) {
        std::cerr << "fit: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitOk;
}

int run_predict(const std::string& model_path, const std::string& data_path,
                const std::string& output_path) {
    try {
        const tnp::io::StoredModel model = tnp::io::read_model(model_path);
        const tnp::io::TensorDataset dataset = tnp::io::read_dataset(data_path);
        if (dataset.shape != model.shape) {
            std::cerr << "predict: shape mismatch between model and data\n";
            return kExitInvalid;
        }
        std::vector<const tnp::DenseTensor*> ptrs;
        ptrs.reserve(dataset.samples.size());
        for (const auto& s : dataset.samples) ptrs.push_back(&s.tensor);
        const std::vector<double> scores = model.classifier.score_batch(ptrs);

        std::string csv = "index,score,label\n";
        for (std::size_t i = 0; i < scores.size(); ++i) {
            const bool fires = model.classifier.strict ? scores[i] > model.classifier.threshold
                                                       : scores[i] >= model.classifier.threshold;
            csv += std::to_string(i);
            csv += ',';
            csv += format_real(scores[i]);
            csv += ',';
            csv += fires ? '1' : '0';
            csv += '\n';
        }
        write_text_file(output_path, csv);
    } catch (const tnp::io::FormatError& e) {
        std::cerr << "predict: " << e.what() << "\n";
        return kExitInvalid;
    } catch (const std::invalid_argument& e) {
        std::cerr << "predict: " << e.what() << "\n";
        return kExitInvalid;
    } catch (const std::exception& e) {
        std::cerr << "predict: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitOk;
}

int run_verify(const std::string& detail_path, const std::string& aggregate_path, double alpha) {
    try {
        const auto rows = tnp::io::parse_detail_csv(read_text_file(detail_path));
        const std::string expected = tnp::io::aggregate_csv(rows, alpha);
        const std::string actual = read_text_file(aggregate_path);
        if (expected != actual) {
            std::cerr << "verify: aggregate file does not match the detail file\n";
            return kExitRuntime;
        }
        std::cout << "aggregate file is consistent with the detail file\n";
    } catch (const std::invalid_argument& e) {
        std::cerr << "verify: " << e.what() << "\n";
        return kExitInvalid;
    } catch (const std::exception& e) {
        std::cerr << "verify: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Neyman-Pearson classification for tensor-valued data"};
    app.require_subcommand(1);

    // simulate
    std::string sim_config, sim_example, sim_output;
    std::string sim_scale;
    std::uint64_t sim_seed = 0;
    bool sim_seed_set = false;
    unsigned sim_workers = 0;
    auto* simulate = app.add_subcommand("simulate", "Run a Monte-Carlo study and write CSVs");
    simulate->add_option("config", sim_config, "JSON run configuration");
    simulate->add_option("--example", sim_example,
                         "named study: ex1, ex1-imbalanced, ex2, ex3, exS1");
    simulate->add_option("--scale", sim_scale, "full or desk (default desk)");
    simulate->add_option("--seed", sim_seed, "base seed")->each([&](const std::string&) {
        sim_seed_set = true;
    });
    simulate->add_option("--workers", sim_workers, "worker threads (default: all cores)");
    simulate->add_option("-o,--output", sim_output, "output directory")->required();

    // gen
    std::string gen_config, gen_output;
    auto* gen = app.add_subcommand("gen", "Draw a synthetic dataset and its ground truth");
    gen->add_option("config", gen_config, "JSON run configuration")->required();
    gen->add_option("-o,--output", gen_output, "output dataset path")->required();

    // fit
    FitOptions fit;
    auto* fit_cmd = app.add_subcommand("fit", "Fit a classifier on a dataset file");
    fit_cmd->add_option("--train", fit.train_path, "training dataset (TNPD)")->required();
    fit_cmd->add_option("--method", fit.method, "t-lda, t-lda-np, v-lda, t-nn, t-nn-np")
        ->required();
    fit_cmd->add_option("-o,--output", fit.output_path, "model output path")->required();
    fit_cmd->add_option("--ranks", fit.ranks, "Tucker working ranks, one per mode");
    fit_cmd->add_option("--alpha", fit.alpha, "type I error target");
    fit_cmd->add_option("--delta", fit.delta, "violation tolerance");
    fit_cmd->add_option("--epsilon", fit.epsilon, "projection stopping tolerance");
    fit_cmd->add_option("--max-iter", fit.max_iter, "projection sweep cap");
    fit_cmd->add_option("--ridge-scale", fit.ridge_scale, "v-lda ridge scale");
    fit_cmd->add_option("--tcl-ranks", fit.tcl_ranks, "contraction ranks, one per mode");
    fit_cmd->add_option("--hidden", fit.hidden, "hidden width");
    fit_cmd->add_option("--epochs", fit.epochs, "training epochs");
    fit_cmd->add_option("--batch", fit.batch, "minibatch size");
    fit_cmd->add_option("--rate", fit.rate, "learning rate");
    fit_cmd->add_option("--seed", fit.seed, "seed for splits and initialization");

    // predict
    std::string predict_model, predict_data, predict_output;
    auto* predict = app.add_subcommand("predict", "Score a dataset with a stored model");
    predict->add_option("--model", predict_model, "model file (TNPM)")->required();
    predict->add_option("--data", predict_data, "dataset file (TNPD)")->required();
    predict->add_option("-o,--output", predict_output, "output CSV path")->required();

    // verify
    std::string verify_detail, verify_aggregate;
    double verify_alpha = 0.05;
    auto* verify = app.add_subcommand("verify", "Check an aggregate CSV against its detail CSV");
    verify->add_option("--detail", verify_detail, "detail CSV path")->required();
    verify->add_option("--aggregate", verify_aggregate, "aggregate CSV path")->required();
    verify->add_option("--alpha", verify_alpha, "type I target used for violation rates");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitInvalid;
    }

    if (simulate->parsed()) {
        return run_simulate(sim_config, sim_example,
                            sim_scale.empty() ? std::nullopt : std::make_optional(sim_scale),
                            sim_seed_set ? std::make_optional(sim_seed) : std::nullopt,
                            sim_workers, sim_output);
    }
    if (gen->parsed()) return run_gen(gen_config, gen_output);
    if (fit_cmd->parsed()) return run_fit(fit);
    if (predict->parsed()) return run_predict(predict_model, predict_data, predict_output);
    if (verify->parsed()) return run_verify(verify_detail, verify_aggregate, verify_alpha);
    return kExitInvalid;
}
