#include "tnp/dataset_io.hpp"
#include "tnp/gaussian.hpp"
#include "tnp/rng.hpp"
#include "tnp/tensor.hpp"

#include <json.hpp>

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace tnp {
namespace {

namespace fs = std::filesystem;

struct CommandResult {
    int exit_code = -1;
    std::string output;  // stdout + stderr
};

CommandResult run_cli(const std::string& args, const fs::path& capture) {
    const std::string command =
        std::string(TNP_CLI_PATH) + " " + args + " > " + capture.string() + " 2>&1";
    const int status = std::system(command.c_str());
    CommandResult result;
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    std::ifstream in(capture);
    std::ostringstream text;
    text << in.rdbuf();
    result.output = text.str();
    return result;
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream text;
    text << in.rdbuf();
    return text.str();
}

class CliTest : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("tnp_cli_" + std::to_string(::getpid()) + "_" +
                std::to_string(reinterpret_cast<std::uintptr_t>(this)));
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    fs::path file(const std::string& name) const { return dir_ / name; }
    CommandResult cli(const std::string& args) { return run_cli(args, file("capture.log")); }

    void write_config(const std::string& name, const std::string& json) {
        std::ofstream(file(name)) << json;
    }

    fs::path dir_;
};

constexpr const char* kTinyConfig =
    R"({"shape": [4, 4, 4], "ranks": [2, 2, 1], "n_train": 200, "n_test": 200,
        "reps": 4, "seed": 5, "methods": ["t-lda", "t-lda-np", "v-lda"]})";

TEST_F(CliTest, HelpExitsZero) {
    EXPECT_EQ(cli("--help").exit_code, 0);
    EXPECT_EQ(cli("simulate --help").exit_code, 0);
}

TEST_F(CliTest, UnknownExampleExitsTwo) {
    const CommandResult r = cli("simulate --example ex9 -o " + file("out").string());
    EXPECT_EQ(r.exit_code, 2);
    EXPECT_NE(r.output.find("unknown example"), std::string::npos);
}

TEST_F(CliTest, UnknownConfigKeyExitsTwo) {
    write_config("bad.json", R"({"shape": [4], "ranks": [2], "n_train": 100, "oops": true})");
    const CommandResult r =
        cli("simulate " + file("bad.json").string() + " -o " + file("out").string());
    EXPECT_EQ(r.exit_code, 2);
    EXPECT_NE(r.output.find("oops"), std::string::npos);
}

TEST_F(CliTest, SimulateWritesConsistentCsvAndRerunsIdentically) {
    write_config("cfg.json", kTinyConfig);
    const std::string cfg = file("cfg.json").string();

    const CommandResult first = cli("simulate " + cfg + " -o " + file("out1").string());
    ASSERT_EQ(first.exit_code, 0) << first.output;
    EXPECT_NE(first.output.find("custom"), std::string::npos);

    const CommandResult second =
        cli("simulate " + cfg + " --workers 2 -o " + file("out2").string());
    ASSERT_EQ(second.exit_code, 0) << second.output;

    const std::string detail1 = read_file(file("out1") / "detail.csv");
    const std::string detail2 = read_file(file("out2") / "detail.csv");
    EXPECT_EQ(detail1, detail2);
    EXPECT_EQ(read_file(file("out1") / "aggregate.csv"),
              read_file(file("out2") / "aggregate.csv"));
    EXPECT_NE(detail1.find("config_id,method,rep,seed,type1,type2,accuracy"),
              std::string::npos);

    const CommandResult verify =
        cli("verify --detail " + (file("out1") / "detail.csv").string() + " --aggregate " +
            (file("out1") / "aggregate.csv").string());
    EXPECT_EQ(verify.exit_code, 0) << verify.output;

    // Tamper with the aggregate and the verifier must fail.
    std::string agg = read_file(file("out1") / "aggregate.csv");
    agg[agg.size() / 2] = agg[agg.size() / 2] == '1' ? '2' : '1';
    std::ofstream(file("out1") / "aggregate.csv", std::ios::binary) << agg;
    EXPECT_EQ(cli("verify --detail " + (file("out1") / "detail.csv").string() + " --aggregate " +
                  (file("out1") / "aggregate.csv").string())
                  .exit_code,
              1);
}

TEST_F(CliTest, GenIsDeterministicAndSelfDescribing) {
    write_config("cfg.json", kTinyConfig);
    const std::string cfg = file("cfg.json").string();
    ASSERT_EQ(cli("gen " + cfg + " -o " + file("a.tnpd").string()).exit_code, 0);
    ASSERT_EQ(cli("gen " + cfg + " -o " + file("b.tnpd").string()).exit_code, 0);
    EXPECT_EQ(read_file(file("a.tnpd")), read_file(file("b.tnpd")));

    const io::TensorDataset dataset = io::read_dataset(file("a.tnpd").string());
    EXPECT_EQ(dataset.samples.size(), 200u);  // n_train with eta = 1
    std::size_t n1 = 0;
    for (const auto& s : dataset.samples) n1 += s.label;
    EXPECT_EQ(n1, 100u);

    const auto truth = nlohmann::json::parse(read_file(file("a.tnpd.truth.json")));
    EXPECT_NEAR(truth["snr"].get<double>(), 7.0, 1e-9);
    EXPECT_EQ(truth["true_b"].size(), 64u);
    EXPECT_NEAR(truth["oracle_threshold"].get<double>(),
                7.0 * std_normal_quantile(0.95), 1e-9);
}

TEST_F(CliTest, GenFitPredictClosesTheLoop) {
    write_config("cfg.json", kTinyConfig);
    const std::string cfg = file("cfg.json").string();
    ASSERT_EQ(cli("gen " + cfg + " -o " + file("train.tnpd").string()).exit_code, 0);

    ASSERT_EQ(cli("fit --train " + file("train.tnpd").string() +
                  " --method t-lda-np --ranks 2 2 1 --alpha 0.05 --delta 0.1 --seed 3 -o " +
                  file("model.tnpm").string())
                  .exit_code,
              0);

    // Fresh class-0 data: the model's class-0 marginal is standard normal.
    io::TensorDataset fresh;
    fresh.shape = Shape{4, 4, 4};
    RandomSource rng(606);
    for (int i = 0; i < 20000; ++i) {
        DenseTensor x(fresh.shape);
        for (std::size_t t = 0; t < x.size(); ++t) x[t] = rng.standard_normal();
        fresh.samples.push_back({std::move(x), 0});
    }
    io::write_dataset(file("fresh0.tnpd").string(), fresh);

    ASSERT_EQ(cli("predict --model " + file("model.tnpm").string() + " --data " +
                  file("fresh0.tnpd").string() + " -o " + file("pred.csv").string())
                  .exit_code,
              0);

    const std::string csv = read_file(file("pred.csv"));
    std::istringstream lines(csv);
    std::string line;
    std::getline(lines, line);
    EXPECT_EQ(line, "index,score,label");
    std::size_t fired = 0, total = 0;
    while (std::getline(lines, line)) {
        ++total;
        fired += line.back() == '1';
    }
    ASSERT_EQ(total, 20000u);
    const double type1 = static_cast<double>(fired) / static_cast<double>(total);
    // Umbrella-calibrated rule: the realized type I error stays at or below
    // alpha up to Monte-Carlo noise.
    EXPECT_LE(type1, 0.05 + 3.0 * std::sqrt(0.05 * 0.95 / 20000.0));

    // In-memory predictions agree with the CLI output exactly.
    const io::StoredModel model = io::read_model(file("model.tnpm").string());
    std::istringstream again(csv);
    std::getline(again, line);
    std::size_t index = 0;
    while (std::getline(again, line)) {
        const int label = line.back() - '0';
        EXPECT_EQ(label, model.classifier.predict(fresh.samples[index].tensor));
        ++index;
    }
}

TEST_F(CliTest, FitRejectsSingleClassAndBadRanks) {
    io::TensorDataset single;
    single.shape = Shape{3, 3};
    RandomSource rng(607);
    for (int i = 0; i < 10; ++i) {
        DenseTensor x(single.shape);
        for (std::size_t t = 0; t < x.size(); ++t) x[t] = rng.standard_normal();
        single.samples.push_back({std::move(x), 0});
    }
    io::write_dataset(file("single.tnpd").string(), single);
    const CommandResult r = cli("fit --train " + file("single.tnpd").string() +
                                " --method t-lda --ranks 2 2 -o " + file("m.tnpm").string());
    EXPECT_EQ(r.exit_code, 2);
    EXPECT_NE(r.output.find("class"), std::string::npos);

    write_config("cfg.json", kTinyConfig);
    ASSERT_EQ(cli("gen " + file("cfg.json").string() + " -o " + file("train.tnpd").string())
                  .exit_code,
              0);
    const CommandResult bad_ranks =
        cli("fit --train " + file("train.tnpd").string() + " --method t-lda --ranks 9 2 1 -o " +
            file("m.tnpm").string());
    EXPECT_EQ(bad_ranks.exit_code, 2);
    EXPECT_NE(bad_ranks.output.find("mode 0"), std::string::npos);
}

TEST_F(CliTest, FitReportsCalibrationShortfallWithExitThree) {
    write_config("small.json",
                 R"({"shape": [4, 4, 4], "ranks": [2, 2, 1], "n_train": 200, "n_test": 200,
                     "reps": 1, "seed": 5, "methods": ["t-lda"]})");
    ASSERT_EQ(cli("gen " + file("small.json").string() + " -o " + file("small.tnpd").string())
                  .exit_code,
              0);
    // 100 class-0 samples -> 50 calibration scores; alpha 0.01 needs 230.
    const CommandResult r =
        cli("fit --train " + file("small.tnpd").string() +
            " --method t-lda-np --ranks 2 2 1 --alpha 0.01 --delta 0.1 -o " +
            file("m.tnpm").string());
    EXPECT_EQ(r.exit_code, 3);
    EXPECT_NE(r.output.find("230"), std::string::npos);
}

TEST_F(CliTest, PredictHandlesEmptyAndMismatchedData) {
    write_config("cfg.json", kTinyConfig);
    ASSERT_EQ(cli("gen " + file("cfg.json").string() + " -o " + file("train.tnpd").string())
                  .exit_code,
              0);
    ASSERT_EQ(cli("fit --train " + file("train.tnpd").string() +
                  " --method t-lda --ranks 2 2 1 -o " + file("model.tnpm").string())
                  .exit_code,
              0);

    io::TensorDataset empty;
    empty.shape = Shape{4, 4, 4};
    io::write_dataset(file("empty.tnpd").string(), empty);
    ASSERT_EQ(cli("predict --model " + file("model.tnpm").string() + " --data " +
                  file("empty.tnpd").string() + " -o " + file("pred.csv").string())
                  .exit_code,
              0);
    EXPECT_EQ(read_file(file("pred.csv")), "index,score,label\n");

    io::TensorDataset wrong;
    wrong.shape = Shape{2, 2};
    io::write_dataset(file("wrong.tnpd").string(), wrong);
    const CommandResult mismatch =
        cli("predict --model " + file("model.tnpm").string() + " --data " +
            file("wrong.tnpd").string() + " -o " + file("pred.csv").string());
    EXPECT_EQ(mismatch.exit_code, 2);
    EXPECT_NE(mismatch.output.find("shape mismatch"), std::string::npos);

    fs::resize_file(file("train.tnpd"), fs::file_size(file("train.tnpd")) - 3);
    const CommandResult truncated =
        cli("predict --model " + file("model.tnpm").string() + " --data " +
            file("train.tnpd").string() + " -o " + file("pred.csv").string());
    EXPECT_EQ(truncated.exit_code, 2);
    EXPECT_NE(truncated.output.find("length mismatch"), std::string::npos);
}

}  // namespace
}  // namespace tnp
