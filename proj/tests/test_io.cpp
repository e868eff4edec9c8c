#include "tnp/dataset_io.hpp"
#include "tnp/results_io.hpp"
#include "tnp/run_config.hpp"

#include "tnp/errors.hpp"

#include "test_util.hpp"

#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace tnp {
namespace {

namespace fs = std::filesystem;

class TempDir {
public:
    TempDir() {
        path_ = fs::temp_directory_path() / ("tnp_test_" + std::to_string(::getpid()) + "_" +
                                             std::to_string(counter_++));
        fs::create_directories(path_);
    }
    ~TempDir() { fs::remove_all(path_); }
    std::string file(const std::string& name) const { return (path_ / name).string(); }

private:
    static inline int counter_ = 0;
    fs::path path_;
};

io::TensorDataset sample_dataset(std::size_t count, RandomSource& rng) {
    io::TensorDataset dataset;
    dataset.shape = Shape{3, 2, 2};
    for (std::size_t i = 0; i < count; ++i) {
        dataset.samples.push_back(
            {testing::random_tensor(dataset.shape, rng), static_cast<int>(i % 2)});
    }
    return dataset;
}

TEST(DatasetIo, RoundTripIsBitwise) {
    TempDir dir;
    RandomSource rng(601);
    const io::TensorDataset dataset = sample_dataset(7, rng);
    const std::string path = dir.file("data.tnpd");
    io::write_dataset(path, dataset);
    const io::TensorDataset back = io::read_dataset(path);

    EXPECT_EQ(back.shape, dataset.shape);
    ASSERT_EQ(back.samples.size(), dataset.samples.size());
    for (std::size_t i = 0; i < dataset.samples.size(); ++i) {
        EXPECT_EQ(back.samples[i].label, dataset.samples[i].label);
        for (std::size_t t = 0; t < dataset.shape.total(); ++t) {
            EXPECT_EQ(back.samples[i].tensor[t], dataset.samples[i].tensor[t]);
        }
    }
}

TEST(DatasetIo, EmptyDatasetRoundTrips) {
    TempDir dir;
    io::TensorDataset dataset;
    dataset.shape = Shape{4, 4};
    const std::string path = dir.file("empty.tnpd");
    io::write_dataset(path, dataset);
    const io::TensorDataset back = io::read_dataset(path);
    EXPECT_EQ(back.samples.size(), 0u);
    EXPECT_EQ(back.shape, Shape({4, 4}));
}

TEST(DatasetIo, FileLengthIsExactlyDetermined) {
    TempDir dir;
    RandomSource rng(602);
    const io::TensorDataset dataset = sample_dataset(3, rng);
    const std::string path = dir.file("data.tnpd");
    io::write_dataset(path, dataset);
    const std::size_t entries = dataset.shape.total();
    const std::size_t expected = 4 + 4 + 4 + 4 * 3 + 8 + 3 + 8 * 3 * entries;
    EXPECT_EQ(fs::file_size(path), expected);
}

TEST(DatasetIo, TruncatedFileIsRejectedWithLengthMessage) {
    TempDir dir;
    RandomSource rng(603);
    const io::TensorDataset dataset = sample_dataset(3, rng);
    const std::string path = dir.file("data.tnpd");
    io::write_dataset(path, dataset);
    fs::resize_file(path, fs::file_size(path) - 5);
    try {
        io::read_dataset(path);
        FAIL() << "expected FormatError";
    } catch (const io::FormatError& e) {
        EXPECT_NE(std::string(e.what()).find("length mismatch"), std::string::npos);
    }
}

TEST(DatasetIo, BadMagicAndBadLabelRejected) {
    TempDir dir;
    const std::string path = dir.file("junk.bin");
    std::ofstream(path, std::ios::binary) << "NOPE, not a dataset at all";
    EXPECT_THROW(io::read_dataset(path), io::FormatError);
}

TEST(ModelIo, LinearModelRoundTripsWithExactPredictions) {
    TempDir dir;
    RandomSource rng(604);
    const Shape shape{3, 2, 2};
    NpClassifier clf;
    clf.scorer = LinearScorer{testing::random_tensor(shape, rng)};
    clf.threshold = 0.37;
    clf.strict = true;
    clf.levels = NpLevels(0.05, 0.1);

    const std::string path = dir.file("model.tnpm");
    io::write_model(path, io::StoredModel{"t-lda-np", shape, clf});
    const io::StoredModel back = io::read_model(path);
    EXPECT_EQ(back.method, "t-lda-np");
    EXPECT_EQ(back.classifier.threshold, 0.37);
    ASSERT_TRUE(back.classifier.levels.has_value());
    EXPECT_EQ(back.classifier.levels->alpha, 0.05);

    for (int i = 0; i < 20; ++i) {
        const DenseTensor x = testing::random_tensor(shape, rng);
        EXPECT_EQ(back.classifier.score(x), clf.score(x));
        EXPECT_EQ(back.classifier.predict(x), clf.predict(x));
    }
}

TEST(ModelIo, NetworkModelRoundTripsBitwise) {
    TempDir dir;
    RandomSource rng(605);
    const Shape shape{3, 2};
    TnnArchitecture arch{{2, 2}, 4};
    NpClassifier clf;
    clf.scorer = TclNetwork::glorot_init(shape, arch, rng);
    clf.threshold = 0.5;
    clf.strict = true;

    const std::string path = dir.file("net.tnpm");
    io::write_model(path, io::StoredModel{"t-nn", shape, clf});
    const io::StoredModel back = io::read_model(path);
    for (int i = 0; i < 20; ++i) {
        const DenseTensor x = testing::random_tensor(shape, rng);
        EXPECT_EQ(back.classifier.score(x), clf.score(x));
    }
}

TEST(ResultsIo, FormatRealUsesSixSignificantDigits) {
    EXPECT_EQ(io::format_real(0.05), "0.05");
    EXPECT_EQ(io::format_real(1.0 / 3.0), "0.333333");
    EXPECT_EQ(io::format_real(123456.789), "123457");
    EXPECT_EQ(io::format_real(0.0), "0");
}

TEST(ResultsIo, DetailCsvParsesBackToItself) {
    std::vector<io::DetailRow> rows;
    rows.push_back({"cfg-a", "t-lda", 0, 12345, 0.1, 0.2, 0.85});
    rows.push_back({"cfg-a", "t-lda-np", 0, 12345, 0.03, 0.4, 0.785});
    rows.push_back({"cfg-a", "t-lda", 1, 99, 0.12, 0.18, 0.85});
    const std::string csv = io::detail_csv(rows);
    const auto parsed = io::parse_detail_csv(csv);
    ASSERT_EQ(parsed.size(), rows.size());
    EXPECT_EQ(parsed[1].method, "t-lda-np");
    EXPECT_EQ(parsed[1].type1, 0.03);
    EXPECT_EQ(parsed[2].rep, 1u);
    EXPECT_EQ(io::detail_csv(parsed), csv);
    EXPECT_THROW(io::parse_detail_csv("bogus\n"), std::invalid_argument);
}

TEST(ResultsIo, AggregateGroupsInOrderOfAppearance) {
    std::vector<io::DetailRow> rows;
    rows.push_back({"cfg", "t-lda", 0, 1, 0.10, 0.2, 0.85});
    rows.push_back({"cfg", "t-lda", 1, 2, 0.02, 0.4, 0.79});
    const std::string agg = io::aggregate_csv(rows, 0.05);
    EXPECT_NE(agg.find("cfg,t-lda,0.06,"), std::string::npos);
    EXPECT_NE(agg.find(",0.5\n"), std::string::npos);  // one of two reps violates
}

TEST(RunConfig, NamedExperimentPlans) {
    const auto plan = io::parse_simulation_config(
        R"({"experiment": "ex1", "scale": "desk", "seed": 7})", std::nullopt, std::nullopt);
    EXPECT_EQ(plan.configs.size(), 6u);
    EXPECT_EQ(plan.seed, 7u);
    EXPECT_EQ(plan.configs[0].reps, 50u);
    EXPECT_NE(plan.configs[0].base_seed, plan.configs[1].base_seed);

    const auto full = io::parse_simulation_config(
        R"({"experiment": "ex1", "scale": "desk"})", std::make_optional<std::string>("full"),
        std::make_optional<std::uint64_t>(9));
    EXPECT_EQ(full.configs[0].reps, 500u);
    EXPECT_EQ(full.seed, 9u);
}

TEST(RunConfig, ExplicitConfigWithDefaultsAndMethods) {
    const auto plan = io::parse_simulation_config(
        R"({"shape": [6, 6, 6], "ranks": [2, 2, 2], "n_train": 200,
            "methods": ["t-lda", "t-lda-np"], "reps": 3, "seed": 11,
            "nn": {"epochs": 5}})",
        std::nullopt, std::nullopt);
    ASSERT_EQ(plan.configs.size(), 1u);
    const auto& cfg = plan.configs[0];
    EXPECT_EQ(cfg.id, "custom");
    EXPECT_EQ(cfg.n_train_total, 200u);
    EXPECT_EQ(cfg.methods.size(), 2u);
    EXPECT_EQ(cfg.nn.epochs, 5u);
    EXPECT_EQ(cfg.levels.alpha, 0.05);
    EXPECT_EQ(cfg.n_test_total, 6000u);
}

TEST(RunConfig, UnknownKeysAndBadValuesAreNamed) {
    try {
        io::parse_simulation_config(R"({"shape": [4], "ranks": [2], "n_train": 100,
                                        "bogus_key": 1})",
                                    std::nullopt, std::nullopt);
        FAIL() << "expected invalid_argument";
    } catch (const std::invalid_argument& e) {
        EXPECT_NE(std::string(e.what()).find("bogus_key"), std::string::npos);
    }

    try {
        io::parse_simulation_config(R"({"shape": [4], "ranks": [0], "n_train": 100})",
                                    std::nullopt, std::nullopt);
        FAIL() << "expected invalid_argument";
    } catch (const std::invalid_argument& e) {
        EXPECT_NE(std::string(e.what()).find("ranks"), std::string::npos);
    }

    EXPECT_THROW(io::parse_simulation_config("not json at all", std::nullopt, std::nullopt),
                 std::invalid_argument);
    EXPECT_THROW(io::parse_simulation_config(R"({"experiment": "ex9"})", std::nullopt,
                                             std::nullopt),
                 std::invalid_argument);
    EXPECT_THROW(io::parse_simulation_config(
                     R"({"shape": [4], "ranks": [2], "n_train": 100, "distribution": "weird"})",
                     std::nullopt, std::nullopt),
                 std::invalid_argument);
}

TEST(RunConfig, StudentTDistributionParses) {
    const auto plan = io::parse_simulation_config(
        R"({"shape": [4, 4], "ranks": [2, 2], "n_train": 200, "distribution": "t4",
            "methods": ["t-lda"]})",
        std::nullopt, std::nullopt);
    EXPECT_EQ(plan.configs[0].distribution, Distribution::StudentT);
    EXPECT_EQ(plan.configs[0].t_dof, 4);
}

}  // namespace
}  // namespace tnp
