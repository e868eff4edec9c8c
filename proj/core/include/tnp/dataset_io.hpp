#pragma once

#include "tnp/classifiers.hpp"
#include "tnp/estimation.hpp"
#include "tnp/tensor.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace tnp::io {

/// A structurally invalid input file (bad magic, version, or length).
class FormatError : public std::runtime_error {
public:
    explicit FormatError(const std::string& what) : std::runtime_error(what) {}
};

/// Labeled tensor dataset bound to the "TNPD" binary layout:
/// magic, u32 version (=1), u32 order, per-mode u32 dims, u64 sample count,
/// one u8 label per sample, then each sample's coefficients as little-endian
/// f64 in vec order. The file length is fully determined by the header.
struct TensorDataset {
    Shape shape;
    std::vector<LabeledSample> samples;
};

void write_dataset(const std::string& path, const TensorDataset& dataset);
TensorDataset read_dataset(const std::string& path);

/// Serialized classifier ("TNPM"): method tag, shape, decision rule
/// (threshold, strictness, optional NP levels), then the scorer payload --
/// the weight tensor for linear rules, the full parameter set for networks.
struct StoredModel {
    std::string method;  // t-lda, t-lda-np, v-lda, t-nn, t-nn-np
    Shape shape;
    NpClassifier classifier;
};

void write_model(const std::string& path, const StoredModel& model);
StoredModel read_model(const std::string& path);

}  // namespace tnp::io
