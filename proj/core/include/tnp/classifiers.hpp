#pragma once

#include "tnp/calibration.hpp"
#include "tnp/estimation.hpp"
#include "tnp/rng.hpp"
#include "tnp/tensor.hpp"

#include <cstddef>
#include <optional>
#include <variant>
#include <vector>

namespace tnp {

/// Linear score s(X) = <X, weights>.
struct LinearScorer {
    DenseTensor weights;

    double score(const DenseTensor& x) const { return inner(x, weights); }
};

struct TnnArchitecture {
    std::vector<std::size_t> tcl_ranks;  // one per mode
    std::size_t hidden = 64;

    /// Default contraction ranks min(8, d_m) with hidden width 64.
    static TnnArchitecture defaults_for(const Shape& shape);
};

/// One tensor-contraction layer (learnable per-mode projections) feeding a
/// single ReLU hidden layer and a sigmoid output.
class TclNetwork {
public:
    TclNetwork() = default;
    TclNetwork(Shape input_shape, const TnnArchitecture& arch);  // zero-initialized

    static TclNetwork glorot_init(const Shape& input_shape, const TnnArchitecture& arch,
                                  RandomSource& rng);

    /// Predicted class-1 probability.
    double forward(const DenseTensor& x) const;

    /// Probabilities for a whole batch.
    std::vector<double> forward_batch(const std::vector<const DenseTensor*>& batch) const;

    std::size_t parameter_count() const;
    const Shape& input_shape() const { return input_shape_; }

    // Parameters are public-by-accessor so the training loop and the
    // gradient check can walk them in one fixed order.
    std::vector<Matrix> contraction;  // V_m: R_m x d_m
    Matrix hidden_w;                  // H x prod(R_m)
    std::vector<double> hidden_b;     // H
    std::vector<double> out_w;        // H
    double out_b = 0.0;

private:
    Shape input_shape_;
};

/// Gradient of the mean binary cross-entropy over a batch, one slot per
/// parameter group of TclNetwork.
struct TnnGradients {
    std::vector<Matrix> contraction;
    Matrix hidden_w;
    std::vector<double> hidden_b;
    std::vector<double> out_w;
    double out_b = 0.0;
};

TnnGradients tnn_gradient(const TclNetwork& net, const std::vector<LabeledSample>& batch);

/// Mean binary cross-entropy of the network on a batch.
double tnn_loss(const TclNetwork& net, const std::vector<LabeledSample>& batch);

struct OptimizerSettings {
    double rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    std::size_t batch_size = 32;
};

/// A fitted scoring rule plus its decision threshold. NP-calibrated variants
/// carry the levels and the calibration record; the plain discriminant rules
/// decide with >= at the boundary, everything else with strict >.
struct NpClassifier {
    std::variant<LinearScorer, TclNetwork> scorer;
    double threshold = 0.0;
    bool strict = true;
    std::optional<NpLevels> levels;
    std::optional<CalibrationResult> calibration;

    double score(const DenseTensor& x) const;
    int predict(const DenseTensor& x) const;
    std::vector<double> score_batch(const std::vector<const DenseTensor*>& batch) const;
};

int predict(const NpClassifier& classifier, const DenseTensor& x);

/// Tensor LDA on the full training set; threshold at the Bayes midpoint with
/// the log-prior correction.
NpClassifier fit_tlda(const std::vector<LabeledSample>& train,
                      const std::vector<std::size_t>& ranks, double epsilon,
                      std::size_t max_iter);

/// NP-calibrated tensor LDA: the scorer is fitted on train0_fit + train1
/// only, the threshold comes from the order-statistic rule on the held-out
/// class-0 calibration scores.
NpClassifier fit_tlda_np(const std::vector<DenseTensor>& train0_fit,
                         const std::vector<DenseTensor>& train1,
                         const std::vector<DenseTensor>& calib0,
                         const std::vector<std::size_t>& ranks, double epsilon,
                         std::size_t max_iter, const NpLevels& levels);

/// Fisher LDA on vectorized samples with ridge loading
/// lambda = ridge_scale * trace(S) / d.
NpClassifier fit_vlda(const std::vector<LabeledSample>& train, double ridge_scale);

/// Stratified sample split; the second part receives floor(fraction * n_y)
/// of each class (at least one when the class is present).
struct SplitData {
    std::vector<LabeledSample> first;
    std::vector<LabeledSample> second;
};
SplitData stratified_split(const std::vector<LabeledSample>& data, double second_fraction,
                           RandomSource& rng);

/// Minibatch Adam training; returns the epoch snapshot with the best
/// validation accuracy at threshold 0.5 (earliest epoch on ties).
NpClassifier fit_tnn(const std::vector<LabeledSample>& train,
                     const std::vector<LabeledSample>& val, const TnnArchitecture& arch,
                     std::size_t epochs, const OptimizerSettings& opt, RandomSource& rng);

/// Same, carving a stratified 20% validation split out of `train`.
NpClassifier fit_tnn(const std::vector<LabeledSample>& train, const TnnArchitecture& arch,
                     std::size_t epochs, const OptimizerSettings& opt, RandomSource& rng);

NpClassifier fit_tnn_np(const std::vector<DenseTensor>& train0_fit,
                        const std::vector<DenseTensor>& train1,
                        const std::vector<DenseTensor>& calib0,
                        const std::vector<LabeledSample>& val, const TnnArchitecture& arch,
                        std::size_t epochs, const OptimizerSettings& opt, const NpLevels& levels,
                        RandomSource& rng);

/// Same, with the validation split carved out of the training portion.
NpClassifier fit_tnn_np(const std::vector<DenseTensor>& train0_fit,
                        const std::vector<DenseTensor>& train1,
                        const std::vector<DenseTensor>& calib0, const TnnArchitecture& arch,
                        std::size_t epochs, const OptimizerSettings& opt, const NpLevels& levels,
                        RandomSource& rng);

}  // namespace tnp
