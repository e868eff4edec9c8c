#include "tnp/classifiers.hpp"

#include "tnp/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <stdexcept>
#include <string>
#include <utility>

namespace tnp {

namespace {

double sigmoid(double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

Shape batch_shape(const Shape& sample_shape, std::size_t batch) {
    std::vector<std::size_t> dims = sample_shape.dims();
    dims.push_back(batch);
    return Shape(dims);
}

DenseTensor build_batch(const std::vector<const DenseTensor*>& batch, const Shape& sample_shape) {
    DenseTensor out{batch_shape(sample_shape, batch.size())};
    const std::size_t block = sample_shape.total();
    for (std::size_t b = 0; b < batch.size(); ++b) {
        if (batch[b]->shape() != sample_shape) {
            throw std::invalid_argument("network input shape mismatch");
        }
        std::memcpy(out.data() + b * block, batch[b]->data(), block * sizeof(double));
    }
    return out;
}

struct BatchForward {
    DenseTensor input;  // (d_1..d_M, B)
    DenseTensor core;   // (R_1..R_M, B)
    Matrix core_mat;    // prod(R) x B
    Matrix z;           // H x B, pre-activation
    Matrix a;           // H x B, after ReLU
    std::vector<double> prob;
};

BatchForward forward_pass(const TclNetwork& net, const std::vector<const DenseTensor*>& batch) {
    BatchForward f;
    f.input = build_batch(batch, net.input_shape());
    const std::size_t modes = net.input_shape().order();
    const std::size_t n = batch.size();

    f.core = f.input;
    for (std::size_t m = 0; m < modes; ++m) {
        f.core = mode_product(f.core, net.contraction[m], m);
    }
    const std::size_t k = f.core.size() / n;  // per-sample cores are contiguous blocks
    f.core_mat = Matrix(k, n, f.core.vectorize());

    f.z = multiply(net.hidden_w, f.core_mat);
    const std::size_t h = net.hidden_b.size();
    f.a = Matrix(h, n);
    for (std::size_t j = 0; j < n; ++j) {
        double* zj = f.z.col(j);
        double* aj = f.a.col(j);
        for (std::size_t i = 0; i < h; ++i) {
            zj[i] += net.hidden_b[i];
            aj[i] = zj[i] > 0.0 ? zj[i] : 0.0;
        }
    }
    f.prob.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double* aj = f.a.col(j);
        double o = net.out_b;
        for (std::size_t i = 0; i < h; ++i) o += net.out_w[i] * aj[i];
        f.prob[j] = sigmoid(o);
    }
    return f;
}

TnnGradients backward_pass(const TclNetwork& net, const BatchForward& f,
                           const std::vector<double>& labels) {
    const std::size_t n = labels.size();
    const std::size_t h = net.hidden_b.size();
    const std::size_t modes = net.input_shape().order();
    const double inv_n = 1.0 / static_cast<double>(n);

    TnnGradients g;
    g.contraction.resize(modes);
    g.hidden_w = Matrix(net.hidden_w.rows(), net.hidden_w.cols());
    g.hidden_b.assign(h, 0.0);
    g.out_w.assign(h, 0.0);

    std::vector<double> dout(n);
    for (std::size_t j = 0; j < n; ++j) {
        dout[j] = (f.prob[j] - labels[j]) * inv_n;
        g.out_b += dout[j];
    }

    Matrix dz(h, n);
    for (std::size_t j = 0; j < n; ++j) {
        const double* aj = f.a.col(j);
        const double* zj = f.z.col(j);
        double* dzj = dz.col(j);
        for (std::size_t i = 0; i < h; ++i) {
            g.out_w[i] += dout[j] * aj[i];
            dzj[i] = zj[i] > 0.0 ? dout[j] * net.out_w[i] : 0.0;
            g.hidden_b[i] += dzj[i];
        }
    }

    g.hidden_w = multiply(dz, transpose(f.core_mat));
    Matrix dcore_mat = multiply(transpose(net.hidden_w), dz);
    DenseTensor dcore(f.core.shape(),
                      std::vector<double>(dcore_mat.data(),
                                          dcore_mat.data() + dcore_mat.rows() * dcore_mat.cols()));

    // d/dV_m: contract the input with every other mode's V, then pair the
    // mode-m unfoldings of the core gradient and that partial contraction.
    for (std::size_t m = 0; m < modes; ++m) {
        std::vector<const Matrix*> maps(modes + 1, nullptr);
        for (std::size_t j = 0; j < modes; ++j) {
            if (j != m) maps[j] = &net.contraction[j];
        }
        const DenseTensor partial = multi_mode_product(f.input, maps);
        g.contraction[m] = multiply(unfold(dcore, m), transpose(unfold(partial, m)));
    }
    return g;
}

std::vector<const DenseTensor*> pointers_to(const std::vector<LabeledSample>& data) {
    std::vector<const DenseTensor*> out;
    out.reserve(data.size());
    for (const auto& s : data) out.push_back(&s.tensor);
    return out;
}

template <typename Net, typename Grad, typename F>
void zip_parameters(Net& net, Grad& grads, F&& f) {
    for (std::size_t m = 0; m < net.contraction.size(); ++m) {
        auto* p = net.contraction[m].data();
        auto* q = grads.contraction[m].data();
        const std::size_t len = net.contraction[m].rows() * net.contraction[m].cols();
        for (std::size_t i = 0; i < len; ++i) f(p[i], q[i]);
    }
    {
        auto* p = net.hidden_w.data();
        auto* q = grads.hidden_w.data();
        const std::size_t len = net.hidden_w.rows() * net.hidden_w.cols();
        for (std::size_t i = 0; i < len; ++i) f(p[i], q[i]);
    }
    for (std::size_t i = 0; i < net.hidden_b.size(); ++i) f(net.hidden_b[i], grads.hidden_b[i]);
    for (std::size_t i = 0; i < net.out_w.size(); ++i) f(net.out_w[i], grads.out_w[i]);
    f(net.out_b, grads.out_b);
}

struct AdamState {
    std::vector<double> m;
    std::vector<double> v;
    std::size_t step = 0;
};

void adam_update(TclNetwork& net, const TnnGradients& grads, AdamState& state,
                 const OptimizerSettings& opt) {
    ++state.step;
    const double bias1 = 1.0 - std::pow(opt.beta1, static_cast<double>(state.step));
    const double bias2 = 1.0 - std::pow(opt.beta2, static_cast<double>(state.step));
    std::size_t i = 0;
    zip_parameters(net, grads, [&](double& p, const double& g) {
        state.m[i] = opt.beta1 * state.m[i] + (1.0 - opt.beta1) * g;
        state.v[i] = opt.beta2 * state.v[i] + (1.0 - opt.beta2) * g * g;
        const double mhat = state.m[i] / bias1;
        const double vhat = state.v[i] / bias2;
        p -= opt.rate * mhat / (std::sqrt(vhat) + opt.epsilon);
        ++i;
    });
}

void shuffle_indices(std::vector<std::size_t>& idx, RandomSource& rng) {
    for (std::size_t i = idx.size(); i > 1; --i) {
        const std::size_t j = static_cast<std::size_t>(rng.next_u64() % i);
        std::swap(idx[i - 1], idx[j]);
    }
}

double validation_accuracy(const TclNetwork& net, const std::vector<LabeledSample>& val) {
    const std::vector<double> prob = net.forward_batch(pointers_to(val));
    std::size_t correct = 0;
    for (std::size_t i = 0; i < val.size(); ++i) {
        const int pred = prob[i] > 0.5 ? 1 : 0;
        if (pred == val[i].label) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(val.size());
}

std::vector<LabeledSample> label_union(const std::vector<DenseTensor>& class0,
                                       const std::vector<DenseTensor>& class1) {
    if (class0.empty()) throw EmptyClass("no class-0 training samples");
    if (class1.empty()) throw EmptyClass("no class-1 training samples");
    std::vector<LabeledSample> out;
    out.reserve(class0.size() + class1.size());
    for (const auto& x : class0) out.push_back(LabeledSample{x, 0});
    for (const auto& x : class1) out.push_back(LabeledSample{x, 1});
    return out;
}

double midpoint_threshold(const DenseTensor& mean0, const DenseTensor& mean1,
                          const DenseTensor& weights, std::size_t n0, std::size_t n1) {
    const DenseTensor mid = scale(add(mean0, mean1), 0.5);
    return inner(mid, weights) -
           std::log(static_cast<double>(n1) / static_cast<double>(n0));
}

}  // namespace

TnnArchitecture TnnArchitecture::defaults_for(const Shape& shape) {
    TnnArchitecture arch;
    arch.tcl_ranks.reserve(shape.order());
    for (std::size_t m = 0; m < shape.order(); ++m) {
        arch.tcl_ranks.push_back(std::min<std::size_t>(8, shape.dim(m)));
    }
    return arch;
}

TclNetwork::TclNetwork(Shape input_shape, const TnnArchitecture& arch)
    : input_shape_(std::move(input_shape)) {
    if (arch.tcl_ranks.size() != input_shape_.order()) {
        throw std::invalid_argument("TclNetwork: one contraction rank per mode required");
    }
    if (arch.hidden < 1) throw std::invalid_argument("TclNetwork: hidden width must be >= 1");
    std::size_t core_size = 1;
    for (std::size_t m = 0; m < arch.tcl_ranks.size(); ++m) {
        if (arch.tcl_ranks[m] < 1) {
            throw std::invalid_argument("TclNetwork: contraction ranks must be >= 1");
        }
        contraction.emplace_back(arch.tcl_ranks[m], input_shape_.dim(m));
        core_size *= arch.tcl_ranks[m];
    }
    hidden_w = Matrix(arch.hidden, core_size);
    hidden_b.assign(arch.hidden, 0.0);
    out_w.assign(arch.hidden, 0.0);
    out_b = 0.0;
}

TclNetwork TclNetwork::glorot_init(const Shape& input_shape, const TnnArchitecture& arch,
                                   RandomSource& rng) {
    TclNetwork net(input_shape, arch);
    auto fill_uniform = [&rng](double* p, std::size_t len, double limit) {
        for (std::size_t i = 0; i < len; ++i) p[i] = (2.0 * rng.uniform() - 1.0) * limit;
    };
    for (std::size_t m = 0; m < net.contraction.size(); ++m) {
        Matrix& v = net.contraction[m];
        const double limit = std::sqrt(6.0 / static_cast<double>(v.rows() + v.cols()));
        fill_uniform(v.data(), v.rows() * v.cols(), limit);
    }
    {
        const double limit =
            std::sqrt(6.0 / static_cast<double>(net.hidden_w.rows() + net.hidden_w.cols()));
        fill_uniform(net.hidden_w.data(), net.hidden_w.rows() * net.hidden_w.cols(), limit);
    }
    {
        const double limit = std::sqrt(6.0 / static_cast<double>(net.out_w.size() + 1));
        fill_uniform(net.out_w.data(), net.out_w.size(), limit);
    }
    return net;
}

double TclNetwork::forward(const DenseTensor& x) const {
    return forward_batch({&x}).front();
}

std::vector<double> TclNetwork::forward_batch(const std::vector<const DenseTensor*>& batch) const {
    if (batch.empty()) return {};
    return forward_pass(*this, batch).prob;
}

std::size_t TclNetwork::parameter_count() const {
    std::size_t count = 0;
    for (const Matrix& v : contraction) count += v.rows() * v.cols();
    count += hidden_w.rows() * hidden_w.cols();
    count += hidden_b.size() + out_w.size() + 1;
    return count;
}

TnnGradients tnn_gradient(const TclNetwork& net, const std::vector<LabeledSample>& batch) {
    if (batch.empty()) throw std::invalid_argument("tnn_gradient: empty batch");
    std::vector<const DenseTensor*> ptrs = pointers_to(batch);
    std::vector<double> labels(batch.size());
    for (std::size_t i = 0; i < batch.size(); ++i) labels[i] = static_cast<double>(batch[i].label);
    const BatchForward f = forward_pass(net, ptrs);
    return backward_pass(net, f, labels);
}

double tnn_loss(const TclNetwork& net, const std::vector<LabeledSample>& batch) {
    if (batch.empty()) throw std::invalid_argument("tnn_loss: empty batch");
    const std::vector<double> prob = net.forward_batch(pointers_to(batch));
    double loss = 0.0;
    for (std::size_t i = 0; i < batch.size(); ++i) {
        const double p = std::min(1.0 - 1e-15, std::max(1e-15, prob[i]));
        loss -= batch[i].label == 1 ? std::log(p) : std::log(1.0 - p);
    }
    return loss / static_cast<double>(batch.size());
}

double NpClassifier::score(const DenseTensor& x) const {
    if (const auto* linear = std::get_if<LinearScorer>(&scorer)) return linear->score(x);
    return std::get<TclNetwork>(scorer).forward(x);
}

std::vector<double> NpClassifier::score_batch(const std::vector<const DenseTensor*>& batch) const {
    if (const auto* net = std::get_if<TclNetwork>(&scorer)) return net->forward_batch(batch);
    const auto& linear = std::get<LinearScorer>(scorer);
    std::vector<double> out;
    out.reserve(batch.size());
    for (const DenseTensor* x : batch) out.push_back(linear.score(*x));
    return out;
}

int NpClassifier::predict(const DenseTensor& x) const {
    const double s = score(x);
    return (strict ? s > threshold : s >= threshold) ? 1 : 0;
}

int predict(const NpClassifier& classifier, const DenseTensor& x) {
    return classifier.predict(x);
}

NpClassifier fit_tlda(const std::vector<LabeledSample>& train,
                      const std::vector<std::size_t>& ranks, double epsilon,
                      std::size_t max_iter) {
    LdaEstimates est = estimate_lda(train, ranks, epsilon, max_iter);
    NpClassifier clf;
    clf.threshold = midpoint_threshold(est.mean0, est.mean1, est.b_hat, est.n0, est.n1);
    clf.scorer = LinearScorer{std::move(est.b_hat)};
    clf.strict = false;
    return clf;
}

NpClassifier fit_tlda_np(const std::vector<DenseTensor>& train0_fit,
                         const std::vector<DenseTensor>& train1,
                         const std::vector<DenseTensor>& calib0,
                         const std::vector<std::size_t>& ranks, double epsilon,
                         std::size_t max_iter, const NpLevels& levels) {
    const std::size_t required = min_calibration_size(levels);
    if (calib0.size() < required) throw CalibrationSetTooSmall(required, calib0.size());

    LdaEstimates est = estimate_lda(label_union(train0_fit, train1), ranks, epsilon, max_iter);
    std::vector<double> scores;
    scores.reserve(calib0.size());
    for (const auto& x : calib0) scores.push_back(inner(x, est.b_hat));
    const CalibrationResult cal = umbrella_threshold(std::move(scores), levels);

    NpClassifier clf;
    clf.scorer = LinearScorer{std::move(est.b_hat)};
    clf.threshold = cal.threshold;
    clf.strict = true;
    clf.levels = levels;
    clf.calibration = cal;
    return clf;
}

NpClassifier fit_vlda(const std::vector<LabeledSample>& train, double ridge_scale) {
    if (ridge_scale < 0.0) throw std::invalid_argument("fit_vlda: ridge_scale must be >= 0");
    const ClassMeans means = class_means(train);
    const Shape& shape = means.mean0.shape();
    const std::size_t d = shape.total();
    const std::size_t n = train.size();
    const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(n));

    Matrix centered(d, n);
    double trace_s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const DenseTensor& mean = train[i].label == 0 ? means.mean0 : means.mean1;
        double* col = centered.col(i);
        const double* x = train[i].tensor.data();
        const double* mu = mean.data();
        for (std::size_t t = 0; t < d; ++t) {
            col[t] = (x[t] - mu[t]) * inv_sqrt_n;
            trace_s += col[t] * col[t];
        }
    }
    const double lambda = ridge_scale * trace_s / static_cast<double>(d);

    std::vector<double> diff(d);
    for (std::size_t t = 0; t < d; ++t) diff[t] = means.mean1[t] - means.mean0[t];

    std::vector<double> w;
    if (lambda > 0.0 && d > n) {
        // (A A^T + lambda I)^{-1} v via the matrix inversion lemma: the Gram
        // matrix is n x n, much smaller than d x d here.
        Matrix gram = gram_right(centered);
        for (std::size_t i = 0; i < n; ++i) gram(i, i) += lambda;
        const Matrix l = cholesky(SpdMatrix(std::move(gram)));

        std::vector<double> proj(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            const double* col = centered.col(i);
            double s = 0.0;
            for (std::size_t t = 0; t < d; ++t) s += col[t] * diff[t];
            proj[i] = s;
        }
        solve_lower(l, proj);
        solve_lower_transposed(l, proj);

        w = diff;
        for (std::size_t i = 0; i < n; ++i) {
            axpy(w.data(), -proj[i], centered.col(i), d);
        }
        for (std::size_t t = 0; t < d; ++t) w[t] /= lambda;
    } else {
        Matrix pooled = gram_left(centered);
        for (std::size_t t = 0; t < d; ++t) pooled(t, t) += lambda;
        const Matrix l = cholesky(SpdMatrix(std::move(pooled)));
        w = diff;
        solve_lower(l, w);
        solve_lower_transposed(l, w);
    }

    DenseTensor weights(shape, std::move(w));
    NpClassifier clf;
    clf.threshold = midpoint_threshold(means.mean0, means.mean1, weights, means.n0, means.n1);
    clf.scorer = LinearScorer{std::move(weights)};
    clf.strict = false;
    return clf;
}

SplitData stratified_split(const std::vector<LabeledSample>& data, double second_fraction,
                           RandomSource& rng) {
    if (!(second_fraction >= 0.0 && second_fraction < 1.0)) {
        throw std::invalid_argument("stratified_split: fraction must lie in [0, 1)");
    }
    std::vector<std::size_t> idx0, idx1;
    for (std::size_t i = 0; i < data.size(); ++i) {
        (data[i].label == 0 ? idx0 : idx1).push_back(i);
    }
    SplitData split;
    for (auto* idx : {&idx0, &idx1}) {
        shuffle_indices(*idx, rng);
        std::size_t take = static_cast<std::size_t>(second_fraction *
                                                    static_cast<double>(idx->size()));
        if (take == 0 && second_fraction > 0.0 && idx->size() >= 2) take = 1;
        for (std::size_t i = 0; i < idx->size(); ++i) {
            (i < take ? split.second : split.first).push_back(data[(*idx)[i]]);
        }
    }
    return split;
}

NpClassifier fit_tnn(const std::vector<LabeledSample>& train,
                     const std::vector<LabeledSample>& val, const TnnArchitecture& arch,
                     std::size_t epochs, const OptimizerSettings& opt, RandomSource& rng) {
    if (train.empty()) throw std::invalid_argument("fit_tnn: empty training set");
    if (val.empty()) throw std::invalid_argument("fit_tnn: empty validation set");
    if (epochs < 1) throw std::invalid_argument("fit_tnn: epochs must be >= 1");
    if (opt.batch_size < 1) throw std::invalid_argument("fit_tnn: batch size must be >= 1");

    const Shape& shape = train.front().tensor.shape();
    TclNetwork net = TclNetwork::glorot_init(shape, arch, rng);
    AdamState adam;
    adam.m.assign(net.parameter_count(), 0.0);
    adam.v.assign(net.parameter_count(), 0.0);

    std::vector<std::size_t> order(train.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

    TclNetwork best = net;
    double best_accuracy = -1.0;
    std::vector<LabeledSample> batch;
    for (std::size_t epoch = 0; epoch < epochs; ++epoch) {
        shuffle_indices(order, rng);
        for (std::size_t start = 0; start < order.size(); start += opt.batch_size) {
            const std::size_t stop = std::min(order.size(), start + opt.batch_size);
            batch.clear();
            for (std::size_t i = start; i < stop; ++i) batch.push_back(train[order[i]]);
            const TnnGradients grads = tnn_gradient(net, batch);
            adam_update(net, grads, adam, opt);
        }
        const double accuracy = validation_accuracy(net, val);
        if (accuracy > best_accuracy) {
            best_accuracy = accuracy;
            best = net;
        }
    }

    NpClassifier clf;
    clf.scorer = std::move(best);
    clf.threshold = 0.5;
    clf.strict = true;
    return clf;
}

NpClassifier fit_tnn(const std::vector<LabeledSample>& train, const TnnArchitecture& arch,
                     std::size_t epochs, const OptimizerSettings& opt, RandomSource& rng) {
    const SplitData split = stratified_split(train, 0.2, rng);
    return fit_tnn(split.first, split.second, arch, epochs, opt, rng);
}

NpClassifier fit_tnn_np(const std::vector<DenseTensor>& train0_fit,
                        const std::vector<DenseTensor>& train1,
                        const std::vector<DenseTensor>& calib0,
                        const std::vector<LabeledSample>& val, const TnnArchitecture& arch,
                        std::size_t epochs, const OptimizerSettings& opt, const NpLevels& levels,
                        RandomSource& rng) {
    const std::size_t required = min_calibration_size(levels);
    if (calib0.size() < required) throw CalibrationSetTooSmall(required, calib0.size());

    NpClassifier clf = fit_tnn(label_union(train0_fit, train1), val, arch, epochs, opt, rng);
    const TclNetwork& net = std::get<TclNetwork>(clf.scorer);
    std::vector<const DenseTensor*> calib_ptrs;
    calib_ptrs.reserve(calib0.size());
    for (const auto& x : calib0) calib_ptrs.push_back(&x);
    const CalibrationResult cal = umbrella_threshold(net.forward_batch(calib_ptrs), levels);

    clf.threshold = cal.threshold;
    clf.levels = levels;
    clf.calibration = cal;
    return clf;
}

NpClassifier fit_tnn_np(const std::vector<DenseTensor>& train0_fit,
                        const std::vector<DenseTensor>& train1,
                        const std::vector<DenseTensor>& calib0, const TnnArchitecture& arch,
                        std::size_t epochs, const OptimizerSettings& opt, const NpLevels& levels,
                        RandomSource& rng) {
    const SplitData split = stratified_split(label_union(train0_fit, train1), 0.2, rng);
    const std::size_t required = min_calibration_size(levels);
    if (calib0.size() < required) throw CalibrationSetTooSmall(required, calib0.size());

    NpClassifier clf = fit_tnn(split.first, split.second, arch, epochs, opt, rng);
    const TclNetwork& net = std::get<TclNetwork>(clf.scorer);
    std::vector<const DenseTensor*> calib_ptrs;
    calib_ptrs.reserve(calib0.size());
    for (const auto& x : calib0) calib_ptrs.push_back(&x);
    const CalibrationResult cal = umbrella_threshold(net.forward_batch(calib_ptrs), levels);

    clf.threshold = cal.threshold;
    clf.levels = levels;
    clf.calibration = cal;
    return clf;
}

}  // namespace tnp
