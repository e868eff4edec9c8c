#include "tnp/dataset_io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <limits>

namespace tnp::io {

namespace {

constexpr char kDatasetMagic[4] = {'T', 'N', 'P', 'D'};
constexpr char kModelMagic[4] = {'T', 'N', 'P', 'M'};
constexpr std::uint32_t kFormatVersion = 1;

class Writer {
public:
    explicit Writer(const std::string& path) : out_(path, std::ios::binary) {
        if (!out_) throw std::runtime_error("cannot open '" + path + "' for writing");
    }

    void magic(const char (&m)[4]) { out_.write(m, 4); }
    void u8(std::uint8_t v) { out_.put(static_cast<char>(v)); }
    void u32(std::uint32_t v) {
        char b[4];
        for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
        out_.write(b, 4);
    }
    void u64(std::uint64_t v) {
        char b[8];
        for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
        out_.write(b, 8);
    }
    void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
    void f64_block(const double* p, std::size_t n) {
        for (std::size_t i = 0; i < n; ++i) f64(p[i]);
    }
    void finish(const std::string& path) {
        out_.flush();
        if (!out_) throw std::runtime_error("error writing '" + path + "'");
    }

private:
    std::ofstream out_;
};

class Reader {
public:
    Reader(const std::string& path, const char (&expected_magic)[4]) {
        std::ifstream in(path, std::ios::binary | std::ios::ate);
        if (!in) throw FormatError("cannot open '" + path + "'");
        const std::streamoff size = in.tellg();
        in.seekg(0);
        buf_.resize(static_cast<std::size_t>(size));
        in.read(buf_.data(), size);
        if (!in) throw FormatError("error reading '" + path + "'");
        if (buf_.size() < 8) throw FormatError("file too short: '" + path + "'");
        if (std::memcmp(buf_.data(), expected_magic, 4) != 0) {
            throw FormatError("bad magic bytes in '" + path + "'");
        }
        pos_ = 4;
        const std::uint32_t version = u32();
        if (version != kFormatVersion) {
            throw FormatError("unsupported format version " + std::to_string(version));
        }
    }

    std::uint8_t u8() {
        need(1);
        return static_cast<std::uint8_t>(buf_[pos_++]);
    }
    std::uint32_t u32() {
        need(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) {
            v |= static_cast<std::uint32_t>(static_cast<unsigned char>(buf_[pos_ + i])) << (8 * i);
        }
        pos_ += 4;
        return v;
    }
    std::uint64_t u64() {
        need(8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) {
            v |= static_cast<std::uint64_t>(static_cast<unsigned char>(buf_[pos_ + i])) << (8 * i);
        }
        pos_ += 8;
        return v;
    }
    double f64() { return std::bit_cast<double>(u64()); }
    void f64_block(double* p, std::size_t n) {
        for (std::size_t i = 0; i < n; ++i) p[i] = f64();
    }

    std::size_t size() const { return buf_.size(); }
    std::size_t remaining() const { return buf_.size() - pos_; }
    void expect_exact_length(std::size_t expected_total) const {
        if (buf_.size() != expected_total) {
            throw FormatError("file length mismatch: header implies " +
                              std::to_string(expected_total) + " bytes but file has " +
                              std::to_string(buf_.size()));
        }
    }

private:
    void need(std::size_t n) const {
        if (pos_ + n > buf_.size()) throw FormatError("file truncated");
    }

    std::vector<char> buf_;
    std::size_t pos_ = 0;
};

Shape read_shape(Reader& r) {
    const std::uint32_t order = r.u32();
    if (order == 0 || order > 16) throw FormatError("implausible tensor order");
    std::vector<std::size_t> dims(order);
    for (std::uint32_t m = 0; m < order; ++m) {
        const std::uint32_t d = r.u32();
        if (d == 0) throw FormatError("zero mode size");
        dims[m] = d;
    }
    return Shape(dims);
}

void write_shape(Writer& w, const Shape& shape) {
    w.u32(static_cast<std::uint32_t>(shape.order()));
    for (std::size_t m = 0; m < shape.order(); ++m) {
        w.u32(static_cast<std::uint32_t>(shape.dim(m)));
    }
}

enum class MethodTag : std::uint32_t { TLda = 0, TLdaNp = 1, VLda = 2, TNn = 3, TNnNp = 4 };

MethodTag tag_from_name(const std::string& name) {
    if (name == "t-lda") return MethodTag::TLda;
    if (name == "t-lda-np") return MethodTag::TLdaNp;
    if (name == "v-lda") return MethodTag::VLda;
    if (name == "t-nn") return MethodTag::TNn;
    if (name == "t-nn-np") return MethodTag::TNnNp;
    throw std::invalid_argument("unknown method '" + name + "'");
}

std::string name_from_tag(std::uint32_t tag) {
    switch (static_cast<MethodTag>(tag)) {
        case MethodTag::TLda: return "t-lda";
        case MethodTag::TLdaNp: return "t-lda-np";
        case MethodTag::VLda: return "v-lda";
        case MethodTag::TNn: return "t-nn";
        case MethodTag::TNnNp: return "t-nn-np";
    }
    throw FormatError("unknown method tag " + std::to_string(tag));
}

}  // namespace

void write_dataset(const std::string& path, const TensorDataset& dataset) {
    Writer w(path);
    w.magic(kDatasetMagic);
    w.u32(kFormatVersion);
    write_shape(w, dataset.shape);
    w.u64(dataset.samples.size());
    for (const auto& s : dataset.samples) {
        if (s.label != 0 && s.label != 1) {
            throw std::invalid_argument("dataset labels must be 0 or 1");
        }
        w.u8(static_cast<std::uint8_t>(s.label));
    }
    for (const auto& s : dataset.samples) {
        if (s.tensor.shape() != dataset.shape) {
            throw std::invalid_argument("dataset sample shape mismatch");
        }
        w.f64_block(s.tensor.data(), s.tensor.size());
    }
    w.finish(path);
}

TensorDataset read_dataset(const std::string& path) {
    Reader r(path, kDatasetMagic);
    TensorDataset dataset;
    dataset.shape = read_shape(r);
    const std::uint64_t count = r.u64();
    const std::size_t entries = dataset.shape.total();
    const std::size_t expected =
        4 + 4 + 4 + 4 * dataset.shape.order() + 8 + count + 8 * count * entries;
    r.expect_exact_length(expected);

    std::vector<int> labels(count);
    for (std::uint64_t i = 0; i < count; ++i) {
        const std::uint8_t l = r.u8();
        if (l > 1) throw FormatError("label out of range at sample " + std::to_string(i));
        labels[i] = l;
    }
    dataset.samples.reserve(count);
    for (std::uint64_t i = 0; i < count; ++i) {
        DenseTensor t(dataset.shape);
        r.f64_block(t.data(), t.size());
        dataset.samples.push_back(LabeledSample{std::move(t), labels[i]});
    }
    return dataset;
}

void write_model(const std::string& path, const StoredModel& model) {
    Writer w(path);
    w.magic(kModelMagic);
    w.u32(kFormatVersion);
    const MethodTag tag = tag_from_name(model.method);
    w.u32(static_cast<std::uint32_t>(tag));
    write_shape(w, model.shape);
    w.u8(model.classifier.strict ? 1 : 0);
    w.f64(model.classifier.threshold);
    w.u8(model.classifier.levels.has_value() ? 1 : 0);
    if (model.classifier.levels) {
        w.f64(model.classifier.levels->alpha);
        w.f64(model.classifier.levels->delta);
    }
    if (const auto* linear = std::get_if<LinearScorer>(&model.classifier.scorer)) {
        if (linear->weights.shape() != model.shape) {
            throw std::invalid_argument("model weight shape mismatch");
        }
        w.f64_block(linear->weights.data(), linear->weights.size());
    } else {
        const auto& net = std::get<TclNetwork>(model.classifier.scorer);
        w.u32(static_cast<std::uint32_t>(net.hidden_b.size()));
        for (const Matrix& v : net.contraction) w.u32(static_cast<std::uint32_t>(v.rows()));
        for (const Matrix& v : net.contraction) w.f64_block(v.data(), v.rows() * v.cols());
        w.f64_block(net.hidden_w.data(), net.hidden_w.rows() * net.hidden_w.cols());
        w.f64_block(net.hidden_b.data(), net.hidden_b.size());
        w.f64_block(net.out_w.data(), net.out_w.size());
        w.f64(net.out_b);
    }
    w.finish(path);
}

StoredModel read_model(const std::string& path) {
    Reader r(path, kModelMagic);
    StoredModel model;
    const std::uint32_t tag = r.u32();
    model.method = name_from_tag(tag);
    model.shape = read_shape(r);
    model.classifier.strict = r.u8() != 0;
    model.classifier.threshold = r.f64();
    if (r.u8() != 0) {
        const double alpha = r.f64();
        const double delta = r.f64();
        model.classifier.levels = NpLevels(alpha, delta);
    }
    const bool is_network = tag == static_cast<std::uint32_t>(MethodTag::TNn) ||
                            tag == static_cast<std::uint32_t>(MethodTag::TNnNp);
    if (!is_network) {
        DenseTensor weights(model.shape);
        if (r.remaining() != 8 * weights.size()) throw FormatError("file length mismatch");
        r.f64_block(weights.data(), weights.size());
        model.classifier.scorer = LinearScorer{std::move(weights)};
    } else {
        TnnArchitecture arch;
        arch.hidden = r.u32();
        arch.tcl_ranks.resize(model.shape.order());
        for (std::size_t m = 0; m < model.shape.order(); ++m) arch.tcl_ranks[m] = r.u32();
        TclNetwork net(model.shape, arch);
        const std::size_t payload =
            8 * (net.parameter_count());
        if (r.remaining() != payload) throw FormatError("file length mismatch");
        for (Matrix& v : net.contraction) r.f64_block(v.data(), v.rows() * v.cols());
        r.f64_block(net.hidden_w.data(), net.hidden_w.rows() * net.hidden_w.cols());
        r.f64_block(net.hidden_b.data(), net.hidden_b.size());
        r.f64_block(net.out_w.data(), net.out_w.size());
        net.out_b = r.f64();
        model.classifier.scorer = std::move(net);
    }
    return model;
}

}  // namespace tnp::io
