#include "dockrl/nn.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <string>

#include "dockrl/errors.hpp"

namespace dockrl {
namespace {

template <typename Matrix>
void apply_activation(Matrix& z, Activation a) {
  switch (a) {
    case Activation::kIdentity:
      break;
    case Activation::kTanh:
      z = z.array().tanh().matrix();
      break;
    case Activation::kRelu:
      z = z.cwiseMax(typename Matrix::Scalar(0));
      break;
  }
}

// Multiplies grad in place by the activation derivative, expressed through
// the activation output y.
template <typename Matrix>
void activation_backward(Matrix& grad, const Matrix& y, Activation a) {
  using Scalar = typename Matrix::Scalar;
  switch (a) {
    case Activation::kIdentity:
      break;
    case Activation::kTanh:
      grad.array() *= (Scalar(1) - y.array().square());
      break;
    case Activation::kRelu:
      grad.array() *= (y.array() > Scalar(0)).template cast<Scalar>();
      break;
  }
}

}  // namespace

template <typename Scalar>
BasicMlp<Scalar>::BasicMlp(const std::vector<int>& sizes, Activation output)
    : output_(output) {
  if (sizes.size() < 2) throw DomainError("mlp: need at least two sizes");
  for (int s : sizes) {
    if (s <= 0) throw DomainError("mlp: layer sizes must be positive");
  }
  for (std::size_t i = 1; i < sizes.size(); ++i) {
    Layer l;
    l.weight = Matrix::Zero(sizes[i], sizes[i - 1]);
    l.bias = Vector::Zero(sizes[i]);
    l.grad_weight = Matrix::Zero(sizes[i], sizes[i - 1]);
    l.grad_bias = Vector::Zero(sizes[i]);
    layers_.push_back(std::move(l));
  }
}

template <typename Scalar>
void BasicMlp<Scalar>::initialize(Rng& rng, double final_layer_scale) {
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    Layer& l = layers_[i];
    double bound = 1.0 / std::sqrt(static_cast<double>(l.weight.cols()));
    if (i + 1 == layers_.size()) bound *= final_layer_scale;
    std::uniform_real_distribution<double> dist(-bound, bound);
    // Row-major fill so the draw order matches the checkpoint layout.
    for (Eigen::Index r = 0; r < l.weight.rows(); ++r) {
      for (Eigen::Index c = 0; c < l.weight.cols(); ++c) {
        l.weight(r, c) = static_cast<Scalar>(dist(rng));
      }
    }
    for (Eigen::Index r = 0; r < l.bias.size(); ++r) {
      l.bias(r) = static_cast<Scalar>(dist(rng));
    }
  }
}

template <typename Scalar>
int BasicMlp<Scalar>::input_size() const {
  return layers_.empty() ? 0 : static_cast<int>(layers_.front().weight.cols());
}

template <typename Scalar>
int BasicMlp<Scalar>::output_size() const {
  return layers_.empty() ? 0 : static_cast<int>(layers_.back().weight.rows());
}

template <typename Scalar>
std::vector<int> BasicMlp<Scalar>::sizes() const {
  std::vector<int> out;
  if (layers_.empty()) return out;
  out.push_back(input_size());
  for (const Layer& l : layers_) out.push_back(static_cast<int>(l.weight.rows()));
  return out;
}

template <typename Scalar>
std::size_t BasicMlp<Scalar>::parameter_count() const {
  std::size_t n = 0;
  for (const Layer& l : layers_) n += l.weight.size() + l.bias.size();
  return n;
}

template <typename Scalar>
typename BasicMlp<Scalar>::Matrix BasicMlp<Scalar>::forward(
    const Matrix& input) const {
  if (input.rows() != input_size()) {
    throw DomainError("mlp forward: expected " + std::to_string(input_size()) +
                      " inputs, got " + std::to_string(input.rows()));
  }
  Matrix x = input;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    const Layer& l = layers_[i];
    Matrix z = l.weight * x;
    z.colwise() += l.bias;
    apply_activation(z, i + 1 == layers_.size() ? output_ : Activation::kRelu);
    x = std::move(z);
  }
  return x;
}

template <typename Scalar>
const typename BasicMlp<Scalar>::Matrix& BasicMlp<Scalar>::forward_cached(
    const Matrix& input) {
  if (input.rows() != input_size()) {
    throw DomainError("mlp forward: expected " + std::to_string(input_size()) +
                      " inputs, got " + std::to_string(input.rows()));
  }
  cache_.resize(layers_.size() + 1);
  cache_[0] = input;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    const Layer& l = layers_[i];
    Matrix& z = cache_[i + 1];
    z.noalias() = l.weight * cache_[i];
    z.colwise() += l.bias;
    apply_activation(z, i + 1 == layers_.size() ? output_ : Activation::kRelu);
  }
  return cache_.back();
}

template <typename Scalar>
typename BasicMlp<Scalar>::Matrix BasicMlp<Scalar>::backward(
    const Matrix& upstream) {
  if (cache_.size() != layers_.size() + 1) {
    throw UsageError("mlp backward called without a cached forward pass");
  }
  const Matrix& out = cache_.back();
  if (upstream.rows() != out.rows() || upstream.cols() != out.cols()) {
    throw DomainError("mlp backward: upstream shape mismatch");
  }
  Matrix grad = upstream;
  for (std::size_t k = layers_.size(); k-- > 0;) {
    Layer& l = layers_[k];
    activation_backward(grad, cache_[k + 1],
                        k + 1 == layers_.size() ? output_ : Activation::kRelu);
    l.grad_weight.noalias() += grad * cache_[k].transpose();
    l.grad_bias += grad.rowwise().sum();
    Matrix next = l.weight.transpose() * grad;
    grad = std::move(next);
  }
  cache_.clear();
  return grad;
}

template <typename Scalar>
void BasicMlp<Scalar>::zero_grads() {
  for (Layer& l : layers_) {
    l.grad_weight.setZero();
    l.grad_bias.setZero();
  }
}

template <typename Scalar>
std::vector<ParamBlock<Scalar>> BasicMlp<Scalar>::parameter_blocks() {
  std::vector<ParamBlock<Scalar>> out;
  for (Layer& l : layers_) {
    out.push_back({l.weight.data(), l.grad_weight.data(),
                   static_cast<std::size_t>(l.weight.size())});
    out.push_back({l.bias.data(), l.grad_bias.data(),
                   static_cast<std::size_t>(l.bias.size())});
  }
  return out;
}

template <typename Scalar>
bool BasicMlp<Scalar>::all_finite() const {
  for (const Layer& l : layers_) {
    if (!l.weight.allFinite() || !l.bias.allFinite()) return false;
  }
  return true;
}

template <typename Scalar>
void BasicAdam<Scalar>::step(std::span<const ParamBlock<Scalar>> blocks) {
  if (m_.empty()) {
    for (const auto& b : blocks) {
      m_.emplace_back(b.size, Scalar(0));
      v_.emplace_back(b.size, Scalar(0));
    }
  }
  if (m_.size() != blocks.size()) {
    throw DomainError("adam: parameter layout changed between steps");
  }
  ++t_;
  const double b1 = cfg_.beta1;
  const double b2 = cfg_.beta2;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(t_));
  const double step_size = cfg_.lr / c1;
  const double inv_sqrt_c2 = 1.0 / std::sqrt(c2);
  for (std::size_t k = 0; k < blocks.size(); ++k) {
    const ParamBlock<Scalar>& b = blocks[k];
    if (m_[k].size() != b.size) {
      throw DomainError("adam: parameter layout changed between steps");
    }
    Scalar* m = m_[k].data();
    Scalar* v = v_[k].data();
    for (std::size_t i = 0; i < b.size; ++i) {
      const double g = b.grad[i];
      const double mi = b1 * m[i] + (1.0 - b1) * g;
      const double vi = b2 * v[i] + (1.0 - b2) * g * g;
      m[i] = static_cast<Scalar>(mi);
      v[i] = static_cast<Scalar>(vi);
      const double denom = std::sqrt(vi) * inv_sqrt_c2 + cfg_.epsilon;
      b.value[i] -= static_cast<Scalar>(step_size * mi / denom);
    }
  }
}

template <typename Scalar>
void polyak_update(BasicMlp<Scalar>& target, const BasicMlp<Scalar>& source,
                   double tau) {
  if (!(tau >= 0.0 && tau <= 1.0)) {
    throw DomainError("polyak_update: tau must be in [0, 1]");
  }
  auto& tl = target.layers();
  const auto& sl = source.layers();
  if (tl.size() != sl.size()) {
    throw DomainError("polyak_update: layer count mismatch");
  }
  for (std::size_t i = 0; i < tl.size(); ++i) {
    if (tl[i].weight.rows() != sl[i].weight.rows() ||
        tl[i].weight.cols() != sl[i].weight.cols()) {
      throw DomainError("polyak_update: layer shape mismatch");
    }
  }
  if (tau == 1.0) {
    for (std::size_t i = 0; i < tl.size(); ++i) {
      tl[i].weight = sl[i].weight;
      tl[i].bias = sl[i].bias;
    }
    return;
  }
  if (tau == 0.0) return;
  const Scalar t = static_cast<Scalar>(tau);
  const Scalar keep = static_cast<Scalar>(1.0 - tau);
  for (std::size_t i = 0; i < tl.size(); ++i) {
    tl[i].weight = keep * tl[i].weight + t * sl[i].weight;
    tl[i].bias = keep * tl[i].bias + t * sl[i].bias;
  }
}

template <typename Scalar>
double grad_norm(std::span<const ParamBlock<Scalar>> blocks) {
  double sum = 0.0;
  for (const auto& b : blocks) {
    for (std::size_t i = 0; i < b.size; ++i) {
      const double g = b.grad[i];
      sum += g * g;
    }
  }
  return std::sqrt(sum);
}

template <typename Scalar>
double clip_grad_norm(std::span<const ParamBlock<Scalar>> blocks,
                      double max_norm) {
  const double norm = grad_norm(blocks);
  if (norm > max_norm && norm > 0.0) {
    const Scalar s = static_cast<Scalar>(max_norm / (norm + 1e-6));
    for (const auto& b : blocks) {
      for (std::size_t i = 0; i < b.size; ++i) b.grad[i] *= s;
    }
  }
  return norm;
}

template class BasicMlp<float>;
template class BasicMlp<double>;
template class BasicAdam<float>;
template class BasicAdam<double>;
template void polyak_update(BasicMlp<float>&, const BasicMlp<float>&, double);
template void polyak_update(BasicMlp<double>&, const BasicMlp<double>&,
                            double);
template double grad_norm(std::span<const ParamBlock<float>>);
template double grad_norm(std::span<const ParamBlock<double>>);
template double clip_grad_norm(std::span<const ParamBlock<float>>, double);
template double clip_grad_norm(std::span<const ParamBlock<double>>, double);

// --- checkpoint I/O ---------------------------------------------------------

namespace {

constexpr char kMagic[8] = {'D', 'O', 'C', 'K', 'R', 'L', '0', '1'};

static_assert(sizeof(float) == 4);

void put_u32(std::string& buf, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_f32(std::string& buf, float f) {
  put_u32(buf, std::bit_cast<std::uint32_t>(f));
}

class Reader {
 public:
  explicit Reader(std::string data) : data_(std::move(data)) {}

  std::uint32_t u32(const std::string& field) {
    need(4, field);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) {
      v |= static_cast<std::uint32_t>(static_cast<unsigned char>(data_[pos_ + i]))
           << (8 * i);
    }
    pos_ += 4;
    return v;
  }
  float f32(const std::string& field) { return std::bit_cast<float>(u32(field)); }
  std::string bytes(std::size_t n, const std::string& field) {
    need(n, field);
    std::string out = data_.substr(pos_, n);
    pos_ += n;
    return out;
  }
  std::size_t remaining() const { return data_.size() - pos_; }

 private:
  void need(std::size_t n, const std::string& field) {
    if (data_.size() - pos_ < n) {
      throw FormatError("checkpoint truncated while reading " + field);
    }
  }
  std::string data_;
  std::size_t pos_ = 0;
};

}  // namespace

void write_checkpoint(const std::filesystem::path& path,
                      const std::vector<CheckpointLayer>& layers) {
  std::string buf(kMagic, sizeof(kMagic));
  put_u32(buf, static_cast<std::uint32_t>(layers.size()));
  for (const auto& l : layers) {
    put_u32(buf, l.rows);
    put_u32(buf, l.cols);
  }
  for (const auto& l : layers) {
    if (l.weights.size() != static_cast<std::size_t>(l.rows) * l.cols ||
        l.bias.size() != l.rows) {
      throw DomainError("write_checkpoint: layer payload does not match shape");
    }
    for (float w : l.weights) put_f32(buf, w);
    for (float b : l.bias) put_f32(buf, b);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out) throw IoError("failed writing " + path.string());
}

std::vector<CheckpointLayer> read_checkpoint(
    const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open checkpoint " + path.string());
  std::string data((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  Reader r(std::move(data));
  if (r.bytes(sizeof(kMagic), "magic") != std::string(kMagic, sizeof(kMagic))) {
    throw FormatError("checkpoint field 'magic' is not DOCKRL01");
  }
  const std::uint32_t count = r.u32("layer_count");
  if (count == 0 || count > 1024) {
    throw FormatError("checkpoint field 'layer_count' has implausible value " +
                      std::to_string(count));
  }
  std::vector<CheckpointLayer> layers(count);
  std::uint64_t payload = 0;
  for (std::uint32_t i = 0; i < count; ++i) {
    const std::string tag = "layer[" + std::to_string(i) + "]";
    layers[i].rows = r.u32(tag + ".rows");
    layers[i].cols = r.u32(tag + ".cols");
    if (layers[i].rows == 0) {
      throw FormatError("checkpoint field '" + tag + ".rows' is zero");
    }
    payload += static_cast<std::uint64_t>(layers[i].rows) * layers[i].cols +
               layers[i].rows;
  }
  if (payload * 4 != r.remaining()) {
    throw FormatError("checkpoint payload size " +
                      std::to_string(r.remaining()) +
                      " bytes does not match header (expected " +
                      std::to_string(payload * 4) + ")");
  }
  for (std::uint32_t i = 0; i < count; ++i) {
    auto& l = layers[i];
    l.weights.resize(static_cast<std::size_t>(l.rows) * l.cols);
    l.bias.resize(l.rows);
    for (float& w : l.weights) w = r.f32("weights");
    for (float& b : l.bias) b = r.f32("bias");
  }
  return layers;
}

std::vector<CheckpointLayer> to_checkpoint(const Mlp& net) {
  std::vector<CheckpointLayer> out;
  for (const auto& l : net.layers()) {
    CheckpointLayer c;
    c.rows = static_cast<std::uint32_t>(l.weight.rows());
    c.cols = static_cast<std::uint32_t>(l.weight.cols());
    c.weights.reserve(l.weight.size());
    for (Eigen::Index r = 0; r < l.weight.rows(); ++r) {
      for (Eigen::Index k = 0; k < l.weight.cols(); ++k) {
        c.weights.push_back(l.weight(r, k));
      }
    }
    c.bias.assign(l.bias.data(), l.bias.data() + l.bias.size());
    out.push_back(std::move(c));
  }
  return out;
}

Mlp mlp_from_checkpoint(const std::vector<CheckpointLayer>& layers,
                        Activation output) {
  std::vector<int> sizes;
  for (std::size_t i = 0; i < layers.size(); ++i) {
    if (layers[i].cols == 0) {
      throw FormatError("checkpoint field 'layer[" + std::to_string(i) +
                        "].cols' is zero for a dense layer");
    }
    if (i == 0) {
      sizes.push_back(static_cast<int>(layers[0].cols));
    } else if (layers[i].cols != layers[i - 1].rows) {
      throw FormatError("checkpoint field 'layer[" + std::to_string(i) +
                        "].cols' does not chain with the previous layer");
    }
    sizes.push_back(static_cast<int>(layers[i].rows));
  }
  Mlp net(sizes, output);
  for (std::size_t i = 0; i < layers.size(); ++i) {
    auto& l = net.layers()[i];
    std::size_t k = 0;
    for (Eigen::Index r = 0; r < l.weight.rows(); ++r) {
      for (Eigen::Index c = 0; c < l.weight.cols(); ++c) {
        l.weight(r, c) = layers[i].weights[k++];
      }
    }
    for (Eigen::Index r = 0; r < l.bias.size(); ++r) l.bias(r) = layers[i].bias[r];
  }
  return net;
}

void save_mlp(const std::filesystem::path& path, const Mlp& net) {
  write_checkpoint(path, to_checkpoint(net));
}

Mlp load_mlp(const std::filesystem::path& path, Activation output) {
  return mlp_from_checkpoint(read_checkpoint(path), output);
}

}  // namespace dockrl
