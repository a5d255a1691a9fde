#ifndef DOCKRL_NN_HPP_
#define DOCKRL_NN_HPP_

// Small dense feed-forward networks with hand-written reverse mode, Adam and
// Polyak averaging.  Samples are stored column-wise: an input batch is a
// (features x batch) matrix.

#include <Eigen/Core>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "dockrl/rng.hpp"

namespace dockrl {

enum class Activation { kIdentity, kTanh, kRelu };

// A contiguous run of parameters and the matching gradient buffer.
template <typename Scalar>
struct ParamBlock {
  Scalar* value = nullptr;
  Scalar* grad = nullptr;
  std::size_t size = 0;
};

template <typename Scalar>
class BasicMlp {
 public:
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  struct Layer {
    Matrix weight;  // (out x in)
    Vector bias;
    Matrix grad_weight;
    Vector grad_bias;
  };

  BasicMlp() = default;
  // sizes = {input, hidden..., output}; parameters start at zero.  Hidden
  // layers use ReLU.
  BasicMlp(const std::vector<int>& sizes, Activation output);

  // Fan-in uniform in +-1/sqrt(fan_in); the last layer is additionally
  // multiplied by final_layer_scale.
  void initialize(Rng& rng, double final_layer_scale = 1.0);

  int input_size() const;
  int output_size() const;
  std::vector<int> sizes() const;
  Activation output_activation() const { return output_; }
  std::size_t parameter_count() const;

  Matrix forward(const Matrix& input) const;
  // Same as forward but keeps activations for one backward call.
  const Matrix& forward_cached(const Matrix& input);
  // Accumulates parameter gradients of <upstream, output> and returns the
  // gradient with respect to the cached input.  Consumes the cache.
  Matrix backward(const Matrix& upstream);
  void zero_grads();

  std::vector<Layer>& layers() { return layers_; }
  const std::vector<Layer>& layers() const { return layers_; }
  std::vector<ParamBlock<Scalar>> parameter_blocks();
  bool all_finite() const;

  template <typename Other>
  BasicMlp<Other> cast() const {
    BasicMlp<Other> out;
    out.set_output_activation(output_);
    for (const Layer& l : layers_) {
      typename BasicMlp<Other>::Layer o;
      o.weight = l.weight.template cast<Other>();
      o.bias = l.bias.template cast<Other>();
      o.grad_weight = l.grad_weight.template cast<Other>();
      o.grad_bias = l.grad_bias.template cast<Other>();
      out.layers().push_back(std::move(o));
    }
    return out;
  }
  void set_output_activation(Activation a) { output_ = a; }

 private:
  std::vector<Layer> layers_;
  Activation output_ = Activation::kIdentity;
  std::vector<Matrix> cache_;  // input, then post-activation of every layer
};

using Mlp = BasicMlp<float>;

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// Adam with bias correction.  Moment buffers are sized on the first step and
// must match the block layout on every later step.
template <typename Scalar>
class BasicAdam {
 public:
  BasicAdam() = default;
  explicit BasicAdam(AdamConfig cfg) : cfg_(cfg) {}

  void step(std::span<const ParamBlock<Scalar>> blocks);
  std::int64_t steps() const { return t_; }
  const AdamConfig& config() const { return cfg_; }
  void set_lr(double lr) { cfg_.lr = lr; }

 private:
  AdamConfig cfg_;
  std::int64_t t_ = 0;
  std::vector<std::vector<Scalar>> m_;
  std::vector<std::vector<Scalar>> v_;
};

using Adam = BasicAdam<float>;

// target <- (1 - tau) target + tau source.  Throws DomainError on shape
// mismatch or tau outside [0, 1].
template <typename Scalar>
void polyak_update(BasicMlp<Scalar>& target, const BasicMlp<Scalar>& source,
                   double tau);

template <typename Scalar>
double grad_norm(std::span<const ParamBlock<Scalar>> blocks);

// Rescales gradients so their global L2 norm is at most max_norm.  Returns
// the norm before clipping.
template <typename Scalar>
double clip_grad_norm(std::span<const ParamBlock<Scalar>> blocks,
                      double max_norm);

// Flat little-endian checkpoint: "DOCKRL01", u32 layer count, u32
// (rows, cols) per layer, then f32 weights (row-major) and biases layer by
// layer.
struct CheckpointLayer {
  std::uint32_t rows = 0;
  std::uint32_t cols = 0;
  std::vector<float> weights;  // rows * cols, row-major
  std::vector<float> bias;     // rows
};

void write_checkpoint(const std::filesystem::path& path,
                      const std::vector<CheckpointLayer>& layers);
// Throws FormatError naming the offending header field, IoError if the file
// cannot be opened.
std::vector<CheckpointLayer> read_checkpoint(
    const std::filesystem::path& path);

std::vector<CheckpointLayer> to_checkpoint(const Mlp& net);
// Throws FormatError if the layers do not chain.
Mlp mlp_from_checkpoint(const std::vector<CheckpointLayer>& layers,
                        Activation output);

void save_mlp(const std::filesystem::path& path, const Mlp& net);
Mlp load_mlp(const std::filesystem::path& path, Activation output);

}  // namespace dockrl

#endif  // DOCKRL_NN_HPP_
