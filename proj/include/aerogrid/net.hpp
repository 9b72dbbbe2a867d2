#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "aerogrid/grid.hpp"
#include "aerogrid/tensor.hpp"

namespace aerogrid::neural {

struct NetConfig {
  int channels = 6;
  int height = 50;
  int width = 50;
  std::uint64_t seed = 0;
  double init_scale = 1.0;
  void validate() const;  // 6 channels, grid at least 8x8

  bool operator==(const NetConfig&) const = default;
};

struct ForwardResult {
  std::vector<double> probs;   // masked softmax over cells; masked cells get 0
  std::vector<double> logits;  // raw pre-mask logits
  double value = 0.0;
};

// 6xHxW observation: AQI/500, population, traffic, industrial, green, booth.
Tensor observation_tensor(const EnvState& state);

// Softmax restricted to mask-true entries (empty mask = all valid); the rest
// get probability 0. Throws DegenerateDistributionError when nothing is valid.
std::vector<double> masked_softmax(const std::vector<double>& logits,
                                   const std::vector<std::uint8_t>& mask);

// Shared conv trunk (32/64/128 3x3 same-padding convs + ReLU, one 2x2
// stride-2 max pool, 256-unit FC + ReLU) with a H*W-logit policy head and a
// scalar value head. Forward caches activations for one backward pass.
class PolicyValueNet {
 public:
  explicit PolicyValueNet(const NetConfig& cfg);

  const NetConfig& config() const { return cfg_; }
  int action_count() const { return cfg_.height * cfg_.width; }

  ForwardResult forward(const Tensor& obs, const std::vector<std::uint8_t>& mask);
  ForwardResult forward(const EnvState& state, const std::vector<std::uint8_t>& mask);

  void zero_grad();

  // Accumulates parameter gradients for dLoss/dlogits and dLoss/dvalue against
  // the activations of the most recent forward call.
  void backward(const std::vector<double>& dlogits, double dvalue);

  struct ParamRef {
    std::string name;
    Tensor* tensor;
  };
  std::vector<ParamRef> parameters();
  std::size_t parameter_count() const;

  // Clips the global gradient norm to clip_norm, then applies one Adam step
  // (beta1 0.9, beta2 0.999, eps 1e-8).
  void adam_update(double lr, double clip_norm);
  // Gradient L2 norm before clipping, as seen by the last adam_update.
  double last_grad_norm() const { return last_grad_norm_; }

  // Binary checkpoint (magic AGNN1, float64 little-endian) plus a JSON shapes
  // sidecar at path + ".json". Optimizer moments are not persisted.
  void save(const std::string& path) const;
  static PolicyValueNet load(const std::string& path);

 private:
  void init_params();
  void check_obs(const Tensor& obs) const;

  NetConfig cfg_;
  int pooled_h_ = 0, pooled_w_ = 0, flat_size_ = 0;

  Tensor conv1_w_, conv1_b_;
  Tensor conv2_w_, conv2_b_;
  Tensor conv3_w_, conv3_b_;
  Tensor fc_w_, fc_b_;
  Tensor pol_w_, pol_b_;
  Tensor val_w_, val_b_;

  struct Moments {
    AlignedBuf m, v;
  };
  std::vector<Moments> adam_;
  long adam_t_ = 0;
  double last_grad_norm_ = 0.0;

  // forward cache; aligned so SIMD kernels behave identically run to run
  bool has_cache_ = false;
  AlignedBuf x0_, col1_, z1_, a1_, col2_, z2_, a2_, col3_, z3_, a3_;
  AlignedBuf pooled_;
  std::vector<int> pool_arg_;
  AlignedBuf zf_, af_, logits_;
  AlignedBuf dlogits_scratch_;
};

}  // namespace aerogrid::neural
