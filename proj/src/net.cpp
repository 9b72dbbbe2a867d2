#include "aerogrid/net.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>

#include "aerogrid/io.hpp"
#include "aerogrid/rng.hpp"
#include "json.hpp"

namespace aerogrid::neural {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MapMat = Eigen::Map<RowMat>;
using CMapMat = Eigen::Map<const RowMat>;
using MapVec = Eigen::Map<Eigen::VectorXd>;
using CMapVec = Eigen::Map<const Eigen::VectorXd>;

Tensor Tensor::make(std::vector<int> shape) {
  std::size_t n = 1;
  for (int d : shape) {
    if (d <= 0) throw DomainError("tensor dimensions must be positive");
    n *= static_cast<std::size_t>(d);
  }
  Tensor t;
  t.shape = std::move(shape);
  t.v.assign(n, 0.0);
  t.g.assign(n, 0.0);
  return t;
}

void Tensor::zero_grad() { std::fill(g.begin(), g.end(), 0.0); }

void NetConfig::validate() const {
  if (channels != 6) throw ValidationError("observation must have exactly 6 channels");
  if (height < 8 || width < 8) throw ValidationError("network grids start at 8x8");
  if (!std::isfinite(init_scale) || init_scale <= 0.0) {
    throw ValidationError("init_scale must be > 0");
  }
}

Tensor observation_tensor(const EnvState& state) {
  const GridSpec& spec = state.spec();
  Tensor t = Tensor::make({6, spec.height, spec.width});
  std::size_t hw = spec.cell_count();
  for (std::size_t i = 0; i < hw; ++i) {
    t.v[0 * hw + i] = state.aqi.at_flat(i) / 500.0;
    t.v[1 * hw + i] = state.population.at_flat(i);
    t.v[2 * hw + i] = state.traffic.at_flat(i);
    t.v[3 * hw + i] = state.industrial.at_flat(i);
    t.v[4 * hw + i] = state.green.at_flat(i);
    t.v[5 * hw + i] = state.booth.at_flat(i);
  }
  return t;
}

std::vector<double> masked_softmax(const std::vector<double>& logits,
                                   const std::vector<std::uint8_t>& mask) {
  if (!mask.empty() && mask.size() != logits.size()) {
    throw DomainError("mask size does not match action count");
  }
  auto valid = [&](std::size_t i) { return mask.empty() || mask[i]; };

  double mx = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < logits.size(); ++i) {
    if (valid(i)) mx = std::max(mx, logits[i]);
  }
  if (mx == -std::numeric_limits<double>::infinity()) {
    throw DegenerateDistributionError("every action is masked out");
  }
  std::vector<double> probs(logits.size(), 0.0);
  double sum = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    if (valid(i)) {
      probs[i] = std::exp(logits[i] - mx);
      sum += probs[i];
    }
  }
  for (double& p : probs) p /= sum;
  return probs;
}

namespace {

// 3x3 same-padding im2col: row c*9+k, column i*W+j holds x[c, i+di, j+dj].
void im2col(const double* x, int C, int H, int W, AlignedBuf& col) {
  const int HW = H * W;
  col.assign(static_cast<std::size_t>(C) * 9 * HW, 0.0);
  for (int c = 0; c < C; ++c) {
    const double* src = x + static_cast<std::size_t>(c) * HW;
    for (int k = 0; k < 9; ++k) {
      int di = k / 3 - 1, dj = k % 3 - 1;
      double* dst = col.data() + (static_cast<std::size_t>(c) * 9 + k) * HW;
      for (int i = 0; i < H; ++i) {
        int si = i + di;
        if (si < 0 || si >= H) continue;
        int j0 = std::max(0, -dj);
        int j1 = std::min(W, W - dj);
        std::memcpy(dst + static_cast<std::size_t>(i) * W + j0,
                    src + static_cast<std::size_t>(si) * W + j0 + dj,
                    static_cast<std::size_t>(j1 - j0) * sizeof(double));
      }
    }
  }
}

void col2im_add(const AlignedBuf& col, int C, int H, int W, double* dx) {
  const int HW = H * W;
  for (int c = 0; c < C; ++c) {
    double* dst = dx + static_cast<std::size_t>(c) * HW;
    for (int k = 0; k < 9; ++k) {
      int di = k / 3 - 1, dj = k % 3 - 1;
      const double* src = col.data() + (static_cast<std::size_t>(c) * 9 + k) * HW;
      for (int i = 0; i < H; ++i) {
        int si = i + di;
        if (si < 0 || si >= H) continue;
        int j0 = std::max(0, -dj);
        int j1 = std::min(W, W - dj);
        const double* s = src + static_cast<std::size_t>(i) * W;
        double* d = dst + static_cast<std::size_t>(si) * W + dj;
        for (int j = j0; j < j1; ++j) d[j] += s[j];
      }
    }
  }
}

void conv_forward(const Tensor& w, const Tensor& b, const AlignedBuf& col,
                  int HW, AlignedBuf& z) {
  int outC = w.shape[0];
  int K = w.shape[1] * 9;
  z.resize(static_cast<std::size_t>(outC) * HW);
  CMapMat W(w.v.data(), outC, K);
  CMapMat X(col.data(), K, HW);
  MapMat Z(z.data(), outC, HW);
  Z.noalias() = W * X;
  for (int o = 0; o < outC; ++o) {
    Z.row(o).array() += b.v[static_cast<std::size_t>(o)];
  }
}

void relu(const AlignedBuf& z, AlignedBuf& a) {
  a.resize(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) a[i] = z[i] > 0.0 ? z[i] : 0.0;
}

// dz = da where z > 0, else 0 (in place on da).
void relu_backward(const AlignedBuf& z, AlignedBuf& da) {
  for (std::size_t i = 0; i < z.size(); ++i) {
    if (z[i] <= 0.0) da[i] = 0.0;
  }
}

}  // namespace

PolicyValueNet::PolicyValueNet(const NetConfig& cfg) : cfg_(cfg) {
  cfg_.validate();
  pooled_h_ = cfg_.height / 2;
  pooled_w_ = cfg_.width / 2;
  flat_size_ = 128 * pooled_h_ * pooled_w_;
  int A = action_count();

  conv1_w_ = Tensor::make({32, cfg_.channels, 3, 3});
  conv1_b_ = Tensor::make({32});
  conv2_w_ = Tensor::make({64, 32, 3, 3});
  conv2_b_ = Tensor::make({64});
  conv3_w_ = Tensor::make({128, 64, 3, 3});
  conv3_b_ = Tensor::make({128});
  fc_w_ = Tensor::make({256, flat_size_});
  fc_b_ = Tensor::make({256});
  pol_w_ = Tensor::make({A, 256});
  pol_b_ = Tensor::make({A});
  val_w_ = Tensor::make({1, 256});
  val_b_ = Tensor::make({1});

  init_params();
  for (auto& p : parameters()) {
    adam_.push_back({AlignedBuf(p.tensor->size(), 0.0),
                     AlignedBuf(p.tensor->size(), 0.0)});
  }
}

void PolicyValueNet::init_params() {
  Rng rng(cfg_.seed);
  auto he_uniform = [&](Tensor& t, int fan_in) {
    double limit = std::sqrt(6.0 / static_cast<double>(fan_in)) * cfg_.init_scale;
    for (double& x : t.v) x = rng.uniform(-limit, limit);
  };
  he_uniform(conv1_w_, cfg_.channels * 9);
  he_uniform(conv2_w_, 32 * 9);
  he_uniform(conv3_w_, 64 * 9);
  he_uniform(fc_w_, flat_size_);
  he_uniform(pol_w_, 256);
  he_uniform(val_w_, 256);
  // biases stay zero
}

std::vector<PolicyValueNet::ParamRef> PolicyValueNet::parameters() {
  return {
      {"conv1.weight", &conv1_w_}, {"conv1.bias", &conv1_b_},
      {"conv2.weight", &conv2_w_}, {"conv2.bias", &conv2_b_},
      {"conv3.weight", &conv3_w_}, {"conv3.bias", &conv3_b_},
      {"fc.weight", &fc_w_},       {"fc.bias", &fc_b_},
      {"policy.weight", &pol_w_},  {"policy.bias", &pol_b_},
      {"value.weight", &val_w_},   {"value.bias", &val_b_},
  };
}

std::size_t PolicyValueNet::parameter_count() const {
  std::size_t n = 0;
  for (auto& p : const_cast<PolicyValueNet*>(this)->parameters()) {
    n += p.tensor->size();
  }
  return n;
}

void PolicyValueNet::zero_grad() {
  for (auto& p : parameters()) p.tensor->zero_grad();
}

void PolicyValueNet::check_obs(const Tensor& obs) const {
  if (obs.shape != std::vector<int>{cfg_.channels, cfg_.height, cfg_.width}) {
    throw DomainError("observation shape does not match the network input");
  }
}

ForwardResult PolicyValueNet::forward(const Tensor& obs,
                                      const std::vector<std::uint8_t>& mask) {
  check_obs(obs);
  const int H = cfg_.height, W = cfg_.width, HW = H * W;

  x0_ = obs.v;
  im2col(x0_.data(), cfg_.channels, H, W, col1_);
  conv_forward(conv1_w_, conv1_b_, col1_, HW, z1_);
  relu(z1_, a1_);

  im2col(a1_.data(), 32, H, W, col2_);
  conv_forward(conv2_w_, conv2_b_, col2_, HW, z2_);
  relu(z2_, a2_);

  im2col(a2_.data(), 64, H, W, col3_);
  conv_forward(conv3_w_, conv3_b_, col3_, HW, z3_);
  relu(z3_, a3_);

  // 2x2 stride-2 max pool; first occurrence wins ties.
  pooled_.assign(static_cast<std::size_t>(flat_size_), 0.0);
  pool_arg_.assign(static_cast<std::size_t>(flat_size_), 0);
  for (int c = 0; c < 128; ++c) {
    const double* src = a3_.data() + static_cast<std::size_t>(c) * HW;
    double* dst = pooled_.data() + static_cast<std::size_t>(c) * pooled_h_ * pooled_w_;
    int* arg = pool_arg_.data() + static_cast<std::size_t>(c) * pooled_h_ * pooled_w_;
    for (int oi = 0; oi < pooled_h_; ++oi) {
      for (int oj = 0; oj < pooled_w_; ++oj) {
        int best_idx = (2 * oi) * W + (2 * oj);
        double best = src[best_idx];
        for (int k = 1; k < 4; ++k) {
          int i = 2 * oi + k / 2, j = 2 * oj + k % 2;
          int idx = i * W + j;
          if (src[idx] > best) {
            best = src[idx];
            best_idx = idx;
          }
        }
        dst[oi * pooled_w_ + oj] = best;
        arg[oi * pooled_w_ + oj] = best_idx;
      }
    }
  }

  zf_.resize(256);
  {
    CMapMat Wf(fc_w_.v.data(), 256, flat_size_);
    CMapVec x(pooled_.data(), flat_size_);
    MapVec z(zf_.data(), 256);
    z.noalias() = Wf * x;
    z += CMapVec(fc_b_.v.data(), 256);
  }
  relu(zf_, af_);

  const int A = action_count();
  logits_.resize(A);
  {
    CMapMat Wp(pol_w_.v.data(), A, 256);
    CMapVec x(af_.data(), 256);
    MapVec z(logits_.data(), A);
    z.noalias() = Wp * x;
    z += CMapVec(pol_b_.v.data(), A);
  }
  double value = CMapVec(val_w_.v.data(), 256).dot(CMapVec(af_.data(), 256)) +
                 val_b_.v[0];

  for (double l : logits_) {
    if (!std::isfinite(l)) throw NumericError("non-finite policy logit");
  }
  if (!std::isfinite(value)) throw NumericError("non-finite value estimate");

  has_cache_ = true;
  ForwardResult out;
  out.logits.assign(logits_.begin(), logits_.end());
  out.probs = masked_softmax(out.logits, mask);
  out.value = value;
  return out;
}

ForwardResult PolicyValueNet::forward(const EnvState& state,
                                      const std::vector<std::uint8_t>& mask) {
  if (state.spec().height != cfg_.height || state.spec().width != cfg_.width) {
    throw DomainError("state grid does not match the network input size");
  }
  return forward(observation_tensor(state), mask);
}

void PolicyValueNet::backward(const std::vector<double>& dlogits, double dvalue) {
  if (!has_cache_) throw DomainError("backward requires a prior forward pass");
  const int H = cfg_.height, W = cfg_.width, HW = H * W;
  const int A = action_count();
  if (static_cast<int>(dlogits.size()) != A) {
    throw DomainError("loss gradient size does not match the action count");
  }

  // heads -> fc activation; the caller's buffer lands in aligned scratch
  // first so the kernels below see a stable alignment
  dlogits_scratch_.assign(dlogits.begin(), dlogits.end());
  AlignedBuf daf(256, 0.0);
  {
    CMapVec dl(dlogits_scratch_.data(), A);
    CMapVec a(af_.data(), 256);
    MapMat dWp(pol_w_.g.data(), A, 256);
    dWp.noalias() += dl * a.transpose();
    MapVec(pol_b_.g.data(), A) += dl;

    CMapMat Wp(pol_w_.v.data(), A, 256);
    MapVec d(daf.data(), 256);
    d.noalias() = Wp.transpose() * dl;

    MapVec(val_w_.g.data(), 256) += dvalue * a;
    val_b_.g[0] += dvalue;
    d += dvalue * CMapVec(val_w_.v.data(), 256);
  }

  relu_backward(zf_, daf);

  AlignedBuf dflat(static_cast<std::size_t>(flat_size_), 0.0);
  {
    CMapVec dz(daf.data(), 256);
    CMapVec x(pooled_.data(), flat_size_);
    MapMat dWf(fc_w_.g.data(), 256, flat_size_);
    dWf.noalias() += dz * x.transpose();
    MapVec(fc_b_.g.data(), 256) += dz;
    CMapMat Wf(fc_w_.v.data(), 256, flat_size_);
    MapVec d(dflat.data(), flat_size_);
    d.noalias() = Wf.transpose() * dz;
  }

  // unpool
  AlignedBuf da3(static_cast<std::size_t>(128) * HW, 0.0);
  for (int c = 0; c < 128; ++c) {
    const double* src = dflat.data() + static_cast<std::size_t>(c) * pooled_h_ * pooled_w_;
    const int* arg = pool_arg_.data() + static_cast<std::size_t>(c) * pooled_h_ * pooled_w_;
    double* dst = da3.data() + static_cast<std::size_t>(c) * HW;
    for (int s = 0; s < pooled_h_ * pooled_w_; ++s) dst[arg[s]] += src[s];
  }

  auto conv_backward = [&](Tensor& w, Tensor& b, const AlignedBuf& col,
                           const AlignedBuf& z, AlignedBuf& dz,
                           AlignedBuf* dx, int inC) {
    relu_backward(z, dz);
    int outC = w.shape[0];
    int K = inC * 9;
    CMapMat dZ(dz.data(), outC, HW);
    CMapMat X(col.data(), K, HW);
    MapMat dW(w.g.data(), outC, K);
    dW.noalias() += dZ * X.transpose();
    MapVec db(b.g.data(), outC);
    db += dZ.rowwise().sum();
    if (dx) {
      AlignedBuf dcol(static_cast<std::size_t>(K) * HW);
      CMapMat Wm(w.v.data(), outC, K);
      MapMat dC(dcol.data(), K, HW);
      dC.noalias() = Wm.transpose() * dZ;
      dx->assign(static_cast<std::size_t>(inC) * HW, 0.0);
      col2im_add(dcol, inC, H, W, dx->data());
    }
  };

  AlignedBuf da2;
  conv_backward(conv3_w_, conv3_b_, col3_, z3_, da3, &da2, 64);
  AlignedBuf da1;
  conv_backward(conv2_w_, conv2_b_, col2_, z2_, da2, &da1, 32);
  conv_backward(conv1_w_, conv1_b_, col1_, z1_, da1, nullptr, cfg_.channels);
}

void PolicyValueNet::adam_update(double lr, double clip_norm) {
  auto params = parameters();

  double sq = 0.0;
  for (auto& p : params) {
    for (double g : p.tensor->g) {
      if (!std::isfinite(g)) {
        throw NumericError("non-finite gradient in " + p.name);
      }
      sq += g * g;
    }
  }
  double norm = std::sqrt(sq);
  last_grad_norm_ = norm;
  double scale = 1.0;
  if (clip_norm > 0.0 && norm > clip_norm) scale = clip_norm / norm;

  constexpr double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
  ++adam_t_;
  double bc1 = 1.0 - std::pow(beta1, static_cast<double>(adam_t_));
  double bc2 = 1.0 - std::pow(beta2, static_cast<double>(adam_t_));
  for (std::size_t t = 0; t < params.size(); ++t) {
    Tensor& ten = *params[t].tensor;
    auto& mom = adam_[t];
    for (std::size_t i = 0; i < ten.size(); ++i) {
      double g = ten.g[i] * scale;
      mom.m[i] = beta1 * mom.m[i] + (1.0 - beta1) * g;
      mom.v[i] = beta2 * mom.v[i] + (1.0 - beta2) * g * g;
      double mhat = mom.m[i] / bc1;
      double vhat = mom.v[i] / bc2;
      ten.v[i] -= lr * mhat / (std::sqrt(vhat) + eps);
      if (!std::isfinite(ten.v[i])) {
        throw NumericError("non-finite parameter in " + params[t].name +
                           " after update");
      }
    }
  }
}

void PolicyValueNet::save(const std::string& path) const {
  static_assert(sizeof(double) == 8);
  if constexpr (std::endian::native != std::endian::little) {
    throw IoError("checkpoints require a little-endian host");
  }
  auto* self = const_cast<PolicyValueNet*>(this);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path);
  out.write("AGNN1", 5);
  nlohmann::ordered_json sidecar;
  sidecar["magic"] = "AGNN1";
  sidecar["dtype"] = "float64";
  sidecar["byte_order"] = "little";
  sidecar["config"] = {{"channels", cfg_.channels}, {"height", cfg_.height},
                       {"width", cfg_.width},       {"seed", cfg_.seed},
                       {"init_scale", cfg_.init_scale}};
  sidecar["tensors"] = nlohmann::ordered_json::array();
  std::size_t offset = 0;
  for (auto& p : self->parameters()) {
    out.write(reinterpret_cast<const char*>(p.tensor->v.data()),
              static_cast<std::streamsize>(p.tensor->size() * sizeof(double)));
    sidecar["tensors"].push_back(
        {{"name", p.name}, {"shape", p.tensor->shape}, {"offset", offset}});
    offset += p.tensor->size();
  }
  sidecar["param_count"] = offset;
  if (!out) throw IoError("short write to " + path);
  out.close();
  io::write_text_file(path + ".json", sidecar.dump(2) + "\n");
}

PolicyValueNet PolicyValueNet::load(const std::string& path) {
  nlohmann::json sidecar;
  try {
    sidecar = nlohmann::json::parse(io::read_text_file(path + ".json"));
  } catch (const nlohmann::json::exception& e) {
    throw IoError("bad checkpoint sidecar " + path + ".json: " + e.what());
  }
  if (sidecar.value("magic", "") != "AGNN1") {
    throw IoError(path + ": sidecar magic is not AGNN1");
  }
  NetConfig cfg;
  cfg.channels = sidecar.at("config").at("channels").get<int>();
  cfg.height = sidecar.at("config").at("height").get<int>();
  cfg.width = sidecar.at("config").at("width").get<int>();
  cfg.seed = sidecar.at("config").at("seed").get<std::uint64_t>();
  cfg.init_scale = sidecar.at("config").at("init_scale").get<double>();
  PolicyValueNet net(cfg);

  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  char magic[5];
  in.read(magic, 5);
  if (!in || std::memcmp(magic, "AGNN1", 5) != 0) {
    throw IoError(path + ": missing AGNN1 magic header");
  }
  for (auto& p : net.parameters()) {
    in.read(reinterpret_cast<char*>(p.tensor->v.data()),
            static_cast<std::streamsize>(p.tensor->size() * sizeof(double)));
    if (!in) throw IoError(path + ": checkpoint truncated in " + p.name);
  }
  char extra;
  if (in.read(&extra, 1)) throw IoError(path + ": trailing bytes after parameters");
  for (auto& p : net.parameters()) {
    for (double x : p.tensor->v) {
      if (!std::isfinite(x)) {
        throw ValidationError(path + ": non-finite parameter in " + p.name);
      }
    }
  }
  return net;
}

}  // namespace aerogrid::neural
