/* Copyright 2026 The GazeAttend Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/
#include "gazeattend/nn/layers.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <map>

#include "gazeattend/errors.hpp"

namespace gazeattend::nn {

namespace {

// Scatters im2col columns back into an image-shaped gradient.
void col2im(const MatrixRM& dcols, int in_ch, int k, int stride, int pad,
            int in_h, int in_w, int out_h, int out_w, Tensor& dx) {
  for (int ci = 0; ci < in_ch; ++ci) {
    for (int ky = 0; ky < k; ++ky) {
      for (int kx = 0; kx < k; ++kx) {
        const int row = (ci * k + ky) * k + kx;
        const float* src = dcols.data() + static_cast<std::size_t>(row) *
                                              dcols.cols();
        for (int oy = 0; oy < out_h; ++oy) {
          const int iy = oy * stride - pad + ky;
          if (iy < 0 || iy >= in_h) continue;
          const float* s = src + static_cast<std::size_t>(oy) * out_w;
          for (int ox = 0; ox < out_w; ++ox) {
            const int ix = ox * stride - pad + kx;
            if (ix < 0 || ix >= in_w) continue;
            dx.at(ci, iy, ix) += s[ox];
          }
        }
      }
    }
  }
}

}  // namespace

Conv2d::Conv2d(int in, int out, int kernel, int stride_, int pad_)
    : in_ch(in),
      out_ch(out),
      k(kernel),
      stride(stride_),
      pad(pad_),
      weight(MatrixRM::Zero(out, in * kernel * kernel)),
      bias(Eigen::VectorXf::Zero(out)),
      grad_weight(MatrixRM::Zero(out, in * kernel * kernel)),
      grad_bias(Eigen::VectorXf::Zero(out)) {}

void Conv2d::init_he(Rng& rng) {
  const float stdev = std::sqrt(2.0f / static_cast<float>(in_ch * k * k));
  for (Eigen::Index i = 0; i < weight.size(); ++i) {
    weight.data()[i] = static_cast<float>(rng.normal()) * stdev;
  }
  bias.setZero();
}

Tensor Conv2d::forward(const Tensor& x, ConvCache* cache) const {
  if (x.c != in_ch) throw NumericalError("conv input channel mismatch");
  const int oh = out_dim(x.h);
  const int ow = out_dim(x.w);
  if (oh <= 0 || ow <= 0) throw NumericalError("conv input too small");

  MatrixRM cols(in_ch * k * k, oh * ow);
  for (int ci = 0; ci < in_ch; ++ci) {
    for (int ky = 0; ky < k; ++ky) {
      for (int kx = 0; kx < k; ++kx) {
        const int row = (ci * k + ky) * k + kx;
        float* dst = cols.data() + static_cast<std::size_t>(row) * cols.cols();
        for (int oy = 0; oy < oh; ++oy) {
          const int iy = oy * stride - pad + ky;
          float* d = dst + static_cast<std::size_t>(oy) * ow;
          if (iy < 0 || iy >= x.h) {
            std::memset(d, 0, sizeof(float) * ow);
            continue;
          }
          const float* src = &x.at(ci, iy, 0);
          for (int ox = 0; ox < ow; ++ox) {
            const int ix = ox * stride - pad + kx;
            d[ox] = (ix >= 0 && ix < x.w) ? src[ix] : 0.0f;
          }
        }
      }
    }
  }

  Tensor y(out_ch, oh, ow);
  y.mat().noalias() = weight * cols;
  y.mat().colwise() += bias;

  if (cache != nullptr) {
    cache->cols = std::move(cols);
    cache->in_h = x.h;
    cache->in_w = x.w;
    cache->out_h = oh;
    cache->out_w = ow;
  }
  return y;
}

Tensor Conv2d::backward(const ConvCache& cache, const Tensor& dy) {
  ConstMapRM dym = dy.mat();
  grad_weight.noalias() += dym * cache.cols.transpose();
  grad_bias += dym.rowwise().sum();

  MatrixRM dcols = weight.transpose() * dym;
  Tensor dx(in_ch, cache.in_h, cache.in_w);
  col2im(dcols, in_ch, k, stride, pad, cache.in_h, cache.in_w, cache.out_h,
         cache.out_w, dx);
  return dx;
}

void Conv2d::collect_params(const std::string& prefix,
                            std::vector<ParamRef>& out) {
  out.push_back({prefix + ".weight", weight.data(), grad_weight.data(),
                 static_cast<std::size_t>(weight.size()),
                 {out_ch, in_ch, k, k}});
  out.push_back({prefix + ".bias", bias.data(), grad_bias.data(),
                 static_cast<std::size_t>(bias.size()),
                 {out_ch}});
}

Tensor relu(const Tensor& x, ReluCache* cache) {
  Tensor y = x;
  if (cache != nullptr) cache->mask.assign(x.size(), 0);
  for (std::size_t i = 0; i < y.v.size(); ++i) {
    if (y.v[i] > 0.0f) {
      if (cache != nullptr) cache->mask[i] = 1;
    } else {
      y.v[i] = 0.0f;
    }
  }
  return y;
}

Tensor relu_backward(const ReluCache& cache, const Tensor& dy) {
  Tensor dx = dy;
  for (std::size_t i = 0; i < dx.v.size(); ++i) {
    if (cache.mask[i] == 0) dx.v[i] = 0.0f;
  }
  return dx;
}

Tensor MaxPool2d::forward(const Tensor& x, MaxPoolCache* cache) const {
  const int oh = (x.h + 2 * pad - k) / stride + 1;
  const int ow = (x.w + 2 * pad - k) / stride + 1;
  Tensor y(x.c, oh, ow);
  if (cache != nullptr) {
    cache->argmax.assign(y.size(), -1);
    cache->in_h = x.h;
    cache->in_w = x.w;
  }
  for (int c = 0; c < x.c; ++c) {
    for (int oy = 0; oy < oh; ++oy) {
      for (int ox = 0; ox < ow; ++ox) {
        float best = -std::numeric_limits<float>::infinity();
        std::int32_t best_idx = -1;
        for (int ky = 0; ky < k; ++ky) {
          const int iy = oy * stride - pad + ky;
          if (iy < 0 || iy >= x.h) continue;
          for (int kx = 0; kx < k; ++kx) {
            const int ix = ox * stride - pad + kx;
            if (ix < 0 || ix >= x.w) continue;
            const float v = x.at(c, iy, ix);
            if (v > best) {
              best = v;
              best_idx =
                  static_cast<std::int32_t>((static_cast<std::size_t>(c) * x.h + iy) * x.w + ix);
            }
          }
        }
        y.at(c, oy, ox) = best;
        if (cache != nullptr) {
          cache->argmax[(static_cast<std::size_t>(c) * oh + oy) * ow + ox] =
              best_idx;
        }
      }
    }
  }
  return y;
}

Tensor MaxPool2d::backward(const MaxPoolCache& cache, int channels,
                           const Tensor& dy) const {
  Tensor dx(channels, cache.in_h, cache.in_w);
  for (std::size_t i = 0; i < dy.v.size(); ++i) {
    const std::int32_t idx = cache.argmax[i];
    if (idx >= 0) dx.v[static_cast<std::size_t>(idx)] += dy.v[i];
  }
  return dx;
}

Linear::Linear(int in, int out)
    : in_dim(in),
      out_dim(out),
      weight(MatrixRM::Zero(out, in)),
      bias(Eigen::VectorXf::Zero(out)),
      grad_weight(MatrixRM::Zero(out, in)),
      grad_bias(Eigen::VectorXf::Zero(out)) {}

void Linear::init(Rng& rng, float stdev) {
  for (Eigen::Index i = 0; i < weight.size(); ++i) {
    weight.data()[i] = static_cast<float>(rng.normal()) * stdev;
  }
  bias.setZero();
}

Eigen::VectorXf Linear::forward(const Eigen::VectorXf& x) const {
  return weight * x + bias;
}

Eigen::VectorXf Linear::backward(const Eigen::VectorXf& x,
                                 const Eigen::VectorXf& dy) {
  grad_weight.noalias() += dy * x.transpose();
  grad_bias += dy;
  return weight.transpose() * dy;
}

void Linear::collect_params(const std::string& prefix,
                            std::vector<ParamRef>& out) {
  out.push_back({prefix + ".weight", weight.data(), grad_weight.data(),
                 static_cast<std::size_t>(weight.size()),
                 {out_dim, in_dim}});
  out.push_back({prefix + ".bias", bias.data(), grad_bias.data(),
                 static_cast<std::size_t>(bias.size()),
                 {out_dim}});
}

void SgdOptimizer::step(std::vector<ParamRef>& params) {
  if (velocity_.size() != params.size()) {
    velocity_.clear();
    for (const auto& p : params) velocity_.emplace_back(p.size, 0.0f);
  }
  const float lr = static_cast<float>(lr_);
  const float mu = static_cast<float>(momentum_);
  for (std::size_t i = 0; i < params.size(); ++i) {
    ParamRef& p = params[i];
    float* v = velocity_[i].data();
    for (std::size_t j = 0; j < p.size; ++j) {
      v[j] = mu * v[j] + p.grad[j];
      p.data[j] -= lr * v[j];
    }
  }
}

void SgdOptimizer::zero_grad(std::vector<ParamRef>& params) {
  for (auto& p : params) {
    std::memset(p.grad, 0, p.size * sizeof(float));
  }
}

namespace {

constexpr char kWeightsMagic[4] = {'G', 'A', 'Z', 'W'};
constexpr std::uint32_t kWeightsVersion = 1;

void write_u32(std::ostream& out, std::uint32_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

std::uint32_t read_u32(std::istream& in) {
  std::uint32_t v = 0;
  in.read(reinterpret_cast<char*>(&v), sizeof(v));
  return v;
}

}  // namespace

void save_weights(const std::vector<ParamRef>& params,
                  const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write weights: " + path.string());
  out.write(kWeightsMagic, 4);
  write_u32(out, kWeightsVersion);
  write_u32(out, static_cast<std::uint32_t>(params.size()));
  for (const auto& p : params) {
    write_u32(out, static_cast<std::uint32_t>(p.name.size()));
    out.write(p.name.data(), static_cast<std::streamsize>(p.name.size()));
    write_u32(out, static_cast<std::uint32_t>(p.shape.size()));
    for (int d : p.shape) write_u32(out, static_cast<std::uint32_t>(d));
    out.write(reinterpret_cast<const char*>(p.data),
              static_cast<std::streamsize>(p.size * sizeof(float)));
  }
  if (!out) throw DataError("short write to weights: " + path.string());
}

std::size_t load_weights(std::vector<ParamRef>& params,
                         const std::filesystem::path& path,
                         bool allow_missing) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read weights: " + path.string());
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kWeightsMagic, 4) != 0) {
    throw DataError("not a weights file: " + path.string());
  }
  if (read_u32(in) != kWeightsVersion) {
    throw DataError("unsupported weights version in " + path.string());
  }
  const std::uint32_t count = read_u32(in);

  std::map<std::string, std::vector<float>> tensors;
  for (std::uint32_t i = 0; i < count; ++i) {
    const std::uint32_t name_len = read_u32(in);
    std::string name(name_len, '\0');
    in.read(name.data(), name_len);
    const std::uint32_t ndim = read_u32(in);
    std::size_t numel = 1;
    for (std::uint32_t d = 0; d < ndim; ++d) numel *= read_u32(in);
    std::vector<float> data(numel);
    in.read(reinterpret_cast<char*>(data.data()),
            static_cast<std::streamsize>(numel * sizeof(float)));
    if (!in) throw DataError("truncated weights file: " + path.string());
    tensors.emplace(std::move(name), std::move(data));
  }

  std::size_t filled = 0;
  for (auto& p : params) {
    auto it = tensors.find(p.name);
    if (it == tensors.end()) {
      if (allow_missing) continue;
      throw DataError("weights file missing tensor \"" + p.name + "\"");
    }
    if (it->second.size() != p.size) {
      throw DataError("tensor \"" + p.name + "\" has " +
                      std::to_string(it->second.size()) + " values, expected " +
                      std::to_string(p.size));
    }
    std::memcpy(p.data, it->second.data(), p.size * sizeof(float));
    ++filled;
  }
  return filled;
}

}  // namespace gazeattend::nn
