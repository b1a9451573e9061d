#include "msstrade/nn.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>

#include "msstrade/errors.hpp"

namespace mss {

namespace {

double activate(Activation a, double x) {
  switch (a) {
    case Activation::Relu: return x > 0 ? x : 0;
    case Activation::Tanh: return std::tanh(x);
    case Activation::Identity: return x;
  }
  return x;
}

// Derivative expressed via the post-activation value where convenient.
double activate_grad(Activation a, double pre, double post) {
  switch (a) {
    case Activation::Relu: return pre > 0 ? 1.0 : 0.0;
    case Activation::Tanh: return 1.0 - post * post;
    case Activation::Identity: return 1.0;
  }
  return 1.0;
}

}  // namespace

Mlp Mlp::make(const std::vector<std::size_t>& dims, const std::vector<Activation>& acts,
              std::uint64_t seed) {
  if (dims.size() < 2 || acts.size() != dims.size() - 1) {
    throw ShapeError("mlp spec needs n+1 dims for n activations");
  }
  std::mt19937_64 rng(seed);
  Mlp net;
  net.layers.resize(acts.size());
  for (std::size_t l = 0; l < acts.size(); ++l) {
    Layer& layer = net.layers[l];
    layer.in = dims[l];
    layer.out = dims[l + 1];
    layer.act = acts[l];
    layer.w.resize(layer.in * layer.out);
    layer.b.assign(layer.out, 0.0);
    if (layer.act == Activation::Relu) {
      std::normal_distribution<double> he(0.0, std::sqrt(2.0 / static_cast<double>(layer.in)));
      for (double& w : layer.w) w = he(rng);
    } else {
      const double bound = std::sqrt(6.0 / static_cast<double>(layer.in + layer.out));
      std::uniform_real_distribution<double> xavier(-bound, bound);
      for (double& w : layer.w) w = xavier(rng);
    }
  }
  return net;
}

std::size_t Mlp::param_count() const {
  std::size_t n = 0;
  for (const Layer& l : layers) n += l.w.size() + l.b.size();
  return n;
}

std::vector<double> forward(const Mlp& net, std::span<const double> x, ForwardCache* cache) {
  if (x.size() != net.input_size()) {
    throw ShapeError("input length " + std::to_string(x.size()) + " != " +
                     std::to_string(net.input_size()));
  }
  std::vector<double> cur(x.begin(), x.end());
  if (cache) {
    cache->pre.assign(net.layers.size(), {});
    cache->post.assign(net.layers.size() + 1, {});
    cache->post[0] = cur;
    cache->version = net.version;
  }
  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    const Mlp::Layer& layer = net.layers[l];
    std::vector<double> next(layer.out);
    for (std::size_t j = 0; j < layer.out; ++j) {
      const double* wrow = layer.w.data() + j * layer.in;
      double acc = layer.b[j];
      for (std::size_t i = 0; i < layer.in; ++i) acc += wrow[i] * cur[i];
      next[j] = acc;
    }
    if (cache) cache->pre[l] = next;
    for (std::size_t j = 0; j < layer.out; ++j) next[j] = activate(layer.act, next[j]);
    if (cache) cache->post[l + 1] = next;
    cur = std::move(next);
  }
  return cur;
}

Gradients Gradients::zeros_like(const Mlp& net) {
  Gradients g;
  g.layers.resize(net.layers.size());
  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    g.layers[l].w.assign(net.layers[l].w.size(), 0.0);
    g.layers[l].b.assign(net.layers[l].b.size(), 0.0);
  }
  return g;
}

void Gradients::add(const Gradients& other) {
  for (std::size_t l = 0; l < layers.size(); ++l) {
    for (std::size_t i = 0; i < layers[l].w.size(); ++i) layers[l].w[i] += other.layers[l].w[i];
    for (std::size_t i = 0; i < layers[l].b.size(); ++i) layers[l].b[i] += other.layers[l].b[i];
  }
}

void Gradients::scale(double s) {
  for (auto& l : layers) {
    for (double& w : l.w) w *= s;
    for (double& b : l.b) b *= s;
  }
}

Gradients backward(const Mlp& net, const ForwardCache& cache, std::span<const double> upstream,
                   std::vector<double>* input_grad) {
  if (cache.version != net.version) {
    throw CacheError("forward cache is stale (parameters changed)");
  }
  if (cache.post.size() != net.layers.size() + 1) throw CacheError("cache does not match net");
  if (upstream.size() != net.output_size()) throw ShapeError("upstream gradient length mismatch");

  Gradients grads = Gradients::zeros_like(net);
  std::vector<double> delta(upstream.begin(), upstream.end());
  for (std::size_t li = net.layers.size(); li-- > 0;) {
    const Mlp::Layer& layer = net.layers[li];
    // through the activation
    for (std::size_t j = 0; j < layer.out; ++j) {
      delta[j] *= activate_grad(layer.act, cache.pre[li][j], cache.post[li + 1][j]);
    }
    const std::vector<double>& input = cache.post[li];
    Gradients::Layer& g = grads.layers[li];
    for (std::size_t j = 0; j < layer.out; ++j) {
      double* grow = g.w.data() + j * layer.in;
      const double dj = delta[j];
      for (std::size_t i = 0; i < layer.in; ++i) grow[i] += dj * input[i];
      g.b[j] += dj;
    }
    if (li > 0 || input_grad) {
      std::vector<double> prev(layer.in, 0.0);
      for (std::size_t j = 0; j < layer.out; ++j) {
        const double* wrow = layer.w.data() + j * layer.in;
        const double dj = delta[j];
        for (std::size_t i = 0; i < layer.in; ++i) prev[i] += dj * wrow[i];
      }
      if (li == 0 && input_grad) *input_grad = prev;
      delta = std::move(prev);
    }
  }
  return grads;
}

AdamState AdamState::zeros_like(const Mlp& net) {
  AdamState s;
  Gradients z = Gradients::zeros_like(net);
  s.m = z.layers;
  s.v = z.layers;
  return s;
}

void adam_step(Mlp& net, const Gradients& grads, AdamState& state, double lr) {
  constexpr double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
  if (grads.layers.size() != net.layers.size()) throw ShapeError("gradient/net layer mismatch");
  state.step += 1;
  const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(state.step));
  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    auto update = [&](std::vector<double>& params, const std::vector<double>& g,
                      std::vector<double>& m, std::vector<double>& v) {
      for (std::size_t i = 0; i < params.size(); ++i) {
        m[i] = beta1 * m[i] + (1.0 - beta1) * g[i];
        v[i] = beta2 * v[i] + (1.0 - beta2) * g[i] * g[i];
        const double mhat = m[i] / bc1;
        const double vhat = v[i] / bc2;
        params[i] -= lr * mhat / (std::sqrt(vhat) + eps);
      }
    };
    update(net.layers[l].w, grads.layers[l].w, state.m[l].w, state.v[l].w);
    update(net.layers[l].b, grads.layers[l].b, state.m[l].b, state.v[l].b);
  }
  net.version += 1;
}

void soft_update(Mlp& target, const Mlp& online, double tau) {
  if (target.layers.size() != online.layers.size()) throw ShapeError("target/online mismatch");
  for (std::size_t l = 0; l < target.layers.size(); ++l) {
    if (target.layers[l].w.size() != online.layers[l].w.size()) {
      throw ShapeError("target/online layer shape mismatch");
    }
    for (std::size_t i = 0; i < target.layers[l].w.size(); ++i) {
      target.layers[l].w[i] += tau * (online.layers[l].w[i] - target.layers[l].w[i]);
    }
    for (std::size_t i = 0; i < target.layers[l].b.size(); ++i) {
      target.layers[l].b[i] += tau * (online.layers[l].b[i] - target.layers[l].b[i]);
    }
  }
  target.version += 1;
}

void hard_update(Mlp& target, const Mlp& online) {
  const std::uint64_t version = target.version + 1;
  target = online;
  target.version = version;
}

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0) throw SpecError("replay capacity must be positive");
  ring_.resize(capacity);
}

void ReplayBuffer::push(Transition t) {
  ring_[head_] = std::move(t);
  head_ = (head_ + 1) % capacity_;
  if (size_ < capacity_) ++size_;
}

const Transition& ReplayBuffer::at(std::size_t logical) const {
  if (logical >= size_) throw IndexError("replay index out of range");
  const std::size_t oldest = (head_ + capacity_ - size_) % capacity_;
  return ring_[(oldest + logical) % capacity_];
}

std::vector<Transition> ReplayBuffer::sample(std::size_t batch_size, std::mt19937_64& rng) const {
  if (size_ < batch_size) {
    throw NotReadyError("replay holds " + std::to_string(size_) + " < batch " +
                        std::to_string(batch_size));
  }
  // Partial Fisher-Yates over logical indices.
  std::vector<std::size_t> idx(size_);
  for (std::size_t i = 0; i < size_; ++i) idx[i] = i;
  std::vector<Transition> batch;
  batch.reserve(batch_size);
  for (std::size_t i = 0; i < batch_size; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, size_ - 1);
    std::swap(idx[i], idx[pick(rng)]);
    batch.push_back(at(idx[i]));
  }
  return batch;
}

namespace {
constexpr char kCkptMagic[8] = {'M', 'S', 'S', 'N', 'E', 'T', '0', '1'};

template <typename T>
void write_pod(std::ofstream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
void read_pod(std::ifstream& in, T& v) {
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw CheckpointError("truncated checkpoint");
}
}  // namespace

void save_checkpoint(const std::string& path,
                     const std::vector<std::pair<std::string, const Mlp*>>& nets) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw CheckpointError("cannot write '" + path + "'");
  out.write(kCkptMagic, sizeof(kCkptMagic));
  write_pod(out, static_cast<std::uint32_t>(nets.size()));
  for (const auto& [name, net] : nets) {
    write_pod(out, static_cast<std::uint32_t>(name.size()));
    out.write(name.data(), static_cast<std::streamsize>(name.size()));
    write_pod(out, static_cast<std::uint32_t>(net->layers.size()));
    for (const Mlp::Layer& l : net->layers) {
      write_pod(out, static_cast<std::uint32_t>(l.in));
      write_pod(out, static_cast<std::uint32_t>(l.out));
      write_pod(out, static_cast<std::uint8_t>(l.act));
      out.write(reinterpret_cast<const char*>(l.w.data()),
                static_cast<std::streamsize>(l.w.size() * sizeof(double)));
      out.write(reinterpret_cast<const char*>(l.b.data()),
                static_cast<std::streamsize>(l.b.size() * sizeof(double)));
    }
  }
  if (!out) throw CheckpointError("write failed for '" + path + "'");
}

std::vector<std::pair<std::string, Mlp>> load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError("cannot open '" + path + "'");
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kCkptMagic, sizeof(magic)) != 0) {
    throw CheckpointError("bad checkpoint magic in '" + path + "'");
  }
  std::uint32_t count = 0;
  read_pod(in, count);
  std::vector<std::pair<std::string, Mlp>> nets;
  nets.reserve(count);
  for (std::uint32_t n = 0; n < count; ++n) {
    std::uint32_t name_len = 0;
    read_pod(in, name_len);
    std::string name(name_len, '\0');
    in.read(name.data(), name_len);
    if (!in) throw CheckpointError("truncated checkpoint");
    std::uint32_t layer_count = 0;
    read_pod(in, layer_count);
    Mlp net;
    net.layers.resize(layer_count);
    for (std::uint32_t l = 0; l < layer_count; ++l) {
      std::uint32_t in_dim = 0, out_dim = 0;
      std::uint8_t act = 0;
      read_pod(in, in_dim);
      read_pod(in, out_dim);
      read_pod(in, act);
      Mlp::Layer& layer = net.layers[l];
      layer.in = in_dim;
      layer.out = out_dim;
      layer.act = static_cast<Activation>(act);
      layer.w.resize(static_cast<std::size_t>(in_dim) * out_dim);
      layer.b.resize(out_dim);
      in.read(reinterpret_cast<char*>(layer.w.data()),
              static_cast<std::streamsize>(layer.w.size() * sizeof(double)));
      in.read(reinterpret_cast<char*>(layer.b.data()),
              static_cast<std::streamsize>(layer.b.size() * sizeof(double)));
      if (!in) throw CheckpointError("truncated checkpoint");
    }
    nets.emplace_back(std::move(name), std::move(net));
  }
  return nets;
}

}  // namespace mss
