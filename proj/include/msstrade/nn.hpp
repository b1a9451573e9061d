#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace mss {

enum class Activation { Relu, Tanh, Identity };

// Fully-connected net with 64-bit weights. Weights are row-major per output
// neuron: w[j * in + i]. `version` counts parameter mutations so stale
// forward caches can be rejected.
struct Mlp {
  struct Layer {
    std::size_t in = 0;
    std::size_t out = 0;
    std::vector<double> w;
    std::vector<double> b;
    Activation act = Activation::Identity;
  };

  std::vector<Layer> layers;
  std::uint64_t version = 0;

  // dims has layer_count+1 entries; acts one per layer. He init for relu
  // layers, Xavier for tanh/identity.
  static Mlp make(const std::vector<std::size_t>& dims, const std::vector<Activation>& acts,
                  std::uint64_t seed);

  std::size_t input_size() const { return layers.front().in; }
  std::size_t output_size() const { return layers.back().out; }
  std::size_t param_count() const;
};

// Per-layer activations captured during forward; `post[0]` is the input.
struct ForwardCache {
  std::vector<std::vector<double>> pre;
  std::vector<std::vector<double>> post;
  std::uint64_t version = 0;
};

std::vector<double> forward(const Mlp& net, std::span<const double> x,
                            ForwardCache* cache = nullptr);

// Same shapes as the net's layers.
struct Gradients {
  struct Layer {
    std::vector<double> w;
    std::vector<double> b;
  };
  std::vector<Layer> layers;

  static Gradients zeros_like(const Mlp& net);
  void add(const Gradients& other);
  void scale(double s);
};

// Backpropagates `upstream` (dLoss/dOutput) through the cached forward pass.
// Throws CacheError when the cache predates a parameter update. When
// `input_grad` is non-null it receives dLoss/dInput.
Gradients backward(const Mlp& net, const ForwardCache& cache, std::span<const double> upstream,
                   std::vector<double>* input_grad = nullptr);

struct AdamState {
  std::size_t step = 0;
  std::vector<Gradients::Layer> m;
  std::vector<Gradients::Layer> v;

  static AdamState zeros_like(const Mlp& net);
};

// Standard Adam (beta1 0.9, beta2 0.999, eps 1e-8); bumps net.version.
void adam_step(Mlp& net, const Gradients& grads, AdamState& state, double lr);

// target <- tau * online + (1 - tau) * target, elementwise.
void soft_update(Mlp& target, const Mlp& online, double tau);

void hard_update(Mlp& target, const Mlp& online);

struct Transition {
  std::vector<double> state;
  std::vector<double> action;
  double reward = 0;
  std::vector<double> next_state;
  bool done = false;
};

// Fixed-capacity ring. Sampling is uniform without replacement within a
// batch and fully determined by the caller's RNG state.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity);

  void push(Transition t);
  std::size_t size() const { return size_; }
  std::size_t capacity() const { return capacity_; }
  const Transition& at(std::size_t logical) const;  // 0 = oldest

  std::vector<Transition> sample(std::size_t batch_size, std::mt19937_64& rng) const;

 private:
  std::size_t capacity_;
  std::size_t head_ = 0;  // next write slot
  std::size_t size_ = 0;
  std::vector<Transition> ring_;
};

// Versioned binary checkpoint of named nets; load bit-round-trips.
void save_checkpoint(const std::string& path,
                     const std::vector<std::pair<std::string, const Mlp*>>& nets);
std::vector<std::pair<std::string, Mlp>> load_checkpoint(const std::string& path);

}  // namespace mss
