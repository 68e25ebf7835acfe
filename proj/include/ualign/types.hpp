// Core domain types: responses, multisets, single-output policies and their
// k-fold product / mixture forms. Everything is immutable after construction
// and safe to share across threads.
#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace ualign {

using ResponseId = int;

// Multiset of response ids with multiplicities >= 1.
class Multiset {
 public:
  Multiset() = default;

  static Multiset single(ResponseId y) {
    Multiset s;
    s.add(y);
    return s;
  }

  static Multiset from_counts(const std::vector<int>& counts) {
    Multiset s;
    for (ResponseId y = 0; y < static_cast<int>(counts.size()); ++y) {
      if (counts[y] > 0) s.add(y, counts[y]);
    }
    return s;
  }

  void add(ResponseId y, int count = 1) {
    if (y < 0) throw std::invalid_argument("Multiset: negative response id");
    if (count <= 0) throw std::invalid_argument("Multiset: count must be >= 1");
    counts_[y] += count;
    size_ += count;
  }

  int size() const { return size_; }
  bool empty() const { return size_ == 0; }
  const std::map<ResponseId, int>& counts() const { return counts_; }

  // Largest id present; multiset must be nonempty.
  ResponseId max_id() const {
    if (empty()) throw std::invalid_argument("Multiset: empty");
    return counts_.rbegin()->first;
  }

  std::vector<int> counts_vector(int num_responses) const {
    std::vector<int> v(num_responses, 0);
    for (const auto& [y, c] : counts_) {
      if (y >= num_responses)
        throw std::invalid_argument("Multiset: id outside response universe");
      v[y] = c;
    }
    return v;
  }

  std::string to_string() const {
    std::string out = "{";
    bool first = true;
    for (const auto& [y, c] : counts_) {
      if (!first) out += ";";
      out += std::to_string(y) + ":" + std::to_string(c);
      first = false;
    }
    out += "}";
    return out;
  }

  // Multiset union: multiplicities add.
  friend Multiset operator+(const Multiset& a, const Multiset& b) {
    Multiset s = a;
    for (const auto& [y, c] : b.counts_) s.add(y, c);
    return s;
  }

  bool operator==(const Multiset&) const = default;

 private:
  std::map<ResponseId, int> counts_;
  int size_ = 0;
};

// Distribution over the response universe. The constructor accepts vectors
// whose entries sum to 1 within 1e-9 and rescales exactly once; anything
// further off is rejected as a genuine error.
class Policy {
 public:
  explicit Policy(std::vector<double> probs) : probs_(std::move(probs)) {
    if (probs_.empty()) throw std::invalid_argument("Policy: empty support");
    double sum = 0.0;
    for (double p : probs_) {
      if (!(p >= 0.0) || !std::isfinite(p))
        throw std::invalid_argument("Policy: entries must be finite and >= 0");
      sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9)
      throw std::invalid_argument("Policy: entries sum to " +
                                  std::to_string(sum) + ", expected 1");
    for (double& p : probs_) p /= sum;
  }

  static Policy uniform(int n) {
    return Policy(std::vector<double>(n, 1.0 / n));
  }

  static Policy point_mass(int n, ResponseId y) {
    std::vector<double> p(n, 0.0);
    p.at(y) = 1.0;
    return Policy(std::move(p));
  }

  int num_responses() const { return static_cast<int>(probs_.size()); }
  double operator[](ResponseId y) const { return probs_[y]; }
  const std::vector<double>& probs() const { return probs_; }

  double total_variation(const Policy& other) const {
    if (other.num_responses() != num_responses())
      throw std::invalid_argument("Policy: dimension mismatch");
    double tv = 0.0;
    for (int y = 0; y < num_responses(); ++y)
      tv += std::abs(probs_[y] - other.probs_[y]);
    return tv / 2.0;
  }

  bool operator==(const Policy&) const = default;

 private:
  std::vector<double> probs_;
};

// k independent samples from a single base policy.
struct ProductPolicy {
  Policy base;
  int k;

  ProductPolicy(Policy base_, int k_) : base(std::move(base_)), k(k_) {
    if (k < 1) throw std::invalid_argument("ProductPolicy: k must be >= 1");
  }
};

// Weighted mixture over product policies sharing the same k. Sampling picks a
// component by weight and then draws k i.i.d. responses from its base.
class MixtureOfProducts {
 public:
  MixtureOfProducts(std::vector<double> weights,
                    std::vector<ProductPolicy> components)
      : weights_(std::move(weights)), components_(std::move(components)) {
    if (components_.empty() || weights_.size() != components_.size())
      throw std::invalid_argument("MixtureOfProducts: bad component list");
    double sum = 0.0;
    for (double w : weights_) {
      if (!(w >= 0.0)) throw std::invalid_argument("MixtureOfProducts: weight < 0");
      sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-9)
      throw std::invalid_argument("MixtureOfProducts: weights sum to " +
                                  std::to_string(sum));
    for (double& w : weights_) w /= sum;
    for (const auto& c : components_) {
      if (c.k != components_[0].k)
        throw std::invalid_argument("MixtureOfProducts: components differ in k");
      if (c.base.num_responses() != components_[0].base.num_responses())
        throw std::invalid_argument("MixtureOfProducts: dimension mismatch");
    }
  }

  explicit MixtureOfProducts(ProductPolicy single)
      : MixtureOfProducts({1.0}, {std::move(single)}) {}

  int k() const { return components_[0].k; }
  int num_responses() const { return components_[0].base.num_responses(); }
  int num_components() const { return static_cast<int>(components_.size()); }
  const std::vector<double>& weights() const { return weights_; }
  const ProductPolicy& component(int i) const { return components_[i]; }

 private:
  std::vector<double> weights_;
  std::vector<ProductPolicy> components_;
};

}  // namespace ualign
