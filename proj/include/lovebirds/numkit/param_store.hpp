#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "lovebirds/numkit/rng.hpp"
#include "lovebirds/numkit/types.hpp"

namespace lovebirds {

class IncompleteBackwardError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

template <typename S>
struct ParamEntry {
  Mat<S> value;
  Mat<S> grad;
  Mat<S> m;  // Adam first moment
  Mat<S> v;  // Adam second moment
  std::uint64_t step = 0;
  bool trainable = true;
  bool touched = false;  // set once backward wrote into grad
};

// Named trainable arrays. Iteration is sorted by name (std::map) so every
// traversal (Adam, checkpoints, gradient checks) is deterministic.
template <typename S>
class ParamStore {
 public:
  using Entry = ParamEntry<S>;

  Mat<S>& add(const std::string& name, Mat<S> value, bool trainable = true) {
    if (entries_.count(name)) throw ParameterError("ParamStore: duplicate parameter " + name);
    Entry e;
    e.grad = Mat<S>::Zero(value.rows(), value.cols());
    e.m = e.grad;
    e.v = e.grad;
    e.value = std::move(value);
    e.trainable = trainable;
    return entries_.emplace(name, std::move(e)).first->second.value;
  }

  // Gaussian(0, stddev) initialized parameter.
  Mat<S>& add_gaussian(const std::string& name, Index rows, Index cols, double stddev, Rng& rng,
                       bool trainable = true) {
    Mat<S> value(rows, cols);
    for (Index i = 0; i < value.size(); ++i) value.data()[i] = static_cast<S>(rng.normal(0.0, stddev));
    return add(name, std::move(value), trainable);
  }

  bool contains(const std::string& name) const { return entries_.count(name) != 0; }

  const Mat<S>& value(const std::string& name) const { return entry(name).value; }
  Mat<S>& value(const std::string& name) { return entry(name).value; }

  // Gradient accumulator; marks the entry as reached by backward.
  Mat<S>& grad(const std::string& name) {
    Entry& e = entry(name);
    e.touched = true;
    return e.grad;
  }
  const Mat<S>& peek_grad(const std::string& name) const { return entry(name).grad; }

  Entry& entry(const std::string& name) {
    auto it = entries_.find(name);
    if (it == entries_.end()) throw ParameterError("ParamStore: unknown parameter " + name);
    return it->second;
  }
  const Entry& entry(const std::string& name) const {
    auto it = entries_.find(name);
    if (it == entries_.end()) throw ParameterError("ParamStore: unknown parameter " + name);
    return it->second;
  }

  std::map<std::string, Entry>& entries() { return entries_; }
  const std::map<std::string, Entry>& entries() const { return entries_; }

  std::vector<std::string> names() const {
    std::vector<std::string> out;
    for (const auto& [name, e] : entries_) out.push_back(name);
    return out;
  }

  std::size_t size() const { return entries_.size(); }

  Index scalar_count(bool trainable_only = false) const {
    Index n = 0;
    for (const auto& [name, e] : entries_)
      if (!trainable_only || e.trainable) n += e.value.size();
    return n;
  }

  void zero_grad() {
    for (auto& [name, e] : entries_) {
      e.grad.setZero();
      e.touched = false;
    }
  }

  double grad_norm() const {
    double sq = 0.0;
    for (const auto& [name, e] : entries_)
      if (e.trainable) sq += static_cast<double>(e.grad.squaredNorm());
    return std::sqrt(sq);
  }

  // Rescales all gradients so their global L2 norm is at most max_norm.
  // Returns the norm before clipping.
  double clip_grad_norm(double max_norm) {
    double norm = grad_norm();
    if (max_norm > 0.0 && norm > max_norm) {
      S factor = static_cast<S>(max_norm / norm);
      for (auto& [name, e] : entries_)
        if (e.trainable) e.grad *= factor;
    }
    return norm;
  }

  bool values_equal(const ParamStore& other) const {
    if (entries_.size() != other.entries_.size()) return false;
    auto it = other.entries_.begin();
    for (const auto& [name, e] : entries_) {
      if (name != it->first || e.value.rows() != it->second.value.rows() ||
          e.value.cols() != it->second.value.cols() || e.value != it->second.value)
        return false;
      ++it;
    }
    return true;
  }

  void copy_values_from(const ParamStore& other) {
    for (auto& [name, e] : entries_) {
      const Mat<S>& src = other.value(name);
      if (src.rows() != e.value.rows() || src.cols() != e.value.cols())
        throw DimensionError("ParamStore: shape mismatch copying " + name);
      e.value = src;
    }
  }

 private:
  std::map<std::string, Entry> entries_;
};

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double l2 = 0.0;
};

// One Adam update with bias correction over every trainable entry. The L2 term
// l2 * theta is added to the gradient before the moment update. Gradients are
// zeroed afterwards.
template <typename S>
void adam_step(ParamStore<S>& store, const AdamConfig& cfg) {
  for (const auto& [name, e] : store.entries()) {
    if (e.trainable && !e.touched)
      throw IncompleteBackwardError("adam_step: no gradient for parameter " + name);
  }
  for (auto& [name, e] : store.entries()) {
    if (!e.trainable) continue;
    ++e.step;
    const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(e.step));
    const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(e.step));
    const S b1 = static_cast<S>(cfg.beta1), b2 = static_cast<S>(cfg.beta2);
    const S l2 = static_cast<S>(cfg.l2);
    const S step = static_cast<S>(cfg.lr / bc1);
    const S inv_bc2 = static_cast<S>(1.0 / bc2);
    const S eps = static_cast<S>(cfg.eps);
    S* theta = e.value.data();
    S* g = e.grad.data();
    S* m = e.m.data();
    S* v = e.v.data();
    for (Index i = 0; i < e.value.size(); ++i) {
      S gi = g[i] + l2 * theta[i];
      m[i] = b1 * m[i] + (S(1) - b1) * gi;
      v[i] = b2 * v[i] + (S(1) - b2) * gi * gi;
      theta[i] -= step * m[i] / (std::sqrt(v[i] * inv_bc2) + eps);
    }
  }
  store.zero_grad();
}

}  // namespace lovebirds
