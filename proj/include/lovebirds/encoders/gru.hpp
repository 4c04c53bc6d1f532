#pragma once

#include <string>
#include <vector>

#include "lovebirds/numkit/ops.hpp"
#include "lovebirds/numkit/param_store.hpp"

namespace lovebirds::encoders {

// Row-vector convention: x_t is 1 x d, h_t is 1 x n.
//   z_t  = sigmoid(x_t W_z + h_{t-1} U_z + b_z)
//   r_t  = sigmoid(x_t W_r + h_{t-1} U_r + b_r)
//   h~_t = tanh(x_t W_h + (r_t * h_{t-1}) U_h + b_h)
//   h_t  = z_t * h_{t-1} + (1 - z_t) * h~_t
// with * element-wise. Steps at or past a sequence's length copy the state.
struct GruNames {
  std::string W_z, W_r, W_h, U_z, U_r, U_h, b_z, b_r, b_h;

  static GruNames with_prefix(const std::string& prefix) {
    return {prefix + ".W_z", prefix + ".W_r", prefix + ".W_h", prefix + ".U_z", prefix + ".U_r",
            prefix + ".U_h", prefix + ".b_z", prefix + ".b_r", prefix + ".b_h"};
  }
};

template <typename S>
void declare_gru(ParamStore<S>& store, const GruNames& nm, Index d, Index n, double stddev, Rng& rng) {
  for (const auto* name : {&nm.W_z, &nm.W_r, &nm.W_h}) store.add_gaussian(*name, d, n, stddev, rng);
  for (const auto* name : {&nm.U_z, &nm.U_r, &nm.U_h}) store.add_gaussian(*name, n, n, stddev, rng);
  for (const auto* name : {&nm.b_z, &nm.b_r, &nm.b_h}) store.add_gaussian(*name, 1, n, stddev, rng);
}

template <typename S>
struct GruWeights {
  const Mat<S>&W_z, &W_r, &W_h, &U_z, &U_r, &U_h, &b_z, &b_r, &b_h;

  GruWeights(const ParamStore<S>& store, const GruNames& nm)
      : W_z(store.value(nm.W_z)), W_r(store.value(nm.W_r)), W_h(store.value(nm.W_h)),
        U_z(store.value(nm.U_z)), U_r(store.value(nm.U_r)), U_h(store.value(nm.U_h)),
        b_z(store.value(nm.b_z)), b_r(store.value(nm.b_r)), b_h(store.value(nm.b_h)) {}

  Index input_dim() const { return W_z.rows(); }
  Index hidden() const { return W_z.cols(); }

  void check() const {
    const Index d = input_dim(), n = hidden();
    auto expect = [](const Mat<S>& m, Index r, Index c, const char* what) {
      if (m.rows() != r || m.cols() != c)
        throw DimensionError(std::string("gru: ") + what + " is " + shape_str(m) + ", expected (" +
                             std::to_string(r) + "x" + std::to_string(c) + ")");
    };
    expect(W_r, d, n, "W_r");
    expect(W_h, d, n, "W_h");
    expect(U_z, n, n, "U_z");
    expect(U_r, n, n, "U_r");
    expect(U_h, n, n, "U_h");
    expect(b_z, 1, n, "b_z");
    expect(b_r, 1, n, "b_r");
    expect(b_h, 1, n, "b_h");
  }
};

template <typename S>
struct GruGrads {
  Mat<S>&W_z, &W_r, &W_h, &U_z, &U_r, &U_h, &b_z, &b_r, &b_h;

  GruGrads(ParamStore<S>& store, const GruNames& nm)
      : W_z(store.grad(nm.W_z)), W_r(store.grad(nm.W_r)), W_h(store.grad(nm.W_h)),
        U_z(store.grad(nm.U_z)), U_r(store.grad(nm.U_r)), U_h(store.grad(nm.U_h)),
        b_z(store.grad(nm.b_z)), b_r(store.grad(nm.b_r)), b_h(store.grad(nm.b_h)) {}
};

// Forward record of a batch of B sequences, time-major.
template <typename S>
struct GruTrace {
  std::vector<int> lengths;    // B
  std::vector<Mat<S>> x;       // T of B x d
  std::vector<Mat<S>> h;       // T of B x n, state after step t
  std::vector<Mat<S>> z, r, c; // gates and candidate, T of B x n

  Index batch() const { return static_cast<Index>(lengths.size()); }
  int steps() const { return static_cast<int>(x.size()); }
  // State after the last valid step of sequence b (zero when its length is 0).
  RowVec<S> last(Index b) const { return h.empty() ? RowVec<S>() : RowVec<S>(h.back().row(b)); }
};

template <typename S>
GruTrace<S> gru_forward(std::vector<Mat<S>> xs, const std::vector<int>& lengths, const GruWeights<S>& p) {
  p.check();
  const Index B = static_cast<Index>(lengths.size());
  const Index n = p.hidden();
  GruTrace<S> tr;
  tr.lengths = lengths;
  const int T = static_cast<int>(xs.size());
  for (int t = 0; t < T; ++t) {
    if (xs[static_cast<std::size_t>(t)].rows() != B || xs[static_cast<std::size_t>(t)].cols() != p.input_dim())
      throw DimensionError("gru: step input " + shape_str(xs[static_cast<std::size_t>(t)]) +
                           " does not match batch " + std::to_string(B) + " x d=" + std::to_string(p.input_dim()));
  }
  tr.x = std::move(xs);
  tr.h.reserve(static_cast<std::size_t>(T));
  Mat<S> prev = Mat<S>::Zero(B, n);
  for (int t = 0; t < T; ++t) {
    const Mat<S>& x = tr.x[static_cast<std::size_t>(t)];
    Mat<S> az = x * p.W_z + prev * p.U_z;
    az.rowwise() += p.b_z.row(0);
    Mat<S> ar = x * p.W_r + prev * p.U_r;
    ar.rowwise() += p.b_r.row(0);
    Mat<S> z = sigmoid(az);
    Mat<S> r = sigmoid(ar);
    Mat<S> ac = x * p.W_h + r.cwiseProduct(prev) * p.U_h;
    ac.rowwise() += p.b_h.row(0);
    Mat<S> c = tanh(ac);
    Mat<S> next = z.cwiseProduct(prev) + (Mat<S>::Ones(B, n) - z).cwiseProduct(c);
    for (Index b = 0; b < B; ++b)
      if (t >= lengths[static_cast<std::size_t>(b)]) next.row(b) = prev.row(b);
    tr.z.push_back(std::move(z));
    tr.r.push_back(std::move(r));
    tr.c.push_back(std::move(c));
    tr.h.push_back(next);
    prev = std::move(next);
  }
  return tr;
}

// d_h[t] is the gradient w.r.t. the state output at step t (may be empty to
// mean zero). Accumulates parameter gradients and returns d_x per step.
template <typename S>
std::vector<Mat<S>> gru_backward(const GruTrace<S>& tr, const std::vector<Mat<S>>& d_h, const GruWeights<S>& p,
                                 GruGrads<S>& g) {
  const Index B = tr.batch();
  const Index n = p.hidden();
  const int T = tr.steps();
  std::vector<Mat<S>> d_x(static_cast<std::size_t>(T));
  Mat<S> carry = Mat<S>::Zero(B, n);
  for (int t = T - 1; t >= 0; --t) {
    const auto ts = static_cast<std::size_t>(t);
    Mat<S> dh = carry;
    if (ts < d_h.size() && d_h[ts].size() != 0) dh += d_h[ts];

    Mat<S> active = Mat<S>::Zero(B, 1);
    for (Index b = 0; b < B; ++b) active(b, 0) = t < tr.lengths[static_cast<std::size_t>(b)] ? S(1) : S(0);
    Mat<S> dh_act = dh.array().colwise() * active.col(0).array();

    const Mat<S> prev = t > 0 ? tr.h[ts - 1] : Mat<S>::Zero(B, n);
    const Mat<S>& z = tr.z[ts];
    const Mat<S>& r = tr.r[ts];
    const Mat<S>& c = tr.c[ts];
    const Mat<S>& x = tr.x[ts];

    Mat<S> dz = dh_act.cwiseProduct(prev - c);
    Mat<S> dc = dh_act.cwiseProduct(Mat<S>::Ones(B, n) - z);
    Mat<S> dprev = dh_act.cwiseProduct(z);

    Mat<S> dac = dc.array() * (S(1) - c.array().square());
    Mat<S> rprev = r.cwiseProduct(prev);
    g.W_h.noalias() += x.transpose() * dac;
    g.U_h.noalias() += rprev.transpose() * dac;
    g.b_h += dac.colwise().sum();
    Mat<S> d_rprev = dac * p.U_h.transpose();
    Mat<S> dr = d_rprev.cwiseProduct(prev);
    dprev += d_rprev.cwiseProduct(r);
    Mat<S> dx = dac * p.W_h.transpose();

    Mat<S> daz = dz.array() * z.array() * (S(1) - z.array());
    g.W_z.noalias() += x.transpose() * daz;
    g.U_z.noalias() += prev.transpose() * daz;
    g.b_z += daz.colwise().sum();
    dprev.noalias() += daz * p.U_z.transpose();
    dx.noalias() += daz * p.W_z.transpose();

    Mat<S> dar = dr.array() * r.array() * (S(1) - r.array());
    g.W_r.noalias() += x.transpose() * dar;
    g.U_r.noalias() += prev.transpose() * dar;
    g.b_r += dar.colwise().sum();
    dprev.noalias() += dar * p.U_r.transpose();
    dx.noalias() += dar * p.W_r.transpose();

    // inactive rows pass their gradient straight through to the previous state
    for (Index b = 0; b < B; ++b)
      if (active(b, 0) == S(0)) dprev.row(b) = dh.row(b);
    carry = std::move(dprev);
    d_x[ts] = std::move(dx);
  }
  return d_x;
}

}  // namespace lovebirds::encoders
