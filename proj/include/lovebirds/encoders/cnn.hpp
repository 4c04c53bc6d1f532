#pragma once

#include <string>
#include <vector>

#include "lovebirds/numkit/ops.hpp"
#include "lovebirds/numkit/param_store.hpp"

namespace lovebirds::encoders {

struct CnnNames {
  std::string F = "cnn.F";  // (width*d) x filters
  std::string b = "cnn.b";  // 1 x filters
};

inline constexpr int kCnnWidth = 3;

template <typename S>
void declare_cnn(ParamStore<S>& store, const CnnNames& nm, Index d, Index filters, double stddev, Rng& rng) {
  store.add_gaussian(nm.F, kCnnWidth * d, filters, stddev, rng);
  store.add_gaussian(nm.b, 1, filters, stddev, rng);
}

template <typename S>
struct CnnTrace {
  Index length = 0;           // sequence rows after zero-padding to the width
  Mat<S> windows;             // (length-width+1) x (width*d)
  Mat<S> pre;                 // windows F + b
  std::vector<Index> argmax;  // per filter
  RowVec<S> out;              // max over time of relu(pre)
};

// Width-3 convolution over the rows of x, ReLU, max over time. Sequences
// shorter than the width are zero-padded at the end.
template <typename S>
CnnTrace<S> cnn_forward(const Mat<S>& x, const Mat<S>& F, const Mat<S>& b) {
  const Index d = x.cols();
  if (F.rows() != kCnnWidth * d || b.rows() != 1 || b.cols() != F.cols())
    throw DimensionError("cnn: input width " + std::to_string(d) + " with F " + shape_str(F) + ", b " +
                         shape_str(b));
  CnnTrace<S> tr;
  tr.length = std::max<Index>(x.rows(), kCnnWidth);
  const Index n_windows = tr.length - kCnnWidth + 1;
  tr.windows = Mat<S>::Zero(n_windows, kCnnWidth * d);
  for (Index i = 0; i < n_windows; ++i)
    for (Index k = 0; k < kCnnWidth; ++k)
      if (i + k < x.rows()) tr.windows.block(i, k * d, 1, d) = x.row(i + k);
  tr.pre = affine<S>(tr.windows, F, b);
  tr.argmax.resize(static_cast<std::size_t>(F.cols()));
  tr.out.resize(F.cols());
  for (Index f = 0; f < F.cols(); ++f) {
    Index best = 0;
    tr.pre.col(f).maxCoeff(&best);
    tr.argmax[static_cast<std::size_t>(f)] = best;
    tr.out(f) = std::max(S(0), tr.pre(best, f));
  }
  return tr;
}

// Returns d(x) with the original row count.
template <typename S>
Mat<S> cnn_backward(const CnnTrace<S>& tr, const RowVec<S>& d_out, Index rows, const Mat<S>& F, Mat<S>& dF,
                    Mat<S>& db) {
  const Index d = F.rows() / kCnnWidth;
  Mat<S> d_pre = Mat<S>::Zero(tr.pre.rows(), tr.pre.cols());
  for (Index f = 0; f < F.cols(); ++f) {
    Index i = tr.argmax[static_cast<std::size_t>(f)];
    if (tr.pre(i, f) > S(0)) d_pre(i, f) = d_out(f);
  }
  Mat<S> d_windows = affine_backward<S>(tr.windows, F, d_pre, dF, db);
  Mat<S> dx = Mat<S>::Zero(rows, d);
  for (Index i = 0; i < d_windows.rows(); ++i)
    for (Index k = 0; k < kCnnWidth; ++k)
      if (i + k < rows) dx.row(i + k) += d_windows.block(i, k * d, 1, d);
  return dx;
}

template <typename S>
RowVec<S> cnn_encode(const Mat<S>& x, const Mat<S>& F, const Mat<S>& b) {
  return cnn_forward<S>(x, F, b).out;
}

}  // namespace lovebirds::encoders
