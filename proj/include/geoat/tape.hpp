#pragma once

#include <functional>
#include <span>
#include <vector>

#include "geoat/tensor.hpp"

namespace geoat::nn {

/// Define-by-run reverse-mode tape. Nodes are appended in execution order
/// (already topological); backward visits each node exactly once in reverse.
/// A tape and its tensors are confined to one worker.
///
/// Every op validates shapes (ShapeMismatch) and rejects non-finite outputs
/// (NumericFault). Gradients flow only to nodes created with param() or
/// derived from them; unreached parameters end up with zero gradient.
class Tape {
 public:
  int constant(Tensor v) { return push(std::move(v), false, "constant"); }
  int param(Tensor v) { return push(std::move(v), true, "param"); }

  const Tensor& value(int id) const { return nodes_[(size_t)id].value; }
  const Tensor& grad(int id) const;
  int size() const { return (int)nodes_.size(); }

  // Elementwise binary, numpy-style broadcasting.
  int add(int a, int b);
  int sub(int a, int b);
  int mul(int a, int b);

  int matmul(int a, int b);          // (m,k) x (k,n) -> (m,n)
  int transpose(int a);              // rank-2
  int concat(std::span<const int> parts, int axis);
  int slice(int a, int axis, Eigen::Index start, Eigen::Index len);
  int reshape(int a, Shape s);

  int mean(int a, int axis);         // drops the axis
  int mean_all(int a);               // scalar
  int sum_all(int a);                // scalar

  int relu(int a);
  int sigmoid(int a);
  int softplus(int a);
  int softmax_last(int a);           // normalizes over the last axis
  int layer_norm_last(int a, double eps = 1e-5);  // zero-mean unit-variance rows

  int scale(int a, double c);
  int neg(int a) { return scale(a, -1.0); }

  /// out[i] = a.flat[flat_indices[i]]; gradient scatter-adds back.
  int gather(int a, std::vector<Eigen::Index> flat_indices, Shape out_shape);

  /// Row lookup into a rank-2 table: out row r = table row rows[r].
  int embed_lookup(int table, std::vector<Eigen::Index> rows);

  /// Numerically stable mean BCE: mean(max(z,0) - z*y + log1p(exp(-|z|))).
  /// y is treated as a constant target.
  int bce_with_logits(int z, int y);

  /// Populates gradients for all reachable parameters; the loss must be a
  /// single element (NonScalarLoss otherwise).
  void backward(int loss_id);

 private:
  struct Node {
    Tensor value;
    Tensor grad;
    bool requires_grad = false;
    const char* op = "leaf";
    std::function<void(Tape&)> backward;
  };

  int push(Tensor v, bool requires_grad, const char* op);
  bool rg(int id) const { return nodes_[(size_t)id].requires_grad; }
  Tensor& grad_buf(int id);
  void accumulate(int id, const Eigen::ArrayXd& g);

  std::vector<Node> nodes_;
  friend class TapeTestPeer;
};

}  // namespace geoat::nn
