#include "geoat/tape.hpp"

#include <cmath>

namespace geoat::nn {

namespace {

// Visit every output element of a broadcast binary op, providing flat offsets
// into both inputs. Odometer-style increments, no per-element div/mod.
template <class F>
void broadcast_visit(const Shape& out, const Shape& a, const Shape& b, F&& f) {
  const size_t rank = out.size();
  if (rank == 0) {
    f(0, 0, 0);
    return;
  }
  const auto as = strides_of(a);
  const auto bs = strides_of(b);
  std::vector<Eigen::Index> ast(rank, 0), bst(rank, 0);
  for (size_t i = 0; i < rank; ++i) {
    const size_t off_a = rank - a.size();
    const size_t off_b = rank - b.size();
    if (i >= off_a && a[i - off_a] != 1) ast[i] = as[i - off_a];
    if (i >= off_b && b[i - off_b] != 1) bst[i] = bs[i - off_b];
  }
  std::vector<Eigen::Index> idx(rank, 0);
  Eigen::Index ao = 0, bo = 0;
  const Eigen::Index n = shape_numel(out);
  for (Eigen::Index o = 0; o < n; ++o) {
    f(o, ao, bo);
    for (int d = (int)rank - 1; d >= 0; --d) {
      ++idx[(size_t)d];
      ao += ast[(size_t)d];
      bo += bst[(size_t)d];
      if (idx[(size_t)d] < out[(size_t)d]) break;
      idx[(size_t)d] = 0;
      ao -= ast[(size_t)d] * out[(size_t)d];
      bo -= bst[(size_t)d] * out[(size_t)d];
    }
  }
}

// (outer, axis_len, inner) decomposition around one axis.
struct AxisSplit {
  Eigen::Index outer, n, inner;
};

AxisSplit split_axis(const Shape& s, int axis) {
  if (axis < 0 || axis >= (int)s.size()) {
    throw ShapeMismatch("axis " + std::to_string(axis) + " out of range for " + shape_str(s));
  }
  AxisSplit sp{1, s[(size_t)axis], 1};
  for (int i = 0; i < axis; ++i) sp.outer *= s[(size_t)i];
  for (size_t i = (size_t)axis + 1; i < s.size(); ++i) sp.inner *= s[i];
  return sp;
}

double stable_softplus(double x) {
  if (x > 30.0) return x;
  if (x < -30.0) return std::exp(x);
  return std::log1p(std::exp(x));
}

double sigmoid_scalar(double x) {
  if (x >= 0.0) {
    const double e = std::exp(-x);
    return 1.0 / (1.0 + e);
  }
  const double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace

int Tape::push(Tensor v, bool requires_grad, const char* op) {
  if (v.data.size() != shape_numel(v.shape)) {
    throw ShapeMismatch(std::string(op) + ": buffer does not match shape " +
                        shape_str(v.shape));
  }
  if (!v.data.allFinite()) {
    throw NumericFault(std::string(op) + " produced a non-finite value, shape " +
                       shape_str(v.shape));
  }
  nodes_.push_back(Node{std::move(v), Tensor{}, requires_grad, op, nullptr});
  return (int)nodes_.size() - 1;
}

Tensor& Tape::grad_buf(int id) {
  Node& n = nodes_[(size_t)id];
  if (n.grad.data.size() == 0 && n.value.numel() > 0) {
    n.grad = Tensor::zeros(n.value.shape);
  } else if (n.grad.data.size() == 0) {
    n.grad = Tensor{n.value.shape, Eigen::ArrayXd::Zero(n.value.numel())};
  }
  return n.grad;
}

const Tensor& Tape::grad(int id) const { return nodes_[(size_t)id].grad; }

void Tape::accumulate(int id, const Eigen::ArrayXd& g) {
  if (!rg(id)) return;
  grad_buf(id).data += g;
}

int Tape::add(int a, int b) {
  const Tensor& A = value(a);
  const Tensor& B = value(b);
  const Shape os = broadcast_shape(A.shape, B.shape);
  Tensor out = Tensor::zeros(os);
  if (A.shape == B.shape) {
    out.data = A.data + B.data;
  } else {
    broadcast_visit(os, A.shape, B.shape, [&](Eigen::Index o, Eigen::Index ao,
                                              Eigen::Index bo) {
      out.data[o] = A.data[ao] + B.data[bo];
    });
  }
  const int id = push(std::move(out), rg(a) || rg(b), "add");
  if (!nodes_.back().requires_grad) return id;
  nodes_.back().backward = [a, b, id](Tape& t) {
    const Tensor& g = t.grad(id);
    const Shape& os2 = t.value(id).shape;
    if (t.value(a).shape == t.value(b).shape) {
      t.accumulate(a, g.data);
      t.accumulate(b, g.data);
      return;
    }
    const bool ra = t.rg(a), rb = t.rg(b);
    Eigen::ArrayXd* da = ra ? &t.grad_buf(a).data : nullptr;
    Eigen::ArrayXd* db = rb ? &t.grad_buf(b).data : nullptr;
    broadcast_visit(os2, t.value(a).shape, t.value(b).shape,
                    [&](Eigen::Index o, Eigen::Index ao, Eigen::Index bo) {
                      if (da) (*da)[ao] += g.data[o];
                      if (db) (*db)[bo] += g.data[o];
                    });
  };
  return id;
}

int Tape::sub(int a, int b) {
  const Tensor& A = value(a);
  const Tensor& B = value(b);
  const Shape os = broadcast_shape(A.shape, B.shape);
  Tensor out = Tensor::zeros(os);
  if (A.shape == B.shape) {
    out.data = A.data - B.data;
  } else {
    broadcast_visit(os, A.shape, B.shape, [&](Eigen::Index o, Eigen::Index ao,
                                              Eigen::Index bo) {
      out.data[o] = A.data[ao] - B.data[bo];
    });
  }
  const int id = push(std::move(out), rg(a) || rg(b), "sub");
  if (!nodes_.back().requires_grad) return id;
  nodes_.back().backward = [a, b, id](Tape& t) {
    const Tensor& g = t.grad(id);
    const Shape& os2 = t.value(id).shape;
    const bool ra = t.rg(a), rb = t.rg(b);
    Eigen::ArrayXd* da = ra ? &t.grad_buf(a).data : nullptr;
    Eigen::ArrayXd* db = rb ? &t.grad_buf(b).data : nullptr;
    broadcast_visit(os2, t.value(a).shape, t.value(b).shape,
                    [&](Eigen::Index o, Eigen::Index ao, Eigen::Index bo) {
                      if (da) (*da)[ao] += g.data[o];
                      if (db) (*db)[bo] -= g.data[o];
                    });
  };
  return id;
}

int Tape::mul(int a, int b) {
  const Tensor& A = value(a);
  const Tensor& B = value(b);
  const Shape os = broadcast_shape(A.shape, B.shape);
  Tensor out = Tensor::zeros(os);
  if (A.shape == B.shape) {
    out.data = A.data * B.data;
  } else {
    broadcast_visit(os, A.shape, B.shape, [&](Eigen::Index o, Eigen::Index ao,
                                              Eigen::Index bo) {
      out.data[o] = A.data[ao] * B.data[bo];
    });
  }
  const int id = push(std::move(out), rg(a) || rg(b), "mul");
  if (!nodes_.back().requires_grad) return id;
  nodes_.back().backward = [a, b, id](Tape& t) {
    const Tensor& g = t.grad(id);
    const Tensor& A2 = t.value(a);
    const Tensor& B2 = t.value(b);
    const bool ra = t.rg(a), rb = t.rg(b);
    Eigen::ArrayXd* da = ra ? &t.grad_buf(a).data : nullptr;
    Eigen::ArrayXd* db = rb ? &t.grad_buf(b).data : nullptr;
    broadcast_visit(t.value(id).shape, A2.shape, B2.shape,
                    [&](Eigen::Index o, Eigen::Index ao, Eigen::Index bo) {
                      if (da) (*da)[ao] += g.data[o] * B2.data[bo];
                      if (db) (*db)[bo] += g.data[o] * A2.data[ao];
                    });
  };
  return id;
}

int Tape::matmul(int a, int b) {
  const Tensor& A = value(a);
  const Tensor& B = value(b);
  if (A.rank() != 2 || B.rank() != 2 || A.cols() != B.rows()) {
    throw ShapeMismatch("matmul: " + shape_str(A.shape) + " x " + shape_str(B.shape));
  }
  Tensor out = Tensor::zeros({A.rows(), B.cols()});
  out.mat().noalias() = A.mat() * B.mat();
  const int id = push(std::move(out), rg(a) || rg(b), "matmul");
  if (!nodes_.back().requires_grad) return id;
  nodes_.back().backward = [a, b, id](Tape& t) {
    const Tensor& g = t.grad(id);
    if (t.rg(a)) t.grad_buf(a).mat().noalias() += g.mat() * t.value(b).mat().transpose();
    if (t.rg(b)) t.grad_buf(b).mat().noalias() += t.value(a).mat().transpose() * g.mat();
  };
  return id;
}

int Tape::transpose(int a) {
  const Tensor& A = value(a);
  if (A.rank() != 2) throw ShapeMismatch("transpose expects rank 2, got " + shape_str(A.shape));
  Tensor out = Tensor::zeros({A.cols(), A.rows()});
  out.mat() = A.mat().transpose();
  const int id = push(std::move(out), rg(a), "transpose");
  if (!nodes_.back().requires_grad) return id;
  nodes_.back().backward = [a, id](Tape& t) {
    t.grad_buf(a).mat() += t.grad(id).mat().transpose();
  };
  return id;
}

int Tape::concat(std::span<const int> parts, int axis) {
  if (parts.empty()) throw ShapeMismatch("concat of zero tensors");
  const Tensor& first = value(parts[0]);
  Shape os = first.shape;
  if (axis < 0 || axis >= first.rank()) {
    throw ShapeMismatch("concat axis " + std::to_string(axis) + " out of range for " +
                        shape_str(first.shape));
  }
  Eigen::Index total = 0;
  bool any_rg = false;
  for (int p : parts) {
    const Tensor& t = value(p);
    if (t.rank() != first.rank()) throw ShapeMismatch("concat rank mismatch");
    for (int d = 0; d < first.rank(); ++d) {
      if (d != axis && t.shape[(size_t)d] != first.shape[(size_t)d]) {
        throw ShapeMismatch("concat: " + shape_str(t.shape) + " vs " + shape_str(first.shape));
      }
    }
    total += t.shape[(size_t)axis];
    any_rg = any_rg || rg(p);
  }
  os[(size_t)axis] = total;

  Tensor out = Tensor::zeros(os);
  const AxisSplit sp = split_axis(os, axis);
  Eigen::Index at = 0;
  for (int p : parts) {
    const Tensor& t = value(p);
    const Eigen::Index n_p = t.shape[(size_t)axis];
    for (Eigen::Index o = 0; o < sp.outer; ++o) {
      const Eigen::Index src = o * n_p * sp.inner;
      const Eigen::Index dst = (o * sp.n + at) * sp.inner;
      out.data.segment(dst, n_p * sp.inner) = t.data.segment(src, n_p * sp.inner);
    }
    at += n_p;
  }
  const int id = push(std::move(out), any_rg, "concat");
  if (!nodes_.back().requires_grad) return id;
  std::vector<int> ids(parts.begin(), parts.end());
  nodes_.back().backward = [ids, axis, id](Tape& t) {
    const Tensor& g = t.grad(id);
    const AxisSplit sp2 = split_axis(g.shape, axis);
    Eigen::Index at2 = 0;
    for (int p : ids) {
      const Eigen::Index n_p = t.value(p).shape[(size_t)axis];
      if (t.rg(p)) {
        Tensor& gp = t.grad_buf(p);
        for (Eigen::Index o = 0; o < sp2.outer; ++o) {
          const Eigen::Index dst = o * n_p * sp2.inner;
          const Eigen::Index src = (o * sp2.n + at2) * sp2.inner;
          gp.data.segment(dst, n_p * sp2.inner) += g.data.segment(src, n_p * sp2.inner);
        }
      }
      at2 += n_p;
    }
  };
  return id;
}

int Tape::slice(int a, int axis, Eigen::Index start, Eigen::Index len) {
  const Tensor& A = value(a);
  const AxisSplit sp = split_axis(A.shape, axis);
  if (start < 0 || len < 0 || start + len > sp.n) {
    throw ShapeMismatch("slice [" + std::to_string(start) + "," + std::to_string(start + len) +
                        ") out of range on axis " + std::to_string(axis) + " of " +
                        shape_str(A.shape));
  }
  Shape os = A.shape;
  os[(size_t)axis] = len;
  Tensor out = Tensor::zeros(os);
  for (Eigen::Index o = 0; o < sp.outer; ++o) {
    const Eigen::Index src = (o * sp.n + start) * sp.inner;
    const Eigen::Index dst = o * len * sp.inner;
    out.data.segment(dst, len * sp.inner) = A.data.segment(src, len * sp.inner);
  }
  const int id = push(std::move(out), rg(a), "slice");
  if (!nodes_.back().requires_grad) return id;
  nodes_.back().backward = [a, axis, start, len, id](Tape& t) {
    const Tensor& g = t.grad(id);
    Tensor& ga = t.grad_buf(a);
    const AxisSplit sp2 = split_axis(t.value(a).shape, axis);
    for (Eigen::Index o = 0; o < sp2.outer; ++o) {
      const Eigen::Index dst = (o * sp2.n + start) * sp2.inner;
      const Eigen::Index src = o * len * sp2.inner;
      ga.data.segment(dst, len * sp2.inner) += g.data.segment(src, len * sp2.inner);
    }
  };
  return id;
}

int Tape::reshape(int a, Shape s) {
  const Tensor& A = value(a);
  if (shape_numel(s) != A.numel()) {
    throw ShapeMismatch("reshape " + shape_str(A.shape) + " -> " + shape_str(s));
  }
  Tensor out{std::move(s), A.data};
  const int id = push(std::move(out), rg(a), "reshape");
  if (!nodes_.back().requires_grad) return id;
  nodes_.back().backward = [a, id](Tape& t) { t.accumulate(a, t.grad(id).data); };
  return id;
}

int Tape::mean(int a, int axis) {
  const Tensor& A = value(a);
  const AxisSplit sp = split_axis(A.shape, axis);
  if (sp.n == 0) throw ShapeMismatch("mean over empty axis of " + shape_str(A.shape));
  Shape os;
  for (int d = 0; d < A.rank(); ++d) {
    if (d != axis) os.push_back(A.shape[(size_t)d]);
  }
  Tensor out = Tensor::zeros(os);
  for (Eigen::Index o = 0; o < sp.outer; ++o) {
    for (Eigen::Index k = 0; k < sp.n; ++k) {
      out.data.segment(o * sp.inner, sp.inner) +=
          A.data.segment((o * sp.n + k) * sp.inner, sp.inner);
    }
  }
  out.data /= (double)sp.n;
  const int id = push(std::move(out), rg(a), "mean");
  if (!nodes_.back().requires_grad) return id;
  nodes_.back().backward = [a, axis, id](Tape& t) {
    const Tensor& g = t.grad(id);
    Tensor& ga = t.grad_buf(a);
    const AxisSplit sp2 = split_axis(t.value(a).shape, axis);
    const double inv = 1.0 / (double)sp2.n;
    for (Eigen::Index o = 0; o < sp2.outer; ++o) {
      for (Eigen::Index k = 0; k < sp2.n; ++k) {
        ga.data.segment((o * sp2.n + k) * sp2.inner, sp2.inner) +=
            inv * g.data.segment(o * sp2.inner, sp2.inner);
      }
    }
  };
  return id;
}

int Tape::mean_all(int a) {
  const Tensor& A = value(a);
  if (A.numel() == 0) throw ShapeMismatch("mean of empty tensor");
  Tensor out = Tensor::scalar(A.data.mean());
  const int id = push(std::move(out), rg(a), "mean_all");
  if (!nodes_.back().requires_grad) return id;
  nodes_.back().backward = [a, id](Tape& t) {
    const double g = t.grad(id).data[0] / (double)t.value(a).numel();
    t.grad_buf(a).data += g;
  };
  return id;
}

int Tape::sum_all(int a) {
  const Tensor& A = value(a);
  Tensor out = Tensor::scalar(A.data.sum());
  const int id = push(std::move(out), rg(a), "sum_all");
  if (!nodes_.back().requires_grad) return id;
  nodes_.back().backward = [a, id](Tape& t) {
    t.grad_buf(a).data += t.grad(id).data[0];
  };
  return id;
}

int Tape::relu(int a) {
  const Tensor& A = value(a);
  Tensor out{A.shape, A.data.max(0.0)};
  const int id = push(std::move(out), rg(a), "relu");
  if (!nodes_.back().requires_grad) return id;
  nodes_.back().backward = [a, id](Tape& t) {
    t.accumulate(a, t.grad(id).data * (t.value(a).data > 0.0).cast<double>());
  };
  return id;
}

int Tape::sigmoid(int a) {
  const Tensor& A = value(a);
  Tensor out = Tensor::zeros(A.shape);
  for (Eigen::Index i = 0; i < A.numel(); ++i) out.data[i] = sigmoid_scalar(A.data[i]);
  const int id = push(std::move(out), rg(a), "sigmoid");
  if (!nodes_.back().requires_grad) return id;
  nodes_.back().backward = [a, id](Tape& t) {
    const Eigen::ArrayXd& s = t.value(id).data;
    t.accumulate(a, t.grad(id).data * s * (1.0 - s));
  };
  return id;
}

int Tape::softplus(int a) {
  const Tensor& A = value(a);
  Tensor out = Tensor::zeros(A.shape);
  for (Eigen::Index i = 0; i < A.numel(); ++i) out.data[i] = stable_softplus(A.data[i]);
  const int id = push(std::move(out), rg(a), "softplus");
  if (!nodes_.back().requires_grad) return id;
  nodes_.back().backward = [a, id](Tape& t) {
    const Eigen::ArrayXd& x = t.value(a).data;
    Eigen::ArrayXd s(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) s[i] = sigmoid_scalar(x[i]);
    t.accumulate(a, t.grad(id).data * s);
  };
  return id;
}

int Tape::softmax_last(int a) {
  const Tensor& A = value(a);
  if (A.rank() < 1) throw ShapeMismatch("softmax needs rank >= 1");
  const Eigen::Index L = A.shape.back();
  const Eigen::Index R = A.numel() / L;
  Tensor out = Tensor::zeros(A.shape);
  for (Eigen::Index r = 0; r < R; ++r) {
    auto row = A.data.segment(r * L, L);
    const double m = row.maxCoeff();
    Eigen::ArrayXd e = (row - m).exp();
    out.data.segment(r * L, L) = e / e.sum();
  }
  const int id = push(std::move(out), rg(a), "softmax");
  if (!nodes_.back().requires_grad) return id;
  nodes_.back().backward = [a, id](Tape& t) {
    const Tensor& y = t.value(id);
    const Tensor& g = t.grad(id);
    const Eigen::Index L2 = y.shape.back();
    const Eigen::Index R2 = y.numel() / L2;
    Tensor& ga = t.grad_buf(a);
    for (Eigen::Index r = 0; r < R2; ++r) {
      auto yr = y.data.segment(r * L2, L2);
      auto gr = g.data.segment(r * L2, L2);
      const double dot = (yr * gr).sum();
      ga.data.segment(r * L2, L2) += yr * (gr - dot);
    }
  };
  return id;
}

int Tape::layer_norm_last(int a, double eps) {
  const Tensor& A = value(a);
  if (A.rank() < 1) throw ShapeMismatch("layer_norm needs rank >= 1");
  const Eigen::Index L = A.shape.back();
  const Eigen::Index R = A.numel() / L;
  Tensor out = Tensor::zeros(A.shape);
  for (Eigen::Index r = 0; r < R; ++r) {
    auto row = A.data.segment(r * L, L);
    const double mu = row.mean();
    const double var = (row - mu).square().mean();
    out.data.segment(r * L, L) = (row - mu) / std::sqrt(var + eps);
  }
  const int id = push(std::move(out), rg(a), "layer_norm");
  if (!nodes_.back().requires_grad) return id;
  nodes_.back().backward = [a, id, eps](Tape& t) {
    const Tensor& x = t.value(a);
    const Tensor& y = t.value(id);
    const Tensor& g = t.grad(id);
    const Eigen::Index L2 = x.shape.back();
    const Eigen::Index R2 = x.numel() / L2;
    Tensor& ga = t.grad_buf(a);
    for (Eigen::Index r = 0; r < R2; ++r) {
      auto xr = x.data.segment(r * L2, L2);
      auto yr = y.data.segment(r * L2, L2);
      auto gr = g.data.segment(r * L2, L2);
      const double mu = xr.mean();
      const double var = (xr - mu).square().mean();
      const double inv_std = 1.0 / std::sqrt(var + eps);
      const double g_mean = gr.mean();
      const double gy_mean = (gr * yr).mean();
      ga.data.segment(r * L2, L2) += inv_std * (gr - g_mean - yr * gy_mean);
    }
  };
  return id;
}

int Tape::scale(int a, double c) {
  const Tensor& A = value(a);
  Tensor out{A.shape, A.data * c};
  const int id = push(std::move(out), rg(a), "scale");
  if (!nodes_.back().requires_grad) return id;
  nodes_.back().backward = [a, c, id](Tape& t) { t.accumulate(a, t.grad(id).data * c); };
  return id;
}

int Tape::gather(int a, std::vector<Eigen::Index> flat_indices, Shape out_shape) {
  const Tensor& A = value(a);
  if ((Eigen::Index)flat_indices.size() != shape_numel(out_shape)) {
    throw ShapeMismatch("gather: index count does not match output shape");
  }
  Tensor out = Tensor::zeros(out_shape);
  for (size_t i = 0; i < flat_indices.size(); ++i) {
    const Eigen::Index src = flat_indices[i];
    if (src < 0 || src >= A.numel()) {
      throw ShapeMismatch("gather index " + std::to_string(src) + " out of range");
    }
    out.data[(Eigen::Index)i] = A.data[src];
  }
  const int id = push(std::move(out), rg(a), "gather");
  if (!nodes_.back().requires_grad) return id;
  auto idx = std::make_shared<std::vector<Eigen::Index>>(std::move(flat_indices));
  nodes_.back().backward = [a, id, idx](Tape& t) {
    const Tensor& g = t.grad(id);
    Tensor& ga = t.grad_buf(a);
    for (size_t i = 0; i < idx->size(); ++i) ga.data[(*idx)[i]] += g.data[(Eigen::Index)i];
  };
  return id;
}

int Tape::embed_lookup(int table, std::vector<Eigen::Index> rows) {
  const Tensor& T = value(table);
  if (T.rank() != 2) throw ShapeMismatch("embed_lookup table must be rank 2");
  const Eigen::Index D = T.cols();
  Tensor out = Tensor::zeros({(Eigen::Index)rows.size(), D});
  for (size_t r = 0; r < rows.size(); ++r) {
    if (rows[r] < 0 || rows[r] >= T.rows()) {
      throw ShapeMismatch("embed_lookup row " + std::to_string(rows[r]) + " out of range");
    }
    out.data.segment((Eigen::Index)r * D, D) = T.data.segment(rows[r] * D, D);
  }
  const int id = push(std::move(out), rg(table), "embed_lookup");
  if (!nodes_.back().requires_grad) return id;
  auto idx = std::make_shared<std::vector<Eigen::Index>>(std::move(rows));
  nodes_.back().backward = [table, id, idx](Tape& t) {
    const Tensor& g = t.grad(id);
    Tensor& gt = t.grad_buf(table);
    const Eigen::Index D2 = t.value(table).cols();
    for (size_t r = 0; r < idx->size(); ++r) {
      gt.data.segment((*idx)[r] * D2, D2) += g.data.segment((Eigen::Index)r * D2, D2);
    }
  };
  return id;
}

int Tape::bce_with_logits(int z, int y) {
  const Tensor& Z = value(z);
  const Tensor& Y = value(y);
  if (Z.shape != Y.shape) {
    throw ShapeMismatch("bce_with_logits: " + shape_str(Z.shape) + " vs " + shape_str(Y.shape));
  }
  if (Z.numel() == 0) throw ShapeMismatch("bce_with_logits on empty tensors");
  double total = 0.0;
  for (Eigen::Index i = 0; i < Z.numel(); ++i) {
    const double zi = Z.data[i], yi = Y.data[i];
    total += std::max(zi, 0.0) - zi * yi + std::log1p(std::exp(-std::abs(zi)));
  }
  Tensor out = Tensor::scalar(total / (double)Z.numel());
  const int id = push(std::move(out), rg(z), "bce_with_logits");
  if (!nodes_.back().requires_grad) return id;
  nodes_.back().backward = [z, y, id](Tape& t) {
    const double g = t.grad(id).data[0];
    const Tensor& Z2 = t.value(z);
    const Tensor& Y2 = t.value(y);
    const double inv = 1.0 / (double)Z2.numel();
    Eigen::ArrayXd dz(Z2.numel());
    for (Eigen::Index i = 0; i < Z2.numel(); ++i) {
      dz[i] = g * inv * (sigmoid_scalar(Z2.data[i]) - Y2.data[i]);
    }
    t.accumulate(z, dz);
  };
  return id;
}

void Tape::backward(int loss_id) {
  const Tensor& loss = value(loss_id);
  if (loss.numel() != 1) {
    throw NonScalarLoss("backward requires a scalar loss, got " + shape_str(loss.shape));
  }
  for (auto& n : nodes_) {
    if (n.requires_grad) {
      n.grad = Tensor{n.value.shape, Eigen::ArrayXd::Zero(n.value.numel())};
    }
  }
  if (!nodes_[(size_t)loss_id].requires_grad) return;  // loss independent of parameters
  grad_buf(loss_id).data[0] = 1.0;
  for (int i = loss_id; i >= 0; --i) {
    Node& n = nodes_[(size_t)i];
    if (n.requires_grad && n.backward) n.backward(*this);
  }
}

}  // namespace geoat::nn
