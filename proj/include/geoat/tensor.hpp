#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "geoat/errors.hpp"

namespace geoat::nn {

using Shape = std::vector<Eigen::Index>;

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MatMap = Eigen::Map<RowMat>;
using ConstMatMap = Eigen::Map<const RowMat>;

std::string shape_str(const Shape& s);
Eigen::Index shape_numel(const Shape& s);

/// Dense 64-bit real tensor, row-major. Rank 0 (empty shape) is a scalar.
struct Tensor {
  Shape shape;
  Eigen::ArrayXd data;

  Tensor() = default;
  Tensor(Shape s, Eigen::ArrayXd d) : shape(std::move(s)), data(std::move(d)) {}

  static Tensor zeros(Shape s) {
    Eigen::Index n = shape_numel(s);
    return Tensor{std::move(s), Eigen::ArrayXd::Zero(n)};
  }
  static Tensor full(Shape s, double v) {
    Eigen::Index n = shape_numel(s);
    return Tensor{std::move(s), Eigen::ArrayXd::Constant(n, v)};
  }
  static Tensor scalar(double v) { return Tensor{{}, Eigen::ArrayXd::Constant(1, v)}; }
  static Tensor from_vector(const Eigen::VectorXd& v) {
    return Tensor{{v.size()}, v.array()};
  }
  static Tensor row_vector(const Eigen::VectorXd& v) {
    return Tensor{{1, v.size()}, v.array()};
  }
  static Tensor from_matrix(const Eigen::MatrixXd& m) {
    Tensor t;
    t.shape = {m.rows(), m.cols()};
    t.data.resize(m.size());
    MatMap(t.data.data(), m.rows(), m.cols()) = m;
    return t;
  }

  Eigen::Index numel() const { return data.size(); }
  int rank() const { return (int)shape.size(); }

  Eigen::Index rows() const { return shape.at(0); }
  Eigen::Index cols() const { return shape.at(1); }

  MatMap mat() { return MatMap(data.data(), rows(), cols()); }
  ConstMatMap mat() const { return ConstMatMap(data.data(), rows(), cols()); }

  Eigen::VectorXd vec() const { return data.matrix(); }

  bool same_shape(const Tensor& o) const { return shape == o.shape; }
};

/// Row-major strides for a shape.
std::vector<Eigen::Index> strides_of(const Shape& s);

/// numpy-style broadcast result shape; throws ShapeMismatch when incompatible.
Shape broadcast_shape(const Shape& a, const Shape& b);

}  // namespace geoat::nn
