#include "geoat/tensor.hpp"

#include <sstream>

namespace geoat::nn {

std::string shape_str(const Shape& s) {
  std::ostringstream ss;
  ss << '(';
  for (size_t i = 0; i < s.size(); ++i) {
    if (i) ss << ',';
    ss << s[i];
  }
  ss << ')';
  return ss.str();
}

Eigen::Index shape_numel(const Shape& s) {
  Eigen::Index n = 1;
  for (auto d : s) {
    if (d < 0) throw ShapeMismatch("negative dimension in " + shape_str(s));
    n *= d;
  }
  return n;
}

std::vector<Eigen::Index> strides_of(const Shape& s) {
  std::vector<Eigen::Index> st(s.size());
  Eigen::Index acc = 1;
  for (int i = (int)s.size() - 1; i >= 0; --i) {
    st[(size_t)i] = acc;
    acc *= s[(size_t)i];
  }
  return st;
}

Shape broadcast_shape(const Shape& a, const Shape& b) {
  const size_t rank = std::max(a.size(), b.size());
  Shape out(rank);
  for (size_t i = 0; i < rank; ++i) {
    const Eigen::Index da = i < rank - a.size() ? 1 : a[i - (rank - a.size())];
    const Eigen::Index db = i < rank - b.size() ? 1 : b[i - (rank - b.size())];
    if (da != db && da != 1 && db != 1) {
      throw ShapeMismatch("cannot broadcast " + shape_str(a) + " with " + shape_str(b));
    }
    out[i] = std::max(da, db);
  }
  return out;
}

}  // namespace geoat::nn
