#include "entevolve/tensor.hpp"

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace entevolve {

namespace {

using RowMatrix =
    Eigen::Matrix<complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

std::size_t product(const std::vector<IndexSpec>& idx) {
  std::size_t n = 1;
  for (const auto& s : idx) n *= s.dim;
  return n;
}

void check_index(const Tensor& t, std::size_t i, const char* where) {
  if (i >= t.rank()) {
    std::ostringstream os;
    os << where << ": index " << i << " out of range for rank " << t.rank();
    throw Error(ErrorCode::IndexOutOfRange, os.str());
  }
}

void check_pair(const IndexSpec& x, const IndexSpec& y, bool strict,
                const char* where) {
  if (x.dim != y.dim) {
    std::ostringstream os;
    os << where << ": paired dimensions differ (" << x.dim << " vs " << y.dim
       << ")";
    throw Error(ErrorCode::DimensionMismatch, os.str());
  }
  if (strict && x.variance == y.variance) {
    throw Error(ErrorCode::VarianceMismatch,
                std::string(where) + ": paired indices share variance");
  }
}

Tensor wire(std::size_t d, Variance first, Variance second) {
  if (d == 0) {
    throw Error(ErrorCode::InvalidDimension, "wire tensor needs dimension >= 1");
  }
  Tensor t = Tensor::zeros({IndexSpec(d, first), IndexSpec(d, second)});
  for (std::size_t k = 0; k < d; ++k) t[k * d + k] = 1.0;
  return t;
}

}  // namespace

Tensor::Tensor(std::vector<IndexSpec> indices, std::vector<complex> data)
    : indices_(std::move(indices)), data_(std::move(data)) {
  for (const auto& s : indices_) {
    if (s.dim == 0) {
      throw Error(ErrorCode::InvalidDimension, "tensor index dimension is 0");
    }
  }
  if (data_.size() != product(indices_)) {
    std::ostringstream os;
    os << "tensor data length " << data_.size()
       << " does not match dimension product " << product(indices_);
    throw Error(ErrorCode::ShapeMismatch, os.str());
  }
}

Tensor Tensor::zeros(std::vector<IndexSpec> indices) {
  const std::size_t n = product(indices);
  return Tensor(std::move(indices), std::vector<complex>(n));
}

Tensor Tensor::scalar(complex value) { return Tensor({}, {value}); }

const IndexSpec& Tensor::index(std::size_t i) const {
  check_index(*this, i, "Tensor::index");
  return indices_[i];
}

std::vector<std::size_t> Tensor::dims() const {
  std::vector<std::size_t> out;
  out.reserve(indices_.size());
  for (const auto& s : indices_) out.push_back(s.dim);
  return out;
}

std::pair<std::size_t, std::size_t> Tensor::valence() const {
  std::size_t up = 0;
  for (const auto& s : indices_) up += s.variance == Variance::Up;
  return {up, indices_.size() - up};
}

std::vector<std::size_t> Tensor::strides() const {
  std::vector<std::size_t> s(indices_.size());
  std::size_t acc = 1;
  for (std::size_t i = indices_.size(); i-- > 0;) {
    s[i] = acc;
    acc *= indices_[i].dim;
  }
  return s;
}

std::size_t Tensor::flat_index(std::span<const std::size_t> multi) const {
  if (multi.size() != indices_.size()) {
    throw Error(ErrorCode::IndexOutOfRange, "multi-index has wrong length");
  }
  std::size_t flat = 0;
  for (std::size_t i = 0; i < multi.size(); ++i) {
    if (multi[i] >= indices_[i].dim) {
      throw Error(ErrorCode::IndexOutOfRange, "multi-index entry out of range");
    }
    flat = flat * indices_[i].dim + multi[i];
  }
  return flat;
}

complex& Tensor::at(std::span<const std::size_t> multi) {
  return data_[flat_index(multi)];
}

const complex& Tensor::at(std::span<const std::size_t> multi) const {
  return data_[flat_index(multi)];
}

complex Tensor::scalar_value() const {
  if (!is_scalar()) {
    throw Error(ErrorCode::ShapeMismatch, "scalar_value on a non-scalar tensor");
  }
  return data_[0];
}

void Tensor::set_label(std::size_t i, std::optional<std::string> label) {
  check_index(*this, i, "Tensor::set_label");
  indices_[i].label = std::move(label);
}

Tensor make_delta(std::size_t d) { return wire(d, Variance::Down, Variance::Up); }
Tensor make_cup(std::size_t d) { return wire(d, Variance::Up, Variance::Up); }
Tensor make_cap(std::size_t d) { return wire(d, Variance::Down, Variance::Down); }

Tensor permute(const Tensor& t, std::span<const std::size_t> order) {
  const std::size_t r = t.rank();
  if (order.size() != r) {
    throw Error(ErrorCode::IndexOutOfRange, "permute: order has wrong length");
  }
  std::vector<bool> seen(r, false);
  for (auto o : order) {
    if (o >= r || seen[o]) {
      throw Error(ErrorCode::IndexOutOfRange, "permute: order is not a permutation");
    }
    seen[o] = true;
  }

  std::vector<IndexSpec> idx(r);
  for (std::size_t k = 0; k < r; ++k) idx[k] = t.indices()[order[k]];
  bool identity = true;
  for (std::size_t k = 0; k < r; ++k) identity = identity && order[k] == k;
  if (identity) return t;

  Tensor out = Tensor::zeros(idx);
  const auto src_strides = t.strides();
  // Source stride for each destination axis.
  std::vector<std::size_t> step(r);
  std::vector<std::size_t> dim(r);
  for (std::size_t k = 0; k < r; ++k) {
    step[k] = src_strides[order[k]];
    dim[k] = idx[k].dim;
  }

  std::vector<std::size_t> counter(r, 0);
  std::size_t src = 0;
  const auto in = t.data();
  auto dst = out.data();
  for (std::size_t flat = 0; flat < dst.size(); ++flat) {
    dst[flat] = in[src];
    for (std::size_t k = r; k-- > 0;) {
      if (++counter[k] < dim[k]) {
        src += step[k];
        break;
      }
      src -= step[k] * (dim[k] - 1);
      counter[k] = 0;
    }
  }
  return out;
}

Tensor contract(const Tensor& a, const Tensor& b,
                std::span<const IndexPair> pairs, ContractOptions opts) {
  std::vector<bool> used_a(a.rank(), false), used_b(b.rank(), false);
  for (const auto& [ia, ib] : pairs) {
    check_index(a, ia, "contract (left)");
    check_index(b, ib, "contract (right)");
    if (used_a[ia] || used_b[ib]) {
      throw Error(ErrorCode::IndexOutOfRange, "contract: index paired twice");
    }
    used_a[ia] = used_b[ib] = true;
    check_pair(a.indices()[ia], b.indices()[ib], opts.strict_variance,
               "contract");
  }

  // a -> (free, summed), b -> (summed, free), then one matrix product.
  std::vector<std::size_t> order_a, order_b;
  std::vector<IndexSpec> result;
  std::size_t rows = 1, cols = 1, inner = 1;
  for (std::size_t i = 0; i < a.rank(); ++i) {
    if (!used_a[i]) {
      order_a.push_back(i);
      result.push_back(a.indices()[i]);
      rows *= a.indices()[i].dim;
    }
  }
  for (const auto& [ia, ib] : pairs) {
    order_a.push_back(ia);
    order_b.push_back(ib);
    inner *= a.indices()[ia].dim;
  }
  for (std::size_t i = 0; i < b.rank(); ++i) {
    if (!used_b[i]) {
      order_b.push_back(i);
      result.push_back(b.indices()[i]);
      cols *= b.indices()[i].dim;
    }
  }

  const Tensor pa = permute(a, order_a);
  const Tensor pb = permute(b, order_b);
  Tensor out = Tensor::zeros(std::move(result));

  Eigen::Map<const RowMatrix> ma(pa.data().data(),
                                 static_cast<Eigen::Index>(rows),
                                 static_cast<Eigen::Index>(inner));
  Eigen::Map<const RowMatrix> mb(pb.data().data(),
                                 static_cast<Eigen::Index>(inner),
                                 static_cast<Eigen::Index>(cols));
  Eigen::Map<RowMatrix> mo(out.data().data(), static_cast<Eigen::Index>(rows),
                           static_cast<Eigen::Index>(cols));
  mo.noalias() = ma * mb;
  return out;
}

double contraction_cost(const Tensor& a, const Tensor& b,
                        std::span<const IndexPair> pairs) {
  double summed = 1.0;
  for (const auto& [ia, ib] : pairs) summed *= static_cast<double>(a.index(ia).dim);
  return static_cast<double>(a.size()) * static_cast<double>(b.size()) / summed;
}

Tensor bend(const Tensor& t, std::size_t index) {
  check_index(t, index, "bend");
  std::vector<IndexSpec> idx = t.indices();
  idx[index].variance = flipped(idx[index].variance);
  return Tensor(std::move(idx),
                std::vector<complex>(t.data().begin(), t.data().end()));
}

Tensor partial_trace(const Tensor& t, IndexPair pair, ContractOptions opts) {
  const auto [p, q] = pair;
  check_index(t, p, "partial_trace");
  check_index(t, q, "partial_trace");
  if (p == q) {
    throw Error(ErrorCode::IndexOutOfRange, "partial_trace: pair repeats an index");
  }
  check_pair(t.indices()[p], t.indices()[q], opts.strict_variance,
             "partial_trace");

  std::vector<std::size_t> order;
  std::vector<IndexSpec> rest;
  for (std::size_t i = 0; i < t.rank(); ++i) {
    if (i != p && i != q) {
      order.push_back(i);
      rest.push_back(t.indices()[i]);
    }
  }
  order.push_back(p);
  order.push_back(q);
  const Tensor moved = permute(t, order);
  const std::size_t d = t.indices()[p].dim;
  Tensor out = Tensor::zeros(std::move(rest));
  const auto in = moved.data();
  for (std::size_t r = 0; r < out.size(); ++r) {
    complex acc{0.0, 0.0};
    for (std::size_t k = 0; k < d; ++k) acc += in[r * d * d + k * d + k];
    out[r] = acc;
  }
  return out;
}

complex trace(const Tensor& t) {
  if (t.rank() != 2) {
    throw Error(ErrorCode::ShapeMismatch, "trace needs a valence-2 tensor");
  }
  return partial_trace(t, {0, 1}).scalar_value();
}

Tensor outer(const Tensor& a, const Tensor& b) {
  return contract(a, b, std::span<const IndexPair>{});
}

Tensor conjugate(const Tensor& t) {
  std::vector<complex> data(t.data().begin(), t.data().end());
  for (auto& z : data) z = std::conj(z);
  return Tensor(t.indices(), std::move(data));
}

Tensor scale(const Tensor& t, complex factor) {
  std::vector<complex> data(t.data().begin(), t.data().end());
  for (auto& z : data) z *= factor;
  return Tensor(t.indices(), std::move(data));
}

bool same_shape(const Tensor& a, const Tensor& b) { return a.dims() == b.dims(); }

complex frobenius_inner(const Tensor& a, const Tensor& b) {
  if (!same_shape(a, b)) {
    throw Error(ErrorCode::ShapeMismatch, "frobenius_inner: shapes differ");
  }
  complex acc{0.0, 0.0};
  for (std::size_t i = 0; i < a.size(); ++i) acc += std::conj(a[i]) * b[i];
  return acc;
}

double frobenius_norm(const Tensor& t) {
  double acc = 0.0;
  for (const auto& z : t.data()) acc += std::norm(z);
  return std::sqrt(acc);
}

double max_abs_diff(const Tensor& a, const Tensor& b) {
  if (!same_shape(a, b)) {
    throw Error(ErrorCode::ShapeMismatch, "max_abs_diff: shapes differ");
  }
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

double relative_diff(const Tensor& a, const Tensor& b) {
  double scale_b = 1.0;
  for (const auto& z : b.data()) scale_b = std::max(scale_b, std::abs(z));
  return max_abs_diff(a, b) / scale_b;
}

bool allclose(const Tensor& a, const Tensor& b, Tolerance tol) {
  if (a.rank() != b.rank()) return false;
  for (std::size_t i = 0; i < a.rank(); ++i) {
    if (a.indices()[i].dim != b.indices()[i].dim ||
        a.indices()[i].variance != b.indices()[i].variance) {
      return false;
    }
  }
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::abs(a[i] - b[i]) > tol.abs + tol.rel * std::abs(b[i])) return false;
  }
  return true;
}

}  // namespace entevolve
