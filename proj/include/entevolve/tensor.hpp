#pragma once

#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "entevolve/error.hpp"

namespace entevolve {

using complex = std::complex<double>;

// Up indices are bras (inputs), Down indices are kets (outputs).  A state
// |psi> = sum A_ij |i>|j> is a (Down, Down) tensor; a linear map
// sum M_ij |i><j| is a (Down, Up) tensor with the row index first.
enum class Variance { Up, Down };

constexpr Variance flipped(Variance v) {
  return v == Variance::Up ? Variance::Down : Variance::Up;
}

struct IndexSpec {
  std::size_t dim = 1;
  Variance variance = Variance::Down;
  std::optional<std::string> label;

  IndexSpec() = default;
  IndexSpec(std::size_t d, Variance v, std::optional<std::string> l = {})
      : dim(d), variance(v), label(std::move(l)) {}

  friend bool operator==(const IndexSpec&, const IndexSpec&) = default;
};

struct Tolerance {
  double rel = 1e-10;
  double abs = 1e-12;
};

/// Dense complex multi-array with per-index variance.
///
/// Data is stored row-major over the index list: the last index varies
/// fastest.  A tensor with no indices is a scalar holding one element.
class Tensor {
 public:
  Tensor() : data_(1, complex{0.0, 0.0}) {}
  Tensor(std::vector<IndexSpec> indices, std::vector<complex> data);

  static Tensor zeros(std::vector<IndexSpec> indices);
  static Tensor scalar(complex value);

  std::size_t rank() const { return indices_.size(); }
  std::size_t size() const { return data_.size(); }
  const std::vector<IndexSpec>& indices() const { return indices_; }
  const IndexSpec& index(std::size_t i) const;
  std::vector<std::size_t> dims() const;

  // Number of Up and Down indices.
  std::pair<std::size_t, std::size_t> valence() const;
  bool is_scalar() const { return indices_.empty(); }

  std::span<const complex> data() const { return data_; }
  std::span<complex> data() { return data_; }

  complex& operator[](std::size_t flat) { return data_[flat]; }
  const complex& operator[](std::size_t flat) const { return data_[flat]; }

  complex& at(std::span<const std::size_t> multi);
  const complex& at(std::span<const std::size_t> multi) const;
  complex& at(std::initializer_list<std::size_t> multi) {
    return at(std::span<const std::size_t>(multi.begin(), multi.size()));
  }
  const complex& at(std::initializer_list<std::size_t> multi) const {
    return at(std::span<const std::size_t>(multi.begin(), multi.size()));
  }

  // Value of a valence-(0,0) tensor.
  complex scalar_value() const;

  std::size_t flat_index(std::span<const std::size_t> multi) const;
  std::vector<std::size_t> strides() const;

  void set_label(std::size_t i, std::optional<std::string> label);

  friend bool operator==(const Tensor&, const Tensor&) = default;

 private:
  std::vector<IndexSpec> indices_;
  std::vector<complex> data_;
};

struct ContractOptions {
  // Require paired indices to have opposite variance.
  bool strict_variance = true;
};

using IndexPair = std::pair<std::size_t, std::size_t>;

Tensor make_delta(std::size_t d);
Tensor make_cup(std::size_t d);
Tensor make_cap(std::size_t d);

/// Einstein summation over `pairs` (index of a, index of b).  The result
/// carries the uncontracted indices of a followed by those of b, each in
/// original order.  An empty pair list gives the outer product.
Tensor contract(const Tensor& a, const Tensor& b,
                std::span<const IndexPair> pairs, ContractOptions opts = {});
inline Tensor contract(const Tensor& a, const Tensor& b,
                       std::initializer_list<IndexPair> pairs,
                       ContractOptions opts = {}) {
  return contract(a, b, std::span<const IndexPair>(pairs.begin(), pairs.size()),
                  opts);
}

// Multiply-add count of contract(a, b, pairs) with the same shapes.
double contraction_cost(const Tensor& a, const Tensor& b,
                        std::span<const IndexPair> pairs);

Tensor bend(const Tensor& t, std::size_t index);
Tensor partial_trace(const Tensor& t, IndexPair pair,
                     ContractOptions opts = {});
// Trace of a valence-(1,1) tensor.
complex trace(const Tensor& t);

Tensor outer(const Tensor& a, const Tensor& b);
Tensor conjugate(const Tensor& t);
Tensor permute(const Tensor& t, std::span<const std::size_t> order);
inline Tensor permute(const Tensor& t, std::initializer_list<std::size_t> order) {
  return permute(t, std::span<const std::size_t>(order.begin(), order.size()));
}
Tensor scale(const Tensor& t, complex factor);

// sum conj(a) * b over identically shaped tensors.
complex frobenius_inner(const Tensor& a, const Tensor& b);
double frobenius_norm(const Tensor& t);

// Largest elementwise |a - b|; shapes must match.
double max_abs_diff(const Tensor& a, const Tensor& b);
// max |a - b| / max(1, max|b|).
double relative_diff(const Tensor& a, const Tensor& b);
bool same_shape(const Tensor& a, const Tensor& b);
// Same dims, variance, and every entry within abs + rel * |b|.
bool allclose(const Tensor& a, const Tensor& b, Tolerance tol = {});

}  // namespace entevolve
