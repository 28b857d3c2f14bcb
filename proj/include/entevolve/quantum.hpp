#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "entevolve/error.hpp"
#include "entevolve/report.hpp"
#include "entevolve/tensor.hpp"

namespace entevolve {

using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

struct BipartiteDims {
  std::size_t a = 1;
  std::size_t b = 1;

  std::size_t total() const { return a * b; }
  bool square() const { return a == b; }
  friend bool operator==(const BipartiteDims&, const BipartiteDims&) = default;
};

enum class Side { A, B };

// Amplitudes ordered |i>|j> with i (subsystem A) major.
class PureState {
 public:
  // Normalizes; a zero vector is an error.
  PureState(BipartiteDims dims, Vector amplitudes);
  // Keeps the amplitudes as given (homogeneity checks need this).
  static PureState raw(BipartiteDims dims, Vector amplitudes);

  const BipartiteDims& dims() const { return dims_; }
  const Vector& amplitudes() const { return amps_; }
  double norm() const { return amps_.norm(); }
  bool is_normalized(double tol = 1e-10) const;

  // |psi><psi| without renormalization.
  Matrix projector() const;

 private:
  PureState() = default;
  BipartiteDims dims_;
  Vector amps_;
};

/// Hermitian positive semidefinite operator on A (x) B.
///
/// checked() additionally requires unit trace; unnormalized() is the
/// flagged variant used for homogeneity and SL-invariance work and for the
/// output of non-trace-preserving maps.
class DensityOperator {
 public:
  static DensityOperator checked(BipartiteDims dims, Matrix m, double tol = 1e-10);
  static DensityOperator unnormalized(BipartiteDims dims, Matrix m,
                                      double tol = 1e-10);
  static DensityOperator from_pure(const PureState& psi);

  const BipartiteDims& dims() const { return dims_; }
  const Matrix& matrix() const { return m_; }
  bool normalized() const { return normalized_; }
  double trace() const { return m_.trace().real(); }

 private:
  DensityOperator() = default;
  BipartiteDims dims_;
  Matrix m_;
  bool normalized_ = false;
};

class KrausChannel {
 public:
  explicit KrausChannel(std::vector<Matrix> operators);

  const std::vector<Matrix>& operators() const { return ops_; }
  std::size_t size() const { return ops_.size(); }
  std::size_t dim_in() const { return static_cast<std::size_t>(ops_.front().cols()); }
  std::size_t dim_out() const { return static_cast<std::size_t>(ops_.front().rows()); }
  bool square() const { return dim_in() == dim_out(); }

 private:
  std::vector<Matrix> ops_;
};

struct SchmidtDecomposition {
  // Squared singular values of [psi], descending.
  std::vector<double> coefficients;
  // Columns are |u_k> and |v_k>; psi = sum_k sqrt(w_k) |u_k>|v_k>.
  Matrix left;
  Matrix right;

  std::size_t rank(double threshold = 1e-8) const;
  Vector reconstruct() const;
};

// Channel constructors.
KrausChannel identity_channel(std::size_t d);
KrausChannel unitary_channel(const Matrix& u);
KrausChannel amplitude_damping(double gamma);
KrausChannel dephasing(double p);
// Kraus operators A_k (x) B_l.
KrausChannel tensor_product(const KrausChannel& a, const KrausChannel& b);
KrausChannel extend_one_sided(const KrausChannel& c, Side side, std::size_t other_dim);

Matrix kron(const Matrix& a, const Matrix& b);
Vector vectorize(const Matrix& m);

PureState bell_state(std::size_t d);

// [psi]_ij = <ij|psi>.
Matrix map_from_state(const PureState& psi);

enum class Normalize { No, Yes };
// Inverse of map_from_state: amplitudes are the entries of m, row-major.
PureState state_from_map(const Matrix& m, Normalize normalize = Normalize::No);

PureState swap_subsystems(const PureState& psi);

DensityOperator apply_channel(const KrausChannel& c, const DensityOperator& rho);
DensityOperator apply_one_sided(const KrausChannel& c, const DensityOperator& rho,
                                Side side);

// (1/d) sum_k |A_k><A_k| = ($ (x) 1)|Phi+><Phi+| with normalized Phi+.
DensityOperator choi_state(const KrausChannel& c);

bool is_trace_preserving(const KrausChannel& c, double tol = 1e-10);
bool is_unital(const KrausChannel& c, double tol = 1e-10);

SchmidtDecomposition schmidt(const PureState& psi);

/// Both sides of the channel-state duality for one-sided evolution:
///
///   ($ (x) 1)|psi><psi|  =  (1 (x) M^T) rho_$ (1 (x) M^T)^dagger,
///   M = sqrt(d) [psi],  rho_$ = choi_state(c).
///
/// Pulling a matrix through the Bell state obeys (M (x) 1)|Phi+> =
/// (1 (x) M^T)|Phi+>, so the state's map acts on side B transposed.  The
/// sqrt(d) restores the 1/d carried by the normalized Choi state.
Matrix duality_lhs(const KrausChannel& c, const PureState& psi);
Matrix duality_rhs(const KrausChannel& c, const PureState& psi);
VerificationReport duality_evolution_identity(const KrausChannel& c, const PureState& psi,
                                              double tol = 1e-10);

// Rank by singular values above the threshold.
std::size_t operator_rank(const Matrix& m, double threshold = 1e-8);

// Tensor views used for cross-checks against network evaluation.
Tensor state_tensor(const PureState& psi);
Tensor operator_tensor(const Matrix& m);
// sum_k A_k[o,i] conj(A_k[o',i']) with indices (o Down, o' Up, i Up, i' Down).
Tensor channel_tensor(const KrausChannel& c);
Matrix matrix_from_tensor(const Tensor& t);

// Random objects; each call seeds its own generator.
PureState random_pure_state(std::size_t da, std::size_t db, std::uint64_t seed);
KrausChannel random_channel(std::size_t d, std::size_t kraus_count, std::uint64_t seed);
DensityOperator random_density(BipartiteDims dims, std::size_t rank, std::uint64_t seed);
Matrix random_complex_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed);
// Gaussian matrix rescaled to unit determinant (resampled if near singular).
Matrix random_special_linear(std::size_t n, std::uint64_t seed);
Matrix random_unitary(std::size_t n, std::uint64_t seed);

}  // namespace entevolve
