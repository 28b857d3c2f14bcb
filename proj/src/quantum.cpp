#include "entevolve/quantum.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "entevolve/random.hpp"

namespace entevolve {

namespace {

void check_dims(BipartiteDims dims) {
  if (dims.a == 0 || dims.b == 0) {
    throw Error(ErrorCode::InvalidDimension, "subsystem dimension must be >= 1");
  }
}

double hermitian_defect(const Matrix& m) {
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

void validate_operator(BipartiteDims dims, const Matrix& m, double tol) {
  check_dims(dims);
  const auto n = static_cast<Eigen::Index>(dims.total());
  if (m.rows() != n || m.cols() != n) {
    std::ostringstream os;
    os << "density matrix is " << m.rows() << "x" << m.cols() << " but dims give "
       << n;
    throw Error(ErrorCode::DimensionMismatch, os.str());
  }
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if (hermitian_defect(m) > tol * scale) {
    throw Error(ErrorCode::NotHermitian, "density matrix is not Hermitian");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -tol * std::max(1.0, m.trace().real())) {
    throw Error(ErrorCode::NotPositive, "density matrix has a negative eigenvalue");
  }
}

Matrix identity(std::size_t d) {
  const auto n = static_cast<Eigen::Index>(d);
  return Matrix::Identity(n, n);
}

}  // namespace

// ---------------------------------------------------------------------------

PureState::PureState(BipartiteDims dims, Vector amplitudes) {
  *this = raw(dims, std::move(amplitudes));
  const double n = amps_.norm();
  if (n == 0.0) {
    throw Error(ErrorCode::ZeroState, "cannot normalize the zero vector");
  }
  amps_ /= n;
}

PureState PureState::raw(BipartiteDims dims, Vector amplitudes) {
  check_dims(dims);
  if (static_cast<std::size_t>(amplitudes.size()) != dims.total()) {
    std::ostringstream os;
    os << "state has " << amplitudes.size() << " amplitudes but dims give "
       << dims.total();
    throw Error(ErrorCode::DimensionMismatch, os.str());
  }
  PureState s;
  s.dims_ = dims;
  s.amps_ = std::move(amplitudes);
  return s;
}

bool PureState::is_normalized(double tol) const {
  return std::abs(amps_.norm() - 1.0) <= tol;
}

Matrix PureState::projector() const { return amps_ * amps_.adjoint(); }

DensityOperator DensityOperator::checked(BipartiteDims dims, Matrix m, double tol) {
  DensityOperator rho = unnormalized(dims, std::move(m), tol);
  if (!rho.normalized_) {
    throw Error(ErrorCode::NotNormalized,
                "density matrix trace " + std::to_string(rho.trace()) + " is not 1");
  }
  return rho;
}

DensityOperator DensityOperator::unnormalized(BipartiteDims dims, Matrix m, double tol) {
  validate_operator(dims, m, tol);
  DensityOperator rho;
  rho.dims_ = dims;
  rho.m_ = std::move(m);
  rho.normalized_ = std::abs(rho.trace() - 1.0) <= tol;
  return rho;
}

DensityOperator DensityOperator::from_pure(const PureState& psi) {
  DensityOperator rho;
  rho.dims_ = psi.dims();
  rho.m_ = psi.projector();
  rho.normalized_ = psi.is_normalized();
  return rho;
}

KrausChannel::KrausChannel(std::vector<Matrix> operators) : ops_(std::move(operators)) {
  if (ops_.empty()) {
    throw Error(ErrorCode::InvalidArgument, "a channel needs at least one Kraus operator");
  }
  for (const auto& k : ops_) {
    if (k.rows() == 0 || k.cols() == 0) {
      throw Error(ErrorCode::InvalidDimension, "empty Kraus operator");
    }
    if (k.rows() != ops_.front().rows() || k.cols() != ops_.front().cols()) {
      throw Error(ErrorCode::ShapeMismatch, "Kraus operators differ in shape");
    }
  }
}

std::size_t SchmidtDecomposition::rank(double threshold) const {
  return static_cast<std::size_t>(
      std::count_if(coefficients.begin(), coefficients.end(),
                    [&](double w) { return std::sqrt(w) > threshold; }));
}

Vector SchmidtDecomposition::reconstruct() const {
  const Eigen::Index da = left.rows();
  const Eigen::Index db = right.rows();
  Vector out = Vector::Zero(da * db);
  for (std::size_t k = 0; k < coefficients.size(); ++k) {
    const auto col = static_cast<Eigen::Index>(k);
    Matrix term = left.col(col) * right.col(col).transpose();
    out += std::sqrt(coefficients[k]) * vectorize(term);
  }
  return out;
}

// ---------------------------------------------------------------------------

KrausChannel identity_channel(std::size_t d) {
  if (d == 0) throw Error(ErrorCode::InvalidDimension, "identity channel needs d >= 1");
  return KrausChannel({identity(d)});
}

KrausChannel unitary_channel(const Matrix& u) { return KrausChannel({u}); }

KrausChannel amplitude_damping(double gamma) {
  if (!(gamma >= 0.0 && gamma <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "amplitude damping needs gamma in [0, 1]");
  }
  Matrix k0 = Matrix::Zero(2, 2);
  Matrix k1 = Matrix::Zero(2, 2);
  k0(0, 0) = 1.0;
  k0(1, 1) = std::sqrt(1.0 - gamma);
  k1(0, 1) = std::sqrt(gamma);
  return KrausChannel({k0, k1});
}

KrausChannel dephasing(double p) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "dephasing needs p in [0, 1]");
  }
  Matrix z = Matrix::Zero(2, 2);
  z(0, 0) = 1.0;
  z(1, 1) = -1.0;
  return KrausChannel({std::sqrt(1.0 - p / 2.0) * identity(2), std::sqrt(p / 2.0) * z});
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

Vector vectorize(const Matrix& m) {
  Vector v(m.size());
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) v(i * m.cols() + j) = m(i, j);
  }
  return v;
}

KrausChannel tensor_product(const KrausChannel& a, const KrausChannel& b) {
  std::vector<Matrix> ops;
  ops.reserve(a.size() * b.size());
  for (const auto& x : a.operators()) {
    for (const auto& y : b.operators()) ops.push_back(kron(x, y));
  }
  return KrausChannel(std::move(ops));
}

KrausChannel extend_one_sided(const KrausChannel& c, Side side, std::size_t other_dim) {
  const KrausChannel id = identity_channel(other_dim);
  return side == Side::A ? tensor_product(c, id) : tensor_product(id, c);
}

PureState bell_state(std::size_t d) {
  if (d == 0) throw Error(ErrorCode::InvalidDimension, "Bell state needs d >= 1");
  const auto n = static_cast<Eigen::Index>(d);
  Vector v = Vector::Zero(n * n);
  const double amp = 1.0 / std::sqrt(static_cast<double>(d));
  for (Eigen::Index k = 0; k < n; ++k) v(k * n + k) = amp;
  return PureState::raw({d, d}, std::move(v));
}

Matrix map_from_state(const PureState& psi) {
  const auto da = static_cast<Eigen::Index>(psi.dims().a);
  const auto db = static_cast<Eigen::Index>(psi.dims().b);
  Matrix m(da, db);
  for (Eigen::Index i = 0; i < da; ++i) {
    for (Eigen::Index j = 0; j < db; ++j) m(i, j) = psi.amplitudes()(i * db + j);
  }
  return m;
}

PureState state_from_map(const Matrix& m, Normalize normalize) {
  if (m.rows() == 0 || m.cols() == 0) {
    throw Error(ErrorCode::InvalidDimension, "state_from_map on an empty matrix");
  }
  const BipartiteDims dims{static_cast<std::size_t>(m.rows()),
                           static_cast<std::size_t>(m.cols())};
  if (normalize == Normalize::Yes) return PureState(dims, vectorize(m));
  return PureState::raw(dims, vectorize(m));
}

PureState swap_subsystems(const PureState& psi) {
  return PureState::raw({psi.dims().b, psi.dims().a},
                        vectorize(map_from_state(psi).transpose()));
}

DensityOperator apply_channel(const KrausChannel& c, const DensityOperator& rho) {
  if (c.dim_in() != rho.dims().total()) {
    std::ostringstream os;
    os << "channel input dimension " << c.dim_in() << " does not match state dimension "
       << rho.dims().total();
    throw Error(ErrorCode::DimensionMismatch, os.str());
  }
  const auto n = static_cast<Eigen::Index>(c.dim_out());
  Matrix out = Matrix::Zero(n, n);
  for (const auto& k : c.operators()) out += k * rho.matrix() * k.adjoint();
  out = 0.5 * (out + out.adjoint()).eval();
  const BipartiteDims dims =
      c.dim_out() == c.dim_in() ? rho.dims() : BipartiteDims{c.dim_out(), 1};
  return DensityOperator::unnormalized(dims, std::move(out));
}

DensityOperator apply_one_sided(const KrausChannel& c, const DensityOperator& rho,
                                Side side) {
  const std::size_t acted = side == Side::A ? rho.dims().a : rho.dims().b;
  const std::size_t other = side == Side::A ? rho.dims().b : rho.dims().a;
  if (c.dim_in() != acted) {
    std::ostringstream os;
    os << "one-sided channel input dimension " << c.dim_in()
       << " does not match subsystem dimension " << acted;
    throw Error(ErrorCode::DimensionMismatch, os.str());
  }
  const KrausChannel full = extend_one_sided(c, side, other);
  const auto n = static_cast<Eigen::Index>(full.dim_out());
  Matrix out = Matrix::Zero(n, n);
  for (const auto& k : full.operators()) out += k * rho.matrix() * k.adjoint();
  out = 0.5 * (out + out.adjoint()).eval();
  const BipartiteDims dims = side == Side::A ? BipartiteDims{c.dim_out(), other}
                                             : BipartiteDims{other, c.dim_out()};
  return DensityOperator::unnormalized(dims, std::move(out));
}

DensityOperator choi_state(const KrausChannel& c) {
  if (!c.square()) {
    throw Error(ErrorCode::NonSquare, "Choi state needs square Kraus operators");
  }
  const std::size_t d = c.dim_in();
  const auto n = static_cast<Eigen::Index>(d * d);
  Matrix rho = Matrix::Zero(n, n);
  for (const auto& k : c.operators()) {
    const Vector v = vectorize(k);
    rho += v * v.adjoint();
  }
  rho /= static_cast<double>(d);
  return DensityOperator::unnormalized({d, d}, std::move(rho));
}

bool is_trace_preserving(const KrausChannel& c, double tol) {
  if (!c.square()) return false;
  Matrix sum = Matrix::Zero(c.operators().front().cols(), c.operators().front().cols());
  for (const auto& k : c.operators()) sum += k.adjoint() * k;
  return (sum - identity(c.dim_in())).cwiseAbs().maxCoeff() <= tol;
}

bool is_unital(const KrausChannel& c, double tol) {
  if (!c.square()) return false;
  Matrix sum = Matrix::Zero(c.operators().front().rows(), c.operators().front().rows());
  for (const auto& k : c.operators()) sum += k * k.adjoint();
  return (sum - identity(c.dim_out())).cwiseAbs().maxCoeff() <= tol;
}

SchmidtDecomposition schmidt(const PureState& psi) {
  const Matrix a = map_from_state(psi);
  Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  std::vector<std::size_t> order(static_cast<std::size_t>(sv.size()));
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    return sv(static_cast<Eigen::Index>(x)) > sv(static_cast<Eigen::Index>(y));
  });

  SchmidtDecomposition out;
  out.left.resize(a.rows(), sv.size());
  out.right.resize(a.cols(), sv.size());
  for (std::size_t k = 0; k < order.size(); ++k) {
    const auto src = static_cast<Eigen::Index>(order[k]);
    const auto dst = static_cast<Eigen::Index>(k);
    out.coefficients.push_back(sv(src) * sv(src));
    out.left.col(dst) = svd.matrixU().col(src);
    // A = U S V^dagger, so the B-side vectors are the conjugated columns of V.
    out.right.col(dst) = svd.matrixV().col(src).conjugate();
  }
  return out;
}

std::size_t operator_rank(const Matrix& m, double threshold) {
  Eigen::JacobiSVD<Matrix> svd(m);
  return static_cast<std::size_t>((svd.singularValues().array() > threshold).count());
}

// ---------------------------------------------------------------------------

Tensor state_tensor(const PureState& psi) {
  const auto& amps = psi.amplitudes();
  return Tensor({IndexSpec(psi.dims().a, Variance::Down),
                 IndexSpec(psi.dims().b, Variance::Down)},
                std::vector<complex>(amps.data(), amps.data() + amps.size()));
}

Tensor operator_tensor(const Matrix& m) {
  const Vector v = vectorize(m);
  return Tensor({IndexSpec(static_cast<std::size_t>(m.rows()), Variance::Down),
                 IndexSpec(static_cast<std::size_t>(m.cols()), Variance::Up)},
                std::vector<complex>(v.data(), v.data() + v.size()));
}

Tensor channel_tensor(const KrausChannel& c) {
  const std::size_t dout = c.dim_out();
  const std::size_t din = c.dim_in();
  Tensor t = Tensor::zeros({IndexSpec(dout, Variance::Down), IndexSpec(dout, Variance::Up),
                            IndexSpec(din, Variance::Up), IndexSpec(din, Variance::Down)});
  for (const auto& k : c.operators()) {
    for (std::size_t o = 0; o < dout; ++o) {
      for (std::size_t op = 0; op < dout; ++op) {
        for (std::size_t i = 0; i < din; ++i) {
          for (std::size_t ip = 0; ip < din; ++ip) {
            t.at({o, op, i, ip}) +=
                k(static_cast<Eigen::Index>(o), static_cast<Eigen::Index>(i)) *
                std::conj(k(static_cast<Eigen::Index>(op), static_cast<Eigen::Index>(ip)));
          }
        }
      }
    }
  }
  return t;
}

Matrix matrix_from_tensor(const Tensor& t) {
  if (t.rank() != 2) {
    throw Error(ErrorCode::ShapeMismatch, "matrix_from_tensor needs a valence-2 tensor");
  }
  const auto rows = static_cast<Eigen::Index>(t.index(0).dim);
  const auto cols = static_cast<Eigen::Index>(t.index(1).dim);
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) {
      m(i, j) = t[static_cast<std::size_t>(i * cols + j)];
    }
  }
  return m;
}

// ---------------------------------------------------------------------------

Matrix random_complex_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  Rng rng(seed);
  Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = rng.complex_normal();
  }
  return m;
}

PureState random_pure_state(std::size_t da, std::size_t db, std::uint64_t seed) {
  check_dims({da, db});
  return PureState({da, db}, random_complex_matrix(da * db, 1, seed).col(0));
}

KrausChannel random_channel(std::size_t d, std::size_t kraus_count, std::uint64_t seed) {
  if (d == 0) throw Error(ErrorCode::InvalidDimension, "random_channel needs d >= 1");
  if (kraus_count == 0) {
    throw Error(ErrorCode::InvalidArgument, "random_channel needs at least one operator");
  }
  const auto n = static_cast<Eigen::Index>(d);
  const auto k = static_cast<Eigen::Index>(kraus_count);
  // Stacked Kraus operators form an isometry V with V^dagger V = 1.
  const Matrix g = random_complex_matrix(d * kraus_count, d, seed);
  Eigen::HouseholderQR<Matrix> qr(g);
  const Matrix v = qr.householderQ() * Matrix::Identity(n * k, n);
  std::vector<Matrix> ops;
  for (Eigen::Index j = 0; j < k; ++j) ops.push_back(v.block(j * n, 0, n, n));
  return KrausChannel(std::move(ops));
}

DensityOperator random_density(BipartiteDims dims, std::size_t rank, std::uint64_t seed) {
  check_dims(dims);
  if (rank == 0) throw Error(ErrorCode::InvalidArgument, "random_density needs rank >= 1");
  if (rank > dims.total()) {
    throw Error(ErrorCode::RankTooLarge, "rank " + std::to_string(rank) +
                                             " exceeds dimension " +
                                             std::to_string(dims.total()));
  }
  const Matrix g = random_complex_matrix(dims.total(), rank, seed);
  Matrix rho = g * g.adjoint();
  rho /= rho.trace().real();
  rho = 0.5 * (rho + rho.adjoint()).eval();
  return DensityOperator::checked(dims, std::move(rho));
}

Matrix random_special_linear(std::size_t n, std::uint64_t seed) {
  if (n == 0) throw Error(ErrorCode::InvalidDimension, "SL(n) needs n >= 1");
  for (std::uint64_t attempt = 0;; ++attempt) {
    const Matrix g = random_complex_matrix(n, n, derive_seed(seed, attempt));
    const complex det = g.determinant();
    if (std::abs(det) < 1e-6) continue;
    return g / std::pow(det, 1.0 / static_cast<double>(n));
  }
}

Matrix random_unitary(std::size_t n, std::uint64_t seed) {
  const Matrix g = random_complex_matrix(n, n, seed);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < q.cols(); ++j) {
    const complex diag = r(j, j);
    if (std::abs(diag) > 0.0) q.col(j) *= diag / std::abs(diag);
  }
  return q;
}

}  // namespace entevolve

namespace entevolve {

namespace {

void check_duality_inputs(const KrausChannel& c, const PureState& psi) {
  if (!c.square()) {
    throw Error(ErrorCode::NonSquare, "duality identity needs square Kraus operators");
  }
  if (!psi.dims().square() || psi.dims().a != c.dim_in()) {
    std::ostringstream os;
    os << "duality identity needs a " << c.dim_in() << "x" << c.dim_in()
       << " state, got " << psi.dims().a << "x" << psi.dims().b;
    throw Error(ErrorCode::DimensionMismatch, os.str());
  }
}

}  // namespace

Matrix duality_lhs(const KrausChannel& c, const PureState& psi) {
  check_duality_inputs(c, psi);
  return apply_one_sided(c, DensityOperator::from_pure(psi), Side::A).matrix();
}

Matrix duality_rhs(const KrausChannel& c, const PureState& psi) {
  check_duality_inputs(c, psi);
  const std::size_t d = c.dim_in();
  const Matrix m = std::sqrt(static_cast<double>(d)) * map_from_state(psi);
  const Matrix lift = kron(identity(d), m.transpose());
  return lift * choi_state(c).matrix() * lift.adjoint();
}

VerificationReport duality_evolution_identity(const KrausChannel& c, const PureState& psi,
                                              double tol) {
  const Matrix lhs = duality_lhs(c, psi);
  const Matrix rhs = duality_rhs(c, psi);
  VerificationReport report;
  report.check = "duality";
  report.mode = "one-sided";
  report.tolerance = tol;
  TrialRecord rec;
  rec.residual = (lhs - rhs).cwiseAbs().maxCoeff();
  rec.lhs = lhs.trace().real();
  rec.rhs = rhs.trace().real();
  rec.pass = rec.residual <= tol;
  report.records.push_back(rec);
  return report;
}

}  // namespace entevolve
