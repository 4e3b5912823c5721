#pragma once

// Dense linear algebra on truncated multimode Fock spaces.
//
// Mode order is fixed everywhere: mode 0 is the driving field, modes 1.. are
// the harmonics in ascending order. Composite basis index uses row-major
// (mode 0 most significant) ordering, i.e. the Kronecker order of
// tensor_product({op_0, op_1, ...}).

#include <algorithm>
#include <complex>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace hhgqo {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;

struct DimensionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct ShapeError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct ArgumentError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Truncation dimension per mode.
class ModeDims {
 public:
  ModeDims() = default;
  explicit ModeDims(std::vector<int> dims);
  ModeDims(std::initializer_list<int> dims) : ModeDims(std::vector<int>(dims)) {}

  std::size_t modes() const { return dims_.size(); }
  int operator[](std::size_t mode) const { return dims_.at(mode); }
  const std::vector<int>& values() const { return dims_; }
  /// Product of all dims.
  Eigen::Index total() const { return total_; }
  /// Distance in the flat index between consecutive levels of `mode`.
  Eigen::Index stride(std::size_t mode) const { return strides_.at(mode); }

  /// Flat index -> per-mode occupation numbers.
  std::vector<int> unflatten(Eigen::Index flat) const;
  Eigen::Index flatten(std::span<const int> levels) const;

  /// Dims of the given subset of modes, in original relative order.
  ModeDims subset(std::span<const std::size_t> modes) const;

  bool operator==(const ModeDims& other) const { return dims_ == other.dims_; }

 private:
  std::vector<int> dims_;
  std::vector<Eigen::Index> strides_;
  Eigen::Index total_ = 0;
};

/// Pure state over a truncated multimode Fock space. Amplitudes need not be normalized.
struct FockState {
  ModeDims dims;
  CVector amplitudes;

  FockState(ModeDims d, CVector amps);
  /// Vacuum in every mode.
  static FockState vacuum(const ModeDims& d);

  double norm_squared() const { return amplitudes.squaredNorm(); }
  const Complex& at(std::span<const int> levels) const {
    return amplitudes(dims.flatten(levels));
  }
  Complex& at(std::span<const int> levels) { return amplitudes(dims.flatten(levels)); }
};

class DensityMatrix {
 public:
  /// Validates shape and Hermiticity (relative Frobenius tolerance).
  DensityMatrix(ModeDims dims, CMatrix data, double hermitian_tol = 1e-12);

  /// |psi><psi|, not normalized.
  static DensityMatrix from_pure(const FockState& psi);

  const ModeDims& dims() const { return dims_; }
  const CMatrix& data() const { return data_; }
  double trace() const { return data_.trace().real(); }
  /// Copy scaled to unit trace. Throws ValidationError on zero trace.
  DensityMatrix normalized() const;

 private:
  ModeDims dims_;
  CMatrix data_;
};

/// Relative Frobenius distance of m from its adjoint.
double hermiticity_defect(const CMatrix& m);

/// Ladder matrix with a(j-1, j) = sqrt(j).
CMatrix annihilation(int dim);
CMatrix creation(int dim);
CMatrix number_operator(int dim);

/// Kronecker product of square matrices in the given order.
CMatrix tensor_product(std::span<const CMatrix> ops);
CMatrix tensor_product(std::initializer_list<CMatrix> ops);
CVector tensor_product(std::span<const CVector> vecs);

/// op acting on `mode`, identity elsewhere.
CMatrix embed(const CMatrix& op, std::size_t mode, const ModeDims& dims);

/// Apply a single-mode operator to one factor of a multimode state without
/// forming the embedded matrix.
CVector apply_on_mode(const CMatrix& op, std::size_t mode, const ModeDims& dims,
                      const CVector& psi);

/// Reduced density matrix over `keep` (kept in original relative order).
DensityMatrix partial_trace(const DensityMatrix& rho, std::span<const std::size_t> keep);
DensityMatrix partial_trace(const DensityMatrix& rho, std::initializer_list<std::size_t> keep);

/// Transpose of the indices belonging to `mode` only.
CMatrix partial_transpose(const DensityMatrix& rho, std::size_t mode);

/// Sum of absolute eigenvalues of a Hermitian matrix.
double trace_norm(const CMatrix& m, double hermitian_tol = 1e-10);

/// Rectangular (q, p) lattice, endpoints included.
struct PhaseSpaceGrid {
  double q_min = -6.0, q_max = 6.0;
  double p_min = -6.0, p_max = 6.0;
  int q_points = 121, p_points = 121;

  /// Largest |q|, |p| a symmetric grid may span; keeps |alpha| bounded.
  static constexpr double kMaxExtent = 12.0;

  static PhaseSpaceGrid symmetric(double extent, int points) {
    if (!(extent > 0.0)) throw ArgumentError("PhaseSpaceGrid: extent must be positive");
    if (points < 2) throw ArgumentError("PhaseSpaceGrid: need at least 2 points per axis");
    extent = std::min(extent, kMaxExtent);
    return {-extent, extent, -extent, extent, points, points};
  }
  double q(int i) const;
  double p(int j) const;
  double dq() const { return q_points > 1 ? (q_max - q_min) / (q_points - 1) : 0.0; }
  double dp() const { return p_points > 1 ? (p_max - p_min) / (p_points - 1) : 0.0; }
};

/// Generalized Laguerre L_n^{(a)}(x) for n = 0..n_max by upward recurrence.
std::vector<double> laguerre_table(int n_max, double a, double x);

/// Displacement matrix element <n|D(beta)|m>.
Complex displacement_element(int n, int m, Complex beta);

/// Wigner function W(q,p) of a single-mode state on the grid; result(i, j)
/// is the value at (q(i), p(j)). Imaginary residue is checked against 1e-10.
RMatrix wigner(const DensityMatrix& rho_single_mode, const PhaseSpaceGrid& grid);
/// Same, for a bare matrix that need not be positive (e.g. a state difference).
RMatrix wigner(const CMatrix& operator_single_mode, const PhaseSpaceGrid& grid);

/// Trapezoid rule over the grid.
double integrate(const RMatrix& field, const PhaseSpaceGrid& grid);

/// sqrt(k!) and binomial(n, k) in floating point; exact integer path below 20.
double sqrt_factorial(int k);
double binomial(int n, int k);

}  // namespace hhgqo
