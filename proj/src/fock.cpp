#include "hhgqo/fock.hpp"

#include <cmath>
#include <limits>
#include <numeric>

namespace hhgqo {

ModeDims::ModeDims(std::vector<int> dims) : dims_(std::move(dims)) {
  if (dims_.empty()) throw DimensionError("ModeDims: at least one mode required");
  strides_.assign(dims_.size(), 1);
  Eigen::Index total = 1;
  for (std::size_t i = dims_.size(); i-- > 0;) {
    if (dims_[i] < 2) {
      throw DimensionError("ModeDims: mode " + std::to_string(i) + " has dim " +
                           std::to_string(dims_[i]) + " (< 2)");
    }
    strides_[i] = total;
    if (total > std::numeric_limits<Eigen::Index>::max() / dims_[i]) {
      throw DimensionError("ModeDims: total Hilbert dimension overflows the index type");
    }
    total *= dims_[i];
  }
  total_ = total;
}

std::vector<int> ModeDims::unflatten(Eigen::Index flat) const {
  std::vector<int> levels(dims_.size());
  for (std::size_t i = 0; i < dims_.size(); ++i) {
    levels[i] = static_cast<int>(flat / strides_[i]);
    flat %= strides_[i];
  }
  return levels;
}

Eigen::Index ModeDims::flatten(std::span<const int> levels) const {
  if (levels.size() != dims_.size()) throw ArgumentError("flatten: wrong number of levels");
  Eigen::Index flat = 0;
  for (std::size_t i = 0; i < dims_.size(); ++i) {
    if (levels[i] < 0 || levels[i] >= dims_[i]) throw ArgumentError("flatten: level out of range");
    flat += levels[i] * strides_[i];
  }
  return flat;
}

ModeDims ModeDims::subset(std::span<const std::size_t> modes) const {
  std::vector<int> out;
  out.reserve(modes.size());
  for (auto m : modes) out.push_back(dims_.at(m));
  return ModeDims(std::move(out));
}

FockState::FockState(ModeDims d, CVector amps) : dims(std::move(d)), amplitudes(std::move(amps)) {
  if (amplitudes.size() != dims.total()) throw ShapeError("FockState: amplitude length != total dim");
}

FockState FockState::vacuum(const ModeDims& d) {
  CVector v = CVector::Zero(d.total());
  v(0) = 1.0;
  return {d, std::move(v)};
}

double hermiticity_defect(const CMatrix& m) {
  const double scale = m.norm();
  if (scale == 0.0) return 0.0;
  return (m - m.adjoint()).norm() / scale;
}

DensityMatrix::DensityMatrix(ModeDims dims, CMatrix data, double hermitian_tol)
    : dims_(std::move(dims)), data_(std::move(data)) {
  if (data_.rows() != data_.cols() || data_.rows() != dims_.total()) {
    throw ShapeError("DensityMatrix: matrix side must equal total Hilbert dimension");
  }
  if (hermiticity_defect(data_) > hermitian_tol) {
    throw ValidationError("DensityMatrix: not Hermitian within tolerance");
  }
}

DensityMatrix DensityMatrix::from_pure(const FockState& psi) {
  return {psi.dims, psi.amplitudes * psi.amplitudes.adjoint()};
}

DensityMatrix DensityMatrix::normalized() const {
  const double tr = trace();
  if (tr == 0.0 || !std::isfinite(tr)) throw ValidationError("DensityMatrix: zero or non-finite trace");
  return {dims_, data_ / tr};
}

CMatrix annihilation(int dim) {
  if (dim < 2) throw DimensionError("annihilation: dim must be >= 2");
  CMatrix a = CMatrix::Zero(dim, dim);
  for (int j = 1; j < dim; ++j) a(j - 1, j) = std::sqrt(static_cast<double>(j));
  return a;
}

CMatrix creation(int dim) { return annihilation(dim).adjoint(); }

CMatrix number_operator(int dim) {
  if (dim < 2) throw DimensionError("number_operator: dim must be >= 2");
  CMatrix n = CMatrix::Zero(dim, dim);
  for (int j = 0; j < dim; ++j) n(j, j) = static_cast<double>(j);
  return n;
}

namespace {

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

}  // namespace

CMatrix tensor_product(std::span<const CMatrix> ops) {
  if (ops.empty()) throw ShapeError("tensor_product: empty operator list");
  for (const auto& op : ops)
    if (op.rows() != op.cols()) throw ShapeError("tensor_product: non-square factor");
  CMatrix out = ops.front();
  for (std::size_t i = 1; i < ops.size(); ++i) out = kron(out, ops[i]);
  return out;
}

CMatrix tensor_product(std::initializer_list<CMatrix> ops) {
  return tensor_product(std::span<const CMatrix>(ops.begin(), ops.size()));
}

CVector tensor_product(std::span<const CVector> vecs) {
  if (vecs.empty()) throw ShapeError("tensor_product: empty vector list");
  CVector out = vecs.front();
  for (std::size_t k = 1; k < vecs.size(); ++k) {
    const CVector& v = vecs[k];
    CVector next(out.size() * v.size());
    for (Eigen::Index i = 0; i < out.size(); ++i) next.segment(i * v.size(), v.size()) = out(i) * v;
    out = std::move(next);
  }
  return out;
}

CMatrix embed(const CMatrix& op, std::size_t mode, const ModeDims& dims) {
  if (mode >= dims.modes()) throw ArgumentError("embed: mode out of range");
  if (op.rows() != dims[mode] || op.cols() != dims[mode]) throw ShapeError("embed: operator side != mode dim");
  std::vector<CMatrix> factors;
  factors.reserve(dims.modes());
  for (std::size_t m = 0; m < dims.modes(); ++m)
    factors.push_back(m == mode ? op : CMatrix::Identity(dims[m], dims[m]));
  return tensor_product(std::span<const CMatrix>(factors));
}

CVector apply_on_mode(const CMatrix& op, std::size_t mode, const ModeDims& dims, const CVector& psi) {
  if (mode >= dims.modes()) throw ArgumentError("apply_on_mode: mode out of range");
  if (psi.size() != dims.total()) throw ShapeError("apply_on_mode: state length mismatch");
  const Eigen::Index d = dims[mode];
  if (op.rows() != d || op.cols() != d) throw ShapeError("apply_on_mode: operator side != mode dim");
  const Eigen::Index inner = dims.stride(mode);
  const Eigen::Index outer = dims.total() / (inner * d);
  CVector out = CVector::Zero(psi.size());
  for (Eigen::Index o = 0; o < outer; ++o) {
    const Eigen::Index base = o * d * inner;
    for (Eigen::Index r = 0; r < d; ++r)
      for (Eigen::Index c = 0; c < d; ++c) {
        const Complex w = op(r, c);
        if (w == Complex{}) continue;
        for (Eigen::Index i = 0; i < inner; ++i) out(base + r * inner + i) += w * psi(base + c * inner + i);
      }
  }
  return out;
}

DensityMatrix partial_trace(const DensityMatrix& rho, std::span<const std::size_t> keep) {
  const ModeDims& dims = rho.dims();
  if (keep.empty()) throw ArgumentError("partial_trace: keep set is empty");
  std::vector<bool> kept(dims.modes(), false);
  for (auto m : keep) {
    if (m >= dims.modes()) throw ArgumentError("partial_trace: mode index out of range");
    if (kept[m]) throw ArgumentError("partial_trace: duplicate mode index");
    kept[m] = true;
  }
  std::vector<std::size_t> keep_sorted, traced;
  for (std::size_t m = 0; m < dims.modes(); ++m) (kept[m] ? keep_sorted : traced).push_back(m);

  const ModeDims kept_dims = dims.subset(keep_sorted);
  if (traced.empty()) return {kept_dims, rho.data()};
  const ModeDims traced_dims = dims.subset(traced);

  // full index for every (traced, kept) pair
  const Eigen::Index nk = kept_dims.total(), nt = traced_dims.total();
  std::vector<Eigen::Index> full(static_cast<std::size_t>(nk * nt));
  for (Eigen::Index flat = 0; flat < dims.total(); ++flat) {
    const auto levels = dims.unflatten(flat);
    Eigen::Index ik = 0, it = 0;
    for (std::size_t j = 0; j < keep_sorted.size(); ++j) ik += levels[keep_sorted[j]] * kept_dims.stride(j);
    for (std::size_t j = 0; j < traced.size(); ++j) it += levels[traced[j]] * traced_dims.stride(j);
    full[static_cast<std::size_t>(it * nk + ik)] = flat;
  }

  const CMatrix& data = rho.data();
  CMatrix out = CMatrix::Zero(nk, nk);
  for (Eigen::Index t = 0; t < nt; ++t) {
    const Eigen::Index* row = &full[static_cast<std::size_t>(t * nk)];
    for (Eigen::Index j = 0; j < nk; ++j)
      for (Eigen::Index i = 0; i < nk; ++i) out(i, j) += data(row[i], row[j]);
  }
  return {kept_dims, std::move(out)};
}

DensityMatrix partial_trace(const DensityMatrix& rho, std::initializer_list<std::size_t> keep) {
  return partial_trace(rho, std::span<const std::size_t>(keep.begin(), keep.size()));
}

CMatrix partial_transpose(const DensityMatrix& rho, std::size_t mode) {
  const ModeDims& dims = rho.dims();
  if (mode >= dims.modes()) throw ArgumentError("partial_transpose: mode index out of range");
  const Eigen::Index stride = dims.stride(mode);
  const Eigen::Index d = dims[mode];
  const CMatrix& data = rho.data();
  CMatrix out(data.rows(), data.cols());
  for (Eigen::Index col = 0; col < data.cols(); ++col) {
    const Eigen::Index lc = (col / stride) % d;
    for (Eigen::Index row = 0; row < data.rows(); ++row) {
      const Eigen::Index lr = (row / stride) % d;
      // swap the mode's level between row and column
      out(row, col) = data(row + (lc - lr) * stride, col + (lr - lc) * stride);
    }
  }
  return out;
}

double trace_norm(const CMatrix& m, double hermitian_tol) {
  if (m.rows() != m.cols()) throw ShapeError("trace_norm: matrix not square");
  if (hermiticity_defect(m) > hermitian_tol) throw ValidationError("trace_norm: matrix not Hermitian");
  Eigen::SelfAdjointEigenSolver<CMatrix> es(m, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw ValidationError("trace_norm: eigensolver failed");
  return es.eigenvalues().cwiseAbs().sum();
}

double sqrt_factorial(int k) {
  if (k < 0) throw ArgumentError("sqrt_factorial: negative argument");
  if (k < 20) {
    unsigned long long f = 1;
    for (int i = 2; i <= k; ++i) f *= static_cast<unsigned long long>(i);
    return std::sqrt(static_cast<double>(f));
  }
  return std::exp(0.5 * std::lgamma(k + 1.0));
}

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  if (n < 20) {
    unsigned long long b = 1;
    for (int i = 1; i <= k; ++i) b = b * static_cast<unsigned long long>(n - k + i) / static_cast<unsigned long long>(i);
    return static_cast<double>(b);
  }
  return std::round(std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0)));
}

}  // namespace hhgqo
