#include "anisorec/sensing.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <string>

#include <Eigen/Dense>

#include "anisorec/error.hpp"
#include "anisorec/rng.hpp"

namespace anisorec {

namespace {

void require_finite(std::span<const Complex> v, const char* what) {
  for (const auto& c : v) {
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) throw NonFiniteInput(std::string(what) + ": non-finite entry");
  }
}

constexpr std::size_t kSparseRatio = 8;

} // namespace

SampleSet::SampleSet(int dim, std::uint64_t seed, std::vector<double> coords)
    : dim_(dim), seed_(seed), coords_(std::move(coords)) {
  detail::require(dim >= 1, "SampleSet: dim must be >= 1");
  if (coords_.size() % static_cast<std::size_t>(dim) != 0) throw DimensionMismatch("SampleSet: coordinate count is not a multiple of dim");
  detail::require(!coords_.empty(), "SampleSet: needs at least one point");
  for (double c : coords_) {
    detail::require(std::isfinite(c) && c >= -kPi && c < kPi, "SampleSet: coordinates must lie in [-pi, pi)");
  }
}

SampleSet draw_uniform_samples(std::size_t m, int d, std::uint64_t seed) {
  detail::require(m >= 1, "draw_uniform_samples: m must be >= 1");
  detail::require(d >= 1, "draw_uniform_samples: d must be >= 1");
  const CounterRng rng(seed, streams::kSamples);
  std::vector<double> coords(m * static_cast<std::size_t>(d));
  for (std::size_t t = 0; t < coords.size(); ++t) {
    double x = -kPi + 2.0 * kPi * rng.uniform_at(t);
    if (x >= kPi) x = -kPi;  // rounding at the top of the range wraps onto the torus
    coords[t] = x;
  }
  return SampleSet(d, seed, std::move(coords));
}

void to_json(nlohmann::json& j, const SampleSet& x) {
  nlohmann::json pts = nlohmann::json::array();
  for (std::size_t i = 0; i < x.size(); ++i) {
    const auto p = x.point(i);
    pts.push_back(std::vector<double>(p.begin(), p.end()));
  }
  j = {{"dim", x.dim()}, {"seed", x.seed()}, {"points", std::move(pts)}};
}

SampleSet sample_set_from_json(const nlohmann::json& j) {
  const int dim = j.at("dim").get<int>();
  std::vector<double> coords;
  for (const auto& p : j.at("points")) {
    const auto v = p.get<std::vector<double>>();
    if (v.size() != static_cast<std::size_t>(dim)) throw DimensionMismatch("sample point has wrong dimension");
    coords.insert(coords.end(), v.begin(), v.end());
  }
  return SampleSet(dim, j.value("seed", std::uint64_t{0}), std::move(coords));
}

MeasurementOperator::MeasurementOperator(SampleSet samples, IndexSet columns, bool scaled, OperatorOptions options)
    : samples_(std::move(samples)),
      columns_(std::move(columns)),
      scaled_(scaled),
      kernels_(options.kernels != nullptr ? options.kernels : &kernels::active()) {
  if (samples_.dim() != columns_.dim()) throw DimensionMismatch("MeasurementOperator: sample and index dims differ");
  detail::require(!columns_.empty(), "MeasurementOperator: index set must be non-empty");

  const auto d = static_cast<std::size_t>(columns_.dim());
  kmax_ = columns_.max_abs_per_coordinate();
  table_offset_.assign(d + 1, 0);
  for (std::size_t j = 0; j < d; ++j) table_offset_[j + 1] = table_offset_[j] + 2 * static_cast<std::size_t>(kmax_[j]) + 1;

  const std::size_t m = rows();
  const std::size_t n = cols();
  if (m * n <= options.dense_limit) {
    auto dense = std::make_shared<Dense>();
    dense->re.resize(m * n);
    dense->im.resize(m * n);
    std::vector<Complex> table;
    const double scale = entry_scale();
    for (std::size_t i = 0; i < m; ++i) {
      fill_row_tables(i, table);
      for (std::size_t k = 0; k < n; ++k) {
        const auto idx = columns_[k];
        Complex e = table[static_cast<std::size_t>(idx[0] + kmax_[0])];
        for (std::size_t j = 1; j < d; ++j) e *= table[table_offset_[j] + static_cast<std::size_t>(idx[j] + kmax_[j])];
        dense->re[i * n + k] = scale * e.real();
        dense->im[i * n + k] = scale * e.imag();
      }
    }
    dense_ = std::move(dense);
  }
}

double MeasurementOperator::entry_scale() const noexcept {
  const double s = 1.0 / std::sqrt(static_cast<double>(rows()));
  return scaled_ ? s : s * basis_normalization(columns_.dim());
}

void MeasurementOperator::fill_row_tables(std::size_t i, std::vector<Complex>& table) const {
  const auto d = static_cast<std::size_t>(columns_.dim());
  table.resize(table_offset_[d]);
  const auto x = samples_.point(i);
  for (std::size_t j = 0; j < d; ++j) {
    const int K = kmax_[j];
    for (int k = -K; k <= K; ++k) table[table_offset_[j] + static_cast<std::size_t>(k + K)] = std::polar(1.0, k * x[j]);
  }
}

Complex MeasurementOperator::entry(std::size_t i, std::size_t k) const {
  detail::require(i < rows() && k < cols(), "MeasurementOperator::entry: index out of range");
  if (dense_) return {dense_->re[i * cols() + k], dense_->im[i * cols() + k]};
  const auto x = samples_.point(i);
  const auto n = columns_[k];
  double phase = 0.0;
  for (std::size_t j = 0; j < n.size(); ++j) phase += n[j] * x[j];
  return std::polar(entry_scale(), phase);
}

void MeasurementOperator::apply(std::span<const Complex> z, std::span<Complex> out) const {
  if (z.size() != cols() || out.size() != rows()) throw DimensionMismatch("MeasurementOperator::apply: expected z of length N and output of length m");
  require_finite(z, "MeasurementOperator::apply");
  if (!dense_) {
    apply_matrix_free(z, out);
    return;
  }
  const std::size_t m = rows();
  const std::size_t n = cols();
  std::vector<double> buf(2 * (n + m));
  double* zre = buf.data();
  double* zim = zre + n;
  double* yre = zim + n;
  double* yim = yre + m;
  for (std::size_t k = 0; k < n; ++k) {
    zre[k] = z[k].real();
    zim[k] = z[k].imag();
  }
  kernels_->gemv(dense_->re.data(), dense_->im.data(), m, n, n, zre, zim, yre, yim);
  for (std::size_t i = 0; i < m; ++i) out[i] = {yre[i], yim[i]};
}

std::vector<Complex> MeasurementOperator::apply(std::span<const Complex> z) const {
  std::vector<Complex> out(rows());
  apply(z, out);
  return out;
}

void MeasurementOperator::adjoint(std::span<const Complex> w, std::span<Complex> out) const {
  if (w.size() != rows() || out.size() != cols()) throw DimensionMismatch("MeasurementOperator::adjoint: expected w of length m and output of length N");
  require_finite(w, "MeasurementOperator::adjoint");
  if (!dense_) {
    adjoint_matrix_free(w, out);
    return;
  }
  const std::size_t m = rows();
  const std::size_t n = cols();
  std::vector<double> buf(2 * (n + m));
  double* wre = buf.data();
  double* wim = wre + m;
  double* xre = wim + m;
  double* xim = xre + n;
  for (std::size_t i = 0; i < m; ++i) {
    wre[i] = w[i].real();
    wim[i] = w[i].imag();
  }
  kernels_->gemv_adjoint(dense_->re.data(), dense_->im.data(), m, n, n, wre, wim, xre, xim);
  for (std::size_t k = 0; k < n; ++k) out[k] = {xre[k], xim[k]};
}

void MeasurementOperator::apply_fused(std::span<const Complex> z, const RowFn& f, std::span<Complex> az,
                                      std::span<Complex> v, std::span<Complex> x) const {
  if (!dense_) {
    LinearMap::apply_fused(z, f, az, v, x);
    return;
  }
  const std::span<const Complex> zs[1] = {z};
  const std::span<Complex> azs[1] = {az}, vs[1] = {v}, xs[1] = {x};
  apply_fused_batch(zs, [&](std::size_t i, std::size_t, std::span<const Complex> in, std::span<Complex> out) { out[0] = f(i, in[0]); },
                    azs, vs, xs);
}

void MeasurementOperator::apply_fused_batch(std::span<const std::span<const Complex>> z, const BatchRowFn& f,
                                            std::span<const std::span<Complex>> az,
                                            std::span<const std::span<Complex>> v,
                                            std::span<const std::span<Complex>> x) const {
  if (!dense_) {
    LinearMap::apply_fused_batch(z, f, az, v, x);
    return;
  }
  const std::size_t m = rows();
  const std::size_t n = cols();
  const std::size_t nr = z.size();
  if (az.size() != nr || v.size() != nr || x.size() != nr) {
    throw DimensionMismatch("MeasurementOperator::apply_fused_batch: batch sizes differ");
  }
  for (std::size_t r = 0; r < nr; ++r) {
    if (z[r].size() != n || x[r].size() != n || az[r].size() != m || v[r].size() != m) {
      throw DimensionMismatch("MeasurementOperator::apply_fused_batch: buffer lengths do not match the operator");
    }
    require_finite(z[r], "MeasurementOperator::apply_fused_batch");
  }
  std::vector<double> buf(4 * n * kernels::kMaxRhs);
  std::vector<std::uint32_t> support(n * kernels::kMaxRhs);
  struct Ctx {
    const BatchRowFn* f;
    std::span<const std::span<Complex>> az;
    std::span<const std::span<Complex>> v;
    std::size_t first;
    std::size_t count;
  } ctx{&f, az, v, 0, 0};
  auto trampoline = [](void* p, std::size_t i, const double* yr, const double* yi, double* vr, double* vi) {
    auto* c = static_cast<Ctx*>(p);
    Complex in[kernels::kMaxRhs], out[kernels::kMaxRhs];
    for (std::size_t r = 0; r < c->count; ++r) in[r] = c->az[c->first + r][i] = {yr[r], yi[r]};
    (*c->f)(i, c->first, std::span<const Complex>(in, c->count), std::span<Complex>(out, c->count));
    for (std::size_t r = 0; r < c->count; ++r) {
      c->v[c->first + r][i] = out[r];
      vr[r] = out[r].real();
      vi[r] = out[r].imag();
    }
  };
  for (std::size_t first = 0; first < nr; first += kernels::kMaxRhs) {
    const std::size_t count = std::min(kernels::kMaxRhs, nr - first);
    kernels::FusedRhs rhs[kernels::kMaxRhs];
    for (std::size_t r = 0; r < count; ++r) {
      const auto zr = z[first + r];
      double* base = buf.data() + 4 * n * r;
      std::uint32_t* sup = support.data() + n * r;
      std::size_t nnz = 0;
      for (std::size_t k = 0; k < n; ++k) {
        if (zr[k] != Complex{}) sup[nnz++] = static_cast<std::uint32_t>(k);
      }
      // Soft-thresholded iterates are mostly zero; gathering the few nonzero columns is
      // cheaper than the dense product below about one in eight.
      const bool sparse = nnz * kSparseRatio <= n;
      if (sparse) {
        for (std::size_t j = 0; j < nnz; ++j) {
          base[j] = zr[sup[j]].real();
          base[n + j] = zr[sup[j]].imag();
        }
      } else {
        for (std::size_t k = 0; k < n; ++k) {
          base[k] = zr[k].real();
          base[n + k] = zr[k].imag();
        }
      }
      rhs[r] = {base, base + n, sparse ? sup : nullptr, sparse ? nnz : n, base + 2 * n, base + 3 * n};
    }
    ctx.first = first;
    ctx.count = count;
    kernels_->gemv_fused(dense_->re.data(), dense_->im.data(), m, n, n, rhs, count, trampoline, &ctx);
    for (std::size_t r = 0; r < count; ++r) {
      for (std::size_t k = 0; k < n; ++k) x[first + r][k] = {rhs[r].xre[k], rhs[r].xim[k]};
    }
  }
}

std::vector<Complex> MeasurementOperator::adjoint(std::span<const Complex> w) const {
  std::vector<Complex> out(cols());
  adjoint(w, out);
  return out;
}

void MeasurementOperator::apply_matrix_free(std::span<const Complex> z, std::span<Complex> out) const {
  const auto d = static_cast<std::size_t>(columns_.dim());
  const double scale = entry_scale();
  std::vector<Complex> table;
  for (std::size_t i = 0; i < rows(); ++i) {
    fill_row_tables(i, table);
    Complex acc{};
    for (std::size_t k = 0; k < cols(); ++k) {
      const auto idx = columns_[k];
      Complex e = table[static_cast<std::size_t>(idx[0] + kmax_[0])];
      for (std::size_t j = 1; j < d; ++j) e *= table[table_offset_[j] + static_cast<std::size_t>(idx[j] + kmax_[j])];
      acc += e * z[k];
    }
    out[i] = scale * acc;
  }
}

void MeasurementOperator::adjoint_matrix_free(std::span<const Complex> w, std::span<Complex> out) const {
  const auto d = static_cast<std::size_t>(columns_.dim());
  const double scale = entry_scale();
  std::fill(out.begin(), out.end(), Complex{});
  std::vector<Complex> table;
  for (std::size_t i = 0; i < rows(); ++i) {
    fill_row_tables(i, table);
    const Complex wi = scale * w[i];
    for (std::size_t k = 0; k < cols(); ++k) {
      const auto idx = columns_[k];
      Complex e = table[static_cast<std::size_t>(idx[0] + kmax_[0])];
      for (std::size_t j = 1; j < d; ++j) e *= table[table_offset_[j] + static_cast<std::size_t>(idx[j] + kmax_[j])];
      out[k] += std::conj(e) * wi;
    }
  }
}

std::optional<double> MeasurementOperator::norm_upper_bound() const {
  return entry_scale() * std::sqrt(static_cast<double>(rows() * cols()));
}

void MeasurementOperator::write_csv(std::ostream& os) const {
  os << "row,col,re,im\n";
  os.precision(17);
  for (std::size_t i = 0; i < rows(); ++i) {
    for (std::size_t k = 0; k < cols(); ++k) {
      const Complex e = entry(i, k);
      os << i << ',' << k << ',' << e.real() << ',' << e.imag() << '\n';
    }
  }
}

std::vector<Complex> sample_vector(const PeriodicFunction& f, const SampleSet& x) {
  if (f.dim() != x.dim()) throw DimensionMismatch("sample_vector: function and sample dims differ");
  auto values = evaluate_many(f, x.coords());
  const double s = 1.0 / std::sqrt(static_cast<double>(x.size()));
  for (auto& v : values) v *= s;
  return values;
}

std::vector<Complex> truncation_error_vector(const PeriodicFunction& f, const SampleSet& x, const IndexSet& lambda) {
  if (f.dim() != x.dim() || f.dim() != lambda.dim()) throw DimensionMismatch("truncation_error_vector: dims differ");
  PeriodicFunction::CoeffMap outside;
  for (const auto& [n, c] : f.coefficients()) {
    if (!lambda.contains(n.view())) outside.emplace(n, c);
  }
  return sample_vector(PeriodicFunction(f.dim(), std::move(outside)), x);
}

std::vector<Complex> restrict_coefficients(const PeriodicFunction& f, const IndexSet& lambda) {
  if (f.dim() != lambda.dim()) throw DimensionMismatch("restrict_coefficients: dims differ");
  std::vector<Complex> out(lambda.size());
  for (const auto& [n, c] : f.coefficients()) {
    const std::size_t pos = lambda.find(n.view());
    if (pos != lambda.size()) out[pos] = c;
  }
  return out;
}

double rip_constant_bruteforce(const MeasurementOperator& op, std::size_t s) {
  const std::size_t n = op.cols();
  const std::size_t m = op.rows();
  detail::require(s >= 1, "rip_constant_bruteforce: s must be >= 1");
  detail::require(n <= kRipMaxColumns, "rip_constant_bruteforce: at most " + std::to_string(kRipMaxColumns) + " columns");
  detail::require(s <= kRipMaxOrder, "rip_constant_bruteforce: order at most " + std::to_string(kRipMaxOrder));
  detail::require(s <= n, "rip_constant_bruteforce: order exceeds the column count");

  const double rescale = op.scaled() ? 1.0 : 1.0 / basis_normalization(op.columns().dim());
  Eigen::MatrixXcd a(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t k = 0; k < n; ++k) a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = rescale * op.entry(i, k);
  }
  const Eigen::MatrixXcd gram = a.adjoint() * a;

  std::vector<std::size_t> subset(s);
  std::iota(subset.begin(), subset.end(), std::size_t{0});
  double delta = 0.0;
  const auto ss = static_cast<Eigen::Index>(s);
  Eigen::MatrixXcd g(ss, ss);
  for (;;) {
    for (Eigen::Index p = 0; p < ss; ++p) {
      for (Eigen::Index q = 0; q < ss; ++q) {
        g(p, q) = gram(static_cast<Eigen::Index>(subset[static_cast<std::size_t>(p)]),
                       static_cast<Eigen::Index>(subset[static_cast<std::size_t>(q)]));
      }
    }
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(g, Eigen::EigenvaluesOnly);
    const auto& ev = eig.eigenvalues();
    delta = std::max({delta, ev(ss - 1) - 1.0, 1.0 - ev(0)});

    // next combination in lexicographic order
    std::size_t pos = s;
    while (pos > 0 && subset[pos - 1] == n - s + (pos - 1)) --pos;
    if (pos == 0) break;
    ++subset[pos - 1];
    for (std::size_t t = pos; t < s; ++t) subset[t] = subset[t - 1] + 1;
  }
  return delta;
}

RnspConstants RnspConstants::from_rip_quarter() noexcept {
  return {std::sqrt(2.0) / 3.0, 2.0 * std::sqrt(5.0) / 3.0};
}

RecoveryConstants recovery_constants(RnspConstants k) {
  detail::require(k.rho > 0.0 && k.rho < 1.0, "recovery_constants: rho must lie in (0, 1)");
  detail::require(k.tau > 0.0, "recovery_constants: tau must be > 0");
  const double r = k.rho;
  return {2.0 * (1.0 + r) / (1.0 - r), 4.0 * k.tau / (1.0 - r), 2.0 * (1.0 + r) * (1.0 + r) / (1.0 - r),
          2.0 * k.tau * (3.0 + r) / (1.0 - r)};
}

double lambda_upper_limit(RnspConstants k, std::size_t s) {
  detail::require(s >= 1, "lambda_upper_limit: s must be >= 1");
  detail::require(k.rho > 0.0 && k.rho < 1.0 && k.tau > 0.0, "lambda_upper_limit: invalid rNSP constants");
  return (1.0 + k.rho) / ((3.0 + k.rho) * k.tau * std::sqrt(static_cast<double>(s)));
}

ErrorCertificate srlasso_error_certificate(RnspConstants k, double lambda, std::size_t s, double sigma_s_l1,
                                           double noise_norm) {
  const RecoveryConstants c = recovery_constants(k);
  const double upper = lambda_upper_limit(k, s);
  // A relative slack of a few ulps admits lambda computed independently at the endpoint.
  if (!(lambda > 0.0) || lambda > upper * (1.0 + 1e-14)) {
    throw PreconditionError("srlasso_error_certificate: lambda must lie in (0, " + std::to_string(upper) + "]");
  }
  detail::require(sigma_s_l1 >= 0.0 && noise_norm >= 0.0, "srlasso_error_certificate: norms must be >= 0");
  const double rs = std::sqrt(static_cast<double>(s));
  return {c.c1 * sigma_s_l1 + 0.5 * (c.c1 / lambda + c.c2 * rs) * noise_norm,
          c.c3 * sigma_s_l1 / rs + 0.5 * (c.c3 / (rs * lambda) + c.c4) * noise_norm};
}

} // namespace anisorec
