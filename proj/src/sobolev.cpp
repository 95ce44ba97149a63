#include "anisorec/sobolev.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "anisorec/error.hpp"
#include "anisorec/rng.hpp"

namespace anisorec {

double basis_normalization(int d) { return std::pow(2.0 * kPi, -0.5 * d); }

std::size_t class_dim(const SmoothnessClass& cls) {
  return std::visit([](const auto& c) { return c.dim(); }, cls);
}

double class_weight(std::span<const int> n, const SmoothnessClass& cls) {
  return std::visit(
      [&](const auto& c) -> double {
        if constexpr (std::is_same_v<std::decay_t<decltype(c)>, AnisotropyMixed>) {
          return mixed_weight(n, c);
        } else {
          return sum_weight(n, c);
        }
      },
      cls);
}

namespace {

std::string join(std::span<const double> v) {
  std::ostringstream os;
  os.precision(17);
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
  return os.str();
}

} // namespace

std::string class_label(const SmoothnessClass& cls) {
  if (const auto* m = std::get_if<AnisotropyMixed>(&cls)) return "mixed:" + join(m->alpha());
  return "sum:" + join(std::get<AnisotropySum>(cls).beta());
}

SmoothnessClass parse_class(const std::string& label) {
  const auto colon = label.find(':');
  detail::require(colon != std::string::npos, "smoothness class must look like mixed:a1,a2 or sum:b1,b2");
  const std::string kind = label.substr(0, colon);
  std::vector<double> params;
  std::stringstream ss(label.substr(colon + 1));
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      params.push_back(std::stod(item, &used));
      detail::require(used == item.size(), "bad number in smoothness class: " + item);
    } catch (const std::logic_error&) {
      throw PreconditionError("bad number in smoothness class: " + item);
    }
  }
  if (kind == "mixed") return AnisotropyMixed(std::move(params));
  if (kind == "sum") return AnisotropySum(std::move(params));
  throw PreconditionError("unknown smoothness class kind: " + kind);
}

PeriodicFunction::PeriodicFunction(int dim) : dim_(dim) {
  detail::require(dim >= 1, "PeriodicFunction: dim must be >= 1");
}

PeriodicFunction::PeriodicFunction(int dim, CoeffMap coeffs) : dim_(dim), coeffs_(std::move(coeffs)) {
  detail::require(dim >= 1, "PeriodicFunction: dim must be >= 1");
  for (const auto& [n, c] : coeffs_) {
    if (n.dim() != static_cast<std::size_t>(dim)) throw DimensionMismatch("PeriodicFunction: index length differs from dim");
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) throw NonFiniteInput("PeriodicFunction: non-finite coefficient");
  }
}

PeriodicFunction::PeriodicFunction(const IndexSet& support, std::span<const Complex> coeffs)
    : dim_(support.dim()) {
  detail::require(dim_ >= 1, "PeriodicFunction: dim must be >= 1");
  if (support.size() != coeffs.size()) throw DimensionMismatch("PeriodicFunction: support and coefficient lengths differ");
  for (std::size_t i = 0; i < coeffs.size(); ++i) {
    if (!std::isfinite(coeffs[i].real()) || !std::isfinite(coeffs[i].imag())) {
      throw NonFiniteInput("PeriodicFunction: non-finite coefficient");
    }
    coeffs_.emplace_hint(coeffs_.end(), support.index(i), coeffs[i]);
  }
}

Complex PeriodicFunction::coefficient(const MultiIndex& n) const {
  const auto it = coeffs_.find(n);
  return it == coeffs_.end() ? Complex{} : it->second;
}

IndexSet PeriodicFunction::support() const {
  std::vector<MultiIndex> rows;
  rows.reserve(coeffs_.size());
  for (const auto& kv : coeffs_) rows.push_back(kv.first);
  if (rows.empty()) return IndexSet(dim_);
  return IndexSet::from_indices(dim_, std::move(rows));
}

std::vector<Complex> PeriodicFunction::values() const {
  std::vector<Complex> out;
  out.reserve(coeffs_.size());
  for (const auto& kv : coeffs_) out.push_back(kv.second);
  return out;
}

Complex evaluate(const PeriodicFunction& f, std::span<const double> x) {
  if (x.size() != static_cast<std::size_t>(f.dim())) throw DimensionMismatch("evaluate: point has wrong dimension");
  Complex acc{};
  for (const auto& [n, c] : f.coefficients()) {
    double phase = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) phase += n[j] * x[j];
    acc += c * std::polar(1.0, phase);
  }
  return acc * basis_normalization(f.dim());
}

std::vector<Complex> evaluate_many(const PeriodicFunction& f, std::span<const double> points) {
  const auto d = static_cast<std::size_t>(f.dim());
  if (points.size() % d != 0) throw DimensionMismatch("evaluate_many: point buffer is not a multiple of dim");
  const std::size_t m = points.size() / d;

  const IndexSet supp = f.support();
  const std::vector<Complex> coeffs = f.values();
  const std::vector<int> kmax = supp.max_abs_per_coordinate();
  std::vector<std::size_t> offset(d + 1, 0);
  for (std::size_t j = 0; j < d; ++j) offset[j + 1] = offset[j] + 2 * static_cast<std::size_t>(kmax[j]) + 1;

  std::vector<Complex> table(offset[d]);
  std::vector<Complex> out(m);
  const double norm = basis_normalization(f.dim());
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      const double xj = points[i * d + j];
      const int K = kmax[j];
      for (int k = -K; k <= K; ++k) table[offset[j] + static_cast<std::size_t>(k + K)] = std::polar(1.0, k * xj);
    }
    Complex acc{};
    for (std::size_t t = 0; t < supp.size(); ++t) {
      const auto n = supp[t];
      Complex e = table[offset[0] + static_cast<std::size_t>(n[0] + kmax[0])];
      for (std::size_t j = 1; j < d; ++j) e *= table[offset[j] + static_cast<std::size_t>(n[j] + kmax[j])];
      acc += coeffs[t] * e;
    }
    out[i] = acc * norm;
  }
  return out;
}

double sobolev_norm(const PeriodicFunction& f, const SmoothnessClass& cls) {
  if (class_dim(cls) != static_cast<std::size_t>(f.dim())) throw DimensionMismatch("sobolev_norm: class and function dims differ");
  double acc = 0.0;
  for (const auto& [n, c] : f.coefficients()) {
    const double w = class_weight(n.view(), cls);
    acc += w * w * std::norm(c);
  }
  return std::sqrt(acc);
}

double l2_error(const PeriodicFunction& f, const PeriodicFunction& g) {
  if (f.dim() != g.dim()) throw DimensionMismatch("l2_error: dims differ");
  double acc = 0.0;
  auto it = f.coefficients().begin();
  auto jt = g.coefficients().begin();
  const auto fe = f.coefficients().end();
  const auto ge = g.coefficients().end();
  const CanonicalLess less;
  while (it != fe || jt != ge) {
    if (jt == ge || (it != fe && less(it->first, jt->first))) {
      acc += std::norm(it->second);
      ++it;
    } else if (it == fe || less(jt->first, it->first)) {
      acc += std::norm(jt->second);
      ++jt;
    } else {
      acc += std::norm(it->second - jt->second);
      ++it;
      ++jt;
    }
  }
  return std::sqrt(acc);
}

double l2_norm(const PeriodicFunction& f) { return l2_error(f, PeriodicFunction(f.dim())); }

PeriodicFunction generate_extremal(const SmoothnessClass& cls, const IndexSet& support, double decay_margin,
                                   std::uint64_t seed) {
  detail::require(!support.empty(), "generate_extremal: support must be non-empty");
  detail::require(decay_margin > 0.0 && std::isfinite(decay_margin), "generate_extremal: decay_margin must be > 0");
  if (class_dim(cls) != static_cast<std::size_t>(support.dim())) throw DimensionMismatch("generate_extremal: class and support dims differ");

  const CounterRng phases(seed, streams::kPhases);
  std::vector<Complex> c(support.size());
  double norm_sq = 0.0;
  for (std::size_t i = 0; i < support.size(); ++i) {
    const double w = class_weight(support[i], cls);
    const double mag = std::pow(w, -(1.0 + decay_margin));
    c[i] = std::polar(mag, 2.0 * kPi * phases.uniform_at(i));
    norm_sq += w * w * mag * mag;
  }
  const double scale = 1.0 / std::sqrt(norm_sq);
  for (auto& v : c) v *= scale;
  return PeriodicFunction(support, c);
}

PeriodicFunction generate_sparse(const IndexSet& support, std::size_t s, std::uint64_t seed) {
  detail::require(s >= 1, "generate_sparse: s must be >= 1");
  detail::require(s <= support.size(), "generate_sparse: s exceeds the support size");
  CounterRng pick(seed, streams::kSupport);
  std::vector<std::size_t> pos(support.size());
  std::iota(pos.begin(), pos.end(), std::size_t{0});
  for (std::size_t i = 0; i < s; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(pick.next_below(pos.size() - i));
    std::swap(pos[i], pos[j]);
  }
  const CounterRng phases(seed, streams::kPhases);
  PeriodicFunction::CoeffMap coeffs;
  for (std::size_t i = 0; i < s; ++i) {
    coeffs.emplace(support.index(pos[i]), std::polar(1.0, 2.0 * kPi * phases.uniform_at(i)));
  }
  return PeriodicFunction(support.dim(), std::move(coeffs));
}

void to_json(nlohmann::json& j, const PeriodicFunction& f) {
  nlohmann::json entries = nlohmann::json::array();
  for (const auto& [n, c] : f.coefficients()) entries.push_back({n.entries, c.real(), c.imag()});
  j = {{"dim", f.dim()}, {"entries", std::move(entries)}};
}

PeriodicFunction periodic_function_from_json(const nlohmann::json& j) {
  const int dim = j.at("dim").get<int>();
  PeriodicFunction::CoeffMap coeffs;
  for (const auto& e : j.at("entries")) {
    detail::require(e.is_array() && e.size() == 3, "function entry must be [[n...], re, im]");
    coeffs.emplace(MultiIndex(e[0].get<std::vector<int>>()), Complex(e[1].get<double>(), e[2].get<double>()));
  }
  return PeriodicFunction(dim, std::move(coeffs));
}

} // namespace anisorec
