#include "vr/estimator.hpp"

#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "vr/divergence.hpp"
#include "vr/models/blr.hpp"
#include "vr/numeric.hpp"
#include "vr/parallel.hpp"
#include "vr/rng.hpp"

namespace vr {

BoundValue mc_vr_estimate(const WeightSet& w, Alpha alpha) {
  BoundValue out;
  out.alpha = alpha;
  out.k_samples = w.size();
  if (w.size() == 1) {
    out.value = w[0];
    out.degenerate = !std::isfinite(w[0]);
    return out;
  }
  switch (alpha.kind()) {
    case Alpha::Kind::NegInf:
      out.value = w[w.argmax()];
      return out;
    case Alpha::Kind::PosInf:
      out.value = w[w.argmin()];
      out.degenerate = !std::isfinite(out.value);
      return out;
    case Alpha::Kind::One: {
      double acc = 0.0;
      for (double v : w.log_w()) acc += v;
      out.value = acc / static_cast<double>(w.size());
      return out;
    }
    case Alpha::Kind::Finite:
      break;
  }
  const double c = 1.0 - alpha.value();
  if (c < 0.0 && w[w.argmin()] == -std::numeric_limits<double>::infinity()) {
    // A zero-density sample carries infinite weight when alpha > 1.
    out.value = -std::numeric_limits<double>::infinity();
    out.degenerate = true;
    return out;
  }
  const double lse = logsumexp_scaled(w.log_w(), c);
  out.value = (lse - std::log(static_cast<double>(w.size()))) / c;
  return out;
}

BoundValue exact_vr_bound_blr(const BLRModel& model, const GaussianDist& q, Alpha alpha) {
  const BLRPosterior post = blr_exact_posterior(model);
  BoundValue out;
  out.alpha = alpha;
  out.value = post.log_evidence - renyi_gaussian(q, post.posterior, alpha);
  return out;
}

const BiasRow& BiasTable::at(Alpha alpha, std::size_t k) const {
  for (const auto& r : rows)
    if (r.alpha == alpha && r.k == k) return r;
  throw std::out_of_range("BiasTable: no row for alpha=" + alpha.to_string() +
                          " K=" + std::to_string(k));
}

void BiasTable::write_csv(std::ostream& os) const {
  os << "alpha,K,mean,stderr,exact\n";
  os.precision(17);
  for (const auto& r : rows)
    os << r.alpha.to_string() << ',' << r.k << ',' << r.mean << ',' << r.stderr_ << ',' << r.exact
       << '\n';
}

namespace {

// Exact L_alpha(q; p) = -D_alpha[q || p]; quadrature for low-dimensional
// finite alpha, closed form otherwise.
double exact_bound(const GaussianDist& p, const GaussianDist& q, Alpha alpha) {
  if (alpha.is_finite() && p.dim() <= 2) {
    const GridSpec grid = GridSpec::covering(q, p, 12.0, p.dim() == 1 ? 0.005 : 0.02);
    return -quadrature_oracle(q, p, alpha.value(), grid);
  }
  return -renyi_gaussian(q, p, alpha);
}

}  // namespace

BiasTable bias_simulation(const GaussianDist& p, const GaussianDist& q, const BiasSimConfig& config) {
  if (p.dim() != q.dim()) throw std::invalid_argument("bias_simulation: dimension mismatch");
  if (config.alphas.empty() || config.ks.empty())
    throw std::invalid_argument("bias_simulation: alphas and ks must be non-empty");
  if (config.repeats < 2) throw std::invalid_argument("bias_simulation: repeats must be >= 2");
  for (std::size_t k : config.ks)
    if (k < 1) throw std::invalid_argument("bias_simulation: K must be >= 1");

  const std::size_t n_alpha = config.alphas.size();
  const std::size_t cells = n_alpha * config.ks.size();
  BiasTable table;
  table.rows.resize(cells);

  std::vector<double> exact(n_alpha);
  for (std::size_t a = 0; a < n_alpha; ++a) exact[a] = exact_bound(p, q, config.alphas[a]);

  parallel_for(cells, config.threads, [&](std::size_t cell) {
    const std::size_t a = cell / config.ks.size();
    const std::size_t k = config.ks[cell % config.ks.size()];
    Rng rng = make_stream(config.seed, cell);
    std::vector<double> estimates(config.repeats);
    std::vector<double> log_w(k);
    for (std::size_t r = 0; r < config.repeats; ++r) {
      const Matrix theta = q.sample(rng, static_cast<Eigen::Index>(k));
      const Vector lp = p.log_pdf_cols(theta);
      const Vector lq = q.log_pdf_cols(theta);
      for (std::size_t i = 0; i < k; ++i) log_w[i] = lp(static_cast<Eigen::Index>(i)) - lq(static_cast<Eigen::Index>(i));
      estimates[r] = mc_vr_estimate(WeightSet(log_w), config.alphas[a]).value;
    }
    double mean = 0.0;
    for (double e : estimates) mean += e;
    mean /= static_cast<double>(config.repeats);
    double var = 0.0;
    for (double e : estimates) var += (e - mean) * (e - mean);
    var /= static_cast<double>(config.repeats - 1);
    table.rows[cell] = BiasRow{config.alphas[a], k, mean,
                               std::sqrt(var / static_cast<double>(config.repeats)), exact[a]};
  });
  return table;
}

}  // namespace vr
