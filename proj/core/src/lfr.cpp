#include "fairens/lfr.hpp"

#include <algorithm>
#include <cmath>

#include "fairens/optim.hpp"
#include "fairens/rng.hpp"

namespace fairens {

using nlohmann::json;

namespace {

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  double e = std::exp(z);
  return e / (1.0 + e);
}

// softmax assignment of one row to the prototypes, max-subtracted
void assign_row(const Matrix& x, std::size_t n, const double* protos,
                std::size_t k, double tau, double* out) {
  const std::size_t d = x.cols;
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < k; ++j) {
    double dist = 0.0;
    for (std::size_t c = 0; c < d; ++c) {
      double diff = x(n, c) - protos[j * d + c];
      dist += diff * diff;
    }
    out[j] = -dist / tau;
    best = std::max(best, out[j]);
  }
  double total = 0.0;
  for (std::size_t j = 0; j < k; ++j) {
    out[j] = std::exp(out[j] - best);
    total += out[j];
  }
  for (std::size_t j = 0; j < k; ++j) out[j] /= total;
}

}  // namespace

double lfr_objective(const Matrix& x, const std::vector<int>& y,
                     const std::vector<std::uint8_t>& priv_mask,
                     const LfrParams& p, const std::vector<double>& theta,
                     std::vector<double>& grad) {
  const std::size_t n_rows = x.rows;
  const std::size_t d = x.cols;
  const std::size_t k = p.prototypes;
  const double* protos = theta.data();          // k x d, row-major
  const double* logits = theta.data() + k * d;  // k

  grad.assign(theta.size(), 0.0);
  double* gproto = grad.data();
  double* glogit = grad.data() + k * d;

  std::vector<double> w(k);
  for (std::size_t j = 0; j < k; ++j) w[j] = sigmoid(logits[j]);

  // pass 1: assignments and group means
  std::vector<double> m(n_rows * k);
  std::vector<double> mean_priv(k, 0.0), mean_unpriv(k, 0.0);
  std::size_t n_priv = 0, n_unpriv = 0;
  for (std::size_t n = 0; n < n_rows; ++n) {
    assign_row(x, n, protos, k, p.temperature, &m[n * k]);
    auto& mean = priv_mask[n] ? mean_priv : mean_unpriv;
    (priv_mask[n] ? n_priv : n_unpriv) += 1;
    for (std::size_t j = 0; j < k; ++j) mean[j] += m[n * k + j];
  }
  std::vector<double> gap_sign(k, 0.0);
  double fairness_loss = 0.0;
  if (n_priv > 0 && n_unpriv > 0) {
    for (std::size_t j = 0; j < k; ++j) {
      double gap = mean_priv[j] / static_cast<double>(n_priv) -
                   mean_unpriv[j] / static_cast<double>(n_unpriv);
      fairness_loss += std::abs(gap);
      gap_sign[j] = gap > 0.0 ? 1.0 : (gap < 0.0 ? -1.0 : 0.0);
    }
  }

  // pass 2: reconstruction, label loss, and the chain through m
  const double eps = 1e-12;
  const double recon_scale =
      2.0 / (static_cast<double>(n_rows) * static_cast<double>(d));
  double recon_loss = 0.0, label_loss = 0.0;
  std::vector<double> xhat(d), r(d), g_row(k);
  for (std::size_t n = 0; n < n_rows; ++n) {
    const double* mn = &m[n * k];
    std::fill(xhat.begin(), xhat.end(), 0.0);
    double yhat = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
      yhat += mn[j] * w[j];
      for (std::size_t c = 0; c < d; ++c) xhat[c] += mn[j] * protos[j * d + c];
    }
    for (std::size_t c = 0; c < d; ++c) {
      double diff = xhat[c] - x(n, c);
      recon_loss += diff * diff;
      r[c] = recon_scale * diff;
    }
    double yc = std::clamp(yhat, eps, 1.0 - eps);
    double yn = static_cast<double>(y[n]);
    label_loss += -(yn * std::log(yc) + (1.0 - yn) * std::log(1.0 - yc));
    double s = (yc - yn) / (yc * (1.0 - yc)) / static_cast<double>(n_rows);

    double fair_unit = 0.0;
    if (n_priv > 0 && n_unpriv > 0)
      fair_unit = priv_mask[n] ? 1.0 / static_cast<double>(n_priv)
                               : -1.0 / static_cast<double>(n_unpriv);

    double inner = 0.0;  // <g_row, m_n>
    for (std::size_t j = 0; j < k; ++j) {
      double rv = 0.0;
      for (std::size_t c = 0; c < d; ++c) rv += r[c] * protos[j * d + c];
      g_row[j] = p.reconstruct_weight * rv + p.label_weight * s * w[j] +
                 p.fairness_weight * gap_sign[j] * fair_unit;
      inner += g_row[j] * mn[j];
      glogit[j] += p.label_weight * s * mn[j];
      for (std::size_t c = 0; c < d; ++c)
        gproto[j * d + c] += p.reconstruct_weight * mn[j] * r[c];
    }
    for (std::size_t j = 0; j < k; ++j) {
      double coef = (2.0 / p.temperature) * mn[j] * (g_row[j] - inner);
      for (std::size_t c = 0; c < d; ++c)
        gproto[j * d + c] += coef * (x(n, c) - protos[j * d + c]);
    }
  }
  recon_loss /= static_cast<double>(n_rows) * static_cast<double>(d);
  label_loss /= static_cast<double>(n_rows);

  // chain the logit gradient through the sigmoid
  for (std::size_t j = 0; j < k; ++j) glogit[j] *= w[j] * (1.0 - w[j]);

  return p.reconstruct_weight * recon_loss + p.label_weight * label_loss +
         p.fairness_weight * fairness_loss;
}

LearnedFairRepresentation::LearnedFairRepresentation(FairnessInfo fi, LfrParams params)
    : fi_(std::move(fi)), params_(params) {
  if (params_.prototypes == 0) throw ConfigError("lfr: prototypes must be positive");
  if (params_.temperature <= 0.0) throw ConfigError("lfr: temperature must be positive");
}

void LearnedFairRepresentation::fit(const Dataset& d, std::uint64_t seed) {
  GroupEncoding enc = bind_groups(d, fi_);
  std::vector<std::string> protected_names;
  for (const auto& pa : fi_.protected_attributes) protected_names.push_back(pa.feature);

  feature_names_.clear();
  std::vector<std::size_t> cols;
  for (std::size_t c = 0; c < d.n_cols(); ++c) {
    const std::string& nm = d.names[c];
    if (std::find(protected_names.begin(), protected_names.end(), nm) != protected_names.end())
      continue;
    if (d.cols[c].kind != ColumnKind::numeric)
      throw SchemaError("lfr: feature '" + nm + "' is categorical; preprocess first");
    feature_names_.push_back(nm);
    cols.push_back(c);
  }
  if (cols.empty()) throw SchemaError("lfr: no numeric features to transform");

  const std::size_t n = d.n_rows(), dim = cols.size(), k = params_.prototypes;
  Matrix x(n, dim);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t c = 0; c < dim; ++c) {
      double v = d.cols[cols[c]].num[i];
      if (is_missing_numeric(v))
        throw SchemaError("lfr: feature '" + feature_names_[c] + "' has missing values");
      x(i, c) = v;
    }
  std::vector<int> y(n);
  for (std::size_t i = 0; i < n; ++i) y[i] = enc.fav_mask[i] ? 1 : 0;

  Rng rng(seed);
  std::vector<double> theta(k * dim + k, 0.0);
  for (std::size_t j = 0; j < k * dim; ++j) theta[j] = rng.normal();

  GdOptions opts;
  opts.max_iterations = params_.max_iterations;
  opts.tolerance = params_.tolerance;
  GdResult res = gradient_descent(
      [&](const std::vector<double>& t, std::vector<double>& g) {
        return lfr_objective(x, y, enc.priv_mask, params_, t, g);
      },
      theta, opts);

  prototypes_ = Matrix(k, dim);
  std::copy(res.x.begin(), res.x.begin() + static_cast<std::ptrdiff_t>(k * dim),
            prototypes_.data.begin());
  objective_ = res.objective;
  converged_ = res.converged;
  fitted_ = true;
}

Matrix LearnedFairRepresentation::assignments(const Matrix& x) const {
  Matrix m(x.rows, prototypes_.rows);
  for (std::size_t n = 0; n < x.rows; ++n)
    assign_row(x, n, prototypes_.data.data(), prototypes_.rows,
               params_.temperature, &m.data[n * m.cols]);
  return m;
}

Dataset LearnedFairRepresentation::transform(const Dataset& d) const {
  if (!fitted_) throw NotTrainedError("lfr: transform before fit");
  const std::size_t dim = feature_names_.size();
  std::vector<int> cols(dim);
  for (std::size_t c = 0; c < dim; ++c) {
    cols[c] = d.col_index(feature_names_[c]);
    if (cols[c] < 0)
      throw SchemaError("lfr: column '" + feature_names_[c] + "' missing from input");
  }
  Matrix x(d.n_rows(), dim);
  for (std::size_t i = 0; i < d.n_rows(); ++i)
    for (std::size_t c = 0; c < dim; ++c) {
      double v = d.cols[static_cast<std::size_t>(cols[c])].num[i];
      if (is_missing_numeric(v))
        throw SchemaError("lfr: feature '" + feature_names_[c] + "' has missing values");
      x(i, c) = v;
    }
  Matrix m = assignments(x);
  Dataset out = d;
  for (std::size_t i = 0; i < d.n_rows(); ++i)
    for (std::size_t c = 0; c < dim; ++c) {
      double v = 0.0;
      for (std::size_t j = 0; j < prototypes_.rows; ++j)
        v += m(i, j) * prototypes_(j, c);
      out.cols[static_cast<std::size_t>(cols[c])].num[i] = v;
    }
  return out;
}

json LearnedFairRepresentation::describe() const {
  json j{{"kind", "pre_mitigator"},
         {"name", "lfr"},
         {"prototypes", params_.prototypes},
         {"reconstruct_weight", params_.reconstruct_weight},
         {"label_weight", params_.label_weight},
         {"fairness_weight", params_.fairness_weight},
         {"fitted", fitted_}};
  if (fitted_) j["converged"] = converged_;
  return j;
}

}  // namespace fairens
