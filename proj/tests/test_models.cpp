#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>

#include "fairens/calibrated_eq_odds.hpp"
#include "fairens/decision_tree.hpp"
#include "fairens/di_remover.hpp"
#include "fairens/ensembles.hpp"
#include "fairens/errors.hpp"
#include "fairens/knn.hpp"
#include "fairens/lfr.hpp"
#include "fairens/logistic.hpp"
#include "fairens/naive_bayes.hpp"
#include "fairens/pipeline.hpp"
#include "fairens/prejudice_remover.hpp"
#include "fairens/reweighing.hpp"
#include "fairens/rng.hpp"
#include "fairens/splits.hpp"
#include "fairens/synthetic.hpp"
#include "helpers.hpp"

using namespace fairens;
using namespace testhelp;
using nlohmann::json;

namespace {

struct MatrixCase {
  Matrix x;
  std::vector<int> y;
  std::vector<double> w;
};

MatrixCase random_matrix_case(Rng& rng, std::size_t rows, std::size_t cols) {
  MatrixCase c;
  c.x = Matrix(rows, cols);
  c.y.resize(rows);
  c.w.assign(rows, 1.0);
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) c.x(i, j) = rng.normal();
    c.y[i] = c.x(i, 0) + 0.3 * rng.normal() > 0.0 ? 1 : 0;
  }
  c.y[0] = 1;
  c.y[1] = 0;
  return c;
}

MatrixCase permuted(const MatrixCase& c, const std::vector<std::size_t>& perm) {
  MatrixCase out;
  out.x = Matrix(c.x.rows, c.x.cols);
  out.y.resize(c.y.size());
  out.w.resize(c.w.size());
  for (std::size_t i = 0; i < perm.size(); ++i) {
    for (std::size_t j = 0; j < c.x.cols; ++j) out.x(i, j) = c.x(perm[i], j);
    out.y[i] = c.y[perm[i]];
    out.w[i] = c.w[perm[i]];
  }
  return out;
}

double fd_relative_error(const std::vector<double>& analytic,
                         const std::vector<double>& numeric) {
  double diff = 0.0, norm = 0.0;
  for (std::size_t i = 0; i < analytic.size(); ++i) {
    diff += (analytic[i] - numeric[i]) * (analytic[i] - numeric[i]);
    norm += numeric[i] * numeric[i];
  }
  return std::sqrt(diff) / std::max(1.0, std::sqrt(norm));
}

double ks_distance(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  double sup = 0.0;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] <= b[j])
      ++i;
    else
      ++j;
    double fa = static_cast<double>(i) / static_cast<double>(a.size());
    double fb = static_cast<double>(j) / static_cast<double>(b.size());
    sup = std::max(sup, std::fabs(fa - fb));
  }
  return sup;
}

/// Member that records the training weights each time it is fitted.
/// Clones share the log so ensemble-internal copies report back.
class WeightSpy : public Classifier {
 public:
  explicit WeightSpy(std::shared_ptr<std::vector<std::vector<double>>> log)
      : log_(std::move(log)) {}

  std::string kind() const override { return "weight_spy"; }
  void fit(const Dataset& d, std::uint64_t) override {
    log_->push_back(d.weights);
    inner_ = std::make_unique<LearnerClassifier>(make_learner("nb"));
    inner_->fit(d, 0);
  }
  Matrix predict_proba(const Dataset& d) const override {
    return inner_->predict_proba(d);
  }
  json describe() const override { return {{"kind", "weight_spy"}}; }
  std::unique_ptr<Classifier> clone_untrained() const override {
    return std::make_unique<WeightSpy>(log_);
  }

 private:
  std::shared_ptr<std::vector<std::vector<double>>> log_;
  std::unique_ptr<Classifier> inner_;
};

double group_cost(const std::vector<double>& scores, const Dataset& d,
                  const GroupEncoding& enc, bool priv, double fp, double fn) {
  double w_fav = 0, w_unfav = 0, s_fav = 0, s_unfav = 0;
  for (std::size_t i = 0; i < d.n_rows(); ++i) {
    if (static_cast<bool>(enc.priv_mask[i]) != priv) continue;
    double w = d.weights[i];
    if (enc.fav_mask[i]) {
      w_fav += w;
      s_fav += w * scores[i];
    } else {
      w_unfav += w;
      s_unfav += w * scores[i];
    }
  }
  double br = w_fav / (w_fav + w_unfav);
  double cost = 0.0;
  if (fp != 0.0) cost += fp * (s_unfav / w_unfav) * (1.0 - br);
  if (fn != 0.0) cost += fn * ((w_fav - s_fav) / w_fav) * br;
  return cost;
}

}  // namespace

TEST_CASE("predict is the argmax of predict_proba with favorable ties") {
  Rng rng(821);
  for (const char* name : {"tree", "logreg", "knn", "nb"}) {
    MatrixCase c = random_matrix_case(rng, 60, 3);
    auto est = make_learner(name);
    est->fit(c.x, c.y, c.w);
    Matrix proba = est->predict_proba(c.x);
    std::vector<int> pred = est->predict(c.x);
    REQUIRE(proba.rows == c.x.rows);
    REQUIRE(proba.cols == 2);
    for (std::size_t i = 0; i < proba.rows; ++i) {
      CHECK(proba(i, 0) + proba(i, 1) == doctest::Approx(1.0).epsilon(1e-9));
      CHECK(proba(i, 0) >= -1e-12);
      CHECK(proba(i, 1) >= -1e-12);
      int want = proba(i, 1) >= proba(i, 0) ? 1 : 0;
      INFO("learner ", name, " row ", i);
      CHECK(pred[i] == want);
    }
  }
}

TEST_CASE("unknown learner names are rejected") {
  CHECK_THROWS_AS(make_learner("perceptron"), ConfigError);
}

TEST_CASE("tree fits are invariant to row order") {
  Rng rng(77);
  MatrixCase c = random_matrix_case(rng, 50, 3);
  std::vector<std::size_t> perm(c.y.size());
  std::iota(perm.begin(), perm.end(), 0);
  rng.shuffle(perm);
  MatrixCase p = permuted(c, perm);

  DecisionTree a, b;
  a.fit(c.x, c.y, c.w);
  b.fit(p.x, p.y, p.w);
  MatrixCase probe = random_matrix_case(rng, 40, 3);
  CHECK(a.predict(probe.x) == b.predict(probe.x));
}

TEST_CASE("logistic and naive bayes fits shrug off row order") {
  Rng rng(78);
  MatrixCase c = random_matrix_case(rng, 60, 3);
  std::vector<std::size_t> perm(c.y.size());
  std::iota(perm.begin(), perm.end(), 0);
  rng.shuffle(perm);
  MatrixCase p = permuted(c, perm);

  LogisticRegression la, lb;
  la.fit(c.x, c.y, c.w);
  lb.fit(p.x, p.y, p.w);
  for (std::size_t j = 0; j < la.coefficients().size(); ++j)
    CHECK(la.coefficients()[j] == doctest::Approx(lb.coefficients()[j]).epsilon(1e-6));
  CHECK(la.intercept() == doctest::Approx(lb.intercept()).epsilon(1e-6));

  NaiveBayesGaussian na, nb;
  na.fit(c.x, c.y, c.w);
  nb.fit(p.x, p.y, p.w);
  MatrixCase probe = random_matrix_case(rng, 30, 3);
  Matrix pa = na.predict_proba(probe.x);
  Matrix pb = nb.predict_proba(probe.x);
  for (std::size_t i = 0; i < pa.rows; ++i)
    CHECK(pa(i, 1) == doctest::Approx(pb(i, 1)).epsilon(1e-9));
}

TEST_CASE("logistic objective gradient matches central differences") {
  Rng rng(311);
  MatrixCase c = random_matrix_case(rng, 30, 4);
  for (int t = 0; t < 5; ++t) {
    std::vector<double> theta(c.x.cols + 1);
    for (auto& v : theta) v = rng.normal();
    std::vector<double> grad(theta.size());
    logistic_objective(c.x, c.y, c.w, 0.1, theta, grad);

    std::vector<double> fd(theta.size());
    const double h = 1e-6;
    for (std::size_t i = 0; i < theta.size(); ++i) {
      std::vector<double> up = theta, down = theta, scratch(theta.size());
      up[i] += h;
      down[i] -= h;
      double fu = logistic_objective(c.x, c.y, c.w, 0.1, up, scratch);
      double fd_val = logistic_objective(c.x, c.y, c.w, 0.1, down, scratch);
      fd[i] = (fu - fd_val) / (2.0 * h);
    }
    CHECK(fd_relative_error(grad, fd) <= 1e-5);
  }
}

TEST_CASE("trained learners round-trip through JSON") {
  Rng rng(15);
  MatrixCase c = random_matrix_case(rng, 40, 3);
  MatrixCase probe = random_matrix_case(rng, 25, 3);
  for (const char* name : {"tree", "logreg", "knn", "nb"}) {
    auto est = make_learner(name);
    est->fit(c.x, c.y, c.w);
    auto back = estimator_from_json(est->to_json());
    Matrix a = est->predict_proba(probe.x);
    Matrix b = back->predict_proba(probe.x);
    INFO("learner ", name);
    CHECK(a == b);
  }
  CHECK_THROWS_AS(estimator_from_json(json{{"name", "mystery"}}), ConfigError);
}

TEST_CASE("knn splits vote ties and predict favors the favorable class") {
  Matrix x(4, 1);
  x(0, 0) = 0.0;
  x(1, 0) = 1.0;
  x(2, 0) = 2.0;
  x(3, 0) = 3.0;
  std::vector<int> y{1, 0, 1, 0};
  KNearestNeighbors knn{KNearestNeighbors::Params{2}};
  knn.fit(x, y, uniform_weights(4));
  Matrix probe(1, 1);
  probe(0, 0) = 0.5;  // neighbors are rows 0 (y=1) and 1 (y=0), equal weight
  Matrix proba = knn.predict_proba(probe);
  CHECK(proba(0, 1) == doctest::Approx(0.5));
  CHECK(knn.predict(probe) == std::vector<int>{1});

  // heavier weight on the unfavorable neighbor outvotes the tie
  std::vector<double> w{1.0, 3.0, 1.0, 1.0};
  KNearestNeighbors heavy{KNearestNeighbors::Params{2}};
  heavy.fit(x, y, w);
  CHECK(heavy.predict_proba(probe)(0, 1) == doctest::Approx(0.25));
  CHECK(heavy.predict(probe) == std::vector<int>{0});
}

TEST_CASE("single-class training yields a constant predictor with a note") {
  Matrix x(5, 2);
  Rng rng(3);
  for (std::size_t i = 0; i < 5; ++i)
    for (std::size_t j = 0; j < 2; ++j) x(i, j) = rng.normal();
  std::vector<int> y{1, 1, 1, 1, 1};
  for (const char* name : {"tree", "logreg", "knn", "nb"}) {
    auto est = make_learner(name);
    est->fit(x, y, uniform_weights(5));
    INFO("learner ", name);
    CHECK_FALSE(est->fit_notes().empty());
    Matrix proba = est->predict_proba(x);
    for (std::size_t i = 0; i < proba.rows; ++i) CHECK(proba(i, 1) > 0.5);
  }
}

TEST_CASE("fit input validation rejects shape and label errors") {
  auto est = make_learner("tree");
  Matrix x(3, 2);
  std::vector<int> y{0, 1};
  CHECK_THROWS_AS(est->fit(x, y, uniform_weights(3)), SchemaError);
  std::vector<int> bad{0, 2, 1};
  CHECK_THROWS_AS(est->fit(x, bad, uniform_weights(3)), SchemaError);
  std::vector<int> ok{0, 1, 1};
  CHECK_THROWS_AS(est->fit(x, ok, uniform_weights(2)), SchemaError);
  CHECK_THROWS_AS(est->predict_proba(x), NotTrainedError);
}

TEST_CASE("reweighing factors equalize group and class exactly") {
  Rng rng(91);
  for (int t = 0; t < 10; ++t) {
    SyntheticDataset synth = make_planted_bias(
        {.rows = 80 + 20 * static_cast<std::size_t>(t % 3),
         .features = 2,
         .target_di = 0.5 + 0.04 * static_cast<double>(t),
         .seed = static_cast<std::uint64_t>(100 + t)});
    Reweighing rw(synth.fairness_info);
    rw.fit(synth.data, 0);
    Dataset out = rw.transform(synth.data);

    // factor table equals P(g)P(c)/P(g,c) from direct counting
    GroupEncoding enc = bind_groups(synth.data, synth.fairness_info);
    double total = 0, n_g[2] = {0, 0}, n_c[2] = {0, 0}, n_gc[2][2] = {{0, 0}, {0, 0}};
    for (std::size_t i = 0; i < synth.data.n_rows(); ++i) {
      double w = synth.data.weights[i];
      int g = enc.priv_mask[i] ? 1 : 0;
      int cls = enc.fav_mask[i] ? 1 : 0;
      total += w;
      n_g[g] += w;
      n_c[cls] += w;
      n_gc[g][cls] += w;
    }
    for (int g = 0; g < 2; ++g)
      for (int cls = 0; cls < 2; ++cls) {
        if (n_gc[g][cls] == 0.0) continue;
        double want = (n_g[g] / total) * (n_c[cls] / total) / (n_gc[g][cls] / total);
        CHECK(rw.factor(g, cls) == doctest::Approx(want).epsilon(1e-12));
      }

    // the reweighted labels satisfy DI = 1 and SPD = 0
    MetricValue di = baseline_di(out, synth.fairness_info);
    REQUIRE(di.defined);
    CHECK(std::fabs(di.value - 1.0) <= 1e-9);
    Scorer spd = make_scorer(MetricKind::statistical_parity_difference, synth.fairness_info);
    MetricValue s = spd.score_predictions(out.binary_labels(), out);
    REQUIRE(s.defined);
    CHECK(std::fabs(s.value) <= 1e-9);

    // features and labels are untouched
    CHECK(out.cols[0].num == synth.data.cols[0].num);
    CHECK(out.labels.num == synth.data.labels.num);
  }
}

TEST_CASE("di remover at zero repair is bit-identical") {
  SyntheticDataset synth = make_planted_bias({.rows = 120, .features = 3, .seed = 21});
  DisparateImpactRemover none(synth.fairness_info, 0.0);
  none.fit(synth.data, 0);
  Dataset out = none.transform(synth.data);
  for (std::size_t c = 0; c < synth.data.cols.size(); ++c)
    CHECK(out.cols[c].num == synth.data.cols[c].num);
  CHECK(out.labels.num == synth.data.labels.num);
  CHECK(out.weights == synth.data.weights);
}

TEST_CASE("di remover preserves within-group order and closes the gap") {
  SyntheticDataset synth = make_planted_bias({.rows = 300, .features = 2, .seed = 22});
  GroupEncoding enc = bind_groups(synth.data, synth.fairness_info);
  int grp_col = synth.data.col_index("grp");
  REQUIRE(grp_col >= 0);

  for (double lambda : {0.0, 0.4, 0.8, 1.0}) {
    DisparateImpactRemover rem(synth.fairness_info, lambda);
    rem.fit(synth.data, 0);
    Dataset out = rem.transform(synth.data);
    for (std::size_t c = 0; c < out.cols.size(); ++c) {
      if (static_cast<int>(c) == grp_col) {
        CHECK(out.cols[c].num == synth.data.cols[c].num);
        continue;
      }
      for (int g = 0; g < 2; ++g) {
        std::vector<std::size_t> rows;
        for (std::size_t i = 0; i < out.n_rows(); ++i)
          if ((enc.priv_mask[i] ? 1 : 0) == g) rows.push_back(i);
        for (std::size_t a = 0; a < rows.size(); ++a)
          for (std::size_t b = a + 1; b < rows.size(); ++b) {
            double xa = synth.data.cols[c].num[rows[a]];
            double xb = synth.data.cols[c].num[rows[b]];
            if (xa == xb) continue;
            bool was_less = xa < xb;
            bool is_leq = was_less ? out.cols[c].num[rows[a]] <= out.cols[c].num[rows[b]]
                                   : out.cols[c].num[rows[b]] <= out.cols[c].num[rows[a]];
            CHECK(is_leq);
          }
      }
    }
  }

  DisparateImpactRemover full(synth.fairness_info, 1.0);
  full.fit(synth.data, 0);
  Dataset repaired = full.transform(synth.data);
  for (std::size_t c = 0; c < repaired.cols.size(); ++c) {
    if (static_cast<int>(c) == grp_col) continue;
    std::vector<double> priv, unpriv;
    for (std::size_t i = 0; i < repaired.n_rows(); ++i)
      (enc.priv_mask[i] ? priv : unpriv).push_back(repaired.cols[c].num[i]);
    CHECK(ks_distance(priv, unpriv) <= 0.1);
  }
}

TEST_CASE("lfr objective gradient matches central differences") {
  Rng rng(65);
  MatrixCase c = random_matrix_case(rng, 24, 3);
  std::vector<std::uint8_t> mask(c.y.size());
  for (std::size_t i = 0; i < mask.size(); ++i) mask[i] = rng.uniform01() < 0.5 ? 1 : 0;
  mask[0] = 1;
  mask[1] = 0;

  LfrParams p;
  p.prototypes = 4;
  std::size_t dim = p.prototypes * c.x.cols + p.prototypes;
  for (int t = 0; t < 3; ++t) {
    std::vector<double> theta(dim);
    for (auto& v : theta) v = 0.5 * rng.normal();
    std::vector<double> grad(dim);
    lfr_objective(c.x, c.y, mask, p, theta, grad);
    std::vector<double> fd(dim);
    const double h = 1e-6;
    for (std::size_t i = 0; i < dim; ++i) {
      std::vector<double> up = theta, down = theta, scratch(dim);
      up[i] += h;
      down[i] -= h;
      double fu = lfr_objective(c.x, c.y, mask, p, up, scratch);
      double fl = lfr_objective(c.x, c.y, mask, p, down, scratch);
      fd[i] = (fu - fl) / (2.0 * h);
    }
    CHECK(fd_relative_error(grad, fd) <= 1e-4);
  }
}

TEST_CASE("lfr transform keeps schema and reconstructs through prototypes") {
  SyntheticDataset synth = make_planted_bias({.rows = 80, .features = 2, .seed = 31});
  LfrParams p;
  p.prototypes = 3;
  p.max_iterations = 150;
  LearnedFairRepresentation lfr(synth.fairness_info, p);
  lfr.fit(synth.data, 7);
  Dataset out = lfr.transform(synth.data);
  CHECK(out.names == synth.data.names);
  CHECK(out.labels.num == synth.data.labels.num);
  int grp_col = synth.data.col_index("grp");
  CHECK(out.cols[static_cast<std::size_t>(grp_col)].num ==
        synth.data.cols[static_cast<std::size_t>(grp_col)].num);
  bool changed = false;
  for (std::size_t c = 0; c < out.cols.size(); ++c)
    if (static_cast<int>(c) != grp_col && out.cols[c].num != synth.data.cols[c].num)
      changed = true;
  CHECK(changed);
  CHECK(std::isfinite(lfr.objective()));
}

TEST_CASE("prejudice objective at eta zero equals the logistic objective") {
  Rng rng(44);
  MatrixCase c = random_matrix_case(rng, 30, 3);
  std::vector<std::uint8_t> mask(c.y.size());
  for (std::size_t i = 0; i < mask.size(); ++i) mask[i] = i % 2 == 0 ? 1 : 0;
  for (int t = 0; t < 5; ++t) {
    std::vector<double> theta(c.x.cols + 1);
    for (auto& v : theta) v = rng.normal();
    std::vector<double> g1(theta.size()), g2(theta.size());
    double v1 = prejudice_objective(c.x, c.y, mask, c.w, 0.0, 0.05, theta, g1);
    double v2 = logistic_objective(c.x, c.y, c.w, 0.05, theta, g2);
    CHECK(v1 == v2);
    CHECK(g1 == g2);
  }
}

TEST_CASE("prejudice objective gradient matches central differences") {
  Rng rng(45);
  MatrixCase c = random_matrix_case(rng, 26, 3);
  std::vector<std::uint8_t> mask(c.y.size());
  for (std::size_t i = 0; i < mask.size(); ++i) mask[i] = rng.uniform01() < 0.5 ? 1 : 0;
  mask[0] = 1;
  mask[1] = 0;
  for (double eta : {1.0, 25.0}) {
    std::vector<double> theta(c.x.cols + 1);
    for (auto& v : theta) v = 0.5 * rng.normal();
    std::vector<double> grad(theta.size());
    prejudice_objective(c.x, c.y, mask, c.w, eta, 0.05, theta, grad);
    std::vector<double> fd(theta.size());
    const double h = 1e-6;
    for (std::size_t i = 0; i < theta.size(); ++i) {
      std::vector<double> up = theta, down = theta, scratch(theta.size());
      up[i] += h;
      down[i] -= h;
      double fu = prejudice_objective(c.x, c.y, mask, c.w, eta, 0.05, up, scratch);
      double fl = prejudice_objective(c.x, c.y, mask, c.w, eta, 0.05, down, scratch);
      fd[i] = (fu - fl) / (2.0 * h);
    }
    CHECK(fd_relative_error(grad, fd) <= 1e-5);
  }
}

TEST_CASE("prejudice remover at eta zero reproduces plain logistic regression") {
  SyntheticDataset synth = make_planted_bias({.rows = 200, .features = 3, .seed = 41});
  PrejudiceRemover::Params params;
  params.eta = 0.0;
  PrejudiceRemover pr(synth.fairness_info, params);
  pr.fit(synth.data, 0);

  LogisticRegression lr;
  Matrix x = synth.data.feature_matrix();
  lr.fit(x, synth.data.binary_labels(), synth.data.weights);

  REQUIRE(pr.coefficients().size() == lr.coefficients().size());
  for (std::size_t j = 0; j < lr.coefficients().size(); ++j)
    CHECK(pr.coefficients()[j] == doctest::Approx(lr.coefficients()[j]).epsilon(1e-8));
  CHECK(pr.intercept() == doctest::Approx(lr.intercept()).epsilon(1e-8));
}

TEST_CASE("higher eta trades parity gap on the training view") {
  SyntheticDataset synth =
      make_planted_bias({.rows = 500, .features = 3, .target_di = 0.5, .seed = 47});
  Scorer spd = make_scorer(MetricKind::statistical_parity_difference, synth.fairness_info);
  auto gap_at = [&](double eta) {
    PrejudiceRemover::Params params;
    params.eta = eta;
    PrejudiceRemover pr(synth.fairness_info, params);
    pr.fit(synth.data, 0);
    MetricValue v = spd.score_predictions(pr.predict(synth.data), synth.data);
    REQUIRE(v.defined);
    return std::fabs(v.value);
  };
  CHECK(gap_at(200.0) <= gap_at(0.0) + 1e-6);
}

TEST_CASE("calibrated equalized odds narrows the group cost gap") {
  SyntheticDataset synth =
      make_planted_bias({.rows = 600, .features = 3, .target_di = 0.55, .seed = 53});
  FoldSplit split = stratified_holdout(synth.data, synth.fairness_info, 0.4, 5);
  Dataset train = synth.data.subset(split.train);
  Dataset holdout = synth.data.subset(split.test);

  LearnerClassifier model(make_learner("logreg"));
  model.fit(train, 1);
  Matrix proba = model.predict_proba(holdout);
  std::vector<double> scores(holdout.n_rows());
  for (std::size_t i = 0; i < scores.size(); ++i) scores[i] = proba(i, 1);

  GroupEncoding enc = bind_groups(holdout, synth.fairness_info);
  for (auto constraint : {CalibratedEqOdds::Constraint::fpr,
                          CalibratedEqOdds::Constraint::fnr,
                          CalibratedEqOdds::Constraint::weighted}) {
    double fp = constraint == CalibratedEqOdds::Constraint::fnr ? 0.0 : 1.0;
    double fn = constraint == CalibratedEqOdds::Constraint::fpr ? 0.0 : 1.0;
    CalibratedEqOdds ceo(synth.fairness_info, constraint);
    ceo.fit(scores, holdout);
    std::vector<double> adjusted = ceo.adjust(scores, holdout);

    double before = std::fabs(group_cost(scores, holdout, enc, true, fp, fn) -
                              group_cost(scores, holdout, enc, false, fp, fn));
    double after = std::fabs(group_cost(adjusted, holdout, enc, true, fp, fn) -
                             group_cost(adjusted, holdout, enc, false, fp, fn));
    INFO("constraint ", CalibratedEqOdds::constraint_name(constraint));
    CHECK(after < before);
    for (double s : adjusted) {
      CHECK(s >= -1e-12);
      CHECK(s <= 1.0 + 1e-12);
    }
  }

  CHECK(CalibratedEqOdds::constraint_from_name("fpr") == CalibratedEqOdds::Constraint::fpr);
  CHECK_THROWS_AS(CalibratedEqOdds::constraint_from_name("nope"), ConfigError);
  CalibratedEqOdds unfitted(synth.fairness_info, CalibratedEqOdds::Constraint::weighted);
  CHECK_THROWS_AS(unfitted.adjust(scores, holdout), NotTrainedError);
}

TEST_CASE("bagging with one full-sample member reproduces the base") {
  Rng rng(61);
  for (int t = 0; t < 5; ++t) {
    SyntheticDataset synth = make_planted_bias(
        {.rows = 90, .features = 3, .seed = static_cast<std::uint64_t>(200 + t)});
    LearnerClassifier base(make_learner("tree"));
    base.fit(synth.data, 9);

    Bagging::Options opt;
    opt.n = 1;
    opt.full_sample = true;
    Bagging bag(std::make_unique<LearnerClassifier>(make_learner("tree")), opt);
    bag.fit(synth.data, 9);
    CHECK(bag.predict(synth.data) == base.predict(synth.data));
    CHECK(bag.member_count() == 1);
  }
}

TEST_CASE("bagging draws are seeded and weight-aware") {
  SyntheticDataset synth = make_planted_bias({.rows = 100, .features = 2, .seed = 63});
  Bagging::Options opt;
  opt.n = 5;
  Bagging a(std::make_unique<LearnerClassifier>(make_learner("tree")), opt);
  Bagging b(std::make_unique<LearnerClassifier>(make_learner("tree")), opt);
  a.fit(synth.data, 17);
  b.fit(synth.data, 17);
  Matrix pa = a.predict_proba(synth.data);
  CHECK(pa == b.predict_proba(synth.data));

  Bagging c(std::make_unique<LearnerClassifier>(make_learner("tree")), opt);
  c.fit(synth.data, 18);
  CHECK(a.predict_proba(synth.data).data != c.predict_proba(synth.data).data);

  CHECK(a.describe().at("kind") == "bagging");
}

TEST_CASE("boosting with one round reproduces the base") {
  Rng rng(67);
  for (int t = 0; t < 5; ++t) {
    SyntheticDataset synth = make_planted_bias(
        {.rows = 90, .features = 3, .seed = static_cast<std::uint64_t>(300 + t)});
    LearnerClassifier base(make_learner("nb"));
    base.fit(synth.data, 9);
    Boosting boost(std::make_unique<LearnerClassifier>(make_learner("nb")),
                   Boosting::Options{1});
    boost.fit(synth.data, 9);
    CHECK(boost.predict(synth.data) == base.predict(synth.data));
  }
}

TEST_CASE("boosting maintains a weight distribution across rounds") {
  SyntheticDataset synth = make_planted_bias({.rows = 120, .features = 3, .seed = 71});
  auto log = std::make_shared<std::vector<std::vector<double>>>();
  Boosting boost(std::make_unique<WeightSpy>(log), Boosting::Options{6});
  boost.fit(synth.data, 13);
  REQUIRE_FALSE(log->empty());
  // a degenerate final round fits a member and then discards it
  CHECK(log->size() >= boost.member_count());
  for (const auto& weights : *log) {
    double sum = 0.0;
    for (double w : weights) {
      CHECK(w >= 0.0);
      sum += w;
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
  }
  CHECK(boost.alphas().size() == boost.member_count());
  for (double alpha : boost.alphas()) CHECK(alpha >= 0.0);
}

TEST_CASE("soft voting is invariant to member order") {
  SyntheticDataset synth = make_planted_bias({.rows = 80, .features = 3, .seed = 73});
  auto members = [] {
    std::vector<std::unique_ptr<Classifier>> m;
    m.push_back(std::make_unique<LearnerClassifier>(make_learner("tree")));
    m.push_back(std::make_unique<LearnerClassifier>(make_learner("logreg")));
    m.push_back(std::make_unique<LearnerClassifier>(make_learner("nb")));
    return m;
  };
  auto reversed = [] {
    std::vector<std::unique_ptr<Classifier>> m;
    m.push_back(std::make_unique<LearnerClassifier>(make_learner("nb")));
    m.push_back(std::make_unique<LearnerClassifier>(make_learner("logreg")));
    m.push_back(std::make_unique<LearnerClassifier>(make_learner("tree")));
    return m;
  };
  Voting a(members(), Voting::Mode::soft);
  Voting b(reversed(), Voting::Mode::soft);
  a.fit(synth.data, 3);
  b.fit(synth.data, 3);
  Matrix pa = a.predict_proba(synth.data);
  Matrix pb = b.predict_proba(synth.data);
  for (std::size_t i = 0; i < pa.rows; ++i)
    CHECK(pa(i, 1) == doctest::Approx(pb(i, 1)).epsilon(1e-12));
  CHECK(a.provides_proba());
}

TEST_CASE("hard voting exposes shares, not probabilities, and favors ties up") {
  SyntheticDataset synth = make_planted_bias({.rows = 80, .features = 3, .seed = 79});
  std::vector<std::unique_ptr<Classifier>> m;
  m.push_back(std::make_unique<LearnerClassifier>(make_learner("tree")));
  m.push_back(std::make_unique<LearnerClassifier>(make_learner("logreg")));
  Voting vote(std::move(m), Voting::Mode::hard);
  vote.fit(synth.data, 3);
  CHECK_FALSE(vote.provides_proba());

  Matrix shares = vote.predict_proba(synth.data);
  std::vector<int> pred = vote.predict(synth.data);
  for (std::size_t i = 0; i < shares.rows; ++i) {
    double v = shares(i, 1) * 2.0;
    CHECK(std::fabs(v - std::round(v)) < 1e-9);  // vote shares over two members
    if (shares(i, 1) == shares(i, 0)) CHECK(pred[i] == 1);
  }
}

TEST_CASE("stacking trains a leak-free head and stays deterministic") {
  SyntheticDataset synth = make_planted_bias({.rows = 110, .features = 3, .seed = 83});
  auto build = [&](bool passthrough) {
    std::vector<std::unique_ptr<Classifier>> m;
    m.push_back(std::make_unique<LearnerClassifier>(make_learner("tree")));
    m.push_back(std::make_unique<LearnerClassifier>(make_learner("nb")));
    Stacking::Options opt;
    opt.passthrough = passthrough;
    opt.meta_folds = 3;
    return Stacking(std::move(m),
                    std::make_unique<LearnerClassifier>(make_learner("logreg")), opt,
                    synth.fairness_info);
  };

  Stacking a = build(false);
  Stacking b = build(false);
  a.fit(synth.data, 29);
  b.fit(synth.data, 29);
  Matrix pa = a.predict_proba(synth.data);
  CHECK(pa == b.predict_proba(synth.data));
  for (std::size_t i = 0; i < pa.rows; ++i)
    CHECK(pa(i, 0) + pa(i, 1) == doctest::Approx(1.0).epsilon(1e-9));

  Stacking c = build(true);
  c.fit(synth.data, 29);
  CHECK(c.passthrough());
  json desc = c.describe();
  CHECK(desc.at("kind") == "stacking");

  std::vector<int> pred = a.predict(synth.data);
  int agree = 0;
  std::vector<int> labels = synth.data.binary_labels();
  for (std::size_t i = 0; i < pred.size(); ++i)
    if (pred[i] == labels[i]) ++agree;
  CHECK(static_cast<double>(agree) / static_cast<double>(pred.size()) > 0.6);
}
