#include "fairens/reweighing.hpp"

namespace fairens {

using nlohmann::json;

void Reweighing::fit(const Dataset& d, std::uint64_t) {
  GroupEncoding enc = bind_groups(d, fi_);
  double cell[2][2] = {{0, 0}, {0, 0}};
  double total = 0.0;
  for (std::size_t i = 0; i < d.n_rows(); ++i) {
    cell[enc.priv_mask[i]][enc.fav_mask[i]] += d.weights[i];
    total += d.weights[i];
  }
  for (int g = 0; g < 2; ++g)
    for (int c = 0; c < 2; ++c)
      if (cell[g][c] <= 0.0)
        throw DegenerateGroupError(
            std::string("reweighing: empty (") + (g ? "privileged" : "unprivileged") + ", " +
            (c ? "favorable" : "unfavorable") + ") cell");
  double pg[2] = {(cell[0][0] + cell[0][1]) / total, (cell[1][0] + cell[1][1]) / total};
  double pc[2] = {(cell[0][0] + cell[1][0]) / total, (cell[0][1] + cell[1][1]) / total};
  for (int g = 0; g < 2; ++g)
    for (int c = 0; c < 2; ++c) factors_[g][c] = pg[g] * pc[c] / (cell[g][c] / total);
  fitted_ = true;
}

Dataset Reweighing::transform(const Dataset& d) const {
  if (!fitted_) throw NotTrainedError("reweighing: transform before fit");
  GroupEncoding enc = bind_groups(d, fi_);
  std::vector<double> w = d.weights;
  for (std::size_t i = 0; i < d.n_rows(); ++i)
    w[i] *= factors_[enc.priv_mask[i]][enc.fav_mask[i]];
  return d.with_weights(std::move(w));
}

json Reweighing::describe() const {
  json j{{"kind", "pre_mitigator"}, {"name", "reweighing"}};
  if (fitted_)
    j["factors"] = {{"unpriv_unfav", factors_[0][0]},
                    {"unpriv_fav", factors_[0][1]},
                    {"priv_unfav", factors_[1][0]},
                    {"priv_fav", factors_[1][1]}};
  return j;
}

}  // namespace fairens
