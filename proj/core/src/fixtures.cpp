#include "fairens/fixtures.hpp"

namespace fairens {

using nlohmann::json;

namespace {

FairnessInfo fi_one(std::vector<Cell> favorable, std::string feature,
                    std::vector<GroupValue> reference) {
  FairnessInfo fi;
  fi.favorable_labels = std::move(favorable);
  fi.protected_attributes.push_back({std::move(feature), std::move(reference)});
  return fi;
}

std::vector<CatalogEntry> build_catalog() {
  std::vector<CatalogEntry> c;

  {
    CatalogEntry e;
    e.id = "compas-violent";
    e.description = "recidivism audit data, violent recidivism only";
    e.target = "two_year_recid";
    e.fairness = fi_one({0.0}, "race", {std::string("Caucasian")});
    e.fairness.protected_attributes.push_back({"sex", {std::string("Female")}});
    e.prefer_precision = true;
    e.reference_rows = 3377;
    e.reference_di = 0.822;
    c.push_back(std::move(e));
  }
  {
    CatalogEntry e;
    e.id = "credit-g";
    e.description = "German credit risk";
    e.openml_id = 31;
    e.target = "class";
    e.fairness = fi_one({std::string("good")}, "personal_status",
                        {std::string("male single"), std::string("male div/sep"),
                         std::string("male mar/wid")});
    e.fairness.protected_attributes.push_back({"age", {ValueRange{26.0, 1000.0}}});
    e.reference_rows = 1000;
    e.reference_di = 0.748;
    c.push_back(std::move(e));
  }
  {
    CatalogEntry e;
    e.id = "compas";
    e.description = "recidivism audit data";
    e.target = "two_year_recid";
    e.fairness = fi_one({0.0}, "race", {std::string("Caucasian")});
    e.fairness.protected_attributes.push_back({"sex", {std::string("Female")}});
    e.prefer_precision = true;
    e.reference_rows = 5278;
    e.reference_di = 0.687;
    c.push_back(std::move(e));
  }
  {
    CatalogEntry e;
    e.id = "ricci";
    e.description = "fire department promotion exam results";
    e.target = "Promoted";
    e.fairness = fi_one({std::string("Promotion")}, "Race", {std::string("W")});
    e.reference_rows = 118;
    e.reference_di = 0.498;
    c.push_back(std::move(e));
  }
  {
    CatalogEntry e;
    e.id = "tae";
    e.description = "teaching assistant evaluations";
    e.openml_id = 48;
    e.target = "Class_attribute";
    e.fairness = fi_one({3.0}, "Whether_of_not_the_TA_is_a_native_English_speaker",
                        {std::string("1"), 1.0});
    e.reference_rows = 151;
    e.reference_di = 0.449;
    c.push_back(std::move(e));
  }
  {
    CatalogEntry e;
    e.id = "titanic";
    e.description = "passenger survival";
    e.openml_id = 40945;
    e.target = "survived";
    e.fairness = fi_one({std::string("1"), 1.0}, "sex", {std::string("female")});
    e.drop = {"name", "ticket", "cabin", "boat", "body", "home.dest"};
    e.reference_rows = 1309;
    e.reference_di = 0.263;
    c.push_back(std::move(e));
  }
  {
    CatalogEntry e;
    e.id = "speeddating";
    e.description = "speed dating match outcomes";
    e.openml_id = 40536;
    e.target = "match";
    e.fairness = fi_one({std::string("1"), 1.0}, "samerace", {std::string("1"), 1.0});
    e.drop = {"has_null", "decision", "decision_o"};
    e.reference_rows = 8378;
    e.reference_di = 0.853;
    c.push_back(std::move(e));
  }
  {
    CatalogEntry e;
    e.id = "bank";
    e.description = "bank telemarketing outcomes";
    e.openml_id = 1461;
    e.target = "Class";
    e.fairness = fi_one({std::string("2"), 2.0}, "V1", {ValueRange{25.0, 1000.0}});
    e.reference_rows = 45211;
    e.reference_di = 0.840;
    c.push_back(std::move(e));
  }
  {
    CatalogEntry e;
    e.id = "meps19";
    e.description = "medical expenditure survey, panel 19";
    e.target = "UTILIZATION";
    e.fairness = fi_one({1.0}, "RACE", {std::string("White")});
    e.reference_rows = 15830;
    e.reference_di = 0.490;
    c.push_back(std::move(e));
  }
  {
    CatalogEntry e;
    e.id = "meps20";
    e.description = "medical expenditure survey, panel 20";
    e.target = "UTILIZATION";
    e.fairness = fi_one({1.0}, "RACE", {std::string("White")});
    e.reference_rows = 17570;
    e.reference_di = 0.488;
    c.push_back(std::move(e));
  }
  {
    CatalogEntry e;
    e.id = "nursery";
    e.description = "nursery school applications";
    e.openml_id = 26;
    e.target = "class";
    e.fairness = fi_one({std::string("spec_prior")}, "parents",
                        {std::string("pretentious"), std::string("great_pret")});
    e.reference_rows = 12960;
    e.reference_di = 0.461;
    c.push_back(std::move(e));
  }
  {
    CatalogEntry e;
    e.id = "meps21";
    e.description = "medical expenditure survey, panel 21";
    e.target = "UTILIZATION";
    e.fairness = fi_one({1.0}, "RACE", {std::string("White")});
    e.reference_rows = 15675;
    e.reference_di = 0.451;
    c.push_back(std::move(e));
  }
  {
    CatalogEntry e;
    e.id = "adult";
    e.description = "census income over 50K";
    e.openml_id = 1590;
    e.target = "class";
    e.fairness = fi_one({std::string(">50K")}, "race", {std::string("White")});
    e.fairness.protected_attributes.push_back({"sex", {std::string("Male")}});
    e.drop = {"fnlwgt"};
    e.reference_rows = 48842;
    e.reference_di = 0.277;
    c.push_back(std::move(e));
  }
  return c;
}

}  // namespace

const std::vector<CatalogEntry>& dataset_catalog() {
  static const std::vector<CatalogEntry> catalog = build_catalog();
  return catalog;
}

const CatalogEntry* catalog_find(const std::string& id) {
  for (const auto& e : dataset_catalog())
    if (e.id == id) return &e;
  return nullptr;
}

json reference_selected_configs() {
  auto lfr = [](int k, double ax, double ay, double az) {
    return json{{"name", "lfr"},
                {"hyperparameters", {{"k", k}, {"Ax", ax}, {"Ay", ay}, {"Az", az}}},
                {"supported", true}};
  };
  auto dir = [](double repair) {
    return json{{"name", "di_remover"},
                {"hyperparameters", {{"repair_level", repair}}},
                {"supported", true}};
  };
  auto pr = [](double eta) {
    return json{{"name", "prejudice_remover"},
                {"hyperparameters", {{"eta", eta}}},
                {"supported", true}};
  };
  // in-estimator winners this library has no implementation of keep their
  // published identity and carry a stand-in used when running locally
  auto unsupported = [&pr](const std::string& name, const json& hp, double standin_eta) {
    return json{{"name", name},
                {"hyperparameters", hp},
                {"supported", false},
                {"stand_in", pr(standin_eta)}};
  };

  json out = json::object();
  auto put = [&](const std::string& id, json pre, json in) {
    out[id] = {{"pre", std::move(pre)}, {"in", std::move(in)}};
  };

  put("compas-violent", dir(1.0), unsupported("meta_fair", {{"tau", 0.5}}, 1.0));
  put("credit-g", lfr(5, 0.01, 10, 5),
      unsupported("adversarial_debiasing", {{"classifier_num_hidden_units", 10}}, 1.0));
  put("compas", dir(0.4), unsupported("meta_fair", {{"tau", 0.5}}, 1.0));
  put("ricci", lfr(5, 0.01, 5, 10), unsupported("meta_fair", {{"tau", 0.8}}, 1.0));
  put("tae", lfr(5, 0.01, 50, 5), unsupported("meta_fair", {{"tau", 0.8}}, 1.0));
  put("titanic", dir(0.8), unsupported("meta_fair", {{"tau", 1.0}}, 1.0));
  put("speeddating", dir(0.2), unsupported("meta_fair", {{"tau", 0.9}}, 1.0));
  put("bank", dir(0.2), pr(100.0));
  put("meps19", lfr(5, 0.01, 1, 10), pr(1000.0));
  put("meps20", lfr(5, 0.01, 1, 10),
      unsupported("adversarial_debiasing", {{"classifier_num_hidden_units", 500}}, 1000.0));
  put("nursery", lfr(20, 0.01, 1, 10), unsupported("meta_fair", {{"tau", 0.5}}, 1.0));
  put("meps21", lfr(5, 0.01, 1, 10),
      unsupported("adversarial_debiasing", {{"classifier_num_hidden_units", 500}}, 1000.0));
  put("adult", lfr(5, 0.01, 1, 10), pr(1000.0));
  return out;
}

}  // namespace fairens
