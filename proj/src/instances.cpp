#include "ualign/instances.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace ualign {

PreferenceModel uniform_pl_instance(int k) {
  if (k < 1) throw std::invalid_argument("uniform_pl_instance: k must be >= 1");
  PlComponent c{std::vector<double>(k + 1, 1.0)};
  std::vector<std::string> labels;
  for (int y = 0; y <= k; ++y) labels.push_back("y" + std::to_string(y + 1));
  return PreferenceModel::pl_mixture({1.0}, {std::move(c)}, std::move(labels));
}

PreferenceModel uniform_rankings_instance(int m) {
  if (m < 2) throw std::invalid_argument("uniform_rankings_instance: m must be >= 2");
  if (m > 8)
    throw std::invalid_argument(
        "uniform_rankings_instance: m > 8 (" + std::to_string(m) +
        "! components exceeds the instance cap)");
  std::vector<ResponseId> perm(m);
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<RankingComponent> comps;
  do {
    comps.emplace_back(perm);
  } while (std::next_permutation(perm.begin(), perm.end()));
  std::vector<double> weights(comps.size(), 1.0 / comps.size());
  return PreferenceModel::ranking_population(std::move(weights), std::move(comps));
}

PreferenceModel majority_instance(double eps) {
  if (!(eps > 0.0 && eps < 0.5))
    throw std::invalid_argument("majority_instance: eps must be in (0, 1/2)");
  std::vector<RankingComponent> comps;
  comps.emplace_back(std::vector<ResponseId>{0, 1});
  comps.emplace_back(std::vector<ResponseId>{1, 0});
  return PreferenceModel::ranking_population({0.5 + eps, 0.5 - eps},
                                             std::move(comps), {"y1", "y2"});
}

PreferenceModel condorcet_cycle_instance() {
  std::vector<RankingComponent> comps;
  comps.emplace_back(std::vector<ResponseId>{0, 1, 2});
  comps.emplace_back(std::vector<ResponseId>{1, 2, 0});
  comps.emplace_back(std::vector<ResponseId>{2, 0, 1});
  return PreferenceModel::ranking_population(
      {1.0 / 3, 1.0 / 3, 1.0 / 3}, std::move(comps), {"a", "b", "c"});
}

InstanceSpec InstanceSpec::parse(const std::string& text) {
  InstanceSpec spec;
  const auto colon = text.find(':');
  spec.name = text.substr(0, colon);
  const std::string arg =
      colon == std::string::npos ? "" : text.substr(colon + 1);
  try {
    if (spec.name == "uniform-pl") {
      if (arg.empty()) throw std::invalid_argument("missing k");
      spec.k = std::stoi(arg);
    } else if (spec.name == "uniform-rankings") {
      if (arg.empty()) throw std::invalid_argument("missing m");
      spec.m = std::stoi(arg);
    } else if (spec.name == "majority") {
      if (!arg.empty()) spec.eps = std::stod(arg);
    } else if (spec.name == "condorcet-cycle") {
      // no parameters
    } else if (spec.name == "custom") {
      if (arg.empty()) throw std::invalid_argument("missing file path");
      spec.file = arg;
    } else {
      throw std::invalid_argument("unknown instance name");
    }
  } catch (const std::exception& e) {
    throw std::invalid_argument("instance spec \"" + text + "\": " + e.what());
  }
  return spec;
}

std::string InstanceSpec::to_string() const {
  if (name == "uniform-pl") return name + ":" + std::to_string(k);
  if (name == "uniform-rankings") return name + ":" + std::to_string(m);
  if (name == "majority") {
    std::string s = std::to_string(eps);
    s.erase(s.find_last_not_of('0') + 1);
    if (!s.empty() && s.back() == '.') s.pop_back();
    return name + ":" + s;
  }
  if (name == "custom") return name + ":" + file;
  return name;
}

PreferenceModel InstanceSpec::build() const {
  if (name == "uniform-pl") return uniform_pl_instance(k);
  if (name == "uniform-rankings") return uniform_rankings_instance(m);
  if (name == "majority") return majority_instance(eps);
  if (name == "condorcet-cycle") return condorcet_cycle_instance();
  if (name == "custom") return PreferenceModel::load(file);
  throw std::invalid_argument("InstanceSpec: unknown name \"" + name + "\"");
}

}  // namespace ualign
