#include "ualign/preference.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>

#include <json.hpp>

namespace ualign {

namespace {

std::vector<double> normalize_weights(std::vector<double> weights) {
  if (weights.empty())
    throw std::invalid_argument("PreferenceModel: no components");
  double sum = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w))
      throw std::invalid_argument("PreferenceModel: weights must be finite and >= 0");
    sum += w;
  }
  // Tolerate text-serialization rounding, rescale exactly once.
  if (std::abs(sum - 1.0) > 1e-9)
    throw std::invalid_argument("PreferenceModel: weights sum to " +
                                std::to_string(sum) + ", expected 1");
  for (double& w : weights) w /= sum;
  return weights;
}

}  // namespace

RankingComponent::RankingComponent(std::vector<ResponseId> order_)
    : order(std::move(order_)) {
  const int n = static_cast<int>(order.size());
  if (n == 0) throw std::invalid_argument("RankingComponent: empty order");
  rank_of.assign(n, -1);
  for (int pos = 0; pos < n; ++pos) {
    ResponseId y = order[pos];
    if (y < 0 || y >= n || rank_of[y] != -1)
      throw std::invalid_argument("RankingComponent: order is not a permutation");
    rank_of[y] = pos;
  }
}

PreferenceModel PreferenceModel::pl_mixture(std::vector<double> weights,
                                            std::vector<PlComponent> components,
                                            std::vector<std::string> labels) {
  if (components.empty() || weights.size() != components.size())
    throw std::invalid_argument("PreferenceModel: bad component list");
  const int n = static_cast<int>(components[0].rewards.size());
  if (n == 0) throw std::invalid_argument("PreferenceModel: empty response set");
  for (const auto& c : components) {
    if (static_cast<int>(c.rewards.size()) != n)
      throw std::invalid_argument("PreferenceModel: reward length mismatch");
    for (double r : c.rewards)
      if (!std::isfinite(r))
        throw std::invalid_argument("PreferenceModel: rewards must be finite");
  }
  PreferenceModel m;
  m.kind_ = PreferenceKind::pl;
  m.num_responses_ = n;
  m.weights_ = normalize_weights(std::move(weights));
  m.pl_ = std::move(components);
  m.labels_ = std::move(labels);
  return m;
}

PreferenceModel PreferenceModel::ranking_population(
    std::vector<double> weights, std::vector<RankingComponent> components,
    std::vector<std::string> labels) {
  if (components.empty() || weights.size() != components.size())
    throw std::invalid_argument("PreferenceModel: bad component list");
  const int n = static_cast<int>(components[0].order.size());
  for (const auto& c : components)
    if (static_cast<int>(c.order.size()) != n)
      throw std::invalid_argument("PreferenceModel: order length mismatch");
  PreferenceModel m;
  m.kind_ = PreferenceKind::ranking;
  m.num_responses_ = n;
  m.weights_ = normalize_weights(std::move(weights));
  m.rankings_ = std::move(components);
  m.labels_ = std::move(labels);
  return m;
}

PreferenceModel PreferenceModel::from_json_text(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument(std::string("model document: ") + e.what());
  }
  std::vector<std::string> labels;
  if (doc.contains("responses")) {
    labels = doc.at("responses").get<std::vector<std::string>>();
    std::set<std::string> uniq(labels.begin(), labels.end());
    if (uniq.size() != labels.size())
      throw std::invalid_argument("model document: duplicate response labels");
  }
  const std::string kind = doc.at("kind").get<std::string>();
  std::vector<double> weights;
  if (kind == "pl") {
    std::vector<PlComponent> comps;
    for (const auto& c : doc.at("components")) {
      weights.push_back(c.at("weight").get<double>());
      comps.push_back({c.at("rewards").get<std::vector<double>>()});
    }
    auto m = pl_mixture(std::move(weights), std::move(comps), std::move(labels));
    return m;
  }
  if (kind == "ranking") {
    std::vector<RankingComponent> comps;
    for (const auto& c : doc.at("components")) {
      weights.push_back(c.at("weight").get<double>());
      comps.emplace_back(c.at("order").get<std::vector<ResponseId>>());
    }
    return ranking_population(std::move(weights), std::move(comps),
                              std::move(labels));
  }
  throw std::invalid_argument("model document: kind must be \"pl\" or \"ranking\"");
}

PreferenceModel PreferenceModel::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open model file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return from_json_text(buf.str());
}

std::string PreferenceModel::to_json_text() const {
  nlohmann::json doc;
  if (!labels_.empty()) doc["responses"] = labels_;
  doc["kind"] = kind_ == PreferenceKind::pl ? "pl" : "ranking";
  auto& comps = doc["components"] = nlohmann::json::array();
  for (int i = 0; i < num_components(); ++i) {
    nlohmann::json c;
    c["weight"] = weights_[i];
    if (kind_ == PreferenceKind::pl)
      c["rewards"] = pl_[i].rewards;
    else
      c["order"] = rankings_[i].order;
    comps.push_back(std::move(c));
  }
  return doc.dump(2);
}

double pl_winrate(const Multiset& s, const Multiset& s_prime,
                  const PlComponent& c) {
  if (s.empty() || s_prime.empty())
    throw std::invalid_argument("pl_winrate: empty multiset");
  // Max-shifted exponentials over the union support.
  double max_r = -std::numeric_limits<double>::infinity();
  for (const auto& [y, _] : s.counts()) max_r = std::max(max_r, c.rewards.at(y));
  for (const auto& [y, _] : s_prime.counts())
    max_r = std::max(max_r, c.rewards.at(y));
  double mass_s = 0.0, mass_sp = 0.0;
  for (const auto& [y, cnt] : s.counts())
    mass_s += cnt * std::exp(c.rewards[y] - max_r);
  for (const auto& [y, cnt] : s_prime.counts())
    mass_sp += cnt * std::exp(c.rewards[y] - max_r);
  return mass_s / (mass_s + mass_sp);
}

RankingResult ranking_compare(const Multiset& s, const Multiset& s_prime,
                              const RankingComponent& c) {
  if (s.empty() || s_prime.empty())
    throw std::invalid_argument("ranking_compare: empty multiset");
  auto best_rank = [&c](const Multiset& m) {
    int best = std::numeric_limits<int>::max();
    for (const auto& [y, _] : m.counts())
      best = std::min(best, c.rank_of.at(y));
    return best;
  };
  const int r = best_rank(s);
  const int rp = best_rank(s_prime);
  // Same maximal response id => tie.
  return RankingResult{r <= rp ? 1 : 0, r < rp ? 1 : 0};
}

double model_winrate(const Multiset& s, const Multiset& s_prime,
                     const PreferenceModel& m, CompareMode mode) {
  double acc = 0.0;
  if (m.kind() == PreferenceKind::pl) {
    // Weak and strict coincide for PL.
    for (int i = 0; i < m.num_components(); ++i)
      acc += m.weights()[i] * pl_winrate(s, s_prime, m.pl_component(i));
  } else {
    for (int i = 0; i < m.num_components(); ++i) {
      const auto r = ranking_compare(s, s_prime, m.ranking_component(i));
      acc += m.weights()[i] * (mode == CompareMode::weak ? r.weak : r.strict);
    }
  }
  return acc;
}

}  // namespace ualign
