// oracle.cc - Reference computations and fixture-report serialization.

#include "fusion/oracle.hpp"

#include <json.hpp>
#include <stdexcept>

#include "fusion/errors.hpp"
#include "fusion/util.hpp"

namespace fusion {

namespace {
Rat rat_abs(const Rat& x) { return x < 0 ? Rat(-x) : x; }
}  // namespace

std::string OracleReport::to_json() const {
  nlohmann::ordered_json j;
  j["oracle"] = oracle;
  j["instance"] = instance;
  j["oracle_value"] = oracle_value;
  j["main_value"] = main_value;
  j["difference"] = rat_to_string(difference);
  j["tolerance"] = rat_to_string(tolerance);
  j["agree"] = agree;
  return j.dump(2) + "\n";
}

OracleReport OracleReport::from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  OracleReport r;
  r.oracle = j.at("oracle").get<std::string>();
  r.instance = j.at("instance").get<std::string>();
  r.oracle_value = j.at("oracle_value").get<std::string>();
  r.main_value = j.at("main_value").get<std::string>();
  r.difference = rat_from_string(j.at("difference").get<std::string>());
  r.tolerance = rat_from_string(j.at("tolerance").get<std::string>());
  r.agree = j.at("agree").get<bool>();
  return r;
}

OracleReport make_scalar_report(const std::string& oracle, const std::string& instance,
                                const Rat& oracle_value, const Rat& main_value,
                                const Rat& tolerance) {
  OracleReport r;
  r.oracle = oracle;
  r.instance = instance;
  r.oracle_value = rat_to_string(oracle_value);
  r.main_value = rat_to_string(main_value);
  r.difference = rat_abs(oracle_value - main_value);
  r.tolerance = tolerance;
  r.agree = r.difference <= tolerance;
  return r;
}

OracleReport make_digest_report(const std::string& oracle, const std::string& instance,
                                const std::string& oracle_digest,
                                const std::string& main_digest) {
  OracleReport r;
  r.oracle = oracle;
  r.instance = instance;
  r.oracle_value = oracle_digest;
  r.main_value = main_digest;
  r.difference = (oracle_digest == main_digest) ? 0 : 1;
  r.tolerance = 0;
  r.agree = oracle_digest == main_digest;
  return r;
}

std::string instance_digest(const std::string& canonical_dump) {
  return hex64(fnv1a(canonical_dump));
}

std::vector<int> brute_cell_assign(const std::vector<Vec>& sites,
                                   const std::vector<Rat>& weights,
                                   const GridMeasure& grid) {
  if (sites.empty() || sites.size() != weights.size())
    throw std::invalid_argument("brute_cell_assign needs matching site/weight lists");
  std::vector<int> out(static_cast<std::size_t>(grid.num_cells()), 0);
  for (int c = 0; c < grid.num_cells(); ++c) {
    const Vec x = grid.cell_center(c);
    int best = 0;
    Rat best_score = 0;
    for (std::size_t i = 0; i < sites.size(); ++i) {
      Rat score = -weights[i];
      for (std::size_t a = 0; a < x.size(); ++a) {
        Rat d = x[a] - sites[i][a];
        score += d * d;
      }
      if (i == 0 || score < best_score) {
        best_score = score;
        best = static_cast<int>(i);
      }
    }
    out[static_cast<std::size_t>(c)] = best;
  }
  return out;
}

Rat quadrature(const std::function<Rat(const Vec&)>& f, const GridMeasure& grid) {
  Rat total = 0;
  for (int c = 0; c < grid.num_cells(); ++c) {
    if (sgn(grid.mass(c)) == 0) continue;
    total += f(grid.cell_center(c)) * grid.mass(c);
  }
  return total;
}

SplitSearchResult split_search_1d(const GridMeasure& mu,
                                  const std::function<Rat(const Rat&)>& V) {
  if (mu.box().dim() != 1)
    throw std::invalid_argument("split_search_1d needs a one-dimensional grid");
  const int n = mu.num_cells();
  if (n < 2) throw std::invalid_argument("split_search_1d needs at least two cells");

  // Prefix masses and first moments.
  std::vector<Rat> pm(static_cast<std::size_t>(n) + 1, Rat(0));
  std::vector<Rat> px(static_cast<std::size_t>(n) + 1, Rat(0));
  for (int i = 0; i < n; ++i) {
    pm[static_cast<std::size_t>(i) + 1] = pm[static_cast<std::size_t>(i)] + mu.mass(i);
    px[static_cast<std::size_t>(i) + 1] =
        px[static_cast<std::size_t>(i)] + mu.mass(i) * mu.cell_center(i)[0];
  }
  if (sgn(pm.back()) <= 0) throw ZeroMass("split_search_1d needs positive total mass");

  SplitSearchResult best;
  bool have = false;
  const Rat h = mu.box().spacing(0, mu.resolution()[0]);
  for (int k = 1; k < n; ++k) {
    const Rat ml = pm[static_cast<std::size_t>(k)];
    const Rat mr = pm.back() - ml;
    if (sgn(ml) <= 0 || sgn(mr) <= 0) continue;
    const Rat bl = px[static_cast<std::size_t>(k)] / ml;
    const Rat br = (px.back() - px[static_cast<std::size_t>(k)]) / mr;
    const Rat payoff = ml * V(bl) + mr * V(br);
    if (!have || payoff > best.payoff) {
      have = true;
      best.payoff = payoff;
      best.split = mu.box().lo[0] + h * k;
      best.prototypes = {bl, br};
      best.masses = {ml, mr};
    }
  }
  if (!have) throw ZeroMass("split_search_1d found no cut with mass on both sides");
  return best;
}

}  // namespace fusion
