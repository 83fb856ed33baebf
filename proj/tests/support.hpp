#pragma once

// Hand-rolled generators and reference computations shared by the suites.
// Nothing here calls the library's demand or revenue code.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <vector>

#include "datapricing/market.hpp"
#include "datapricing/price_space.hpp"
#include "datapricing/random.hpp"

namespace testsupport {

using datapricing::Amount;
using datapricing::Rng;

// Values drawn from a coarse lattice so equal utilities come up often.
inline double coarse(Rng& rng, int levels = 20) { return static_cast<double>(rng.below(levels + 1)) / levels; }

inline datapricing::ValuationCurve random_valuation(Rng& rng, Amount n, bool lattice) {
  std::vector<double> v(static_cast<std::size_t>(n) + 1, 0.0);
  for (Amount k = 1; k <= n; ++k) v[static_cast<std::size_t>(k)] = lattice ? coarse(rng) : rng.uniform();
  std::sort(v.begin() + 1, v.end());
  return datapricing::ValuationCurve(std::move(v));
}

inline datapricing::MarketInstance random_instance(Rng& rng, Amount n, std::size_t m, bool lattice) {
  std::vector<datapricing::ValuationCurve> types;
  for (std::size_t i = 0; i < m; ++i) types.push_back(random_valuation(rng, n, lattice));
  return datapricing::MarketInstance(n, std::move(types));
}

inline datapricing::MStepCurve random_step_curve(Rng& rng, Amount n, std::size_t max_steps, bool lattice) {
  const std::size_t k = 1 + static_cast<std::size_t>(rng.below(std::min<std::uint64_t>(max_steps, n)));
  std::vector<Amount> bounds;
  while (bounds.size() + 1 < k) {
    const Amount b = 1 + static_cast<Amount>(rng.below(static_cast<std::uint64_t>(n - 1)));
    if (std::find(bounds.begin(), bounds.end(), b) == bounds.end()) bounds.push_back(b);
  }
  std::sort(bounds.begin(), bounds.end());
  bounds.push_back(n);
  std::vector<double> values;
  while (values.size() < k) {
    const double x = lattice ? coarse(rng) * 1.2 : rng.uniform() * 1.2;
    if (std::find(values.begin(), values.end(), x) == values.end()) values.push_back(x);
  }
  std::sort(values.begin(), values.end());
  std::vector<datapricing::Step> steps;
  for (std::size_t j = 0; j < k; ++j) steps.push_back({bounds[j], values[j]});
  return datapricing::MStepCurve(n, std::move(steps));
}

inline std::vector<double> random_nondecreasing_prices(Rng& rng, Amount n, bool lattice) {
  std::vector<double> p(static_cast<std::size_t>(n) + 1, 0.0);
  for (Amount k = 1; k <= n; ++k) p[static_cast<std::size_t>(k)] = lattice ? coarse(rng) : rng.uniform();
  std::sort(p.begin() + 1, p.end());
  return p;
}

inline datapricing::TypeDistribution random_distribution(Rng& rng, std::size_t m) {
  std::vector<double> w(m);
  double total = 0.0;
  for (double& x : w) total += (x = rng.uniform_open_closed());
  for (double& x : w) x /= total;
  // Push the rounding residue into the last weight.
  double head = 0.0;
  for (std::size_t i = 0; i + 1 < m; ++i) head += w[i];
  w.back() = 1.0 - head;
  return datapricing::TypeDistribution(std::move(w));
}

// Price at every amount 0..N, evaluated straight from the step list.
inline std::vector<double> expand(const datapricing::MStepCurve& p) {
  std::vector<double> out(static_cast<std::size_t>(p.n_total()) + 1, 0.0);
  Amount lo = 1;
  for (const auto& s : p.steps()) {
    for (Amount n = lo; n <= s.boundary; ++n) out[static_cast<std::size_t>(n)] = s.value;
    lo = s.boundary + 1;
  }
  return out;
}

// Largest element of the argmax of v(n) - p(n) over n = 0..N.
inline Amount demand_by_enumeration(const datapricing::ValuationCurve& v, const std::vector<double>& prices) {
  double best = 0.0;
  Amount pick = 0;
  for (Amount n = 1; n <= v.n_total(); ++n) {
    const double u = v(n) - prices[static_cast<std::size_t>(n)];
    if (u >= best) {
      best = u;
      pick = n;
    }
  }
  return pick;
}

inline double revenue_by_enumeration(const datapricing::MarketInstance& inst, const datapricing::TypeDistribution& q,
                                     const std::vector<double>& prices) {
  double total = 0.0;
  for (std::size_t i = 0; i < inst.type_count(); ++i) {
    total += q[i] * prices[static_cast<std::size_t>(demand_by_enumeration(inst.valuation(i), prices))];
  }
  return total;
}

// Every non-decreasing step curve with at most m levels over the grids,
// generated by nested recursion rather than combination ranking.
inline std::vector<std::vector<datapricing::Step>> all_step_lists(Amount n, const std::vector<Amount>& data,
                                                                  const std::vector<double>& values, std::size_t m) {
  std::vector<Amount> interior;
  for (Amount d : data) {
    if (d != n) interior.push_back(d);
  }
  std::vector<std::vector<datapricing::Step>> out;
  std::vector<datapricing::Step> cur;
  std::function<void(std::size_t, std::size_t, std::size_t)> rec = [&](std::size_t remaining, std::size_t next_b,
                                                                       std::size_t next_v) {
    if (remaining == 1) {
      for (std::size_t v = next_v; v < values.size(); ++v) {
        cur.push_back({n, values[v]});
        out.push_back(cur);
        cur.pop_back();
      }
      return;
    }
    for (std::size_t b = next_b; b < interior.size(); ++b) {
      for (std::size_t v = next_v; v < values.size(); ++v) {
        cur.push_back({interior[b], values[v]});
        rec(remaining - 1, b + 1, v + 1);
        cur.pop_back();
      }
    }
  };
  for (std::size_t k = 1; k <= m; ++k) rec(k, 0, 0);
  return out;
}

}  // namespace testsupport
