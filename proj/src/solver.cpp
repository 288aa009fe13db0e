#include "puw/solver.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

namespace puw {

namespace {

constexpr double kProbFloor = 1e-12;

// First moment and raw second moment of the signed sum of the three plaquette
// members other than the one being updated. The loop sum is
//   a(i,j) + b(i,j+1) - a(i+1,j) - b(i,j)
// and member signs follow that pattern. Under the factorized beliefs the
// members are independent, so Var(rest) adds and E[rest^2] = Var + mean^2.
struct RestMoments {
  double mean;
  double mean_sq;
};

enum class Member { TopA, RightB, BottomA, LeftB };

RestMoments rest_moments(const BeliefField& b, int pi, int pj, Member skip) {
  double mean = 0.0;
  double var = 0.0;
  auto accumulate = [&](const Prob3& t, double sign) {
    const double m1 = t.first_moment();
    mean += sign * m1;
    var += t.second_moment() - m1 * m1;
  };
  if (skip != Member::TopA) accumulate(b.alpha(pi, pj), +1.0);
  if (skip != Member::RightB) accumulate(b.beta(pi, pj + 1), +1.0);
  if (skip != Member::BottomA) accumulate(b.alpha(pi + 1, pj), -1.0);
  if (skip != Member::LeftB) accumulate(b.beta(pi, pj), -1.0);
  return {mean, var + mean * mean};
}

// Adds E[(sign*k + rest)^2] for k in {-1,0,1} to cost[] if the plaquette
// exists; out-of-range plaquettes contribute nothing.
void add_plaquette_cost(const BeliefField& b, int pi, int pj, Member skip, double sign,
                        double (&cost)[3]) {
  if (pi < 0 || pj < 0 || pi + 1 >= b.rows() || pj + 1 >= b.cols()) return;
  const RestMoments rm = rest_moments(b, pi, pj, skip);
  for (int k = -1; k <= 1; ++k) {
    cost[k + 1] += static_cast<double>(k) * k + 2.0 * sign * k * rm.mean + rm.mean_sq;
  }
}

Prob3 softmax_floor(const double (&cost)[3]) {
  const double cmin = std::min({cost[0], cost[1], cost[2]});
  Prob3 t;
  double sum = 0.0;
  for (int n = 0; n < 3; ++n) {
    t.p[static_cast<std::size_t>(n)] = std::exp(-(cost[n] - cmin));
    sum += t.p[static_cast<std::size_t>(n)];
  }
  double floored = 0.0;
  for (double& v : t.p) {
    v = std::max(v / sum, kProbFloor);
    floored += v;
  }
  for (double& v : t.p) v /= floored;
  return t;
}

void validate_edge(const BeliefField& b, const EdgeId& e) {
  const bool ok = e.family == EdgeFamily::A
                      ? (e.i >= 0 && e.i < b.alpha.rows() && e.j >= 0 && e.j < b.alpha.cols())
                      : (e.i >= 0 && e.i < b.beta.rows() && e.j >= 0 && e.j < b.beta.cols());
  if (!ok) throw std::invalid_argument("coordinate_update: invalid edge id");
}

double run_sweep(const WrappedImage& img, BeliefField& beliefs, const ModelParams& params,
                 const std::vector<EdgeId>* order) {
  if (order != nullptr) {
    for (const EdgeId& e : *order) coordinate_update(img, beliefs, params, e);
  } else {
    const int r = img.rows(), c = img.cols();
    for (int i = 0; i < r; ++i) {
      for (int j = 0; j + 1 < c; ++j) {
        coordinate_update(img, beliefs, params, {EdgeFamily::A, i, j});
      }
    }
    for (int i = 0; i + 1 < r; ++i) {
      for (int j = 0; j < c; ++j) {
        coordinate_update(img, beliefs, params, {EdgeFamily::B, i, j});
      }
    }
  }
  return free_energy(img, beliefs, params);
}

}  // namespace

AnnealSchedule AnnealSchedule::geometric(double t_start, double t_end, int steps,
                                         int max_sweeps_per_temp, double f_tolerance) {
  if (steps < 1) throw std::invalid_argument("schedule needs at least one temperature");
  AnnealSchedule s;
  s.max_sweeps_per_temp = max_sweeps_per_temp;
  s.f_tolerance = f_tolerance;
  if (steps == 1) {
    s.temperatures = {t_start};
  } else {
    if (!(t_start > t_end)) {
      throw std::invalid_argument("geometric schedule requires t_start > t_end");
    }
    const double ratio = std::pow(t_end / t_start, 1.0 / (steps - 1));
    s.temperatures.resize(static_cast<std::size_t>(steps));
    for (int n = 0; n < steps; ++n) {
      s.temperatures[static_cast<std::size_t>(n)] = t_start * std::pow(ratio, n);
    }
    s.temperatures.back() = t_end;  // kill accumulated rounding
  }
  s.validate();
  return s;
}

void AnnealSchedule::validate() const {
  if (temperatures.empty()) throw std::invalid_argument("schedule has no temperatures");
  for (std::size_t n = 0; n < temperatures.size(); ++n) {
    if (!(temperatures[n] > 0.0)) throw std::invalid_argument("temperatures must be positive");
    if (n > 0 && !(temperatures[n] < temperatures[n - 1])) {
      throw std::invalid_argument("temperatures must be strictly decreasing");
    }
  }
  if (max_sweeps_per_temp < 1) throw std::invalid_argument("max_sweeps_per_temp must be >= 1");
  if (!(f_tolerance > 0.0)) throw std::invalid_argument("f_tolerance must be positive");
}

Prob3 coordinate_update(const WrappedImage& img, BeliefField& beliefs, const ModelParams& params,
                        const EdgeId& edge) {
  validate_edge(beliefs, edge);
  const double inv_two_sigma_sq = 1.0 / (2.0 * params.sigma * params.sigma);
  const double inv_t = 1.0 / params.temperature;

  double coupling[3] = {0.0, 0.0, 0.0};
  double d;
  if (edge.family == EdgeFamily::A) {
    d = img.phi(edge.i, edge.j + 1) - img.phi(edge.i, edge.j);
    add_plaquette_cost(beliefs, edge.i, edge.j, Member::TopA, +1.0, coupling);
    add_plaquette_cost(beliefs, edge.i - 1, edge.j, Member::BottomA, -1.0, coupling);
  } else {
    d = img.phi(edge.i + 1, edge.j) - img.phi(edge.i, edge.j);
    add_plaquette_cost(beliefs, edge.i, edge.j, Member::LeftB, -1.0, coupling);
    add_plaquette_cost(beliefs, edge.i, edge.j - 1, Member::RightB, +1.0, coupling);
  }

  double cost[3];
  for (int k = -1; k <= 1; ++k) {
    cost[k + 1] = (d - k) * (d - k) * inv_two_sigma_sq + coupling[k + 1] * inv_t;
  }
  const Prob3 t = softmax_floor(cost);
  if (edge.family == EdgeFamily::A) {
    beliefs.alpha(edge.i, edge.j) = t;
  } else {
    beliefs.beta(edge.i, edge.j) = t;
  }
  return t;
}

double sweep(const WrappedImage& img, BeliefField& beliefs, const ModelParams& params) {
  return run_sweep(img, beliefs, params, nullptr);
}

SolveReport anneal(const WrappedImage& img, const AnnealSchedule& schedule, double sigma,
                   const SolveOptions& options) {
  schedule.validate();
  const int r = img.rows(), c = img.cols();

  BeliefField beliefs = BeliefField::uniform(r, c);

  std::vector<EdgeId> order;
  std::mt19937_64 rng(options.seed);
  if (options.randomize_order) {
    order.reserve(beliefs.edge_count());
    for (int i = 0; i < r; ++i) {
      for (int j = 0; j + 1 < c; ++j) order.push_back({EdgeFamily::A, i, j});
    }
    for (int i = 0; i + 1 < r; ++i) {
      for (int j = 0; j < c; ++j) order.push_back({EdgeFamily::B, i, j});
    }
  }

  SolveReport report{{}, beliefs, ShiftField(r, c), true};
  report.records.reserve(schedule.temperatures.size());

  for (double t : schedule.temperatures) {
    const ModelParams params(t, sigma);
    const double entry_entropy = mean_entropy(beliefs);
    double f_prev = free_energy(img, beliefs, params);
    int sweeps_used = 0;
    bool reached = false;
    while (sweeps_used < schedule.max_sweeps_per_temp) {
      if (options.randomize_order) std::shuffle(order.begin(), order.end(), rng);
      const double f = run_sweep(img, beliefs, params,
                                 options.randomize_order ? &order : nullptr);
      ++sweeps_used;
      const bool small_change = std::fabs(f_prev - f) <= schedule.f_tolerance * (1.0 + std::fabs(f));
      f_prev = f;
      if (small_change) {
        reached = true;
        break;
      }
    }
    const ShiftField argmax = extract_map_shifts(beliefs);
    const int violations = curl(argmax).violation_count;
    report.records.push_back({t, sweeps_used, f_prev, violations, entry_entropy, reached});
    if (!reached) report.converged = false;
  }

  report.beliefs = beliefs;
  report.map_shifts = extract_map_shifts(beliefs);
  return report;
}

int argmax_shift(const Prob3& t) {
  const double m = std::max({t.p[0], t.p[1], t.p[2]});
  if (t(0) == m) return 0;
  if (t(1) == m) return 1;
  return -1;
}

ShiftField extract_map_shifts(const BeliefField& beliefs) {
  ShiftField s(beliefs.rows(), beliefs.cols());
  for (std::size_t n = 0; n < beliefs.alpha.size(); ++n) {
    s.a.data()[n] = static_cast<std::int8_t>(argmax_shift(beliefs.alpha.data()[n]));
  }
  for (std::size_t n = 0; n < beliefs.beta.size(); ++n) {
    s.b.data()[n] = static_cast<std::int8_t>(argmax_shift(beliefs.beta.data()[n]));
  }
  return s;
}

EntropyMap entropy_map(const BeliefField& beliefs) {
  EntropyMap e{Raster<double>(beliefs.alpha.rows(), beliefs.alpha.cols()),
               Raster<double>(beliefs.beta.rows(), beliefs.beta.cols())};
  for (std::size_t n = 0; n < beliefs.alpha.size(); ++n) {
    e.a.data()[n] = beliefs.alpha.data()[n].entropy();
  }
  for (std::size_t n = 0; n < beliefs.beta.size(); ++n) {
    e.b.data()[n] = beliefs.beta.data()[n].entropy();
  }
  return e;
}

double mean_entropy(const BeliefField& beliefs) {
  double sum = 0.0;
  for (const Prob3& t : beliefs.alpha.data()) sum += t.entropy();
  for (const Prob3& t : beliefs.beta.data()) sum += t.entropy();
  return sum / static_cast<double>(beliefs.edge_count());
}

}  // namespace puw
