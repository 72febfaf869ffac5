#include "rae/step_function.hpp"

#include <algorithm>
#include <cmath>

namespace rae {

StepFunction StepFunction::from_breakpoints(std::vector<std::pair<double, double>> pts) {
  std::sort(pts.begin(), pts.end());
  StepFunction sf;
  double last_level = 0.0;
  for (auto& [b, lvl] : pts) {
    if (!(b >= 0.0) || !std::isfinite(b)) throw input_error("breakpoint inputs must be finite and >= 0");
    if (lvl < -1e-9 || lvl > 1.0 + 1e-9) throw input_error("levels must lie in [0,1]");
    lvl = std::clamp(lvl, 0.0, 1.0);
    if (lvl < last_level - 1e-9) throw input_error("levels must be nondecreasing");
    lvl = std::max(lvl, last_level);
    if (!sf.pts_.empty() && sf.pts_.back().first == b) {
      sf.pts_.back().second = lvl;  // same input: keep the later (higher) level
    } else if (sf.pts_.empty() ? lvl > 0.0 : lvl > sf.pts_.back().second) {
      sf.pts_.emplace_back(b, lvl);
    }
    last_level = lvl;
  }
  return sf;
}

StepFunction StepFunction::average(const std::vector<std::pair<double, StepFunction>>& parts) {
  // Event sweep: each breakpoint contributes a weighted level increment, so
  // the average is a prefix sum over all events in input order.
  struct Event {
    double input;
    double delta;
  };
  std::vector<Event> events;
  for (const auto& [w, sf] : parts) {
    double prev = 0.0;
    for (const auto& [b, lvl] : sf.breakpoints()) {
      events.push_back({b, w * (lvl - prev)});
      prev = lvl;
    }
  }
  std::sort(events.begin(), events.end(),
            [](const Event& a, const Event& b) { return a.input < b.input; });
  std::vector<std::pair<double, double>> pts;
  double level = 0.0;
  for (const Event& e : events) {
    level += e.delta;
    if (!pts.empty() && pts.back().first == e.input)
      pts.back().second = level;
    else
      pts.emplace_back(e.input, level);
  }
  for (auto& [b, lvl] : pts) lvl = std::clamp(lvl, 0.0, 1.0);
  return from_breakpoints(std::move(pts));
}

double StepFunction::value(double b) const {
  auto it = std::upper_bound(pts_.begin(), pts_.end(), b,
                             [](double x, const std::pair<double, double>& p) {
                               return x < p.first;
                             });
  return it == pts_.begin() ? 0.0 : std::prev(it)->second;
}

double StepFunction::inverse(double x) const {
  if (x <= 0.0) return 0.0;
  for (const auto& [in, out] : pts_)
    if (out >= x) return in;
  return kInf;
}

double StepFunction::integral(double a, double b) const {
  if (b <= a) return 0.0;
  double acc = 0.0;
  for (std::size_t j = 0; j < pts_.size(); ++j) {
    double seg_lo = pts_[j].first;
    double seg_hi = j + 1 < pts_.size() ? pts_[j + 1].first : b;
    double lo = std::max(a, seg_lo);
    double hi = std::min(b, seg_hi);
    if (hi > lo) acc += (hi - lo) * pts_[j].second;
  }
  return acc;
}

double StepFunction::inverse_integral(double za, double zb) const {
  if (zb <= za) return 0.0;
  if (zb > sup_level() + 1e-9) return kInf;
  zb = std::min(zb, sup_level());
  if (zb <= za) return 0.0;
  double acc = 0.0;
  double prev_level = 0.0;
  for (const auto& [in, out] : pts_) {
    // inverse == in on levels (prev_level, out]
    double lo = std::max(za, prev_level);
    double hi = std::min(zb, out);
    if (hi > lo) acc += (hi - lo) * in;
    prev_level = out;
    if (prev_level >= zb) break;
  }
  return acc;
}

double inverse_threshold(const StepFunction& sf, double x) { return sf.inverse(x); }

double threshold_surplus(const StepFunction& sf, double z, double reserve,
                         ReserveConvention conv) {
  if (z <= 0.0) return 0.0;
  if (z > sf.sup_level() + 1e-9) return kInf;
  z = std::min(z, sf.sup_level());
  if (z <= 0.0) return 0.0;
  if (reserve <= 0.0) return sf.inverse_integral(0.0, z);
  switch (conv) {
    case ReserveConvention::IntegralLimit:
      return sf.inverse_integral(sf.value(reserve), z);
    case ReserveConvention::ZeroBelowReserve: {
      double acc = 0.0;
      double prev_level = 0.0;
      for (const auto& [in, out] : sf.breakpoints()) {
        double hi = std::min(z, out);
        if (in >= reserve && hi > prev_level) acc += (hi - prev_level) * in;
        prev_level = out;
        if (prev_level >= z) break;
      }
      return acc;
    }
  }
  return 0.0;
}

StepFunction pareto_frontier(const std::vector<CostPoint>& points) {
  std::vector<std::pair<double, double>> pts;
  for (const auto& p : points) {
    if (!std::isfinite(p.cost)) continue;  // unattainable
    if (p.cost < 0.0) throw input_error("costs must be >= 0");
    pts.emplace_back(p.cost, std::clamp(p.allocation, 0.0, 1.0));
  }
  std::sort(pts.begin(), pts.end());
  std::vector<std::pair<double, double>> staircase;
  double best = 0.0;
  for (const auto& [c, x] : pts) {
    if (x > best) {
      best = x;
      if (!staircase.empty() && staircase.back().first == c)
        staircase.back().second = x;
      else
        staircase.emplace_back(c, x);
    }
  }
  return StepFunction::from_breakpoints(std::move(staircase));
}

}  // namespace rae
