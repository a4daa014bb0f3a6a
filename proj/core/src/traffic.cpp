#include "slicesim/traffic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "slicesim/errors.hpp"

namespace slicesim {

void NsprTemplate::validate() const {
  if (vnf_count < 1) throw ConfigError("traffic: vnf_count must be >= 1");
  for (const UnitsRange* r : {&cpu, &ram, &bw}) {
    if (r->min < 1 || r->max < r->min) {
      throw ConfigError("traffic: demand ranges need 1 <= min <= max");
    }
  }
  if (!(mean_holding > 0.0) || !std::isfinite(mean_holding)) {
    throw ConfigError("traffic: mean_holding must be positive");
  }
}

void LoadModel::validate() const {
  if (!(lambda_base > 0.0) || !std::isfinite(lambda_base)) {
    throw ConfigError("traffic: lambda_base must be positive");
  }
  if (!(amplitude >= 0.0 && amplitude < 1.0)) {
    throw ConfigError("traffic: amplitude must lie in [0, 1)");
  }
  if (!(period > 0.0) || !std::isfinite(period)) {
    throw ConfigError("traffic: period must be positive");
  }
  for (std::size_t i = 0; i < phases.size(); ++i) {
    if (!(phases[i].multiplier >= 0.0) || !std::isfinite(phases[i].multiplier)) {
      throw ConfigError("traffic: phase multipliers must be finite and >= 0");
    }
    if (i > 0 && !(phases[i].start > phases[i - 1].start)) {
      throw ConfigError("traffic: phase starts must be strictly increasing");
    }
  }
}

double LoadModel::multiplier(double t) const {
  double m = 1.0;
  for (const auto& p : phases) {
    if (p.start <= t) {
      m = p.multiplier;
    } else {
      break;
    }
  }
  return m;
}

double LoadModel::rate(double t) const {
  const double wave = 1.0 + amplitude * std::sin(2.0 * std::numbers::pi * t / period);
  return lambda_base * wave * multiplier(t);
}

double LoadModel::max_rate() const {
  double m = phases.empty() || phases.front().start > 0.0 ? 1.0 : 0.0;
  for (const auto& p : phases) m = std::max(m, p.multiplier);
  return lambda_base * (1.0 + amplitude) * m;
}

double LoadModel::integrated_rate(double t0, double t1) const {
  if (t1 <= t0) return 0.0;
  const double w = 2.0 * std::numbers::pi / period;
  auto primitive = [&](double t) { return t - amplitude * std::cos(w * t) / w; };

  // Breakpoints where the multiplier changes.
  std::vector<double> cuts{t0};
  for (const auto& p : phases) {
    if (p.start > t0 && p.start < t1) cuts.push_back(p.start);
  }
  cuts.push_back(t1);
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double m = multiplier(cuts[i]);
    total += lambda_base * m * (primitive(cuts[i + 1]) - primitive(cuts[i]));
  }
  return total;
}

namespace {

// Start of the next phase with a positive multiplier after t, or +inf.
double next_positive_phase(const LoadModel& model, double t) {
  for (const auto& p : model.phases) {
    if (p.start > t && p.multiplier > 0.0) return p.start;
  }
  return std::numeric_limits<double>::infinity();
}

}  // namespace

double next_arrival(const LoadModel& model, double t_now, Rng& rng) {
  const double lambda_max = model.max_rate();
  if (!(lambda_max > 0.0)) return std::numeric_limits<double>::infinity();
  std::exponential_distribution<double> gap(lambda_max);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  double t = t_now;
  if (model.multiplier(t) == 0.0) t = next_positive_phase(model, t);
  while (std::isfinite(t)) {
    t += gap(rng);
    if (model.multiplier(t) == 0.0) {
      // Zero-rate stretch: by memorylessness we can restart at its end.
      t = next_positive_phase(model, t);
      continue;
    }
    const double ratio = model.rate(t) / lambda_max;
    if (ratio >= 1.0 || unit(rng) < ratio) return t;
  }
  return t;
}

Nspr sample_nspr(const NsprTemplate& tmpl, SliceId slice_id, double t_arrival, Rng& rng) {
  auto draw = [&rng](const UnitsRange& r) {
    return std::uniform_int_distribution<Units>(r.min, r.max)(rng);
  };
  Nspr out;
  out.slice_id = slice_id;
  out.arrival_time = t_arrival;
  out.vnfs.reserve(tmpl.vnf_count);
  for (int i = 0; i < tmpl.vnf_count; ++i) {
    VnfDemand d;
    d.cpu = draw(tmpl.cpu);
    d.ram = draw(tmpl.ram);
    out.vnfs.push_back(d);
  }
  out.vlinks.reserve(tmpl.vnf_count - 1);
  for (int i = 0; i + 1 < tmpl.vnf_count; ++i) out.vlinks.push_back(draw(tmpl.bw));
  // Exponential samples can be exactly 0 only with probability ~2^-53; keep
  // holding times strictly positive regardless.
  double hold = 0.0;
  std::exponential_distribution<double> holding(1.0 / tmpl.mean_holding);
  while (!(hold > 0.0)) hold = holding(rng);
  out.holding_time = hold;
  out.status = NsprStatus::Pending;
  return out;
}

double offered_load(const LoadModel& model, const NsprTemplate& tmpl,
                    const PhysicalNetwork& net, double t) {
  Units total_cpu = 0;
  for (const auto& s : net.servers()) total_cpu += s.cpu_capacity;
  if (total_cpu == 0) return 0.0;
  return model.rate(t) * tmpl.mean_holding * tmpl.expected_cpu_per_slice() /
         static_cast<double>(total_cpu);
}

}  // namespace slicesim
