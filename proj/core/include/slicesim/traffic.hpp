#pragma once

#include <cstdint>
#include <vector>

#include "slicesim/decision.hpp"
#include "slicesim/rng.hpp"
#include "slicesim/substrate.hpp"

namespace slicesim {

struct UnitsRange {
  Units min = 1;
  Units max = 1;

  double midpoint() const { return 0.5 * static_cast<double>(min + max); }
  friend bool operator==(const UnitsRange&, const UnitsRange&) = default;
};

struct NsprTemplate {
  int vnf_count = 5;
  UnitsRange cpu{1, 4};
  UnitsRange ram{1, 4};
  UnitsRange bw{1, 3};
  double mean_holding = 100.0;

  // Throws ConfigError.
  void validate() const;
  double expected_cpu_per_slice() const { return vnf_count * cpu.midpoint(); }

  friend bool operator==(const NsprTemplate&, const NsprTemplate&) = default;
};

enum class NsprStatus { Pending, Placed, Rejected, Departed };

struct Nspr {
  SliceId slice_id = 0;
  std::vector<VnfDemand> vnfs;
  std::vector<Units> vlinks;
  double arrival_time = 0.0;
  double holding_time = 0.0;
  NsprStatus status = NsprStatus::Pending;

  int vnf_count() const { return static_cast<int>(vnfs.size()); }
  friend bool operator==(const Nspr&, const Nspr&) = default;
};

// Step override: from `start` onwards the base rate is scaled by `multiplier`
// (until the next phase starts).
struct LoadPhase {
  double start = 0.0;
  double multiplier = 1.0;

  friend bool operator==(const LoadPhase&, const LoadPhase&) = default;
};

// lambda(t) = lambda_base * (1 + amplitude * sin(2 pi t / period)) * multiplier(t)
struct LoadModel {
  double lambda_base = 1.0;
  double amplitude = 0.0;
  double period = 1000.0;
  std::vector<LoadPhase> phases;  // sorted by start; multiplier is 1 before the first

  void validate() const;
  double multiplier(double t) const;
  double rate(double t) const;
  double max_rate() const;
  // Closed-form integral of rate() over [t0, t1].
  double integrated_rate(double t0, double t1) const;

  friend bool operator==(const LoadModel&, const LoadModel&) = default;
};

// Next event time of the non-homogeneous Poisson process after t_now, by
// thinning against max_rate(). Intervals with zero rate are skipped outright.
// Returns +infinity when the rate stays zero forever.
double next_arrival(const LoadModel& model, double t_now, Rng& rng);

Nspr sample_nspr(const NsprTemplate& tmpl, SliceId slice_id, double t_arrival, Rng& rng);

// Instantaneous offered CPU load: rate(t) * mean holding * E[cpu per slice]
// divided by the total CPU capacity.
double offered_load(const LoadModel& model, const NsprTemplate& tmpl,
                    const PhysicalNetwork& net, double t);

}  // namespace slicesim
