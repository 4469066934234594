#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "levy/common.hpp"
#include "levy/oracle.hpp"
#include "levy/stable.hpp"

namespace levy {

struct AttackConfig {
  double alpha = 2.0;
  int max_steps = 5000;                 // T, counts random-walk queries
  double termination_threshold = 1e-7;  // psi
  double initial_delta = 0.1;
  double initial_epsilon = 0.1;
  int adaptation_window = 30;
  double adaptation_factor = 1.5;
  double orth_success_target = 0.5;
  double shrink_success_target = 0.25;
  double epsilon_clamp = 0.99;
  int probe_interval = 10;  // orthogonal probe every k-th step
  int max_init_attempts = 1000;
  RngSeed seed = 0;

  void validate() const;
};

struct AttackState {
  DataPoint current;  // x^-_t, always adversarial
  int step_index = 0;
  double delta = 0.1;
  double epsilon = 0.1;
  int orth_successes = 0;
  int orth_trials = 0;
  int shrink_successes = 0;
  int shrink_trials = 0;
  double distance = 0.0;  // squared L2 distance to the original
};

enum class Termination {
  epsilon_below_psi,
  max_steps,
  init_failed,
  already_misclassified,
};

const char* termination_name(Termination t);

struct TracePoint {
  int step = 0;
  double distance = 0.0;
};

struct AttackResult {
  DataPoint adversarial;
  DataPoint perturbation;  // adversarial - original, exactly
  Label final_label{0};
  int steps_taken = 0;
  std::uint64_t queries_used = 0;
  std::vector<TracePoint> distance_trace;
  Termination terminated_by = Termination::init_failed;

  bool succeeded() const { return terminated_by != Termination::init_failed; }
};

enum class InitOutcome { found, already_misclassified, init_failed };

struct InitResult {
  InitOutcome outcome = InitOutcome::init_failed;
  DataPoint point;  // valid unless init_failed
  Label label{0};   // oracle's answer for point
};

// Draws x + U(low, high) noise, clipped, until misclassified. The original
// point itself is the first attempt, so a correct classifier that never
// flips costs exactly max_attempts queries and an already-misclassified
// original costs exactly one.
InitResult initialize(OracleHandle& oracle, const DataPoint& x, Label y,
                      int max_attempts, Rng& rng);

// Scales eta so its L2 norm is delta * distance, where distance is the
// squared L2 value d. Returns nullopt on a zero-norm draw so the caller can
// resample.
std::optional<DataPoint> rescale_step(const DataPoint& eta, double delta,
                                      double distance);

// Removes from step its component along (current - x), adds the tangential
// remainder to current, and re-projects radially so the squared distance to
// x is preserved.
DataPoint orthogonal_project(const DataPoint& x, const DataPoint& current,
                             const DataPoint& step);

// Moves candidate toward x so the squared distance shrinks by the factor
// 1 - epsilon; pure geometry, callers clip afterwards. epsilon = 0 is the
// identity and allowed for tests.
DataPoint shrink_toward_source(const DataPoint& x, const DataPoint& candidate,
                               double epsilon);

// Replaceable proposal-noise hook; the default draws sample_vector(params).
using NoiseSource = std::function<DataPoint(int dim, Rng& rng)>;

struct Proposal {
  DataPoint orthogonal;  // on the sphere around x, before clipping
  DataPoint candidate;   // shrunk toward x and clipped to bounds
};

Proposal propose_pair(const DataPoint& x, const AttackState& state,
                      const Bounds& bounds, Rng& rng,
                      const NoiseSource& noise);

DataPoint propose(const DataPoint& x, const AttackState& state,
                  const StableParams& params, const Bounds& bounds, Rng& rng);

// One adaptation-window update of delta and epsilon; resets the window
// counters.
AttackState adapt(const AttackState& state, const AttackConfig& config);

AttackResult run_attack(OracleHandle& oracle, const DataPoint& x, Label y,
                        const AttackConfig& config);
AttackResult run_attack(OracleHandle& oracle, const DataPoint& x, Label y,
                        const AttackConfig& config, const NoiseSource& noise);

}  // namespace levy
