#include "levy/attack.hpp"

#include <cmath>
#include <string>

namespace levy {

void AttackConfig::validate() const {
  if (!(alpha > 0.0) || alpha > 2.0) {
    throw DomainError("alpha must lie in (0, 2], got " + std::to_string(alpha));
  }
  if (max_steps < 1) {
    throw DomainError("max_steps must be >= 1");
  }
  if (!(termination_threshold > 0.0)) {
    throw DomainError("termination_threshold must be > 0");
  }
  if (!(initial_delta > 0.0)) {
    throw DomainError("initial_delta must be > 0");
  }
  if (!(initial_epsilon > 0.0) || initial_epsilon >= 1.0) {
    throw DomainError("initial_epsilon must lie in (0, 1)");
  }
  if (adaptation_window < 1) {
    throw DomainError("adaptation_window must be >= 1");
  }
  if (!(adaptation_factor > 1.0)) {
    throw DomainError("adaptation_factor must be > 1");
  }
  if (!(orth_success_target > 0.0) || orth_success_target >= 1.0) {
    throw DomainError("orth_success_target must lie in (0, 1)");
  }
  if (!(shrink_success_target > 0.0) || shrink_success_target >= 1.0) {
    throw DomainError("shrink_success_target must lie in (0, 1)");
  }
  if (!(epsilon_clamp > 0.0) || epsilon_clamp >= 1.0) {
    throw DomainError("epsilon_clamp must lie in (0, 1)");
  }
  if (probe_interval < 1) {
    throw DomainError("probe_interval must be >= 1");
  }
  if (max_init_attempts < 1) {
    throw DomainError("max_init_attempts must be >= 1");
  }
}

const char* termination_name(Termination t) {
  switch (t) {
    case Termination::epsilon_below_psi:
      return "epsilon_below_psi";
    case Termination::max_steps:
      return "max_steps";
    case Termination::init_failed:
      return "init_failed";
    case Termination::already_misclassified:
      return "already_misclassified";
  }
  return "unknown";
}

InitResult initialize(OracleHandle& oracle, const DataPoint& x, Label y,
                      int max_attempts, Rng& rng) {
  if (max_attempts < 1) {
    throw DomainError("max_attempts must be >= 1");
  }
  const Bounds bounds = oracle.input_bounds();

  const Label observed = oracle.predict(x);
  if (observed != y) {
    return InitResult{InitOutcome::already_misclassified, x, observed};
  }
  for (int attempt = 1; attempt < max_attempts; ++attempt) {
    DataPoint noisy(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      noisy[i] = x[i] + rng.uniform(bounds.low, bounds.high);
    }
    noisy = clip(noisy, bounds);
    const Label label = oracle.predict(noisy);
    if (label != y) {
      return InitResult{InitOutcome::found, std::move(noisy), label};
    }
  }
  return InitResult{InitOutcome::init_failed, DataPoint(), y};
}

std::optional<DataPoint> rescale_step(const DataPoint& eta, double delta,
                                      double distance) {
  if (!(delta > 0.0) || !(distance > 0.0)) {
    throw DomainError("rescale_step needs delta > 0 and distance > 0");
  }
  const double norm = eta.norm();
  if (!(norm > 0.0)) {
    return std::nullopt;
  }
  return DataPoint(eta * (delta * distance / norm));
}

DataPoint orthogonal_project(const DataPoint& x, const DataPoint& current,
                             const DataPoint& step) {
  const DataPoint radial = current - x;
  const double radius_sq = radial.squaredNorm();
  if (!(radius_sq > 0.0)) {
    throw DomainError("orthogonal_project needs current != x");
  }
  const DataPoint tangential = step - (step.dot(radial) / radius_sq) * radial;
  const DataPoint moved = radial + tangential;
  const double moved_norm = moved.norm();
  if (!(moved_norm > 0.0)) {
    throw DomainError("orthogonal_project produced a degenerate direction");
  }
  return x + moved * (std::sqrt(radius_sq) / moved_norm);
}

DataPoint shrink_toward_source(const DataPoint& x, const DataPoint& candidate,
                               double epsilon) {
  if (epsilon < 0.0 || epsilon >= 1.0) {
    throw DomainError("shrink epsilon must lie in [0, 1)");
  }
  const DataPoint radial = candidate - x;
  if (!(radial.squaredNorm() > 0.0)) {
    throw DomainError("shrink_toward_source needs candidate != x");
  }
  return x + std::sqrt(1.0 - epsilon) * radial;
}

Proposal propose_pair(const DataPoint& x, const AttackState& state,
                      const Bounds& bounds, Rng& rng,
                      const NoiseSource& noise) {
  const int dim = static_cast<int>(x.size());
  std::optional<DataPoint> step;
  for (int attempt = 0; attempt < 10 && !step; ++attempt) {
    step = rescale_step(noise(dim, rng), state.delta, state.distance);
  }
  if (!step) {
    throw DomainError("proposal noise returned a zero vector 10 times");
  }
  Proposal proposal;
  proposal.orthogonal = orthogonal_project(x, state.current, *step);
  proposal.candidate =
      clip(shrink_toward_source(x, proposal.orthogonal, state.epsilon), bounds);
  return proposal;
}

DataPoint propose(const DataPoint& x, const AttackState& state,
                  const StableParams& params, const Bounds& bounds, Rng& rng) {
  const NoiseSource noise = [&params](int dim, Rng& r) {
    return sample_vector(params, dim, r);
  };
  return propose_pair(x, state, bounds, rng, noise).candidate;
}

AttackState adapt(const AttackState& state, const AttackConfig& config) {
  AttackState next = state;
  const double orth_rate =
      state.orth_trials > 0
          ? static_cast<double>(state.orth_successes) / state.orth_trials
          : 0.0;
  const double shrink_rate =
      state.shrink_trials > 0
          ? static_cast<double>(state.shrink_successes) / state.shrink_trials
          : 0.0;
  if (orth_rate > config.orth_success_target) {
    next.delta = state.delta * config.adaptation_factor;
  } else {
    next.delta = state.delta / config.adaptation_factor;
  }
  if (shrink_rate > config.shrink_success_target) {
    next.epsilon =
        std::min(state.epsilon * config.adaptation_factor, config.epsilon_clamp);
  } else {
    next.epsilon = state.epsilon / config.adaptation_factor;
  }
  next.orth_successes = 0;
  next.orth_trials = 0;
  next.shrink_successes = 0;
  next.shrink_trials = 0;
  return next;
}

AttackResult run_attack(OracleHandle& oracle, const DataPoint& x, Label y,
                        const AttackConfig& config) {
  StableParams params;
  params.alpha = config.alpha;
  const NoiseSource noise = [params](int dim, Rng& rng) {
    return sample_vector(params, dim, rng);
  };
  return run_attack(oracle, x, y, config, noise);
}

AttackResult run_attack(OracleHandle& oracle, const DataPoint& x, Label y,
                        const AttackConfig& config, const NoiseSource& noise) {
  config.validate();
  if (x.size() != oracle.input_dim()) {
    throw DomainError("attack input dimension " + std::to_string(x.size()) +
                      " != oracle input_dim " +
                      std::to_string(oracle.input_dim()));
  }
  const Bounds bounds = oracle.input_bounds();
  Rng rng(config.seed);
  std::uint64_t queries = 0;

  AttackResult result;
  result.adversarial = x;
  result.perturbation = DataPoint::Zero(x.size());
  result.final_label = y;

  const std::uint64_t counter_before = oracle.query_count();
  InitResult init = initialize(oracle, x, y, config.max_init_attempts, rng);
  queries = oracle.query_count() - counter_before;

  if (init.outcome == InitOutcome::init_failed) {
    result.terminated_by = Termination::init_failed;
    result.queries_used = queries;
    return result;
  }
  if (init.outcome == InitOutcome::already_misclassified) {
    result.terminated_by = Termination::already_misclassified;
    result.final_label = init.label;
    result.queries_used = queries;
    result.distance_trace.push_back({0, 0.0});
    return result;
  }

  AttackState state;
  state.current = std::move(init.point);
  state.delta = config.initial_delta;
  state.epsilon = config.initial_epsilon;
  state.distance = squared_distance(state.current, x);
  result.final_label = init.label;
  result.distance_trace.push_back({0, state.distance});
  result.terminated_by = Termination::max_steps;

  int walk_budget = config.max_steps;
  while (walk_budget > 0) {
    ++state.step_index;
    const int t = state.step_index;

    Proposal proposal = propose_pair(x, state, bounds, rng, noise);

    // Orthogonal-only probe: feeds the delta adaptation statistic without
    // touching the walk. Skipped when the budget cannot cover both queries.
    if (t % config.probe_interval == 0 && walk_budget >= 2) {
      const Label probe = oracle.predict(clip(proposal.orthogonal, bounds));
      ++queries;
      --walk_budget;
      ++state.orth_trials;
      if (probe != y) {
        ++state.orth_successes;
      }
    }

    const Label answer = oracle.predict(proposal.candidate);
    ++queries;
    --walk_budget;
    ++state.shrink_trials;
    if (answer != y) {
      ++state.shrink_successes;
      state.current = std::move(proposal.candidate);
      state.distance = squared_distance(state.current, x);
      result.final_label = answer;
      result.distance_trace.push_back({t, state.distance});
    }

    if (state.orth_trials >= config.adaptation_window) {
      state = adapt(state, config);
      if (state.epsilon < config.termination_threshold) {
        result.terminated_by = Termination::epsilon_below_psi;
        break;
      }
    }
  }

  const Label confirmed = oracle.predict(state.current);
  ++queries;
  if (confirmed == y) {
    throw DomainError("final confirmation flipped back to the source label");
  }
  result.final_label = confirmed;
  result.adversarial = state.current;
  result.perturbation = result.adversarial - x;
  result.steps_taken = state.step_index;
  result.queries_used = queries;
  if (queries != oracle.query_count() - counter_before) {
    throw DomainError("internal query accounting out of sync with the oracle");
  }
  return result;
}

}  // namespace levy
