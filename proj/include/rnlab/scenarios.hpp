#pragma once

#include "rnlab/config.hpp"
#include "rnlab/drift.hpp"
#include "rnlab/report.hpp"
#include "rnlab/spde.hpp"

namespace rnlab {

DriftField make_drift(const ExperimentConfig& config);
SpatialFn make_initial_condition(const ExperimentConfig& config);

/// Noise-on epsilon sweep (Cauchy-in-eps L1 table on one common path) against
/// the noise-off sweep plus the two hand-built ODE branches through x = 0.
ExperimentReport run_selection_experiment(const ExperimentConfig& config);

/// Weak-test-function differences |int u^n phi - int u phi| for a sequence
/// u0^n -> u0 on common noise.
ExperimentReport run_stability(const ExperimentConfig& config);

/// Drift b0(x - B_t): noisy solution vs the shifted deterministic solution,
/// the Ito expansion identity of the drift, and the f/g norm growth as b0
/// roughens.
ExperimentReport run_negative_example(const ExperimentConfig& config);

/// Inverse-Jacobian moment boundedness across a mollification sweep plus the
/// closed-form Ornstein-Uhlenbeck oracle.
ExperimentReport run_lemma_sweep(const ExperimentConfig& config);

/// Commutator decay over the eps list with solver-produced densities.
ExperimentReport run_commutator_study(const ExperimentConfig& config);

/// One density solve with CSV and binary exports.
ExperimentReport run_simulate(const ExperimentConfig& config);

ExperimentReport run_hypothesis_check(const ExperimentConfig& config);

/// Dispatch on config.scenario.
ExperimentReport run_scenario(const ExperimentConfig& config);

}  // namespace rnlab
