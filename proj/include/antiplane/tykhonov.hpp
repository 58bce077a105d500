#pragma once

#include <optional>
#include <vector>

#include "antiplane/qvi_solver.hpp"

namespace antiplane {

enum class ScheduleKind { EpsDecay, LoadPerturb, TractionPerturb, FrictionPerturb, LamePerturb, AdversarialLoad };

/// Perturbation scale s_n: 1/n, 2^-n, 0 or (-1)^n.
enum class DecayLaw { Harmonic, Geometric, Zero, Alternating };

const char* to_string(ScheduleKind kind);
const char* to_string(DecayLaw law);
double decay_value(DecayLaw law, int n);

/// Recipe for the index sequence theta_n, n = 1..length.
///
///   EpsDecay         eps_n = |amplitude s_n|
///   LoadPerturb      f0_n = f0 + amplitude s_n shape
///   TractionPerturb  f2_n = f2 + amplitude s_n shape
///   FrictionPerturb  g_n = g + amplitude s_n (friction_a + friction_b |r|)
///   LamePerturb      mu_n = mu (1 + amplitude s_n)
///   AdversarialLoad  f0_n = target_f0 + s_n (f0 - target_f0)
struct Schedule {
  ScheduleKind kind = ScheduleKind::LoadPerturb;
  DecayLaw decay = DecayLaw::Harmonic;
  double amplitude = 1.0;
  CoefficientField shape = CoefficientField::constant(1.0);
  double friction_a = 1.0;
  double friction_b = 0.0;
  CoefficientField target_f0;
  int length = 64;
};

/// Data of the n-th perturbed problem.
struct IndexedData {
  TykhonovIndex theta;
  CoefficientField mu;
  double mu_star = 1.0;
  double scale = 0.0;
  double alpha = 0.0;  ///< friction envelope constants of g_n - g
  double beta = 0.0;
};

IndexedData schedule_data(const ProblemData& problem, const Schedule& schedule, int n);

struct SequenceEntry {
  int n = 0;
  IndexedData data;
  ScalarField u;
  double violation = 0.0;
};

/// u_n solves the perturbed problem with eps = 0, which places it in Omega(theta_n)
/// because the eps term is nonnegative. Each u_n is certified by membership_violation.
std::vector<SequenceEntry> generate_sequence(const ProblemData& problem, const Schedule& schedule,
                                             const SolverConfig& config = {});

enum class Verdict { Convergent, NonConvergent };
const char* to_string(Verdict verdict);

struct ConvergenceEntry {
  int n = 0;
  double eps = 0.0;
  double scale = 0.0;
  double error = 0.0;       ///< ||u_n - u||_V
  double violation = 0.0;   ///< membership violation of u_n in Omega(theta_n)
  std::optional<double> target_error;  ///< ||u_n - u_bar||_V for adversarial schedules
};

struct ConvergenceReport {
  ScheduleKind kind = ScheduleKind::LoadPerturb;
  std::vector<ConvergenceEntry> entries;
  /// OLS slope of log e_n against log n over n in [N/2, N]; empty if any e_n vanishes there.
  std::optional<double> slope;
  /// (max - min) / max of e_n / s_n over the tail.
  std::optional<double> rate_constant_spread;
  /// ||u_bar - u||_V for adversarial schedules.
  std::optional<double> limit_gap;
  double max_violation = 0.0;
  double pass_threshold = 1e-6;
  Verdict verdict = Verdict::NonConvergent;
  ScalarField reference;
};

/// Convergent when e_N <= pass_threshold, or when the tail of e_n is nonincreasing
/// up to 10% jitter and e_N <= 0.75 e_{N/2}.
Verdict classify(const std::vector<double>& errors, double pass_threshold);

/// OLS slope of (log n, log e_n) for n in [N/2, N].
std::optional<double> tail_loglog_slope(const std::vector<int>& n, const std::vector<double>& errors);

ConvergenceReport run_convergence(const ProblemData& problem, const Schedule& schedule,
                                  const SolverConfig& config = {});

/// Lame sequence: mu_n from the schedule, membership certified in
/// Omega(||mu_n - mu||_inf, f0, f2, g) with the unperturbed a(.,.).
ConvergenceReport lame_perturb_sequence(const ProblemData& problem, const Schedule& schedule,
                                        const SolverConfig& config = {});

struct FrictionEnvelope {
  double alpha = 0.0;
  double beta = 0.0;
  /// max_k (|g_n - g| - alpha - beta |r|); <= 0 when the envelope holds.
  double max_residual = 0.0;
};

/// Tightest affine envelope |g_n(x, r) - g(x, r)| <= alpha + beta |r| over the
/// samples, in the sense of the smallest summed envelope height.
FrictionEnvelope verify_c4(const FrictionBound& g_n, const FrictionBound& g, const std::vector<Point>& points,
                           const std::vector<double>& slips);

}  // namespace antiplane
