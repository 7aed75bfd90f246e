#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "thinfilm/field.hpp"
#include "thinfilm/ledger.hpp"
#include "thinfilm/model.hpp"
#include "thinfilm/solver_config.hpp"

namespace thinfilm {

// ---- interpolation constants b1..b5 -------------------------------------

struct BasicConstants {
  double p = 0.0;
  double b1 = 0.0;  // Poincare: |Omega|^p
  double b2 = 0.0;  // (1 + r/2)^(a p)
  double b3 = 0.0;
  double b4 = 0.0;  // 2^(p-1) b3
  double b5 = 0.0;  // (2/|Omega|)^(p-1)
  // for 0 < p < 1 the bound uses these in place of b4, b5
  double b4_tilde = 0.0;
  double b5_tilde = 0.0;

  /// Coefficients of ||h||_p^p <= B4 ||h_x||_2^p + B5 M^p.
  double B4() const noexcept { return p < 1.0 ? b4_tilde : b4; }
  double B5() const noexcept { return p < 1.0 ? b5_tilde : b5; }
};

BasicConstants basic_constants(double p, double length, double r = 2.0);

// ---- constants chain ------------------------------------------------------

struct ConstantsLedger {
  double n = 0.0, m = 0.0, a0 = 0.0, a1 = 0.0, length = 0.0;
  double eps = 0.0, delta = 0.0, alpha = 0.0, eps_interp = 0.1;
  double mass = 0.0, entropy0 = 0.0, hx0_sq = 0.0;

  double p_exponent = 0.0;     // 2(2m - n), where c1 and c4 are evaluated
  BasicConstants energy_site;  // at p = 2(2m - n)
  BasicConstants entropy_site; // at p = 2(m - n + 1)
  double b2_p4 = 0.0;          // b2 at p = 4, r = 2

  double c1 = 0, c2 = 0, c3 = 0, c4 = 0, c5 = 0, c6 = 0, c7 = 0, c8 = 0, c9 = 0, c10 = 0, c11 = 0;
  double gamma1 = 0, gamma2 = 0, gamma3 = 0;
  double K = 0;  // H1 + entropy cap

  // global-continuation quantities; NaN when the regime gives no bound
  double h1_bound = 0;  // right side of the a0/4 ||h||_H1^2 estimate
  double beta = 0;      // entropy growth rate per unit time
};

/// energy0 feeds the H1 bound and beta; leave empty to skip them.
ConstantsLedger constants_chain(const ProblemParams& p, const SolverConfig& cfg, double mass,
                                double entropy0, double hx0_sq,
                                std::optional<double> energy0 = std::nullopt);

/// Existence time (9/20) / (c11 (gamma1 - 1)) * min{1, v^-(gamma1 - 1)},
/// v = int h_x^2 + (2 c2 / a0) int G0(h).
double tloc_estimate(const ConstantsLedger& k, double hx_sq, double entropy);
double tloc_estimate(const ConstantsLedger& k, const Field& h);

// ---- nonlinear Gronwall -----------------------------------------------------

/// Piecewise bound on solutions of v <= v0 + c int max{1, v^gamma}.
struct BihariBound {
  double v0 = 0.0;
  double c = 0.0;
  double gamma = 0.0;
  double blow_time = 0.0;  // where the bound diverges

  double operator()(double t) const;
};

BihariBound bihari_bound(double v0, double c, double gamma);

// ---- inequality checks -------------------------------------------------------

struct WeightedBoundRow {
  double t = 0.0;
  double lhs1 = 0.0, rhs1 = 0.0;  // int h_x^2 vs e^B1 int h0x^2
  double lhs2 = 0.0, rhs2 = 0.0;  // int h_x^2 + G0 vs e^B2 (initial)
};

struct WeightedBoundReport {
  std::vector<WeightedBoundRow> rows;
  double worst_ratio1 = 0.0;  // max lhs/rhs
  double worst_ratio2 = 0.0;
  double tol = 0.05;
  bool ok = true;
};

WeightedBoundReport check_exp_weighted_bounds(const RunLedger& ledger, const ProblemParams& p,
                                              double tol_ineq = 0.05);

enum class Verdict { CertifiedConsistent, InequalityViolated, NoBlowup };
std::string_view to_string(Verdict v) noexcept;

struct MomentRow {
  double t = 0.0, lhs = 0.0, rhs = 0.0, margin = 0.0;
};

struct BlowupCertificate {
  double k1 = 0.0;
  double k2 = 0.0;
  double E0 = 0.0;
  double V0 = 0.0;
  std::optional<double> T_ub;
  bool T_ub_extrapolated = false;
  std::optional<double> T_star;
  std::string trigger;  // event that fixed T_star
  double margin = 0.0;  // max over samples of lhs - rhs
  double tol = 0.05;
  Verdict verdict = Verdict::NoBlowup;
  std::vector<MomentRow> rows;
};

/// Second-moment certificate from a ledger whose support stayed interior.
BlowupCertificate moment_certificate(const RunLedger& ledger, const ProblemParams& p,
                                     double tol_ineq = 0.05);

// ---- support and spreading ------------------------------------------------------

struct SupportEdges {
  double left = 0.0;
  double right = 0.0;
  bool empty = false;
  bool full = false;  // no crossing: support is the whole period
};

SupportEdges support_edges(const Field& h, double supp_tol);

struct SupportTrace {
  std::vector<double> times;
  std::vector<double> left_edges;
  std::vector<double> right_edges;
  std::vector<double> Gamma;  // running max of r(t) - r0, clipped at 0
  double r0 = 0.0;
};

/// Builds Gamma from the ledger's support columns; radii measured from `center`.
SupportTrace support_trace(const RunLedger& ledger, double r0, double center = 0.0);

struct SpreadingFit {
  double exponent = 0.0;
  double C = 0.0;
  double residual = 0.0;  // rms of log residuals
  std::size_t count = 0;
};

/// Least squares of log Gamma on log t over [t_a, t_b].
SpreadingFit fit_spreading_exponent(const SupportTrace& trace, double t_a, double t_b, double dx);

/// Time integrals of int_{|x - center| >= r0 + s} (h - lift)_+^xi dx, one table per exponent.
std::vector<std::vector<double>> localized_integrals(std::span<const Snapshot> snapshots, double r0,
                                                     std::span<const double> s_grid,
                                                     std::span<const double> exponents,
                                                     double lift = 0.0, double center = 0.0);

// ---- Stampacchia system ---------------------------------------------------------

struct StampacchiaSystem {
  std::vector<double> c;
  std::vector<double> beta;
  std::vector<double> alpha;
  std::vector<std::function<double(double)>> G;  // nonincreasing, nonnegative
  double c_user = 2.0;
};

struct StampacchiaResult {
  double s0 = 0.0;
  double H = 0.0;
  double G = 0.0;
};

/// s0 past which the first ell = #{alpha_i > 0} functions vanish. Throws
/// HypothesisFailed when H(s1) >= 1 and BadShape on malformed input.
StampacchiaResult stampacchia_s0(const StampacchiaSystem& sys, double s1);

/// Piecewise-linear interpolant of a table, constant outside its range.
std::function<double(double)> tabulated(std::vector<double> s, std::vector<double> values);

}  // namespace thinfilm
