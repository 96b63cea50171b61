#pragma once

#include "geodist/collections.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace geodist {

// Supplies the full collection for a discriminant; the CLI routes this
// through the on-disk cache, tests use the direct construction.
using CollectionProvider = std::function<GeodesicCollection(i64)>;
CollectionProvider direct_provider();

struct DiscrepancyReport {
    i64 d = 0;
    std::string f_id;
    std::string kind;
    double q_or_r = 0.0;
    int n_members = 0;
    double total_length = 0.0;
    double phi = 1.0;
    double psi = 0.0;
    double mu_I = 0.0;
    double mu_X = 0.0;
    double discrepancy = 0.0;
    double step = 0.0;
    std::uint64_t seed = 0;
    std::optional<double> T_window;
    double quad_error = 0.0;
    bool censored = false; // dropped from decay fits (below 10x quadrature error)
};

struct DecayFit {
    std::vector<double> log_x, log_y; // surviving points
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    std::size_t n_used = 0;
    std::size_t n_censored = 0;
    double gamma_hat() const { return -slope; }
};

struct MixingEstimate {
    std::string f_id;
    double t = 0.0; // t for correlations, T for ergodic averages
    double value = 0.0;
    double std_error = 0.0;
    std::size_t n_samples = 0;
};

DiscrepancyReport discrepancy(const GeodesicCollection& coll, const GeodesicCollection& full,
                              const TestFunction& f, double step, std::uint64_t seed,
                              std::size_t mc_samples = 200000);

struct SweepResult {
    std::vector<DiscrepancyReport> reports;
    DecayFit fit;
};

// Fits log |mu_d(f) - mu_X(f)| against log d over full collections;
// gamma_hat = -slope is the empirical decay exponent.
SweepResult duke_sweep(const std::vector<i64>& d_list, const TestFunction& f, double step,
                       const CollectionProvider& provider, std::uint64_t seed = 0);

enum class Verdict { PASS, FAIL, NOT_APPLICABLE };
std::string to_string(Verdict v);

struct Theorem12Result {
    std::vector<DiscrepancyReport> reports;
    double C = 0.0;      // max discrepancy / sqrt(psi) on the fitting half
    std::size_t n_fit = 0;
    Verdict verdict = Verdict::NOT_APPLICABLE;
};

// Random subcollections along a q schedule with decreasing scheduled psi;
// fits C on the first half and tests discrepancy <= C sqrt(psi) on the rest.
Theorem12Result theorem12_experiment(const std::vector<i64>& d_list,
                                     const std::vector<double>& q_schedule,
                                     const TestFunction& f, std::uint64_t seed, double step,
                                     const CollectionProvider& provider);

struct ChainCheckResult {
    double lhs1 = 0.0, rhs1 = 0.0; // Cauchy-Schwarz step
    double lhs2 = 0.0, rhs2 = 0.0; // positivity step
    bool holds1 = false, holds2 = false;
    double tolerance = 0.0;
    double T_window = 0.0;
};

// Verifies, for this concrete (I, f, T), the two inequalities that drive the
// subcollection bound: windowed averages g = (f - c)_T along each orbit,
//   (i)  (l(I)/l(G) mu_I(g))^2 <= (l(I)/l(G))^2 mu_I(g^2)
//   (ii) (l(I)/l(G)) mu_I(g^2) <= mu_G(g^2).
// Both are exact for the shared quadrature grid, up to roundoff.
ChainCheckResult chain_check(const GeodesicCollection& coll, const GeodesicCollection& full,
                             const TestFunction& f, double T_window, double step);

struct MixingSeries {
    std::vector<MixingEstimate> points;
    std::optional<LineFit> envelope; // log |corr| vs t over significant points
    double mu_f = 0.0;
};

// Monte-Carlo <f0, f0 o a_t> at each listed t (f0 = f - mu_X(f)).
MixingSeries mixing_correlation(const TestFunction& f, const std::vector<double>& t_list,
                                std::size_t n_samples, std::uint64_t seed);

struct VarianceSeries {
    std::vector<MixingEstimate> points;
    LineFit fit; // log mean |f_T|^2 vs log T
    double mu_f = 0.0;
};

// Monte-Carlo mu_X(|f_T|^2) for each listed T, one trajectory per sample
// with shared prefix quadrature, plus the log-log decay fit.
VarianceSeries ergodic_variance(const TestFunction& f, const std::vector<double>& T_list,
                                std::size_t n_samples, std::uint64_t seed, double quad_step);

struct AdversarialRow {
    i64 n = 0;
    i64 d = 0;
    int h = 0;
    int members_in_tube = 0;
    double l_full = 0.0;
    double l_tube = 0.0;
    double exponent = 0.0;    // log l(I) / log d, to compare with 1/2 - a
    double tube_mass = 0.0;   // mu_I(indicator of U_{r0})
    double min_member_dwell = 0.0;
    double phi = 0.0, psi = 0.0;
    bool empty = false;
};

struct AdversarialReport {
    double r = 0.0, probe_r0 = 0.0, a_target = 0.0;
    MonteCarloValue mu_x_probe;
    std::vector<AdversarialRow> rows;
    double inf_tube_mass = 0.0; // over nonempty rows
    std::size_t n_empty = 0;
};

// The d = n^2 + 4 family: tube subcollections around a fixed orbit P keep a
// positive fraction of their time near P while the Haar mass of the same
// neighborhood stays small.
AdversarialReport adversarial_experiment(const std::vector<i64>& n_list, const ClosedGeodesic& P,
                                         double r, double a, double probe_r0,
                                         std::size_t n_mc_samples, std::uint64_t seed,
                                         const CollectionProvider& provider);

struct ShadowingRow {
    double r = 0.0;
    double mean_interval = 0.0;
    std::vector<double> per_direction;
};

struct ShadowingReport {
    std::vector<ShadowingRow> rows;
    std::vector<double> pairwise_slopes; // interval growth per unit -log r
};

// Perturb the base point of P at distance r and measure how long the orbit
// stays sqrt(r)-close; the interval grows affinely in -log r.
ShadowingReport shadowing_experiment(const ClosedGeodesic& P, const std::vector<double>& r_list,
                                     double step);

// Fixed column order used by every tabular emitter.
std::string csv_header();
std::string csv_row(const DiscrepancyReport& r);

} // namespace geodist
