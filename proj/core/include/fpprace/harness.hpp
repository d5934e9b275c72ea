#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fpprace/competition.hpp"
#include "fpprace/curve_solver.hpp"
#include "fpprace/stats.hpp"

namespace fpprace {

/// Parses "start:end:step" into a uniform grid (end included within 1e-9).
std::vector<double> parse_time_grid(const std::string& text);

struct experiment_cell {
    std::uint64_t n = 0;
    std::uint64_t replicas = 1;
};

/// Plain structured text spec: `key = value` lines, `#` comments, optional
/// `[cell]` sections overriding `n` and `replicas` per cell. Without
/// sections, the `n` list defines one cell per entry.
struct experiment_spec {
    std::string name = "experiment";
    std::uint64_t base_seed = 1;
    double tau = 2.5;
    double rho = 0.1;
    weight_law law1 = weight_law::exponential(1.0);
    weight_law law2 = weight_law::exponential(1.0);
    std::vector<double> eps = {0.01, 0.1};
    std::vector<experiment_cell> cells;
    bool curves = false;
    std::vector<double> tgrid;
    std::vector<std::uint64_t> curve_ks = {2, 3, 5, 10};
    std::uint64_t curve_replicas = 0;
    double solver_h = 0.005;
    std::uint64_t max_n = 4000000;
    std::string outdir = "fpprace-out";
    std::string raw_text;

    std::uint64_t hash() const; // FNV-1a of the raw spec text
    void validate() const;
};

experiment_spec parse_experiment_spec(std::istream& is);
experiment_spec parse_experiment_spec_file(const std::string& path);

struct replica_row {
    std::uint64_t replica = 0;
    bool failed = false;
    std::string error;
    competition_outcome outcome;
    std::vector<std::optional<double>> d2; // per eps probe
};

struct cell_aggregate {
    std::uint64_t n = 0, replicas = 0, failures = 0;
    binomial_ci winner1{};
    double n_loss_mean = 0.0, n_loss_median = 0.0, n_loss_q95 = 0.0;
    std::map<std::uint64_t, double> n_loss_pmf;
    double n_loss_star_mean = 0.0;
    std::uint64_t n_loss_star_na = 0;
    std::vector<double> disjoint_freq;      // per eps, among applicable
    std::vector<std::uint64_t> disjoint_na; // per eps
    std::vector<double> d2_mean;
    std::vector<std::uint64_t> d2_na;
    double proxy_mismatch_freq = 0.0;
    double unreached_mean = 0.0;
    std::vector<std::uint64_t> n_loss_samples; // kept for cross-cell KS
};

/// Mean empirical curves of `curve_replicas` runs against the solver oracle.
struct curve_overlay {
    std::vector<double> tgrid;
    std::vector<std::uint64_t> ks;
    std::vector<std::vector<double>> solo_ratio;   // N(k,t)/Phat(D=k), replica mean
    std::vector<std::vector<double>> winner_ratio; // winner-relative variant
    std::vector<std::vector<double>> solver_cdf;   // P(V(k) <= t)
    std::vector<double> solo_edge, winner_edge;    // empirical edge fractions
    std::vector<double> solver_edge_cdf;           // 1 - E(t)
    double max_gap_solo = 0.0, max_gap_winner = 0.0, max_gap_edge = 0.0;
    std::uint64_t replicas_used = 0;
};

struct aggregate_report {
    std::vector<cell_aggregate> cells;
    std::vector<double> ks_consecutive; // n_loss KS between neighbouring cells
    std::vector<curve_overlay> overlays; // per cell when curves are enabled
};

/// Builds the overlay table from replica-mean curves and the solver grid;
/// throws config_error on a grid mismatch.
curve_overlay make_overlay(const std::vector<double>& tgrid,
                           const std::vector<std::uint64_t>& ks,
                           const std::vector<std::vector<double>>& solo_ratio_mean,
                           const std::vector<std::vector<double>>& winner_ratio_mean,
                           const std::vector<double>& solo_edge_mean,
                           const std::vector<double>& winner_edge_mean,
                           const survival_grid& grid, std::uint64_t replicas_used);

/// Runs every cell of the experiment, writes the artifact files (per-replica
/// CSVs, aggregate JSON, metadata JSON, overlay CSVs) and returns the
/// aggregates. Deterministic: replica seeds derive from (base_seed, n,
/// replica index) and are collision-checked; reductions are index-ordered.
aggregate_report run_experiment(const experiment_spec& spec);

/// Deterministic replica-parallel map: calls body(0..count-1) from a bounded
/// pool. Worker count resolves from FPPRACE_WORKERS or hardware concurrency.
void parallel_replicas(std::uint64_t count, const std::function<void(std::uint64_t)>& body);
unsigned resolve_worker_count();

/// CSV cell formatting shared by every writer (fixed %.17g doubles keeps
/// reruns byte-identical).
std::string format_double(double v);

} // namespace fpprace
