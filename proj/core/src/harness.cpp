#include "fpprace/harness.hpp"

#include <atomic>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "fpprace/branching.hpp"
#include "fpprace/errors.hpp"
#include "fpprace/fpp.hpp"
#include "fpprace/version.hpp"

namespace fpprace {

using nlohmann::json;

std::vector<double> parse_time_grid(const std::string& text) {
    double start = 0.0, end = 0.0, step = 0.0;
    char extra = 0;
    if (std::sscanf(text.c_str(), "%lf:%lf:%lf%c", &start, &end, &step, &extra) != 3)
        throw config_error("time grid must be start:end:step, got '" + text + "'");
    if (!(step > 0.0) || end < start)
        throw config_error("time grid needs step > 0 and end >= start");
    std::vector<double> grid;
    for (std::uint64_t i = 0;; ++i) {
        const double t = start + static_cast<double>(i) * step;
        if (t > end + 1e-9) break;
        grid.push_back(t);
    }
    return grid;
}

std::string format_double(double v) {
    char buf[40];
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::uint64_t experiment_spec::hash() const {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : raw_text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

void experiment_spec::validate() const {
    if (cells.empty()) throw config_error("experiment: no cells (set n = ...)");
    std::uint64_t prev = 0;
    for (const auto& c : cells) {
        if (c.replicas < 1) throw config_error("experiment: replicas must be >= 1");
        if (c.n < 2) throw config_error("experiment: n must be >= 2");
        if (c.n > max_n)
            throw config_error("experiment: n exceeds the configured memory cap max_n");
        if (c.n <= prev) throw config_error("experiment: n values must be strictly increasing");
        prev = c.n;
    }
    if (!(rho > 0.0) || rho > 0.2) throw config_error("experiment: rho must be in (0, 0.2]");
    if (!(tau > 2.0 && tau < 3.0)) throw config_error("experiment: tau must be in (2,3)");
    if (curves && tgrid.empty())
        throw config_error("experiment: curves=true requires a tgrid");
    if (curves && curve_replicas == 0)
        throw config_error("experiment: curves=true requires curve_replicas >= 1");
}

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == ',') {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    if (!trim(cur).empty() || !out.empty()) out.push_back(trim(cur));
    return out;
}

std::uint64_t parse_u64(const std::string& s, const std::string& key) {
    try {
        std::size_t used = 0;
        const double asd = std::stod(s, &used); // allow 1e6 style
        if (used != s.size() || asd < 0 || asd > 1.8e19 || asd != std::floor(asd))
            throw std::invalid_argument(s);
        return static_cast<std::uint64_t>(asd);
    } catch (const std::exception&) {
        throw config_error("experiment: bad integer for " + key + ": '" + s + "'");
    }
}

double parse_f64(const std::string& s, const std::string& key) {
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw config_error("experiment: bad number for " + key + ": '" + s + "'");
    }
}

} // namespace

experiment_spec parse_experiment_spec(std::istream& is) {
    experiment_spec spec;
    std::ostringstream raw;
    std::string line;
    std::vector<std::uint64_t> n_list;
    std::uint64_t default_replicas = 1;
    experiment_cell* open_cell = nullptr;
    std::vector<experiment_cell> section_cells;

    while (std::getline(is, line)) {
        raw << line << "\n";
        const auto hash_pos = line.find('#');
        if (hash_pos != std::string::npos) line = line.substr(0, hash_pos);
        line = trim(line);
        if (line.empty()) continue;
        if (line == "[cell]") {
            section_cells.push_back({0, default_replicas});
            open_cell = &section_cells.back();
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw config_error("experiment: expected key = value, got '" + line + "'");
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (open_cell) {
            if (key == "n") open_cell->n = parse_u64(val, key);
            else if (key == "replicas") open_cell->replicas = parse_u64(val, key);
            else throw config_error("experiment: key '" + key + "' not allowed in [cell]");
            continue;
        }
        if (key == "name") spec.name = val;
        else if (key == "base_seed") spec.base_seed = parse_u64(val, key);
        else if (key == "tau") spec.tau = parse_f64(val, key);
        else if (key == "rho") spec.rho = parse_f64(val, key);
        else if (key == "law1") spec.law1 = weight_law::parse(val);
        else if (key == "law2") spec.law2 = weight_law::parse(val);
        else if (key == "replicas") default_replicas = parse_u64(val, key);
        else if (key == "eps") {
            spec.eps.clear();
            for (const auto& e : split_list(val)) spec.eps.push_back(parse_f64(e, key));
        } else if (key == "n") {
            for (const auto& e : split_list(val)) n_list.push_back(parse_u64(e, key));
        } else if (key == "curves") {
            spec.curves = (val == "true" || val == "1" || val == "yes");
        } else if (key == "tgrid") {
            spec.tgrid = parse_time_grid(val);
        } else if (key == "curve_ks") {
            spec.curve_ks.clear();
            for (const auto& e : split_list(val)) spec.curve_ks.push_back(parse_u64(e, key));
        } else if (key == "curve_replicas") {
            spec.curve_replicas = parse_u64(val, key);
        } else if (key == "solver_h") {
            spec.solver_h = parse_f64(val, key);
        } else if (key == "max_n") {
            spec.max_n = parse_u64(val, key);
        } else if (key == "outdir") {
            spec.outdir = val;
        } else {
            throw config_error("experiment: unknown key '" + key + "'");
        }
    }
    if (!section_cells.empty()) {
        spec.cells = section_cells;
    } else {
        for (auto n : n_list) spec.cells.push_back({n, default_replicas});
    }
    spec.raw_text = raw.str();
    if (const char* env = std::getenv("FPPRACE_OUTDIR")) spec.outdir = env;
    spec.validate();
    return spec;
}

experiment_spec parse_experiment_spec_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw config_error("cannot open experiment spec '" + path + "'");
    return parse_experiment_spec(f);
}

unsigned resolve_worker_count() {
    if (const char* env = std::getenv("FPPRACE_WORKERS")) {
        const int v = std::atoi(env);
        if (v >= 1) return static_cast<unsigned>(v);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

void parallel_replicas(std::uint64_t count, const std::function<void(std::uint64_t)>& body) {
    const unsigned workers = std::min<std::uint64_t>(resolve_worker_count(), count);
    if (workers <= 1) {
        for (std::uint64_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<std::uint64_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                const std::uint64_t i = next.fetch_add(1);
                if (i >= count) return;
                body(i);
            }
        });
    }
    for (auto& t : pool) t.join();
}

namespace {

cell_aggregate aggregate_cell(const experiment_spec& spec, const experiment_cell& cell,
                              const std::vector<replica_row>& rows) {
    cell_aggregate agg;
    agg.n = cell.n;
    agg.replicas = cell.replicas;
    agg.disjoint_freq.assign(spec.eps.size(), 0.0);
    agg.disjoint_na.assign(spec.eps.size(), 0);
    agg.d2_mean.assign(spec.eps.size(), 0.0);
    agg.d2_na.assign(spec.eps.size(), 0);
    std::vector<std::uint64_t> disjoint_yes(spec.eps.size(), 0);
    std::vector<std::uint64_t> d2_count(spec.eps.size(), 0);

    std::uint64_t wins1 = 0, mismatches = 0, star_count = 0;
    double star_sum = 0.0, unreached_sum = 0.0;
    std::vector<double> n_loss_values;
    for (const auto& row : rows) {
        if (row.failed) {
            ++agg.failures;
            continue;
        }
        const auto& oc = row.outcome;
        if (oc.winner == 1) ++wins1;
        if (oc.proxy_mismatch) ++mismatches;
        agg.n_loss_samples.push_back(oc.n_loss);
        n_loss_values.push_back(static_cast<double>(oc.n_loss));
        agg.n_loss_pmf[oc.n_loss] += 1.0;
        if (oc.n_loss_star != na_count) {
            star_sum += static_cast<double>(oc.n_loss_star);
            ++star_count;
        } else {
            ++agg.n_loss_star_na;
        }
        unreached_sum += static_cast<double>(oc.unreached);
        for (std::size_t i = 0; i < spec.eps.size(); ++i) {
            if (i < oc.disjoint_at.size() && oc.disjoint_at[i] != 2) {
                if (oc.disjoint_at[i] == 1) ++disjoint_yes[i];
            } else {
                ++agg.disjoint_na[i];
            }
            if (i < row.d2.size() && row.d2[i]) {
                agg.d2_mean[i] += *row.d2[i];
                ++d2_count[i];
            } else {
                ++agg.d2_na[i];
            }
        }
    }
    const std::uint64_t ok = rows.size() - agg.failures;
    if (ok > 0) {
        agg.winner1 = wilson_interval(wins1, ok);
        std::sort(n_loss_values.begin(), n_loss_values.end());
        double sum = 0.0;
        for (double v : n_loss_values) sum += v;
        agg.n_loss_mean = sum / static_cast<double>(ok);
        agg.n_loss_median = median_sorted(n_loss_values);
        agg.n_loss_q95 = quantile_sorted(n_loss_values, 0.95);
        for (auto& [k, v] : agg.n_loss_pmf) v /= static_cast<double>(ok);
        agg.n_loss_star_mean = star_count ? star_sum / static_cast<double>(star_count) : 0.0;
        agg.proxy_mismatch_freq = static_cast<double>(mismatches) / static_cast<double>(ok);
        agg.unreached_mean = unreached_sum / static_cast<double>(ok);
        for (std::size_t i = 0; i < spec.eps.size(); ++i) {
            const std::uint64_t applicable = ok - agg.disjoint_na[i];
            agg.disjoint_freq[i] = applicable
                                       ? static_cast<double>(disjoint_yes[i]) /
                                             static_cast<double>(applicable)
                                       : 0.0;
            agg.d2_mean[i] = d2_count[i] ? agg.d2_mean[i] / static_cast<double>(d2_count[i]) : 0.0;
        }
    }
    return agg;
}

void write_outcomes_csv(const std::string& path, const experiment_spec& spec,
                        const experiment_cell& cell, const std::vector<replica_row>& rows) {
    std::ofstream os(path);
    if (!os) throw config_error("cannot write " + path);
    char hash_hex[32];
    std::snprintf(hash_hex, sizeof hash_hex, "%016" PRIx64, spec.hash());
    os << "# fpprace-outcomes v1 spec=" << hash_hex << " n=" << cell.n
       << " base_seed=" << spec.base_seed << "\n";
    os << "replica,winner,occ1,occ2,n_loss,n_loss_star,t1_half,t2_half";
    for (double e : spec.eps) os << ",disjoint_eps_" << format_double(e);
    os << ",unreached";
    for (double e : spec.eps) os << ",d2_eps_" << format_double(e);
    os << ",error\n";
    for (const auto& row : rows) {
        os << row.replica;
        if (row.failed) {
            os << ",,,,,,,,";
            for (std::size_t i = 0; i < 2 * spec.eps.size(); ++i) os << ",";
            os << row.error << "\n";
            continue;
        }
        const auto& oc = row.outcome;
        os << "," << oc.winner << "," << oc.occupied1 << "," << oc.occupied2 << ","
           << oc.n_loss << ",";
        if (oc.n_loss_star == na_count) os << "na";
        else os << oc.n_loss_star;
        os << "," << format_double(oc.t1_half) << "," << format_double(oc.t2_half);
        for (std::size_t i = 0; i < spec.eps.size(); ++i) {
            os << ",";
            if (i < oc.disjoint_at.size() && oc.disjoint_at[i] != 2)
                os << int(oc.disjoint_at[i]);
            else os << "na";
        }
        os << "," << oc.unreached;
        for (std::size_t i = 0; i < spec.eps.size(); ++i) {
            os << ",";
            if (i < row.d2.size() && row.d2[i]) os << format_double(*row.d2[i]);
            else os << "na";
        }
        os << ",\n";
    }
}

json aggregate_to_json(const experiment_spec& spec, const cell_aggregate& agg) {
    json j;
    j["n"] = agg.n;
    j["replicas"] = agg.replicas;
    j["failures"] = agg.failures;
    j["winner1_freq"] = agg.winner1.freq;
    j["winner1_ci95"] = {agg.winner1.lo, agg.winner1.hi};
    j["n_loss"] = {{"mean", agg.n_loss_mean},
                   {"median", agg.n_loss_median},
                   {"q95", agg.n_loss_q95}};
    json pmf = json::object();
    for (const auto& [k, v] : agg.n_loss_pmf) pmf[std::to_string(k)] = v;
    j["n_loss_pmf"] = pmf;
    j["n_loss_star_mean"] = agg.n_loss_star_mean;
    j["n_loss_star_na"] = agg.n_loss_star_na;
    j["proxy_mismatch_freq"] = agg.proxy_mismatch_freq;
    j["unreached_mean"] = agg.unreached_mean;
    json probes = json::array();
    for (std::size_t i = 0; i < spec.eps.size(); ++i) {
        probes.push_back({{"eps", spec.eps[i]},
                          {"disjoint_freq", agg.disjoint_freq[i]},
                          {"disjoint_na", agg.disjoint_na[i]},
                          {"d2_mean", agg.d2_mean[i]},
                          {"d2_na", agg.d2_na[i]}});
    }
    j["probes"] = probes;
    return j;
}

} // namespace

curve_overlay make_overlay(const std::vector<double>& tgrid,
                           const std::vector<std::uint64_t>& ks,
                           const std::vector<std::vector<double>>& solo_ratio_mean,
                           const std::vector<std::vector<double>>& winner_ratio_mean,
                           const std::vector<double>& solo_edge_mean,
                           const std::vector<double>& winner_edge_mean,
                           const survival_grid& grid, std::uint64_t replicas_used) {
    if (tgrid.empty() || tgrid.back() > grid.t_max() + 1e-9)
        throw config_error("overlay: t-grid is not covered by the solver grid");
    for (const auto& row : solo_ratio_mean)
        if (row.size() != tgrid.size())
            throw config_error("overlay: t-grid mismatch between curves and request");
    curve_overlay ov;
    ov.tgrid = tgrid;
    ov.ks = ks;
    ov.solo_ratio = solo_ratio_mean;
    ov.winner_ratio = winner_ratio_mean;
    ov.solo_edge = solo_edge_mean;
    ov.winner_edge = winner_edge_mean;
    ov.replicas_used = replicas_used;
    ov.solver_cdf.assign(ks.size(), std::vector<double>(tgrid.size(), 0.0));
    ov.solver_edge_cdf.assign(tgrid.size(), 0.0);
    for (std::size_t i = 0; i < tgrid.size(); ++i) {
        for (std::size_t kx = 0; kx < ks.size(); ++kx) {
            const double cdf = 1.0 - grid.vk_survival(tgrid[i], ks[kx]);
            ov.solver_cdf[kx][i] = cdf;
            if (!solo_ratio_mean.empty())
                ov.max_gap_solo =
                    std::max(ov.max_gap_solo, std::abs(solo_ratio_mean[kx][i] - cdf));
            if (!winner_ratio_mean.empty())
                ov.max_gap_winner =
                    std::max(ov.max_gap_winner, std::abs(winner_ratio_mean[kx][i] - cdf));
        }
        ov.solver_edge_cdf[i] = 1.0 - grid.e_at(tgrid[i]);
        if (!solo_edge_mean.empty())
            ov.max_gap_edge =
                std::max(ov.max_gap_edge, std::abs(solo_edge_mean[i] - ov.solver_edge_cdf[i]));
    }
    return ov;
}

namespace {

void write_overlay_csv(const std::string& path, const experiment_spec& spec,
                       const curve_overlay& ov) {
    std::ofstream os(path);
    if (!os) throw config_error("cannot write " + path);
    char hash_hex[32];
    std::snprintf(hash_hex, sizeof hash_hex, "%016" PRIx64, spec.hash());
    os << "# fpprace-overlay v1 spec=" << hash_hex
       << " replicas=" << ov.replicas_used << "\n";
    os << "t,k,solo_ratio,winner_ratio,solver_cdf,solo_gap,winner_gap\n";
    for (std::size_t i = 0; i < ov.tgrid.size(); ++i) {
        for (std::size_t kx = 0; kx < ov.ks.size(); ++kx) {
            const double cdf = ov.solver_cdf[kx][i];
            os << format_double(ov.tgrid[i]) << "," << ov.ks[kx] << ","
               << format_double(ov.solo_ratio[kx][i]) << ","
               << format_double(ov.winner_ratio[kx][i]) << "," << format_double(cdf) << ","
               << format_double(std::abs(ov.solo_ratio[kx][i] - cdf)) << ","
               << format_double(std::abs(ov.winner_ratio[kx][i] - cdf)) << "\n";
        }
        // k = -1 row: edge overlay (L-bar against 1 - E)
        const double ecdf = ov.solver_edge_cdf[i];
        os << format_double(ov.tgrid[i]) << ",-1," << format_double(ov.solo_edge[i]) << ","
           << format_double(ov.winner_edge[i]) << "," << format_double(ecdf) << ","
           << format_double(std::abs(ov.solo_edge[i] - ecdf)) << ","
           << format_double(std::abs(ov.winner_edge[i] - ecdf)) << "\n";
    }
}

} // namespace

aggregate_report run_experiment(const experiment_spec& spec) {
    spec.validate();
    namespace fs = std::filesystem;
    fs::create_directories(spec.outdir);

    // collision check over every derived replica seed
    std::unordered_set<std::uint64_t> seen;
    for (const auto& cell : spec.cells)
        for (std::uint64_t rep = 0; rep < cell.replicas; ++rep)
            if (!seen.insert(derive_seed(spec.base_seed, cell.n, rep)).second)
                throw config_error("experiment: derived seed collision; change base_seed");

    const power_law_degree_law degree_law(spec.tau);
    aggregate_report report;

    std::optional<survival_grid> solver;
    if (spec.curves) {
        const auto sb = size_biased_law::from_power_law(spec.tau);
        solver.emplace(solve_g(spec.law1, sb, spec.solver_h, spec.tgrid.back() + spec.solver_h));
    }

    for (const auto& cell : spec.cells) {
        std::vector<replica_row> rows(cell.replicas);
        const std::uint64_t curve_reps = spec.curves ? std::min<std::uint64_t>(
                                                           spec.curve_replicas, cell.replicas)
                                                     : 0;
        const std::uint32_t rows_cap = 64;
        std::vector<std::vector<std::vector<double>>> solo_ratios(curve_reps),
            winner_ratios(curve_reps);
        std::vector<std::vector<double>> solo_edges(curve_reps), winner_edges(curve_reps);

        parallel_replicas(cell.replicas, [&](std::uint64_t rep) {
            replica_row& row = rows[rep];
            row.replica = rep;
            const std::uint64_t seed = derive_seed(spec.base_seed, cell.n, rep);
            try {
                const auto degrees = sample_degrees(degree_law, cell.n, seed);
                const auto g = pair_uniform(degrees, seed);
                competition_config cfg;
                cfg.law1 = spec.law1;
                cfg.law2 = spec.law2;
                cfg.rho = spec.rho;
                cfg.eps_probes = spec.eps;
                const auto rr = race(g, cfg, seed);
                row.outcome = rr.outcome;
                row.d2.reserve(spec.eps.size());
                for (double e : spec.eps) row.d2.push_back(unexplored_second_moment(g, rr, e));
                if (rep < curve_reps) {
                    const auto wc = winning_curve(g, rr, spec.tgrid);
                    const auto sc = epidemic_curve(g, rr.outcome.source1, spec.law1,
                                                   rr.outcome.half_index, spec.tgrid, seed);
                    auto ratios = [&](const epidemic_curve_empirical& c) {
                        std::vector<std::vector<double>> out;
                        for (auto k : spec.curve_ks) {
                            std::vector<double> row_k(c.tgrid.size(), 0.0);
                            if (k <= rows_cap && c.degree_pmf_hat[k] > 0.0) {
                                for (std::size_t i = 0; i < c.tgrid.size(); ++i)
                                    row_k[i] = c.occupied[k][i] / c.degree_pmf_hat[k];
                            }
                            out.push_back(std::move(row_k));
                        }
                        return out;
                    };
                    winner_ratios[rep] = ratios(wc);
                    winner_edges[rep] = wc.edge_fraction;
                    solo_ratios[rep] = ratios(sc);
                    solo_edges[rep] = sc.edge_fraction;
                }
            } catch (const std::exception& e) {
                row.failed = true;
                row.error = e.what();
            }
        });

        report.cells.push_back(aggregate_cell(spec, cell, rows));
        write_outcomes_csv(spec.outdir + "/outcomes_n" + std::to_string(cell.n) + ".csv",
                           spec, cell, rows);

        if (curve_reps > 0) {
            auto mean_rows = [&](const std::vector<std::vector<std::vector<double>>>& per_rep) {
                std::vector<std::vector<double>> mean(
                    spec.curve_ks.size(), std::vector<double>(spec.tgrid.size(), 0.0));
                std::uint64_t used = 0;
                for (const auto& rep_rows : per_rep) {
                    if (rep_rows.empty()) continue;
                    ++used;
                    for (std::size_t kx = 0; kx < mean.size(); ++kx)
                        for (std::size_t i = 0; i < spec.tgrid.size(); ++i)
                            mean[kx][i] += rep_rows[kx][i];
                }
                if (used)
                    for (auto& r : mean)
                        for (auto& v : r) v /= static_cast<double>(used);
                return std::make_pair(mean, used);
            };
            auto mean_vec = [&](const std::vector<std::vector<double>>& per_rep) {
                std::vector<double> mean(spec.tgrid.size(), 0.0);
                std::uint64_t used = 0;
                for (const auto& rep_v : per_rep) {
                    if (rep_v.empty()) continue;
                    ++used;
                    for (std::size_t i = 0; i < spec.tgrid.size(); ++i) mean[i] += rep_v[i];
                }
                if (used)
                    for (auto& v : mean) v /= static_cast<double>(used);
                return mean;
            };
            const auto [solo_mean, used] = mean_rows(solo_ratios);
            const auto [winner_mean, used2] = mean_rows(winner_ratios);
            auto ov = make_overlay(spec.tgrid, spec.curve_ks, solo_mean, winner_mean,
                                   mean_vec(solo_edges), mean_vec(winner_edges), *solver,
                                   std::min(used, used2));
            write_overlay_csv(spec.outdir + "/overlays_n" + std::to_string(cell.n) + ".csv",
                              spec, ov);
            report.overlays.push_back(std::move(ov));
        }
    }

    for (std::size_t i = 0; i + 1 < report.cells.size(); ++i)
        report.ks_consecutive.push_back(kolmogorov_distance(
            report.cells[i].n_loss_samples, report.cells[i + 1].n_loss_samples));

    // metadata + aggregate files
    char hash_hex[32];
    std::snprintf(hash_hex, sizeof hash_hex, "%016" PRIx64, spec.hash());
    {
        json meta;
        meta["name"] = spec.name;
        meta["spec_hash"] = hash_hex;
        meta["spec_text"] = spec.raw_text;
        meta["base_seed"] = spec.base_seed;
        meta["version"] = fpprace_version;
        meta["workers"] = resolve_worker_count();
        std::ofstream os(spec.outdir + "/metadata.json");
        os << meta.dump(2) << "\n";
    }
    {
        json agg;
        agg["spec_hash"] = hash_hex;
        agg["name"] = spec.name;
        json cells = json::array();
        for (const auto& c : report.cells) cells.push_back(aggregate_to_json(spec, c));
        agg["cells"] = cells;
        agg["n_loss_ks_consecutive"] = report.ks_consecutive;
        if (!report.overlays.empty()) {
            json gaps = json::array();
            for (const auto& ov : report.overlays)
                gaps.push_back({{"max_gap_solo", ov.max_gap_solo},
                                {"max_gap_winner", ov.max_gap_winner},
                                {"max_gap_edge", ov.max_gap_edge}});
            agg["overlay_gaps"] = gaps;
        }
        std::ofstream os(spec.outdir + "/aggregate.json");
        os << agg.dump(2) << "\n";
    }
    return report;
}

} // namespace fpprace
