#include "blockwave/driver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <numeric>

#include "blockwave/block_operator.hpp"
#include "blockwave/errors.hpp"
#include "blockwave/fits.hpp"
#include "blockwave/lanczos.hpp"
#include "blockwave/matvec.hpp"
#include "blockwave/oracle.hpp"
#include "blockwave/report.hpp"
#include "json.hpp"

namespace blockwave {

using ordered_json = nlohmann::ordered_json;

namespace {

constexpr long kDenseMatrixCap = 5000; // dim^2 doubles stay desk-sized

struct Problem {
    SectorContext ctx;
    BlockOperator op;
};

Problem make_problem(const ExperimentConfig& cfg) {
    Problem p{make_sector_context(cfg.model, cfg.cut(), cfg.target()), {}};
    p.op = assemble_block_operator(p.ctx);
    if (cfg.corrupt_boundary) {
        // testing hook: flip the sign of the first boundary left block
        for (auto& bb : p.op.boundary)
            if (!bb.left.empty()) {
                auto& blk = bb.left.begin()->second;
                for (auto& v : blk.val) v = -v;
                for (auto& v : blk.dense) v = -v;
                break;
            }
    }
    return p;
}

std::string trace_csv(const std::vector<LanczosTraceRow>& trace, const std::string& hash) {
    std::string out = "# config_hash=" + hash + "\niteration,ritz_value,residual_estimate\n";
    char buf[96];
    for (const auto& r : trace) {
        std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g\n", r.iteration, r.ritz_value,
                      r.residual_estimate);
        out += buf;
    }
    return out;
}

LanczosConfig solver_config(const ExperimentConfig& cfg) {
    LanczosConfig sc;
    sc.max_iterations = cfg.max_iterations;
    sc.tolerance = cfg.tolerance;
    sc.seed = cfg.seed;
    return sc;
}

void write_analysis_outputs(const ExperimentConfig& cfg, const EntanglementReport& rep,
                            const GatheredState& state, int degenerate) {
    const std::string hash = hash_hex(cfg.hash());
    write_text_file(cfg.output_dir + "/entanglement_spectrum.csv", spectrum_csv(rep, hash));
    write_text_file(cfg.output_dir + "/sector_weights.csv", weights_csv(rep, hash));
    write_text_file(cfg.output_dir + "/fits.json", fragmentation_json(rep, state, cfg, degenerate));
}

} // namespace

void apply_env_overrides(ExperimentConfig& cfg) {
    if (const char* dir = std::getenv("BLOCKWAVE_OUTPUT_DIR")) {
        if (*dir) cfg.output_dir = dir;
    }
}

std::uint64_t model_state_hash(const ExperimentConfig& cfg) {
    return fnv1a(cfg.model.describe() + "|" + cfg.cut().describe() + "|" + cfg.target().str());
}

int cmd_solve(const ExperimentConfig& cfg, Schedule schedule) {
    Problem prob = make_problem(cfg);
    if (prob.ctx.table.dim() == 0) {
        std::fprintf(stderr, "solve: target sector is empty\n");
        return 1;
    }
    const int P = cfg.ranks.front();
    auto layout = make_layout(prob.ctx.table, P);
    auto plan = build_apply_plan(prob.op, prob.ctx.table, layout);
    ensure_dir(cfg.output_dir);
    const std::string hash = hash_hex(cfg.hash());

    LanczosResult result;
    GatheredState gathered;
    CounterReport counters = run_ranks(P, schedule, [&](Communicator& comm) {
        auto res = lanczos_ground_state(comm, plan, prob.ctx.table, layout, solver_config(cfg));
        auto g = gather_state(comm, res.ground_state);
        if (comm.rank() == 0) {
            result = std::move(res);
            gathered = std::move(g);
        }
    });

    write_text_file(cfg.output_dir + "/resolved_config.ini",
                    "# config_hash=" + hash + "\n" + cfg.resolved_text());
    write_text_file(cfg.output_dir + "/plan.json", plan.dump_json());
    write_text_file(cfg.output_dir + "/counters.json", counters_to_json(counters, hash));
    write_text_file(cfg.output_dir + "/convergence.csv", trace_csv(result.trace, hash));
    write_state_file(cfg.output_dir + "/state.bwf", model_state_hash(cfg), prob.ctx.table, layout,
                     gathered);

    ordered_json j{{"config_hash", hash},
                   {"model", cfg.model.describe()},
                   {"cut", cfg.cut().describe()},
                   {"target", cfg.target().str()},
                   {"dimension", prob.ctx.table.dim()},
                   {"n_pairs", prob.ctx.table.n_pairs()},
                   {"ranks", P},
                   {"e0", result.energy},
                   {"iterations", result.iterations},
                   {"residual", result.residual},
                   {"ritz_gap", result.ritz_gap},
                   {"degenerate", result.degenerate}};
    write_text_file(cfg.output_dir + "/energy.json", j.dump(2) + "\n");

    if (cfg.analysis) {
        auto rep = schmidt_decompose(gathered, cfg.schmidt_cutoff);
        write_analysis_outputs(cfg, rep, gathered, result.degenerate ? 1 : 0);
    }
    std::printf("solve: E0 = %.12f (%d iterations, residual %.3e) -> %s\n", result.energy,
                result.iterations, result.residual, cfg.output_dir.c_str());
    return 0;
}

int cmd_oracle(const ExperimentConfig& cfg, Schedule schedule) {
    Problem prob = make_problem(cfg);
    const long dim = prob.ctx.table.dim();
    if (dim == 0) {
        std::fprintf(stderr, "oracle: target sector is empty\n");
        return 1;
    }
    if (dim > cfg.oracle_cap) {
        std::fprintf(stderr, "oracle: refusing sector of dimension %ld (oracle_cap %ld)\n", dim,
                     cfg.oracle_cap);
        return 1;
    }
    const DenseOracle oracle(prob.ctx);
    const bool with_energy = dim <= kDenseMatrixCap;
    double e0_dense = 0.0;
    if (with_energy) e0_dense = dense_ground_energy(oracle.matrix(kDenseMatrixCap));

    ensure_dir(cfg.output_dir);
    const std::string hash = hash_hex(cfg.hash());
    const int n_states = 20;
    bool all_pass = true;
    ordered_json results = ordered_json::array();

    for (int P : cfg.ranks) {
        auto layout = make_layout(prob.ctx.table, P);
        auto plan = build_apply_plan(prob.op, prob.ctx.table, layout);
        double max_dev = 0.0;
        int worst_pair = -1;
        double e0 = 0.0, e0_dev = 0.0;
        std::string error;
        try {
        run_ranks(P, schedule, [&](Communicator& comm) {
            for (int t = 0; t < n_states; ++t) {
                auto psi = random_state(prob.ctx.table, layout, comm.rank(),
                                        cfg.seed + std::uint64_t(t));
                auto hpsi = make_zero_state(prob.ctx.table, layout, comm.rank());
                apply_hamiltonian(comm, plan, psi, hpsi);
                auto x = gather_full(comm, psi, cfg.oracle_cap);
                auto y = gather_full(comm, hpsi, cfg.oracle_cap);
                if (comm.rank() == 0) {
                    std::vector<double> want(x.size());
                    oracle.apply(x, want);
                    long off = 0;
                    for (std::size_t pi = 0; pi < prob.ctx.table.pairs.size(); ++pi) {
                        const auto& pr = prob.ctx.table.pairs[pi];
                        const long len = pr.d_left * pr.d_right;
                        for (long i = 0; i < len; ++i) {
                            const double d = std::abs(want[std::size_t(off + i)] -
                                                      y[std::size_t(off + i)]);
                            if (d > max_dev) {
                                max_dev = d;
                                worst_pair = int(pi);
                            }
                        }
                        off += len;
                    }
                }
            }
            if (with_energy) {
                auto res = lanczos_ground_state(comm, plan, prob.ctx.table, layout,
                                                solver_config(cfg));
                if (comm.rank() == 0) e0 = res.energy;
            }
        });
        } catch (const std::exception& e) {
            error = e.what(); // a failed solve is an oracle failure, not a crash
        }
        if (with_energy) e0_dev = std::abs(e0 - e0_dense);
        const bool pass =
            error.empty() && max_dev <= 1e-12 && (!with_energy || e0_dev <= 1e-10);
        all_pass = all_pass && pass;
        ordered_json r{{"ranks", P}, {"max_matvec_dev", max_dev}};
        if (worst_pair >= 0) {
            r["worst_pair"] = worst_pair;
            r["worst_pair_q_left"] = prob.ctx.table.pairs[std::size_t(worst_pair)].q_left.str();
        }
        if (with_energy) {
            r["e0"] = e0;
            r["e0_dev"] = e0_dev;
        }
        if (!error.empty()) r["error"] = error;
        r["pass"] = pass;
        results.push_back(r);
        if (worst_pair >= 0) {
            std::string line = "oracle: P=" + std::to_string(P) + " max matvec dev ";
            char num[40];
            std::snprintf(num, sizeof num, "%.3e", max_dev);
            line += num;
            line += " [pair " + std::to_string(worst_pair) + ", q_l=" +
                    prob.ctx.table.pairs[std::size_t(worst_pair)].q_left.str() + "]";
            if (with_energy) {
                std::snprintf(num, sizeof num, "%.3e", e0_dev);
                line += std::string(", e0 dev ") + num;
            }
            line += pass ? " PASS" : " FAIL";
            std::puts(line.c_str());
        }
    }
    ordered_json j{{"config_hash", hash},
                   {"dimension", dim},
                   {"states", n_states},
                   {"e0_dense", with_energy ? ordered_json(e0_dense) : ordered_json(nullptr)},
                   {"results", results},
                   {"pass", all_pass}};
    write_text_file(cfg.output_dir + "/resolved_config.ini",
                    "# config_hash=" + hash + "\n" + cfg.resolved_text());
    write_text_file(cfg.output_dir + "/oracle.json", j.dump(2) + "\n");
    return all_pass ? 0 : 1;
}

namespace {

int sweep_ranks(const ExperimentConfig& cfg, Schedule schedule, const Problem& prob,
                ordered_json& fits, std::string& csv) {
    csv += "ranks,t_star_calls,elements_real,elements_padded,flops,t_model,speedup,efficiency\n";
    std::vector<double> ps, ts;
    double t_first = 0.0;
    for (double pv : cfg.sweep_values) {
        const int P = int(pv);
        try {
            if (P < 1) throw StructuralError("rank count must be >= 1");
            auto layout = make_layout(prob.ctx.table, P);
            auto plan = build_apply_plan(prob.op, prob.ctx.table, layout);
            CounterReport rep = run_ranks(P, schedule, [&](Communicator& comm) {
                auto psi = random_state(prob.ctx.table, layout, comm.rank(), cfg.seed);
                auto out = make_zero_state(prob.ctx.table, layout, comm.rank());
                apply_hamiltonian(comm, plan, psi, out);
            });
            const auto t = rep.total();
            const double t_model =
                (cfg.phi * double(t.flops) + cfg.tau * double(t.elements_padded)) / double(P);
            if (ps.empty()) t_first = t_model;
            ps.push_back(double(P));
            ts.push_back(t_model);
            char buf[256];
            std::snprintf(buf, sizeof buf, "%d,%llu,%llu,%llu,%llu,%.17g,%.17g,%.17g\n", P,
                          (unsigned long long)plan.t_star_calls_per_matvec(),
                          (unsigned long long)t.elements_real,
                          (unsigned long long)t.elements_padded, (unsigned long long)t.flops,
                          t_model, t_first / t_model, t_first / t_model / double(P) * ps.front());
            csv += buf;
        } catch (const std::exception& e) {
            csv += std::to_string(P) + ",error: " + e.what() + "\n";
        }
    }
    if (ps.size() >= 3) {
        auto af = fit_amdahl(ps, ts);
        auto pf = fit_power_speedup(ps, ts);
        fits["amdahl"] = {{"f", af.f}, {"t1", af.t1}, {"residual", af.residual}};
        fits["power_law"] = {{"k", pf.k}, {"t1", pf.t1}, {"residual", pf.residual}};
    } else {
        fits["notice"] = "fewer than 3 points; speedup fits skipped";
    }
    return 0;
}

int sweep_chi(const ExperimentConfig& cfg, Schedule schedule, const Problem& prob,
              ordered_json& fits, std::string& csv) {
    csv += "chi_cap,chi_eff,elements_padded,flops,t_comm,t_comp,ratio\n";
    const int P_solve = cfg.ranks.front();
    const int P_eval = cfg.ranks.back();
    auto layout = make_layout(prob.ctx.table, P_solve);
    auto plan = build_apply_plan(prob.op, prob.ctx.table, layout);
    GatheredState gathered;
    run_ranks(P_solve, schedule, [&](Communicator& comm) {
        auto res = lanczos_ground_state(comm, plan, prob.ctx.table, layout, solver_config(cfg));
        auto g = gather_state(comm, res.ground_state);
        if (comm.rank() == 0) gathered = std::move(g);
    });
    auto rep = schmidt_decompose(gathered, cfg.schmidt_cutoff);
    // all Schmidt values with their sector, descending: DMRG-style global truncation
    std::vector<std::pair<double, int>> levels;
    for (const auto& s : rep.sectors)
        for (double v : s.sigma)
            if (v * v > cfg.schmidt_cutoff) levels.push_back({v, s.pair});
    std::sort(levels.begin(), levels.end(),
              [](const auto& a, const auto& b) { return a.first > b.first; });

    std::vector<double> chis, ratios;
    for (double cap : cfg.sweep_values) {
        try {
            const long keep = std::min<long>(long(cap), long(levels.size()));
            std::vector<long> r(prob.ctx.table.pairs.size(), 0);
            for (long i = 0; i < keep; ++i) r[std::size_t(levels[std::size_t(i)].second)]++;
            auto cost = estimate_truncated_cost(plan, r, P_eval, cfg.tau, cfg.phi);
            const long chi_eff = std::accumulate(r.begin(), r.end(), 0l);
            char buf[256];
            std::snprintf(buf, sizeof buf, "%ld,%ld,%llu,%llu,%.17g,%.17g,%.17g\n", long(cap),
                          chi_eff, (unsigned long long)cost.elements, (unsigned long long)cost.flops,
                          cost.t_comm, cost.t_comp, cost.ratio);
            csv += buf;
            if (chis.empty() || chi_eff > chis.back()) {
                chis.push_back(double(chi_eff));
                ratios.push_back(cost.ratio);
            }
        } catch (const std::exception& e) {
            csv += std::to_string(long(cap)) + ",error: " + e.what() + "\n";
        }
    }
    fits["eval_ranks"] = P_eval;
    if (chis.size() >= 3) {
        auto rf = fit_ratio_model(chis, ratios);
        fits["ratio_model"] = {{"a", rf.a}, {"b", rf.b}, {"c", rf.c}, {"residual", rf.residual}};
        if (auto d = fractal_exponent_from_c(rf.c, cfg.m_parameter)) fits["D"] = *d;
        else fits["D"] = nullptr; // m = 1: exponent drops out of c = 1 - D + m (D - 3)
    } else {
        fits["notice"] = "fewer than 3 distinct chi points; ratio fit skipped";
    }
    return 0;
}

int sweep_interaction(const ExperimentConfig& cfg, Schedule schedule, ordered_json& fits,
                      std::string& csv) {
    csv += "U,chi_total,n_eff,alpha,gamma,entropy\n";
    ordered_json alphas = ordered_json::array();
    int points = 0;
    for (double U : cfg.sweep_values) {
        try {
            ExperimentConfig point = cfg;
            point.model.U = U;
            Problem prob = make_problem(point);
            const int P = cfg.ranks.front();
            auto layout = make_layout(prob.ctx.table, P);
            auto plan = build_apply_plan(prob.op, prob.ctx.table, layout);
            GatheredState gathered;
            run_ranks(P, schedule, [&](Communicator& comm) {
                auto res =
                    lanczos_ground_state(comm, plan, prob.ctx.table, layout, solver_config(point));
                auto g = gather_state(comm, res.ground_state);
                if (comm.rank() == 0) gathered = std::move(g);
            });
            auto rep = schmidt_decompose(gathered, cfg.schmidt_cutoff);
            std::vector<double> chi = rep.chi_series();
            std::sort(chi.begin(), chi.end(), std::greater<double>());
            std::vector<double> chi_pos;
            for (double v : chi)
                if (v > 0.0) chi_pos.push_back(v);
            double chi_total = std::accumulate(chi_pos.begin(), chi_pos.end(), 0.0);
            double alpha = std::nan(""), gamma = std::nan("");
            if (chi_pos.size() >= 3) alpha = fit_exponential(chi_pos).alpha;
            try {
                if (chi_pos.size() >= 3) gamma = fit_ccdf_power_law(chi_pos, cfg.ccdf_window).gamma;
            } catch (const std::exception&) {
            }
            char buf[256];
            std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", U, chi_total,
                          chi_pos.empty() ? 0.0 : n_eff(chi_pos), alpha, gamma, rep.entropy);
            csv += buf;
            alphas.push_back({{"U", U}, {"alpha", alpha}});
            ++points;
        } catch (const std::exception& e) {
            csv += std::to_string(U) + ",error: " + e.what() + "\n";
        }
    }
    fits["alpha_by_U"] = alphas;
    if (points < 2) fits["notice"] = "single-point sweep; comparative fits skipped";
    return 0;
}

} // namespace

int cmd_sweep(const ExperimentConfig& cfg, Schedule schedule) {
    if (cfg.sweep_values.empty()) {
        std::fprintf(stderr, "sweep: sweep.values is empty\n");
        return 1;
    }
    ensure_dir(cfg.output_dir);
    const std::string hash = hash_hex(cfg.hash());
    std::string csv = "# config_hash=" + hash + "\n";
    ordered_json fits{{"config_hash", hash}};

    int rc = 0;
    if (cfg.sweep_axis == SweepAxis::ranks) {
        Problem prob = make_problem(cfg);
        rc = sweep_ranks(cfg, schedule, prob, fits, csv);
    } else if (cfg.sweep_axis == SweepAxis::chi) {
        Problem prob = make_problem(cfg);
        rc = sweep_chi(cfg, schedule, prob, fits, csv);
    } else {
        rc = sweep_interaction(cfg, schedule, fits, csv);
    }
    write_text_file(cfg.output_dir + "/resolved_config.ini",
                    "# config_hash=" + hash + "\n" + cfg.resolved_text());
    write_text_file(cfg.output_dir + "/sweep.csv", csv);
    write_text_file(cfg.output_dir + "/sweep_fits.json", fits.dump(2) + "\n");
    std::printf("sweep: wrote %s/sweep.csv\n", cfg.output_dir.c_str());
    return rc;
}

int cmd_analyze(const ExperimentConfig& cfg) {
    const std::string path = cfg.output_dir + "/state.bwf";
    StateFile file = read_state_file(path);
    if (file.model_hash != model_state_hash(cfg)) {
        std::fprintf(stderr, "analyze: state file %s was produced by a different model/cut/target\n",
                     path.c_str());
        return 1;
    }
    auto rep = schmidt_decompose(file.state, cfg.schmidt_cutoff);
    write_analysis_outputs(cfg, rep, file.state, -1);
    std::printf("analyze: entropy %.12f over %zu sectors -> %s\n", rep.entropy,
                rep.sectors.size(), cfg.output_dir.c_str());
    return 0;
}

} // namespace blockwave
