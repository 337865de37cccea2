#include "blockwave/report.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "blockwave/errors.hpp"
#include "blockwave/fits.hpp"
#include "json.hpp"

namespace blockwave {

using ordered_json = nlohmann::ordered_json;

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw std::runtime_error("cannot create output directory " + dir + ": " + ec.message());
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + path + " for writing");
    f << content;
}

std::string counters_to_json(const CounterReport& rep, const std::string& config_hash) {
    ordered_json phases = ordered_json::array();
    for (int i = 0; i < kNumPhases; ++i) {
        const auto& p = rep.phases[std::size_t(i)];
        if (p.calls == 0 && p.flops == 0) continue;
        phases.push_back({{"phase", phase_name(Phase(i))},
                          {"calls", p.calls},
                          {"elements_real", p.elements_real},
                          {"elements_padded", p.elements_padded},
                          {"flops", p.flops}});
    }
    const auto t = rep.total();
    ordered_json j{{"config_hash", config_hash},
                   {"phases", phases},
                   {"total",
                    {{"calls", t.calls},
                     {"elements_real", t.elements_real},
                     {"elements_padded", t.elements_padded},
                     {"flops", t.flops}}}};
    return j.dump(2) + "\n";
}

namespace {

std::string fmt_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace

std::string spectrum_csv(const EntanglementReport& rep, const std::string& config_hash) {
    std::string out = "# config_hash=" + config_hash + "\nq_index,q_label,i,xi\n";
    for (const auto& s : rep.sectors) {
        for (std::size_t i = 0; i < s.sigma.size(); ++i) {
            const double lam = s.sigma[i] * s.sigma[i];
            if (lam <= rep.schmidt_cutoff) continue; // xi finite above the cutoff
            out += std::to_string(s.pair) + "," + s.q_left.str() + "," + std::to_string(i) + "," +
                   fmt_double(-std::log(lam)) + "\n";
        }
    }
    return out;
}

std::string weights_csv(const EntanglementReport& rep, const std::string& config_hash) {
    std::string out = "# config_hash=" + config_hash + "\nq_index,q_label,w_q,chi_q\n";
    for (const auto& s : rep.sectors)
        out += std::to_string(s.pair) + "," + s.q_left.str() + "," + fmt_double(s.weight) + "," +
               std::to_string(s.chi) + "\n";
    return out;
}

std::string fragmentation_json(const EntanglementReport& rep, const GatheredState& state,
                               const ExperimentConfig& cfg, int degenerate) {
    // chi_q ranked descending; the sector index of the exponential law is
    // the rank in this order
    std::vector<double> chi = rep.chi_series();
    std::sort(chi.begin(), chi.end(), std::greater<double>());
    std::vector<double> chi_pos;
    for (double v : chi)
        if (v > 0.0) chi_pos.push_back(v);
    double chi_total = 0.0;
    for (double v : chi) chi_total += v;

    ordered_json j;
    j["config_hash"] = hash_hex(cfg.hash());
    j["schmidt_cutoff"] = cfg.schmidt_cutoff;
    j["entropy"] = rep.entropy;
    j["n_sectors"] = rep.sectors.size();
    j["chi_total"] = chi_total;
    if (degenerate >= 0) j["degenerate"] = bool(degenerate);
    else j["degenerate"] = nullptr;

    if (chi_pos.size() >= 3) {
        try {
            auto f = fit_exponential(chi_pos);
            j["exponential"] = {{"C", f.C}, {"alpha", f.alpha}, {"residual", f.residual},
                                {"points", f.points}};
        } catch (const std::exception& e) {
            j["exponential"] = {{"error", e.what()}};
        }
        try {
            auto f = fit_ccdf_power_law(chi_pos, cfg.ccdf_window);
            j["ccdf"] = {{"A", f.A},
                         {"gamma", f.gamma},
                         {"window", {f.window_lo, f.window_hi}},
                         {"points", f.points},
                         {"residual", f.residual}};
        } catch (const std::exception& e) {
            j["ccdf"] = {{"error", e.what()}};
        }
        j["n_eff"] = n_eff(chi_pos);
    } else {
        j["exponential"] = {{"error", "fewer than 3 nonzero sectors"}};
        j["ccdf"] = {{"error", "fewer than 3 nonzero sectors"}};
        j["n_eff"] = chi_pos.empty() ? 0.0 : n_eff(chi_pos);
    }
    if (cfg.pi_parameter && j.contains("exponential") && j["exponential"].contains("alpha")) {
        const double alpha = j["exponential"]["alpha"].get<double>();
        if (alpha != 0.0 && chi_total > 0.0)
            j["q_star"] = q_star(chi_total, alpha, *cfg.pi_parameter, cfg.m_parameter);
    }
    j["m"] = cfg.m_parameter;

    ordered_json ipr = ordered_json::object();
    for (auto mode : {IprAssignment::sector, IprAssignment::column}) {
        ordered_json arr = ordered_json::array();
        for (int p : cfg.ipr_ranks) {
            auto w = process_ipr(rep, state, p, mode);
            arr.push_back({{"ranks", p}, {"w_p", w.w_p}, {"sum", w.sum()}, {"max", w.max()}});
        }
        ipr[ipr_assignment_name(mode)] = arr;
    }
    j["ipr"] = ipr;
    return j.dump(2) + "\n";
}

} // namespace blockwave
