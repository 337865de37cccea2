#include "blockwave/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "blockwave/errors.hpp"

namespace blockwave {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

struct KeyValue {
    std::string section, key, value;
};

std::vector<KeyValue> parse_ini(const std::string& text, const std::string& origin) {
    std::vector<KeyValue> out;
    std::istringstream is(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError(origin + ":" + std::to_string(lineno) + ": malformed section header");
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected key = value");
        out.push_back({section, trim(line.substr(0, eq)), trim(line.substr(eq + 1))});
    }
    return out;
}

long to_long(const KeyValue& kv) {
    try {
        std::size_t pos = 0;
        long v = std::stol(kv.value, &pos);
        if (pos != kv.value.size()) throw std::invalid_argument("");
        return v;
    } catch (...) {
        throw ConfigError(kv.section + "." + kv.key + ": expected an integer, got '" + kv.value + "'");
    }
}

double to_double(const KeyValue& kv, const std::string& v) {
    try {
        std::size_t pos = 0;
        double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("");
        return d;
    } catch (...) {
        throw ConfigError(kv.section + "." + kv.key + ": expected a number, got '" + v + "'");
    }
}

bool to_bool(const KeyValue& kv) {
    if (kv.value == "true" || kv.value == "1" || kv.value == "yes") return true;
    if (kv.value == "false" || kv.value == "0" || kv.value == "no") return false;
    throw ConfigError(kv.section + "." + kv.key + ": expected true/false, got '" + kv.value + "'");
}

} // namespace

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string hash_hex(std::uint64_t h) {
    static const char* digits = "0123456789abcdef";
    std::string s(16, '0');
    for (int i = 15; i >= 0; --i) {
        s[std::size_t(i)] = digits[h & 0xf];
        h >>= 4;
    }
    return s;
}

ExperimentConfig parse_config_text(const std::string& text, const std::string& origin) {
    ExperimentConfig cfg;
    bool model_kind_seen = false;
    for (const auto& kv : parse_ini(text, origin)) {
        const std::string where = kv.section + "." + kv.key;
        if (kv.section == "model") {
            if (kv.key == "kind") {
                auto k = parse_model_kind(kv.value);
                if (!k) throw ConfigError("model.kind: unknown model '" + kv.value + "'");
                cfg.model.kind = *k;
                model_kind_seen = true;
            } else if (kv.key == "sites") cfg.model.sites = int(to_long(kv));
            else if (kv.key == "J") cfg.model.J = to_double(kv, kv.value);
            else if (kv.key == "t") cfg.model.t = to_double(kv, kv.value);
            else if (kv.key == "U") cfg.model.U = to_double(kv, kv.value);
            else if (kv.key == "V") cfg.model.V = to_double(kv, kv.value);
            else if (kv.key == "bath_eps") {
                cfg.model.bath_eps.clear();
                for (const auto& v : split_list(kv.value)) cfg.model.bath_eps.push_back(to_double(kv, v));
            } else if (kv.key == "bath_v") {
                cfg.model.bath_v.clear();
                for (const auto& v : split_list(kv.value)) cfg.model.bath_v.push_back(to_double(kv, v));
            } else throw ConfigError("unknown key " + where);
        } else if (kv.section == "cut") {
            if (kv.key == "kind") {
                if (kv.value == "spatial") cfg.cut_kind = CutKind::spatial;
                else if (kv.value == "spin_space") cfg.cut_kind = CutKind::spin_space;
                else throw ConfigError("cut.kind: expected spatial or spin_space, got '" + kv.value + "'");
            } else if (kv.key == "position") cfg.cut_position = int(to_long(kv));
            else throw ConfigError("unknown key " + where);
        } else if (kv.section == "target") {
            if (kv.key == "two_sz") cfg.two_sz = int(to_long(kv));
            else if (kv.key == "n_up") cfg.n_up = int(to_long(kv));
            else if (kv.key == "n_dn") cfg.n_dn = int(to_long(kv));
            else throw ConfigError("unknown key " + where);
        } else if (kv.section == "run") {
            if (kv.key == "ranks") {
                cfg.ranks.clear();
                for (const auto& v : split_list(kv.value)) cfg.ranks.push_back(int(to_long({kv.section, kv.key, v})));
                if (cfg.ranks.empty()) throw ConfigError("run.ranks: empty list");
            } else if (kv.key == "seed") cfg.seed = std::uint64_t(to_long(kv));
            else if (kv.key == "output_dir") cfg.output_dir = kv.value;
            else if (kv.key == "oracle_cap") cfg.oracle_cap = to_long(kv);
            else throw ConfigError("unknown key " + where);
        } else if (kv.section == "solver") {
            if (kv.key == "max_iterations") cfg.max_iterations = int(to_long(kv));
            else if (kv.key == "tolerance") cfg.tolerance = to_double(kv, kv.value);
            else throw ConfigError("unknown key " + where);
        } else if (kv.section == "analysis") {
            if (kv.key == "enabled") cfg.analysis = to_bool(kv);
            else if (kv.key == "schmidt_cutoff") cfg.schmidt_cutoff = to_double(kv, kv.value);
            else if (kv.key == "ipr_ranks") {
                cfg.ipr_ranks.clear();
                for (const auto& v : split_list(kv.value)) cfg.ipr_ranks.push_back(int(to_long({kv.section, kv.key, v})));
            } else if (kv.key == "ccdf_window") {
                if (kv.value == "auto") cfg.ccdf_window.reset();
                else {
                    auto colon = kv.value.find(':');
                    if (colon == std::string::npos)
                        throw ConfigError("analysis.ccdf_window: expected auto or lo:hi");
                    cfg.ccdf_window = {to_double(kv, trim(kv.value.substr(0, colon))),
                                       to_double(kv, trim(kv.value.substr(colon + 1)))};
                }
            } else if (kv.key == "m") cfg.m_parameter = to_double(kv, kv.value);
            else if (kv.key == "pi") {
                if (kv.value.empty()) cfg.pi_parameter.reset();
                else cfg.pi_parameter = to_double(kv, kv.value);
            } else throw ConfigError("unknown key " + where);
        } else if (kv.section == "cost") {
            if (kv.key == "tau") cfg.tau = to_double(kv, kv.value);
            else if (kv.key == "phi") cfg.phi = to_double(kv, kv.value);
            else throw ConfigError("unknown key " + where);
        } else if (kv.section == "sweep") {
            if (kv.key == "axis") {
                if (kv.value == "ranks") cfg.sweep_axis = SweepAxis::ranks;
                else if (kv.value == "chi") cfg.sweep_axis = SweepAxis::chi;
                else if (kv.value == "U") cfg.sweep_axis = SweepAxis::U;
                else throw ConfigError("sweep.axis: expected ranks, chi or U, got '" + kv.value + "'");
            } else if (kv.key == "values") {
                cfg.sweep_values.clear();
                for (const auto& v : split_list(kv.value)) cfg.sweep_values.push_back(to_double(kv, v));
            } else throw ConfigError("unknown key " + where);
        } else if (kv.section == "debug") {
            if (kv.key == "corrupt_boundary") cfg.corrupt_boundary = to_bool(kv);
            else throw ConfigError("unknown key " + where);
        } else {
            throw ConfigError("unknown section [" + kv.section + "]");
        }
    }
    if (!model_kind_seen) throw ConfigError("model.kind: missing (required)");

    // validation
    cfg.model.validate();
    if (cfg.cut_position < 0) cfg.cut_position = cfg.model.sites / 2;
    if (cfg.cut_kind == CutKind::spin_space && !cfg.model.fermionic())
        throw ConfigError("cut.kind: spin_space requires a fermionic model");
    for (int p : cfg.ranks)
        if (p < 1) throw ConfigError("run.ranks: rank counts must be >= 1");
    for (int p : cfg.ipr_ranks)
        if (p < 1) throw ConfigError("analysis.ipr_ranks: rank counts must be >= 1");
    if (cfg.max_iterations < 2) throw ConfigError("solver.max_iterations: must be >= 2");
    if (cfg.tolerance <= 0) throw ConfigError("solver.tolerance: must be positive");
    if (cfg.schmidt_cutoff <= 0) throw ConfigError("analysis.schmidt_cutoff: must be positive");
    if (cfg.oracle_cap < 1) throw ConfigError("run.oracle_cap: must be >= 1");
    if (cfg.model.fermionic()) {
        if (cfg.two_sz) throw ConfigError("target.two_sz: not valid for fermionic models (use n_up/n_dn)");
        if (!cfg.n_up || !cfg.n_dn) throw ConfigError("target.n_up / target.n_dn: required for fermionic models");
        if (*cfg.n_up < 0 || *cfg.n_up > cfg.model.sites || *cfg.n_dn < 0 || *cfg.n_dn > cfg.model.sites)
            throw ConfigError("target: particle numbers out of range");
    } else {
        if (cfg.n_up || cfg.n_dn) throw ConfigError("target.n_up/n_dn: not valid for spin models (use two_sz)");
        if (!cfg.two_sz) throw ConfigError("target.two_sz: required for spin models");
        if ((*cfg.two_sz + cfg.model.sites) % 2 != 0)
            throw ConfigError("target.two_sz: parity incompatible with the site count");
    }
    return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open config file: " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_config_text(ss.str(), path);
}

QuantumNumber ExperimentConfig::target() const {
    if (model.fermionic()) return QuantumNumber({*n_up, *n_dn});
    return QuantumNumber({*two_sz});
}

EntanglementCut ExperimentConfig::cut() const {
    if (cut_kind == CutKind::spin_space) return EntanglementCut::spin_space(model.sites);
    return EntanglementCut::spatial(model.sites, cut_position);
}

std::string ExperimentConfig::resolved_text() const {
    std::ostringstream os;
    os.precision(17);
    os << "[model]\n";
    os << "kind = " << model_kind_name(model.kind) << "\n";
    os << "sites = " << model.sites << "\n";
    if (!model.fermionic()) os << "J = " << model.J << "\n";
    else if (model.kind == ModelKind::quantum_impurity) {
        os << "U = " << model.U << "\n";
        os << "bath_eps = ";
        for (std::size_t i = 0; i < model.bath_eps.size(); ++i) os << (i ? "," : "") << model.bath_eps[i];
        os << "\nbath_v = ";
        for (std::size_t i = 0; i < model.bath_v.size(); ++i) os << (i ? "," : "") << model.bath_v[i];
        os << "\n";
    } else {
        os << "t = " << model.t << "\n";
        os << "U = " << model.U << "\n";
        os << "V = " << model.V << "\n";
    }
    os << "\n[cut]\n";
    os << "kind = " << (cut_kind == CutKind::spatial ? "spatial" : "spin_space") << "\n";
    if (cut_kind == CutKind::spatial) os << "position = " << cut_position << "\n";
    os << "\n[target]\n";
    if (model.fermionic()) {
        os << "n_up = " << *n_up << "\n";
        os << "n_dn = " << *n_dn << "\n";
    } else {
        os << "two_sz = " << *two_sz << "\n";
    }
    // output_dir and the scheduling mode are I/O and execution details: they
    // are excluded so that the hash identifies the experiment itself
    os << "\n[run]\n";
    os << "ranks = ";
    for (std::size_t i = 0; i < ranks.size(); ++i) os << (i ? "," : "") << ranks[i];
    os << "\nseed = " << seed << "\n";
    os << "oracle_cap = " << oracle_cap << "\n";
    os << "\n[solver]\n";
    os << "max_iterations = " << max_iterations << "\n";
    os << "tolerance = " << tolerance << "\n";
    os << "\n[analysis]\n";
    os << "enabled = " << (analysis ? "true" : "false") << "\n";
    os << "schmidt_cutoff = " << schmidt_cutoff << "\n";
    os << "ipr_ranks = ";
    for (std::size_t i = 0; i < ipr_ranks.size(); ++i) os << (i ? "," : "") << ipr_ranks[i];
    os << "\nccdf_window = ";
    if (ccdf_window) os << ccdf_window->first << ":" << ccdf_window->second;
    else os << "auto";
    os << "\nm = " << m_parameter << "\n";
    os << "pi = ";
    if (pi_parameter) os << *pi_parameter;
    os << "\n\n[cost]\n";
    os << "tau = " << tau << "\n";
    os << "phi = " << phi << "\n";
    os << "\n[sweep]\n";
    os << "axis = "
       << (sweep_axis == SweepAxis::ranks ? "ranks" : sweep_axis == SweepAxis::chi ? "chi" : "U")
       << "\n";
    os << "values = ";
    for (std::size_t i = 0; i < sweep_values.size(); ++i) os << (i ? "," : "") << sweep_values[i];
    os << "\n";
    if (corrupt_boundary) os << "\n[debug]\ncorrupt_boundary = true\n";
    return os.str();
}

std::uint64_t ExperimentConfig::hash() const { return fnv1a(resolved_text()); }

} // namespace blockwave
