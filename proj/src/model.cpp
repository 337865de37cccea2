#include "blockwave/model.hpp"

#include <algorithm>
#include <bit>
#include <sstream>

#include "blockwave/errors.hpp"

namespace blockwave {

std::string model_kind_name(ModelKind k) {
    switch (k) {
    case ModelKind::heisenberg: return "heisenberg";
    case ModelKind::hubbard: return "hubbard";
    case ModelKind::attractive_hubbard: return "attractive_hubbard";
    case ModelKind::quantum_impurity: return "impurity";
    }
    return "?";
}

std::optional<ModelKind> parse_model_kind(const std::string& s) {
    if (s == "heisenberg") return ModelKind::heisenberg;
    if (s == "hubbard") return ModelKind::hubbard;
    if (s == "attractive_hubbard") return ModelKind::attractive_hubbard;
    if (s == "impurity" || s == "quantum_impurity") return ModelKind::quantum_impurity;
    return std::nullopt;
}

void ModelSpec::validate() const {
    if (sites < 2) throw ConfigError("model.sites: need at least 2 sites, got " + std::to_string(sites));
    if (kind == ModelKind::quantum_impurity) {
        if (!bath_eps.empty() && int(bath_eps.size()) != sites - 1)
            throw ConfigError("model.bath_eps: expected " + std::to_string(sites - 1) + " entries");
        if (!bath_v.empty() && int(bath_v.size()) != sites - 1)
            throw ConfigError("model.bath_v: expected " + std::to_string(sites - 1) + " entries");
    }
}

std::string ModelSpec::describe() const {
    std::ostringstream os;
    os << model_kind_name(kind) << " S=" << sites;
    os.precision(17);
    if (kind == ModelKind::heisenberg) {
        os << " J=" << J;
    } else if (kind == ModelKind::quantum_impurity) {
        os << " U=" << U << " eps=[";
        for (std::size_t i = 0; i < bath_eps.size(); ++i) os << (i ? "," : "") << bath_eps[i];
        os << "] V=[";
        for (std::size_t i = 0; i < bath_v.size(); ++i) os << (i ? "," : "") << bath_v[i];
        os << "]";
    } else {
        os << " t=" << t << " U=" << U << " V=" << V;
    }
    return os.str();
}

const char* op_tag_name(OpTag t) {
    switch (t) {
    case OpTag::sp: return "S+";
    case OpTag::sm: return "S-";
    case OpTag::sz: return "Sz";
    case OpTag::n: return "n";
    case OpTag::cdag: return "cdag";
    case OpTag::c: return "c";
    case OpTag::z: return "Z";
    }
    return "?";
}

bool is_fermionic(OpTag t) { return t == OpTag::cdag || t == OpTag::c; }

QuantumNumber op_delta_q(OpTag t, int spin, const ModelSpec& model) {
    QuantumNumber dq = QuantumNumber::zero(std::size_t(model.qn_components()));
    if (!model.fermionic()) {
        if (t == OpTag::sp) dq.comps[0] = 2;
        if (t == OpTag::sm) dq.comps[0] = -2;
        return dq;
    }
    int comp = (spin == 0) ? 0 : 1;
    if (t == OpTag::cdag) dq.comps[std::size_t(comp)] = 1;
    if (t == OpTag::c) dq.comps[std::size_t(comp)] = -1;
    return dq;
}

std::string ModeId::str() const {
    if (spin < 0) return std::to_string(site);
    return std::to_string(site) + (spin == 0 ? "u" : "d");
}

QuantumNumber HamiltonianTerm::delta_q(const ModelSpec& model) const {
    QuantumNumber dq = QuantumNumber::zero(std::size_t(model.qn_components()));
    for (const auto& f : factors) dq = compose(dq, op_delta_q(f.op, f.mode.spin, model));
    return dq;
}

std::string HamiltonianTerm::str() const {
    std::ostringstream os;
    os.precision(17);
    os << coeff;
    for (const auto& f : factors) os << " " << op_tag_name(f.op) << "(" << f.mode.str() << ")";
    return os.str();
}

// ---------------------------------------------------------------------------

std::vector<HamiltonianTerm> build_terms(const ModelSpec& spec) {
    spec.validate();
    std::vector<HamiltonianTerm> terms;
    const int S = spec.sites;
    auto mode = [](int site, int spin) { return ModeId{site, spin}; };

    switch (spec.kind) {
    case ModelKind::heisenberg: {
        for (int i = 0; i + 1 < S; ++i) {
            terms.push_back({0.5 * spec.J, {{mode(i, -1), OpTag::sp}, {mode(i + 1, -1), OpTag::sm}}});
            terms.push_back({0.5 * spec.J, {{mode(i, -1), OpTag::sm}, {mode(i + 1, -1), OpTag::sp}}});
            terms.push_back({spec.J, {{mode(i, -1), OpTag::sz}, {mode(i + 1, -1), OpTag::sz}}});
        }
        break;
    }
    case ModelKind::hubbard:
    case ModelKind::attractive_hubbard: {
        for (int i = 0; i + 1 < S; ++i)
            for (int s = 0; s < 2; ++s) {
                terms.push_back({-spec.t, {{mode(i, s), OpTag::cdag}, {mode(i + 1, s), OpTag::c}}});
                terms.push_back({-spec.t, {{mode(i + 1, s), OpTag::cdag}, {mode(i, s), OpTag::c}}});
            }
        if (spec.U != 0.0)
            for (int i = 0; i < S; ++i)
                terms.push_back({spec.U, {{mode(i, 0), OpTag::n}, {mode(i, 1), OpTag::n}}});
        if (spec.V != 0.0)
            for (int i = 0; i + 1 < S; ++i)
                for (int s = 0; s < 2; ++s)
                    for (int sp = 0; sp < 2; ++sp)
                        terms.push_back({spec.V, {{mode(i, s), OpTag::n}, {mode(i + 1, sp), OpTag::n}}});
        break;
    }
    case ModelKind::quantum_impurity: {
        // Site 0 carries the interaction; sites 1..S-1 are bath levels
        // hybridized with the impurity (star geometry), one chain per spin.
        std::vector<double> eps = spec.bath_eps, v = spec.bath_v;
        if (eps.empty()) {
            eps.resize(std::size_t(S - 1));
            for (int b = 0; b < S - 1; ++b)
                eps[std::size_t(b)] = (S == 2) ? 0.0 : -1.0 + 2.0 * b / double(S - 2);
        }
        if (v.empty()) v.assign(std::size_t(S - 1), 0.5);
        if (spec.U != 0.0)
            terms.push_back({spec.U, {{mode(0, 0), OpTag::n}, {mode(0, 1), OpTag::n}}});
        for (int b = 1; b < S; ++b) {
            for (int s = 0; s < 2; ++s) {
                if (eps[std::size_t(b - 1)] != 0.0)
                    terms.push_back({eps[std::size_t(b - 1)], {{mode(b, s), OpTag::n}}});
                terms.push_back({v[std::size_t(b - 1)], {{mode(0, s), OpTag::cdag}, {mode(b, s), OpTag::c}}});
                terms.push_back({v[std::size_t(b - 1)], {{mode(b, s), OpTag::cdag}, {mode(0, s), OpTag::c}}});
            }
        }
        break;
    }
    }
    return terms;
}

// ---------------------------------------------------------------------------

EntanglementCut EntanglementCut::spatial(int sites, int pos) {
    if (pos < 1 || pos >= sites)
        throw ConfigError("cut.position: must lie strictly inside the chain (1.." +
                          std::to_string(sites - 1) + "), got " + std::to_string(pos));
    EntanglementCut c;
    c.kind = CutKind::spatial;
    for (int i = 0; i < pos; ++i) c.left_sites.push_back(i);
    for (int i = pos; i < sites; ++i) c.right_sites.push_back(i);
    return c;
}

EntanglementCut EntanglementCut::spin_space(int sites) {
    EntanglementCut c;
    c.kind = CutKind::spin_space;
    for (int i = 0; i < sites; ++i) {
        c.left_sites.push_back(i);
        c.right_sites.push_back(i);
    }
    return c;
}

std::string EntanglementCut::describe() const {
    if (kind == CutKind::spin_space) return "spin_space";
    return "spatial pos=" + std::to_string(right_sites.empty() ? 0 : right_sites.front());
}

PartitionModes partition_modes(const ModelSpec& model, const EntanglementCut& cut) {
    PartitionModes pm;
    if (cut.kind == CutKind::spin_space) {
        if (!model.fermionic())
            throw ConfigError("cut.kind: spin_space cut requires a fermionic model");
        for (int s : cut.left_sites) pm.left.push_back({s, 0});
        for (int s : cut.right_sites) pm.right.push_back({s, 1});
        return pm;
    }
    if (!model.fermionic()) {
        for (int s : cut.left_sites) pm.left.push_back({s, -1});
        for (int s : cut.right_sites) pm.right.push_back({s, -1});
        return pm;
    }
    // spin-up bits in the low half of each partition
    for (int s : cut.left_sites) pm.left.push_back({s, 0});
    for (int s : cut.left_sites) pm.left.push_back({s, 1});
    for (int s : cut.right_sites) pm.right.push_back({s, 0});
    for (int s : cut.right_sites) pm.right.push_back({s, 1});
    return pm;
}

std::pair<Side, int> PartitionModes::locate(const ModeId& m) const {
    for (std::size_t i = 0; i < left.size(); ++i)
        if (left[i] == m) return {Side::left, int(i)};
    for (std::size_t i = 0; i < right.size(); ++i)
        if (right[i] == m) return {Side::right, int(i)};
    throw StructuralError("mode " + m.str() + " not covered by the cut");
}

QuantumNumber pattern_quantum_number(const ModelSpec& model, std::span<const ModeId> modes,
                                     std::uint64_t bits) {
    QuantumNumber q = QuantumNumber::zero(std::size_t(model.qn_components()));
    for (std::size_t i = 0; i < modes.size(); ++i) {
        int occ = int((bits >> i) & 1u);
        if (!model.fermionic())
            q.comps[0] += occ ? 1 : -1; // 2*Sz
        else
            q.comps[modes[i].spin == 0 ? 0 : 1] += occ;
    }
    return q;
}

// ---------------------------------------------------------------------------

double apply_factor_chain(std::uint64_t& state, std::span<const LocalFactor> chain) {
    double amp = 1.0;
    for (std::size_t i = chain.size(); i-- > 0;) {
        const auto& f = chain[i];
        const std::uint64_t mask = 1ull << f.bit;
        const bool occ = (state & mask) != 0;
        switch (f.op) {
        case OpTag::sz: amp *= occ ? 0.5 : -0.5; break;
        case OpTag::n:
            if (!occ) return 0.0;
            break;
        case OpTag::z:
            if (occ) amp = -amp;
            break;
        case OpTag::sp:
            if (occ) return 0.0;
            state |= mask;
            break;
        case OpTag::sm:
            if (!occ) return 0.0;
            state &= ~mask;
            break;
        case OpTag::cdag: {
            if (occ) return 0.0;
            if (std::popcount(state & (mask - 1)) & 1) amp = -amp;
            state |= mask;
            break;
        }
        case OpTag::c: {
            if (!occ) return 0.0;
            if (std::popcount(state & (mask - 1)) & 1) amp = -amp;
            state &= ~mask;
            break;
        }
        }
    }
    return amp;
}

// ---------------------------------------------------------------------------

namespace {

// Appends the full parity string of the left partition (applied first).
void append_left_parity(std::vector<LocalFactor>& chain, int left_bits) {
    for (int b = 0; b < left_bits; ++b) chain.push_back({b, OpTag::z});
}

} // namespace

SplitTerms split_terms(const std::vector<HamiltonianTerm>& terms, const ModelSpec& model,
                       const PartitionModes& pm) {
    SplitTerms out;
    const int nl = pm.bits(Side::left);
    for (const auto& term : terms) {
        std::vector<std::pair<Side, LocalFactor>> located;
        bool any_left = false, any_right = false;
        for (const auto& f : term.factors) {
            auto [side, bit] = pm.locate(f.mode);
            located.push_back({side, {bit, f.op}});
            (side == Side::left ? any_left : any_right) = true;
        }
        if (!any_right || !any_left) {
            LocalTerm lt;
            lt.coeff = term.coeff;
            lt.label = term.str();
            for (auto& [side, lf] : located) lt.factors.push_back(lf);
            if (term.delta_q(model) != QuantumNumber::zero(std::size_t(model.qn_components())))
                throw StructuralError("partition-local term does not conserve the quantum number: " +
                                      term.str());
            (any_left ? out.left : out.right).push_back(std::move(lt));
            continue;
        }

        // Cut-crossing term.
        BoundaryTermPair bp;
        bp.coeff = term.coeff;
        bp.label = term.str();
        bp.dq_left = QuantumNumber::zero(std::size_t(model.qn_components()));
        bp.dq_right = bp.dq_left;
        int n_fermi = 0;
        for (const auto& f : term.factors) n_fermi += is_fermionic(f.op) ? 1 : 0;

        if (n_fermi == 0) {
            // Densities and spin operators factorize directly.
            for (std::size_t i = 0; i < located.size(); ++i) {
                auto& [side, lf] = located[i];
                (side == Side::left ? bp.left : bp.right).push_back(lf);
                auto dq = op_delta_q(lf.op, term.factors[i].mode.spin, model);
                if (side == Side::left) bp.dq_left = compose(bp.dq_left, dq);
                else bp.dq_right = compose(bp.dq_right, dq);
            }
        } else if (n_fermi == 2 && term.factors.size() == 2 &&
                   term.factors[0].op == OpTag::cdag && term.factors[1].op == OpTag::c &&
                   located[0].first != located[1].first) {
            // Bilinear hopping across the cut; global mode order is all left
            // bits then all right bits, so the reordering sign is fixed by
            // which side carries the creation operator.
            const bool cdag_left = located[0].first == Side::left;
            const LocalFactor f_cdag = located[0].second;
            const LocalFactor f_c = located[1].second;
            if (cdag_left) {
                bp.left.push_back(f_cdag);
                append_left_parity(bp.left, nl);
                bp.right.push_back(f_c);
            } else {
                bp.coeff = -bp.coeff;
                bp.left.push_back(f_c);
                append_left_parity(bp.left, nl);
                bp.right.push_back(f_cdag);
            }
            const auto& m_cdag = term.factors[0].mode;
            const auto& m_c = term.factors[1].mode;
            auto dq_cd = op_delta_q(OpTag::cdag, m_cdag.spin, model);
            auto dq_c = op_delta_q(OpTag::c, m_c.spin, model);
            if (cdag_left) { bp.dq_left = dq_cd; bp.dq_right = dq_c; }
            else { bp.dq_left = dq_c; bp.dq_right = dq_cd; }
        } else {
            throw StructuralError("unsupported cut-crossing fermionic pattern: " + term.str());
        }
        out.boundary.push_back(std::move(bp));
    }
    return out;
}

} // namespace blockwave
