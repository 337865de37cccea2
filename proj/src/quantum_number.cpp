#include "blockwave/quantum_number.hpp"

namespace blockwave {

QuantumNumber compose(const QuantumNumber& a, const QuantumNumber& b) {
    if (a.size() != b.size())
        throw std::invalid_argument("quantum number composition: component count mismatch (" +
                                    std::to_string(a.size()) + " vs " + std::to_string(b.size()) + ")");
    QuantumNumber r = a;
    for (std::size_t i = 0; i < r.comps.size(); ++i) r.comps[i] += b.comps[i];
    return r;
}

QuantumNumber subtract(const QuantumNumber& a, const QuantumNumber& b) {
    if (a.size() != b.size())
        throw std::invalid_argument("quantum number subtraction: component count mismatch");
    QuantumNumber r = a;
    for (std::size_t i = 0; i < r.comps.size(); ++i) r.comps[i] -= b.comps[i];
    return r;
}

std::string QuantumNumber::str() const {
    std::string s = "(";
    for (std::size_t i = 0; i < comps.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(comps[i]);
    }
    s += ")";
    return s;
}

} // namespace blockwave
