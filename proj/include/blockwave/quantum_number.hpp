#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace blockwave {

// Additive Abelian quantum number: a fixed-length tuple of small integers.
// Spin chains use (2*Sz) to stay in exact integer arithmetic; fermionic
// models use (N_up, N_down).
struct QuantumNumber {
    std::vector<int> comps;

    QuantumNumber() = default;
    explicit QuantumNumber(std::vector<int> c) : comps(std::move(c)) {}
    static QuantumNumber zero(std::size_t n) { return QuantumNumber(std::vector<int>(n, 0)); }

    std::size_t size() const { return comps.size(); }
    int operator[](std::size_t i) const { return comps[i]; }

    bool operator==(const QuantumNumber& o) const { return comps == o.comps; }
    bool operator!=(const QuantumNumber& o) const { return comps != o.comps; }
    // Lexicographic order; used for the canonical sector ordering.
    bool operator<(const QuantumNumber& o) const { return comps < o.comps; }

    std::string str() const;
};

// Component-wise composition q_l (+) q_r.
QuantumNumber compose(const QuantumNumber& a, const QuantumNumber& b);
QuantumNumber subtract(const QuantumNumber& a, const QuantumNumber& b);

struct QuantumNumberHash {
    std::size_t operator()(const QuantumNumber& q) const {
        std::size_t h = 1469598103934665603ull;
        for (int c : q.comps) {
            h ^= static_cast<std::size_t>(static_cast<std::uint32_t>(c));
            h *= 1099511628211ull;
        }
        return h;
    }
};

} // namespace blockwave
