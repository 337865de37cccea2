#include "blockwave/layout.hpp"

#include <algorithm>

#include "blockwave/errors.hpp"

namespace blockwave {

Split Split::balanced(long n, int P) {
    if (P < 1) throw StructuralError("split: rank count must be >= 1");
    Split s;
    s.P = P;
    s.total = n;
    s.width = (n + P - 1) / P;
    s.begin.resize(std::size_t(P));
    s.count.resize(std::size_t(P));
    const long q = n / P, r = n % P;
    long at = 0;
    for (int p = 0; p < P; ++p) {
        long c = q + (p < r ? 1 : 0);
        s.begin[std::size_t(p)] = at;
        s.count[std::size_t(p)] = c;
        at += c;
    }
    return s;
}

Split Split::batches(long n, int P) {
    if (P < 1) throw StructuralError("split: rank count must be >= 1");
    Split s;
    s.P = P;
    s.total = n;
    s.width = (n + P - 1) / P;
    s.begin.resize(std::size_t(P));
    s.count.resize(std::size_t(P));
    for (int p = 0; p < P; ++p) {
        long b = std::min(s.width * p, n);
        s.begin[std::size_t(p)] = b;
        s.count[std::size_t(p)] = std::clamp(n - b, 0l, s.width);
    }
    return s;
}

DistributionLayout make_layout(const SectorPairTable& table, int P) {
    DistributionLayout l;
    l.P = P;
    for (const auto& pr : table.pairs) {
        l.col.push_back(Split::balanced(pr.d_left, P));
        l.row.push_back(Split::batches(pr.d_right, P));
    }
    return l;
}

DenseBlock expand_rows(const DenseBlock& in, const Split& s) {
    if (in.rows != s.total) throw StructuralError("expand_rows: row count mismatch");
    DenseBlock out(s.slots(), in.cols);
    for (long c = 0; c < in.cols; ++c) {
        const double* src = in.col(c);
        double* dst = out.col(c);
        for (int p = 0; p < s.P; ++p)
            for (long i = 0; i < s.count[std::size_t(p)]; ++i)
                dst[s.width * p + i] = src[s.begin[std::size_t(p)] + i];
    }
    return out;
}

DenseBlock compact_rows(const DenseBlock& in, const Split& s) {
    if (in.rows != s.slots()) throw StructuralError("compact_rows: slot count mismatch");
    DenseBlock out(s.total, in.cols);
    for (long c = 0; c < in.cols; ++c) {
        const double* src = in.col(c);
        double* dst = out.col(c);
        for (int p = 0; p < s.P; ++p)
            for (long i = 0; i < s.count[std::size_t(p)]; ++i)
                dst[s.begin[std::size_t(p)] + i] = src[s.width * p + i];
    }
    return out;
}

} // namespace blockwave
