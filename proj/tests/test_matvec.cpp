#include "doctest.h"

#include <cmath>

#include "blockwave/lanczos.hpp"
#include "blockwave/matvec.hpp"
#include "blockwave/oracle.hpp"

using namespace blockwave;

namespace {

QuantumNumber qn(std::vector<int> c) { return QuantumNumber(std::move(c)); }

struct Setup {
    SectorContext ctx;
    BlockOperator op;
};

Setup make_setup(ModelKind kind, int sites, const QuantumNumber& target, double U = 0.0,
                 double V = 0.0, CutKind cut_kind = CutKind::spatial) {
    ModelSpec m;
    m.kind = kind;
    m.sites = sites;
    m.U = U;
    m.V = V;
    auto cut = cut_kind == CutKind::spatial ? EntanglementCut::spatial(sites, sites / 2)
                                            : EntanglementCut::spin_space(sites);
    Setup s{make_sector_context(m, cut, target), {}};
    s.op = assemble_block_operator(s.ctx);
    return s;
}

// max |gather(H psi) - H_dense gather(psi)| over `nstates` random states
double oracle_deviation(const Setup& s, int P, int nstates, Schedule sched = Schedule::threads) {
    const DenseOracle oracle(s.ctx);
    auto layout = make_layout(s.ctx.table, P);
    auto plan = build_apply_plan(s.op, s.ctx.table, layout);
    double worst = 0.0;
    run_ranks(P, sched, [&](Communicator& comm) {
        for (int t = 0; t < nstates; ++t) {
            auto psi = random_state(s.ctx.table, layout, comm.rank(), 1000 + std::uint64_t(t));
            auto hpsi = make_zero_state(s.ctx.table, layout, comm.rank());
            apply_hamiltonian(comm, plan, psi, hpsi);
            auto x = gather_full(comm, psi);
            auto y = gather_full(comm, hpsi);
            if (comm.rank() == 0) {
                std::vector<double> want(x.size());
                oracle.apply(x, want);
                for (std::size_t i = 0; i < want.size(); ++i)
                    worst = std::max(worst, std::abs(want[i] - y[i]));
            }
        }
    });
    return worst;
}

} // namespace

TEST_CASE("right diagonal: identity-free blocks leave zero state zero") {
    auto s = make_setup(ModelKind::heisenberg, 6, qn({0}));
    auto layout = make_layout(s.ctx.table, 2);
    auto plan = build_apply_plan(s.op, s.ctx.table, layout);
    run_ranks(2, Schedule::serial, [&](Communicator& comm) {
        auto psi = make_zero_state(s.ctx.table, layout, comm.rank());
        auto out = make_zero_state(s.ctx.table, layout, comm.rank());
        apply_hamiltonian(comm, plan, psi, out);
        CHECK(norm(comm, out) == 0.0);
    });
}

TEST_CASE("2-site Heisenberg: H |ud> = -1/4 |ud> + 1/2 |du>") {
    auto s = make_setup(ModelKind::heisenberg, 2, qn({0}));
    // pairs ordered q_l = (-2') ... here: q_l=-1 (down left) then q_l=+1
    REQUIRE(s.ctx.table.n_pairs() == 2);
    auto layout = make_layout(s.ctx.table, 1);
    auto plan = build_apply_plan(s.op, s.ctx.table, layout);
    run_ranks(1, Schedule::serial, [&](Communicator& comm) {
        // |ud> = up on site 0 (left), down on site 1 (right) -> pair q_l=+1
        std::vector<double> coeffs = {0.0, 1.0}; // [pair(-1), pair(+1)]
        auto psi = scatter_full(comm, s.ctx.table, layout, coeffs);
        auto out = make_zero_state(s.ctx.table, layout, comm.rank());
        apply_hamiltonian(comm, plan, psi, out);
        auto y = gather_full(comm, out);
        CHECK(y[1] == doctest::Approx(-0.25).epsilon(1e-14)); // -1/4 |ud>
        CHECK(y[0] == doctest::Approx(0.5).epsilon(1e-14));   // +1/2 |du>
    });
}

TEST_CASE("matvec matches the dense oracle: Heisenberg S=8, P in {1,2,3}") {
    auto s = make_setup(ModelKind::heisenberg, 8, qn({0}));
    for (int P : {1, 2, 3}) CHECK(oracle_deviation(s, P, 3) <= 1e-12);
}

TEST_CASE("matvec matches the dense oracle: Hubbard S=6 with U and V, P in {1,2,3}") {
    auto s = make_setup(ModelKind::hubbard, 6, qn({3, 3}), 2.0, 0.5);
    for (int P : {1, 2, 3}) CHECK(oracle_deviation(s, P, 2) <= 1e-12);
}

TEST_CASE("matvec matches the dense oracle: impurity S=4 spin-space cut") {
    auto s = make_setup(ModelKind::quantum_impurity, 4, qn({2, 2}), 1.5, 0.0, CutKind::spin_space);
    for (int P : {1, 2, 4}) CHECK(oracle_deviation(s, P, 2) <= 1e-12);
}

TEST_CASE("matvec is bitwise identical across rank counts") {
    auto s = make_setup(ModelKind::hubbard, 4, qn({2, 2}), 2.0);
    std::vector<double> ref;
    for (int P : {1, 2, 3, 5}) {
        auto layout = make_layout(s.ctx.table, P);
        auto plan = build_apply_plan(s.op, s.ctx.table, layout);
        std::vector<double> got;
        run_ranks(P, Schedule::threads, [&](Communicator& comm) {
            auto psi = random_state(s.ctx.table, layout, comm.rank(), 42);
            auto out = make_zero_state(s.ctx.table, layout, comm.rank());
            apply_hamiltonian(comm, plan, psi, out);
            auto y = gather_full(comm, out);
            if (comm.rank() == 0) got = y;
        });
        if (P == 1) ref = got;
        else CHECK(ref == got);
    }
}

TEST_CASE("hermiticity: dot(phi, H psi) == dot(psi, H phi)") {
    auto s = make_setup(ModelKind::hubbard, 6, qn({3, 2}), -4.0, 0.5);
    auto layout = make_layout(s.ctx.table, 2);
    auto plan = build_apply_plan(s.op, s.ctx.table, layout);
    run_ranks(2, Schedule::serial, [&](Communicator& comm) {
        auto psi = random_state(s.ctx.table, layout, comm.rank(), 7);
        auto phi = random_state(s.ctx.table, layout, comm.rank(), 8);
        auto hpsi = make_zero_state(s.ctx.table, layout, comm.rank());
        auto hphi = make_zero_state(s.ctx.table, layout, comm.rank());
        apply_hamiltonian(comm, plan, psi, hpsi);
        apply_hamiltonian(comm, plan, phi, hphi);
        const double lhs = dot(comm, phi, hpsi);
        const double rhs = dot(comm, psi, hphi);
        CHECK(std::abs(lhs - rhs) <= 1e-12 * std::max(1.0, std::abs(lhs)));
    });
}

namespace {

SparseBlock identity_block(long n) {
    std::vector<Triplet> t;
    for (long i = 0; i < n; ++i) t.push_back({i, i, 1.0});
    return SparseBlock::from_triplets(n, n, std::move(t), 1.1);
}

// synthetic single-pair table (d_left x d_right), one component target 0
SectorPairTable synthetic_table(long d_left, long d_right) {
    SectorPairTable t;
    t.target_q = QuantumNumber({0});
    t.pairs.push_back({QuantumNumber({0}), QuantumNumber({0}), d_left, d_right});
    return t;
}

} // namespace

TEST_CASE("identity H_L leaves the state unchanged for any P") {
    auto table = synthetic_table(5, 7);
    SparseBlock eye = identity_block(5);
    for (int P : {1, 2, 3, 4}) {
        auto layout = make_layout(table, P);
        ApplyPlan plan;
        plan.table = &table;
        plan.layout = &layout;
        plan.diag.resize(1);
        plan.boundary.resize(1);
        plan.diag[0].h_left = &eye;
        run_ranks(P, Schedule::serial, [&](Communicator& comm) {
            auto psi = random_state(table, layout, comm.rank(), 4);
            auto out = make_zero_state(table, layout, comm.rank());
            apply_left_diagonal(comm, plan, psi, out);
            axpy(-1.0, psi, out);
            CHECK(norm(comm, out) == 0.0);
        });
    }
}

TEST_CASE("identity boundary pair on a square block leaves the state unchanged") {
    auto table = synthetic_table(6, 6);
    SparseBlock eye = identity_block(6);
    for (int P : {1, 3}) {
        auto layout = make_layout(table, P);
        ApplyPlan plan;
        plan.table = &table;
        plan.layout = &layout;
        plan.diag.resize(1);
        plan.boundary.resize(1);
        plan.boundary[0].push_back({0, 0, 0, &eye, &eye});
        run_ranks(P, Schedule::serial, [&](Communicator& comm) {
            auto psi = random_state(table, layout, comm.rank(), 5);
            auto out = make_zero_state(table, layout, comm.rank());
            apply_boundary(comm, plan, psi, out);
            axpy(-1.0, psi, out);
            CHECK(norm(comm, out) == 0.0);
        });
    }
}

TEST_CASE("2x2 boundary example: (L x R) vec equals vec(R Psi L^T)") {
    // L = [[0,1],[1,0]], R = [[1,0],[0,-1]], Psi = [[1,0],[0,0]]
    auto table = synthetic_table(2, 2);
    SparseBlock l = SparseBlock::from_triplets(2, 2, {{0, 1, 1.0}, {1, 0, 1.0}}, 1.1);
    SparseBlock r = SparseBlock::from_triplets(2, 2, {{0, 0, 1.0}, {1, 1, -1.0}}, 1.1);
    auto layout = make_layout(table, 2);
    ApplyPlan plan;
    plan.table = &table;
    plan.layout = &layout;
    plan.diag.resize(1);
    plan.boundary.resize(1);
    plan.boundary[0].push_back({0, 0, 0, &l, &r});
    run_ranks(2, Schedule::serial, [&](Communicator& comm) {
        std::vector<double> coeffs{1.0, 0.0, 0.0, 0.0}; // column-major (r fast)
        auto psi = scatter_full(comm, table, layout, coeffs);
        auto out = make_zero_state(table, layout, comm.rank());
        apply_boundary(comm, plan, psi, out);
        auto y = gather_full(comm, out);
        if (comm.rank() == 0) {
            // R Psi L^T = [[0,1],[0,0]] -> vec = (0, 0, 1, 0)
            CHECK(y == std::vector<double>{0.0, 0.0, 1.0, 0.0});
        }
    });
}

TEST_CASE("matvec never gathers a full block") {
    auto s = make_setup(ModelKind::hubbard, 6, qn({3, 3}), 2.0);
    auto layout = make_layout(s.ctx.table, 3);
    auto plan = build_apply_plan(s.op, s.ctx.table, layout);
    CounterReport rep = run_ranks(3, Schedule::serial, [&](Communicator& comm) {
        auto psi = random_state(s.ctx.table, layout, comm.rank(), 1);
        auto out = make_zero_state(s.ctx.table, layout, comm.rank());
        apply_hamiltonian(comm, plan, psi, out);
    });
    CHECK(rep.phases[std::size_t(int(Phase::gather))].calls == 0);
    CHECK(rep.phases[std::size_t(int(Phase::io))].calls == 0);
    CHECK(rep.phases[std::size_t(int(Phase::reduction))].calls == 0);
}

TEST_CASE("communication census: T* calls match the plan") {
    for (auto kind : {ModelKind::heisenberg, ModelKind::hubbard}) {
        auto s = kind == ModelKind::heisenberg ? make_setup(kind, 6, qn({0}))
                                               : make_setup(kind, 4, qn({2, 2}), 2.0, 0.5);
        for (int P : {1, 3}) {
            auto layout = make_layout(s.ctx.table, P);
            auto plan = build_apply_plan(s.op, s.ctx.table, layout);
            CounterReport rep = run_ranks(P, Schedule::serial, [&](Communicator& comm) {
                auto psi = random_state(s.ctx.table, layout, comm.rank(), 3);
                auto out = make_zero_state(s.ctx.table, layout, comm.rank());
                apply_hamiltonian(comm, plan, psi, out);
            });
            const auto& lt = rep.phases[std::size_t(int(Phase::left_diag))];
            const auto& bt = rep.phases[std::size_t(int(Phase::boundary))];
            // every rank issues the same T* sequence
            CHECK(lt.calls + bt.calls == plan.t_star_calls_per_matvec() * std::uint64_t(P));
            CHECK(lt.elements_padded + bt.elements_padded == plan.padded_exchange_per_matvec());
            CHECK(lt.flops + bt.flops + rep.phases[std::size_t(int(Phase::right_diag))].flops ==
                  plan.flops_per_matvec());
        }
    }
}

TEST_CASE("P=1 matvec exchanges nothing") {
    auto s = make_setup(ModelKind::hubbard, 4, qn({2, 2}), 2.0);
    auto layout = make_layout(s.ctx.table, 1);
    auto plan = build_apply_plan(s.op, s.ctx.table, layout);
    CounterReport rep = run_ranks(1, Schedule::serial, [&](Communicator& comm) {
        auto psi = random_state(s.ctx.table, layout, comm.rank(), 3);
        auto out = make_zero_state(s.ctx.table, layout, comm.rank());
        apply_hamiltonian(comm, plan, psi, out);
    });
    CHECK(rep.total().elements_padded == 0);
    CHECK(rep.total().elements_real == 0);
}

TEST_CASE("operation classes sum to the full Hamiltonian") {
    auto s = make_setup(ModelKind::hubbard, 6, qn({3, 3}), 2.0);
    auto layout = make_layout(s.ctx.table, 2);
    auto plan = build_apply_plan(s.op, s.ctx.table, layout);
    run_ranks(2, Schedule::threads, [&](Communicator& comm) {
        auto psi = random_state(s.ctx.table, layout, comm.rank(), 9);
        auto full = make_zero_state(s.ctx.table, layout, comm.rank());
        apply_hamiltonian(comm, plan, psi, full);
        auto parts = make_zero_state(s.ctx.table, layout, comm.rank());
        apply_right_diagonal(comm, plan, psi, parts);
        apply_left_diagonal(comm, plan, psi, parts);
        apply_boundary(comm, plan, psi, parts);
        axpy(-1.0, full, parts);
        CHECK(norm(comm, parts) <= 1e-13);
    });
}

TEST_CASE("dense reconstruction: blocks assemble to the dense sector Hamiltonian") {
    // Sum of kron terms from BlockOperator vs the dense oracle, entrywise.
    Setup s = make_setup(ModelKind::hubbard, 4, qn({2, 2}), 2.0, 0.5);
    SUBCASE("hubbard S=4") {}
    SUBCASE("hubbard S=6") { s = make_setup(ModelKind::hubbard, 6, qn({3, 3}), 2.0, 0.5); }
    SUBCASE("heisenberg S=6") { s = make_setup(ModelKind::heisenberg, 6, qn({0})); }
    SUBCASE("heisenberg S=8") { s = make_setup(ModelKind::heisenberg, 8, qn({2})); }
    const DenseOracle oracle(s.ctx);
    DenseBlock want = oracle.matrix();
    const long dim = want.rows;
    DenseBlock got(dim, dim);
    const auto& table = s.ctx.table;
    // embed one (L, R) block product at the given pair offsets
    auto embed = [&](const SparseBlock* L, const SparseBlock* R, bool left_ident, bool right_ident,
                     long row_off, long col_off, long dl_to, long dr_to, long dl_from, long dr_from) {
        for (long lc = 0; lc < dl_from; ++lc)
            for (long lr = 0; lr < dl_to; ++lr) {
                double lv;
                if (left_ident) lv = lc == lr ? 1.0 : 0.0;
                else {
                    lv = 0.0;
                    for (long k = L->ptr[std::size_t(lr)]; k < L->ptr[std::size_t(lr) + 1]; ++k)
                        if (L->idx[std::size_t(k)] == lc) lv = L->val[std::size_t(k)];
                }
                if (lv == 0.0) continue;
                for (long rc = 0; rc < dr_from; ++rc)
                    for (long rr = 0; rr < dr_to; ++rr) {
                        double rv;
                        if (right_ident) rv = rc == rr ? 1.0 : 0.0;
                        else {
                            rv = 0.0;
                            for (long k = R->ptr[std::size_t(rr)]; k < R->ptr[std::size_t(rr) + 1]; ++k)
                                if (R->idx[std::size_t(k)] == rc) rv = R->val[std::size_t(k)];
                        }
                        if (rv == 0.0) continue;
                        got.at(row_off + lr * dr_to + rr, col_off + lc * dr_from + rc) += lv * rv;
                    }
            }
    };
    for (std::size_t i = 0; i < table.pairs.size(); ++i) {
        const auto& pr = table.pairs[i];
        const long off = table.pair_offset(i);
        if (const SparseBlock* h = s.op.find_diag(Side::left, pr.q_left))
            embed(h, nullptr, false, true, off, off, pr.d_left, pr.d_right, pr.d_left, pr.d_right);
        if (const SparseBlock* h = s.op.find_diag(Side::right, pr.q_right))
            embed(nullptr, h, true, false, off, off, pr.d_left, pr.d_right, pr.d_left, pr.d_right);
    }
    for (const auto& bb : s.op.boundary) {
        for (std::size_t k = 0; k < table.pairs.size(); ++k) {
            const auto& src = table.pairs[k];
            auto lit = bb.left.find(src.q_left);
            auto rit = bb.right.find(src.q_right);
            if (lit == bb.left.end() || rit == bb.right.end()) continue;
            int dst = table.find_pair(compose(src.q_left, bb.dq_left));
            if (dst < 0) continue;
            const auto& dp = table.pairs[std::size_t(dst)];
            embed(&lit->second, &rit->second, false, false, table.pair_offset(std::size_t(dst)),
                  table.pair_offset(k), dp.d_left, dp.d_right, src.d_left, src.d_right);
        }
    }
    double worst = 0.0;
    for (std::size_t k = 0; k < want.a.size(); ++k)
        worst = std::max(worst, std::abs(want.a[k] - got.a[k]));
    CHECK(worst <= 1e-12);
    // Hermiticity of the assembled global block
    double asym = 0.0;
    for (long r = 0; r < dim; ++r)
        for (long c = 0; c < dim; ++c) asym = std::max(asym, std::abs(got.at(r, c) - got.at(c, r)));
    CHECK(asym <= 1e-12);
}
