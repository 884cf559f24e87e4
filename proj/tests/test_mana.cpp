#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "fixtures.hpp"
#include "ibrsc/errors.hpp"
#include "ibrsc/index_map.hpp"
#include "ibrsc/linearize.hpp"
#include "ibrsc/mana.hpp"
#include "ibrsc/validate.hpp"
#include "nodal_pf.hpp"

using namespace ibrsc;

namespace {

NetworkModel source_and_load() {
    NetworkModel n;
    n.buses = {fixtures::bus3("1")};
    n.sources = {fixtures::ideal_source("S", "1")};
    n.loads = {fixtures::load_z("L", "1", 1.0)};
    return n;
}

ManaSystem bare(const Eigen::MatrixXd& a, const Eigen::VectorXd& b) {
    ManaSystem s;
    s.matrix = a.sparseView();
    s.rhs = b;
    return s;
}

}  // namespace

TEST_CASE("index map block counts", "[index]") {
    NetworkModel n;
    n.buses = {fixtures::bus3("1")};
    n.sources = {fixtures::ideal_source("S", "1")};
    const IndexMap ss = index_unknowns(n, Formulation::SS);
    CHECK(ss.size() == 12);
    CHECK(ss.block_slots(Block::NodeVoltage) == 6);
    CHECK(ss.block_slots(Block::SourceCurrent) == 6);

    CHECK(index_unknowns(NetworkModel{}, Formulation::SS).empty());

    const NetworkModel gfl = fixtures::load("gfl_radial");
    NetworkModel without = gfl;
    without.ibrs.clear();
    CHECK(index_unknowns(gfl, Formulation::PF).size() - index_unknowns(without, Formulation::PF).size() == 6);
    CHECK(index_unknowns(gfl, Formulation::PF) == index_unknowns(fixtures::load("gfl_radial"), Formulation::PF));
}

TEST_CASE("index map follows the block order", "[index]") {
    const IndexMap ix = index_unknowns(fixtures::load("transmission_loop"), Formulation::PF);
    int last = -1;
    for (const auto& u : ix.unknowns()) {
        CHECK(static_cast<int>(u.block) >= last);
        last = static_cast<int>(u.block);
    }
    for (int s = 0; s < ix.size(); ++s) CHECK(ix.unknown_at_slot(s).slot <= s);
}

TEST_CASE("validation", "[validate]") {
    CHECK(validate(source_and_load()).ok());

    NetworkModel dangling = source_and_load();
    dangling.branches.push_back(fixtures::line("BR", "1", "X", {0.01, 0.1}, {0.03, 0.3}));
    const auto rep = validate(dangling);
    REQUIRE(rep.has(IssueCategory::DanglingReference));
    CHECK(rep.summary().find("X") != std::string::npos);

    NetworkModel island = source_and_load();
    island.buses.push_back(fixtures::bus3("2"));
    island.loads.push_back(fixtures::load_pq("L2", "2", {0.1, 0.0}));
    CHECK(validate(island).has(IssueCategory::NoReferenceSource));

    for (const auto& name : fixtures::corpus_names()) {
        INFO(name);
        CHECK(validate(fixtures::load(name)).ok());
    }
}

TEST_CASE("source feeding an impedance load", "[mana]") {
    const NetworkModel n = source_and_load();
    const ManaSystem sys = assemble_ss(n);
    const Eigen::VectorXd x = solve_linear(sys);
    const auto ph = as_phasors(sys.index, x);
    const int s = sys.index.slot(Block::SourceCurrent, "S", "I.A") / 2;
    CHECK(std::abs(ph[static_cast<std::size_t>(s)] - Phasor(1.0)) < 1e-12);
}

TEST_CASE("open switch blocks the load current", "[mana]") {
    NetworkModel n;
    n.buses = {fixtures::bus3("1"), fixtures::bus3("2")};
    n.sources = {fixtures::ideal_source("S", "1")};
    n.loads = {fixtures::load_z("L", "2", 1.0)};
    Switch sw;
    sw.id = "SW";
    sw.from = "1";
    sw.to = "2";
    sw.closed = {false, false, false};
    n.switches = {sw};
    const ManaSystem sys = assemble_ss(n);
    const auto ph = as_phasors(sys.index, solve_linear(sys));
    for (const char* p : {"I.A", "I.B", "I.C"})
        CHECK(std::abs(ph[static_cast<std::size_t>(sys.index.slot(Block::SourceCurrent, "S", p) / 2)]) < 1e-12);

    n.switches[0].closed = {true, true, true};
    const ManaSystem closed = assemble_ss(n);
    const auto pc = as_phasors(closed.index, solve_linear(closed));
    CHECK(std::abs(pc[static_cast<std::size_t>(closed.index.slot(Block::SourceCurrent, "S", "I.A") / 2)] - 1.0) <
          1e-12);
}

TEST_CASE("radial linear network against a dense nodal solve", "[mana]") {
    NetworkModel n;
    n.buses = {fixtures::bus3("1"), fixtures::bus3("2"), fixtures::bus3("3")};
    n.sources = {fixtures::ideal_source("S", "1", 1.0,
                                        phase_matrix_from_sequence_impedance({0.01, 0.1}, {0.02, 0.3}))};
    n.branches = {fixtures::line("B12", "1", "2", {0.02, 0.08}, {0.06, 0.24}),
                  fixtures::line("B23", "2", "3", {0.03, 0.06}, {0.09, 0.2})};
    n.loads = {fixtures::load_z("L2", "2", {0.4, 0.1}), fixtures::load_z("L3", "3", {0.3, 0.2})};
    n.loads[1].s[1] = {0.1, 0.05};  // unbalanced

    const ManaSystem sys = assemble_ss(n);
    const auto ph = as_phasors(sys.index, solve_linear(sys));

    const Eigen::MatrixXcd Y = oracle::dense_ybus(n);
    Eigen::VectorXcd inj = Eigen::VectorXcd::Zero(Y.rows());
    const Vec3 i = n.sources[0].z_int.inverse() * Vec3(n.sources[0].e_abc[0], n.sources[0].e_abc[1], n.sources[0].e_abc[2]);
    inj.head(3) = i;
    const Eigen::VectorXcd v = Y.fullPivLu().solve(inj);
    for (int k = 0; k < 9; ++k) CHECK(std::abs(ph[static_cast<std::size_t>(k)] - v(k)) < 1e-10);
}

TEST_CASE("solve_linear on small systems", "[linear_solver]") {
    Eigen::VectorXd e1 = Eigen::VectorXd::Zero(4);
    e1(0) = 1.0;
    CHECK((solve_linear(bare(Eigen::MatrixXd::Identity(4, 4), e1)) - e1).norm() < 1e-15);

    Eigen::MatrixXd a(2, 2);
    a << 2, 0, 0, 4;
    CHECK((solve_linear(bare(a, Eigen::Vector2d(2, 4))) - Eigen::Vector2d(1, 1)).norm() < 1e-15);

    Eigen::MatrixXd s = Eigen::MatrixXd::Zero(3, 3);
    s(0, 0) = 1.0;
    s(1, 1) = 1.0;
    CHECK_THROWS_AS(solve_linear(bare(s, Eigen::Vector3d(1, 1, 1))), AssemblyError);
}

TEST_CASE("random sparse system against dense LU", "[linear_solver]") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::uniform_int_distribution<int> col(0, 49);
    for (int trial = 0; trial < 5; ++trial) {
        Eigen::MatrixXd a = Eigen::MatrixXd::Zero(50, 50);
        for (int r = 0; r < 50; ++r) {
            a(r, r) = 6.0 + u(rng);
            for (int k = 0; k < 4; ++k) a(r, col(rng)) += u(rng);
        }
        Eigen::VectorXd b(50);
        for (int r = 0; r < 50; ++r) b(r) = u(rng);
        const Eigen::VectorXd x = solve_linear(bare(a, b));
        const Eigen::VectorXd ref = a.partialPivLu().solve(b);
        CHECK((x - ref).lpNorm<Eigen::Infinity>() < 1e-9);
        CHECK((a * x - b).lpNorm<Eigen::Infinity>() < 1e-10 * b.lpNorm<Eigen::Infinity>());
    }
}

TEST_CASE("floating island is reported by name", "[mana]") {
    NetworkModel n = source_and_load();
    n.buses.push_back(fixtures::bus3("F1"));
    n.buses.push_back(fixtures::bus3("F2"));
    n.branches.push_back(fixtures::line("BF", "F1", "F2", {0.01, 0.1}, {0.03, 0.3}));
    try {
        assemble_ss(n);
        FAIL("expected AssemblyError");
    } catch (const AssemblyError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("F1") != std::string::npos);
        CHECK(msg.find("F2") != std::string::npos);
    }
}
