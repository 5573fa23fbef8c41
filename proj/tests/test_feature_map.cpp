#include "oracles.hpp"

#include "qfd/error.hpp"
#include "qfd/feature_map.hpp"
#include "qfd/kernels.hpp"

#include <gtest/gtest.h>

using namespace qfd;

namespace {

FeatureMapConfig config(int n, int depth = 1, double eta = 0.1, std::uint64_t seed = 0) {
    FeatureMapConfig c;
    c.n_qubits = n;
    c.depth = depth;
    c.eta = eta;
    c.interleave_seed = seed;
    return c;
}

int count(const Circuit &c, GateKind kind) {
    return static_cast<int>(std::count_if(c.gates.begin(), c.gates.end(), [&](const Gate &g) { return g.kind == kind; }));
}

}  // namespace

TEST(IqpLayer, ZeroFeatureSingleQubit) {
    const std::vector<double> x{0.0};
    const Circuit c = build_iqp_layer(x, config(1));
    const std::vector<Gate> expected{Gate::h(0), Gate::rz(0, 0.0), Gate::h(0), Gate::rz(0, 0.0)};
    EXPECT_EQ(c.gates, expected);
    const Statevector s = embed(x, config(1));
    EXPECT_NEAR(std::norm(inner_product(zero_state(1), s)), 1.0, 1e-12);
}

TEST(IqpLayer, PairPhases) {
    const std::vector<double> x{1.0, 2.0};
    const Circuit c = build_iqp_layer(x, config(2));
    ASSERT_EQ(count(c, GateKind::ZZ), 2);
    for (const Gate &g : c.gates) {
        if (g.kind == GateKind::ZZ) {
            EXPECT_NEAR(g.angle, 0.02, 1e-15);
        }
    }
}

TEST(IqpLayer, GateCountForThreeQubits) {
    const std::vector<double> x{0.3, -1.0, 2.5};
    const Circuit c = build_iqp_layer(x, config(3));
    EXPECT_EQ(c.gates.size(), 18u);
    EXPECT_EQ(count(c, GateKind::H), 6);
    EXPECT_EQ(count(c, GateKind::RZ), 6);
    EXPECT_EQ(count(c, GateKind::ZZ), 6);
}

TEST(IqpLayer, AngleConstruction) {
    const std::vector<double> x{0.7, -1.1, 2.3, 0.05};
    const double eta = 0.37;
    const Circuit c = build_iqp_layer(x, config(4, 1, eta));
    for (const Gate &g : c.gates) {
        if (g.kind == GateKind::RZ) {
            EXPECT_DOUBLE_EQ(g.angle, 2 * eta * x[g.targets[0]]);
        } else if (g.kind == GateKind::ZZ) {
            EXPECT_LT(g.targets[0], g.targets[1]);
            EXPECT_DOUBLE_EQ(g.angle, eta * eta * x[g.targets[0]] * x[g.targets[1]]);
        }
    }
    EXPECT_EQ(count(c, GateKind::ZZ), 2 * 6);
}

TEST(IqpLayer, Errors) {
    const std::vector<double> short_x{1.0};
    EXPECT_THROW((void)build_iqp_layer(short_x, config(2)), DimensionError);
    const std::vector<double> bad{1.0, std::numeric_limits<double>::infinity()};
    EXPECT_THROW((void)build_iqp_layer(bad, config(2)), ValueError);
}

TEST(Interleave, SingleQubitSingleLayer) {
    FeatureMapConfig c = config(1, 2);
    c.interleave_layers = 1;
    const Circuit w = build_interleave(c, 1);
    ASSERT_EQ(w.gates.size(), 1u);
    EXPECT_EQ(w.gates[0].kind, GateKind::RY);
}

TEST(Interleave, Deterministic) {
    const FeatureMapConfig c = config(5, 3, 0.1, 42);
    EXPECT_EQ(build_interleave(c, 1).gates, build_interleave(c, 1).gates);
    EXPECT_NE(build_interleave(c, 1).gates, build_interleave(c, 2).gates);
    EXPECT_NE(build_interleave(c, 1).gates, build_interleave(config(5, 3, 0.1, 43), 1).gates);
}

TEST(Interleave, FourQubitsTwoLayers) {
    const Circuit w = build_interleave(config(4, 2), 1);
    EXPECT_EQ(w.gates.size(), 16u);
    EXPECT_EQ(count(w, GateKind::RY), 8);
    EXPECT_EQ(count(w, GateKind::CZ), 8);
    for (const Gate &g : w.gates) {
        if (g.kind == GateKind::RY) {
            EXPECT_GE(g.angle, 0.0);
            EXPECT_LT(g.angle, 2 * std::numbers::pi);
        }
    }
}

TEST(Interleave, TwoQubitsUseOneEntangler) {
    // The ring (0,1),(1,0) would cancel; a single CZ keeps the layer entangling.
    const Circuit w = build_interleave(config(2, 2), 1);
    EXPECT_EQ(count(w, GateKind::CZ), 2);
    EXPECT_EQ(count(w, GateKind::RY), 4);
}

TEST(Interleave, SlotOutOfRange) {
    EXPECT_THROW((void)build_interleave(config(2, 3), 0), IndexError);
    EXPECT_THROW((void)build_interleave(config(2, 3), 3), IndexError);
    EXPECT_THROW((void)build_interleave(config(2, 1), 1), IndexError);
}

TEST(Embed, DepthOneIsIqpLayer) {
    const std::vector<double> x{0.4, -2.0, 1.5};
    const FeatureMapConfig c = config(3, 1, 0.3);
    Statevector expected = zero_state(3);
    run_circuit(expected, build_iqp_layer(x, c));
    const Statevector s = embed(x, c);
    for (std::size_t k = 0; k < s.dimension(); ++k) {
        EXPECT_EQ(s[k], expected[k]);
    }
}

TEST(Embed, Deterministic) {
    const std::vector<double> x{0.4, -2.0, 1.5, 3.0};
    const FeatureMapConfig c = config(4, 3, 0.1, 9);
    const Statevector a = embed(x, c);
    const Statevector b = FeatureMap(c).embed(x);
    for (std::size_t k = 0; k < a.dimension(); ++k) {
        EXPECT_NEAR(std::abs(a[k] - b[k]), 0.0, 1e-12);
    }
}

TEST(Embed, CircuitStructure) {
    const std::vector<double> x{0.5, -0.3};
    const FeatureMapConfig c = config(2, 3, 0.1, 5);
    const Circuit full = build_embedding_circuit(x, c);
    Circuit expected{2, {}};
    expected.append(build_iqp_layer(x, c));
    expected.append(build_interleave(c, 1));
    expected.append(build_iqp_layer(x, c));
    expected.append(build_interleave(c, 2));
    expected.append(build_iqp_layer(x, c));
    EXPECT_EQ(full.gates, expected.gates);
}

TEST(Embed, TwoQubitDepthThreeMatchesDenseOracle) {
    const std::vector<double> x{0.5, -0.3};
    const FeatureMapConfig c = config(2, 3, 0.1, 5);
    const oracle::Vec expected = oracle::circuit_unitary(build_embedding_circuit(x, c)) * oracle::zero_vec(2);
    const Statevector s = embed(x, c);
    EXPECT_LE((oracle::to_vec(s) - expected).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_NEAR(s.norm_squared(), 1.0, 1e-12);
}

TEST(Embed, SingleQubitKernelDependsOnEtaXModPi) {
    // With no ZZ terms, shifting eta*x by pi changes the state by a global phase only.
    const FeatureMapConfig c = config(1, 2, 0.1, 3);
    const KernelConfig kc = KernelConfig::fidelity(c);
    const std::vector<double> xp{0.8};
    for (double x0 : {-3.0, 0.2, 4.7}) {
        const std::vector<double> x{x0};
        const std::vector<double> shifted{x0 + std::numbers::pi / c.eta};
        const double k = fidelity_kernel(x, xp, kc);
        EXPECT_NEAR(fidelity_kernel(shifted, xp, kc), k, 1e-9);
        const oracle::Vec a = oracle::circuit_unitary(build_embedding_circuit(x, c)) * oracle::zero_vec(1);
        const oracle::Vec b = oracle::circuit_unitary(build_embedding_circuit(xp, c)) * oracle::zero_vec(1);
        EXPECT_NEAR(std::norm(a.dot(b)), k, 1e-10);
    }
}

TEST(FeatureMapConfig, Validation) {
    FeatureMapConfig c = config(2);
    c.depth = 0;
    EXPECT_THROW(c.validate(), ValueError);
    c = config(2);
    c.eta = 0.0;
    EXPECT_THROW(c.validate(), ValueError);
    c = config(2);
    c.interleave_layers = 0;
    EXPECT_THROW(c.validate(), ValueError);
}
