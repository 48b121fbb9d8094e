// Copyright 2026 The qcflow Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cmath>
#include <numbers>
#include <set>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "qcflow/apps/barren.hpp"
#include "qcflow/apps/classifier.hpp"
#include "qcflow/apps/qaoa.hpp"
#include "qcflow/apps/qcnn.hpp"
#include "qcflow/apps/thermal.hpp"

using namespace qcflow;
using namespace qcflow::apps;
namespace g = qcflow::gates;

namespace {

std::size_t count_named(const Circuit& c, const std::string& name) {
    std::size_t k = 0;
    for (const auto& gt : c.gates()) {
        k += gt.name() == name;
    }
    return k;
}

Bindings zeros(const Circuit& c) {
    Bindings b;
    for (const auto& s : c.symbols()) {
        b[s] = 0.0;
    }
    return b;
}

Bindings random_bindings(const Circuit& c, CounterRng& rng, double scale = std::numbers::pi) {
    Bindings b;
    for (const auto& s : c.symbols()) {
        b[s] = rng.uniform(-scale, scale);
    }
    return b;
}

/// Enumerated Shannon entropy.
double entropy_by_enumeration(const BernoulliEBM& ebm) {
    double s = 0.0;
    for (std::uint64_t x = 0; x < (std::uint64_t{1} << ebm.size()); ++x) {
        const double p = ebm.prob(x);
        s -= p > 0.0 ? p * std::log(p) : 0.0;
    }
    return s;
}

/// exp(-beta H) / tr via the Taylor oracle.
Matrix gibbs_oracle(const PauliSum& h, std::size_t n, double beta) {
    const Matrix e = oracle::taylor_expm(-beta * oracle::dense(h, n));
    return e / e.trace();
}

} // namespace

// ---- classifier ----------------------------------------------------------

TEST(Bloch, EqualCentersGiveIdenticalCircuitsPerClass) {
    const auto d = generate_bloch_dataset({2.0, 2.0, 30, 3});
    for (std::size_t i = 1; i < d.circuits.size(); ++i) {
        if (d.labels(i, 0) == d.labels(0, 0)) {
            EXPECT_EQ(oracle::max_abs_diff(oracle::final_state(d.circuits[i]), oracle::final_state(d.circuits[0])), 0.0);
        }
    }
}

TEST(Bloch, LabelsRoughlyBalanced) {
    const auto d = generate_bloch_dataset({1.0, 4.0, 200, 0});
    ASSERT_EQ(d.circuits.size(), 200U);
    double a = 0.0;
    for (std::size_t i = 0; i < 200; ++i) {
        EXPECT_EQ(d.labels(i, 0) + d.labels(i, 1), 1.0);
        a += d.labels(i, 0);
    }
    EXPECT_LT(std::abs(a - 100.0), 3.0 * std::sqrt(200 * 0.25));
}

TEST(Bloch, SpreadStaysInsideBlob) {
    const BlochDatasetSpec spec{1.0, 4.0, 100, 9};
    const auto d = generate_bloch_dataset(spec);
    for (std::size_t i = 0; i < 100; ++i) {
        const double center = d.labels(i, 0) == 1.0 ? spec.theta_a : spec.theta_b;
        const auto& gs = d.circuits[i].gates();
        const double angle = -gs[0].generator_exp()->exponent.value();
        EXPECT_LE(std::abs(angle - center), spec.blob_size());
        EXPECT_LE(std::abs(gs[1].generator_exp()->exponent.value()), spec.blob_size());
    }
}

TEST(Bloch, Deterministic) {
    const auto a = generate_bloch_dataset({1.0, 4.0, 50, 5});
    const auto b = generate_bloch_dataset({1.0, 4.0, 50, 5});
    EXPECT_EQ(a.circuits, b.circuits);
    EXPECT_EQ(a.labels, b.labels);
}

TEST(Classifier, AntipodalBlobsSeparate) {
    const auto r = run_binary_classifier({0.0, std::numbers::pi, 200, 2});
    EXPECT_EQ(r.test_accuracy, 1.0);
}

TEST(Classifier, ReferenceSpecTrains) {
    const auto r = run_binary_classifier({1.0, 4.0, 200, 1});
    ASSERT_EQ(r.history.size(), 50U);
    EXPECT_GE(r.test_accuracy, 0.95);
    EXPECT_LT(r.history.back().loss, r.history.front().loss);
}

TEST(Classifier, UntrainedIsNearChance) {
    // One untrained model on separable blobs scores near 0 or 1 depending on
    // its initial sign, so chance level is the mean over initializations.
    double mean = 0.0;
    constexpr int kInits = 40;
    for (int i = 0; i < kInits; ++i) {
        ClassifierOptions o;
        o.epochs = 0;
        o.seed = static_cast<std::uint64_t>(100 + i);
        const auto r = run_binary_classifier({1.0, 4.0, 200, 1}, o);
        EXPECT_TRUE(r.history.empty());
        mean += r.test_accuracy / kInits;
    }
    EXPECT_NEAR(mean, 0.5, 0.15);
}

// ---- cluster states and QCNN ---------------------------------------------

TEST(Cluster, ThreeQubitStructure) {
    const Circuit c = cluster_state_circuit(3);
    EXPECT_EQ(count_named(c, "H"), 3U);
    EXPECT_EQ(count_named(c, "CZ"), 3U);
    EXPECT_THROW(cluster_state_circuit(2), Error);
}

TEST(Cluster, StabilizersOfPreparedState) {
    for (std::size_t n : {4U, 5U, 8U}) {
        const Vector psi = oracle::final_state(cluster_state_circuit(n));
        for (Qubit i = 0; i < n; ++i) {
            EXPECT_NEAR(oracle::expectation(psi, PauliSum{cluster_stabilizer(n, i)}, n), 1.0, 1e-9);
        }
    }
}

TEST(Cluster, ExcitationBreaksStabilizer) {
    const auto task = generate_cluster_task(4, 10, 3);
    for (std::size_t k = 0; k < 10; ++k) {
        const Vector psi = oracle::final_state(task.circuits[k]);
        const double v = oracle::expectation(psi, PauliSum{cluster_stabilizer(4, task.excited[k])}, 4);
        EXPECT_NEAR(v, std::cos(task.angles[k]), 1e-9);
        EXPECT_LT(v, 1.0);
    }
}

TEST(Cluster, LabelsFollowThreshold) {
    const auto a = generate_cluster_task(4, 40, 8);
    for (std::size_t k = 0; k < 40; ++k) {
        EXPECT_EQ(a.labels(k, 0), std::abs(a.angles[k]) > std::numbers::pi / 2 ? 1.0 : -1.0);
    }
}

TEST(Qcnn, ConvOnFourQubitsSharesOneBlock) {
    Circuit c(4);
    conv_layer(c, {0, 1, 2, 3}, "u");
    // Each block holds exactly one XX exponential.
    std::set<std::pair<Qubit, Qubit>> pairs;
    for (const auto& gt : c.gates()) {
        if (gt.name() == "exp" && gt.generator_exp()->generator.terms()[0] ==
                                      X(gt.targets()[0]) * X(gt.targets()[1])) {
            pairs.insert({gt.targets()[0], gt.targets()[1]});
        }
    }
    EXPECT_EQ(pairs.size(), 4U);
    EXPECT_EQ(c.symbols().size(), 15U);
}

TEST(Qcnn, PoolWithZeroRotationsIsCnot) {
    Circuit c(4);
    pool_layer(c, {0, 1}, {2, 3}, "p");
    Circuit ladder(4);
    ladder.append(g::CNOT(0, 2)).append(g::CNOT(1, 3));
    EXPECT_LT(oracle::max_abs_diff(oracle::circuit_unitary(c, zeros(c)), oracle::circuit_unitary(ladder)), 1e-12);
}

TEST(Qcnn, PoolRejectsOddRegister) {
    Circuit c(3);
    EXPECT_THROW(qcnn_stage(c, {0, 1, 2}, "x"), Error);
}

TEST(Qcnn, FullModelEndsOnOneQubit) {
    auto [c, out] = qcnn_circuit(8, 0, "q");
    EXPECT_EQ(out, std::vector<Qubit>{7});
    EXPECT_EQ(c.symbols().size(), 3U * (15 + 6));
}

TEST(Qcnn, MultiFilterConcatWidth) {
    nn::Model m = build_qcnn_model(QcnnVariant::MultiFilter, 8, 1);
    std::size_t width = 0;
    for (nn::NodeId id = 1; id <= 3; ++id) {
        width += m.quantum(id).num_outputs();
    }
    EXPECT_EQ(width, 12U);
}

TEST(Qcnn, InvertedThresholdFlipsLabels) {
    // A threshold rule and its complement label every sample oppositely.
    const auto task = generate_cluster_task(4, 30, 4);
    for (std::size_t k = 0; k < 30; ++k) {
        const double inverted = std::abs(task.angles[k]) > std::numbers::pi / 2 ? -1.0 : 1.0;
        EXPECT_EQ(inverted, -task.labels(k, 0));
    }
}

TEST(Qcnn, SmallTaskTrains) {
    QcnnOptions o;
    o.n_qubits = 4;
    o.num_samples = 32;
    o.epochs = 10;
    o.lr = 0.05;
    for (const auto& r : run_qcnn_variants(o)) {
        EXPECT_LT(r.history.back().val_loss, r.baseline_val_mse) << qcnn_variant_name(r.variant);
    }
}

// ---- QAOA ----------------------------------------------------------------

TEST(Qaoa, SingleEdgeIdentityBlock) {
    const QaoaCircuit qc = build_maxcut_qaoa({Graph{2, {{0, 1}}}, 1});
    const Circuit full = compose(qc.hadamards, qc.ansatz);
    const Bindings b{{"gamma0", 0.0}, {"eta0", 0.0}};
    const Vector psi = oracle::final_state(full, b);
    for (Eigen::Index i = 0; i < 4; ++i) {
        EXPECT_NEAR(std::abs(psi[i]), 0.5, 1e-12);
    }
    EXPECT_NEAR(oracle::expectation(full, qc.cost, b), 0.5, 1e-12);
}

TEST(Qaoa, CostIsDiagonalCutCount) {
    const Graph gr = random_regular_graph(8, 3, 1);
    const PauliSum h = maxcut_cost_hamiltonian(gr);
    for (std::uint64_t x = 0; x < 256; ++x) {
        EXPECT_DOUBLE_EQ(expectation(StateVector::basis(8, x), h),
                         static_cast<double>(gr.edges.size() - cut_value(gr, x)));
    }
}

TEST(Qaoa, TriangleLandscapeMatchesDenseOracle) {
    const Graph tri{3, {{0, 1}, {1, 2}, {0, 2}}};
    const QaoaCircuit qc = build_maxcut_qaoa({tri, 1});
    const Circuit full = compose(qc.hadamards, qc.ansatz);
    // Dense oracle: H^n then exp(-i gamma H_C) exp(-i eta H_M) as matrices.
    const Matrix hc = oracle::dense(qc.cost, 3);
    const Matrix hm = oracle::dense(maxcut_mixer_hamiltonian(tri), 3);
    Vector plus = Vector::Constant(8, 1.0 / std::sqrt(8.0));
    double best = 1e9;
    for (int i = 0; i < 12; ++i) {
        for (int j = 0; j < 12; ++j) {
            const double gm = i * std::numbers::pi / 12, et = j * std::numbers::pi / 12;
            const Vector psi = oracle::taylor_expm(Complex(0, -et) * hm) *
                               (oracle::taylor_expm(Complex(0, -gm) * hc) * plus);
            const double want = (psi.adjoint() * hc * psi)(0, 0).real();
            const StateVector s = simulate(resolve(full, {{"gamma0", gm}, {"eta0", et}}));
            EXPECT_NEAR(expectation(s, qc.cost), want, 1e-9);
            best = std::min(best, want);
        }
    }
    // Max cut of a triangle is 2, so the cost is at least 1.
    EXPECT_GE(best, 1.0 - 1e-9);
    EXPECT_LT(best, 1.5);
}

TEST(Qaoa, RandomRegularGraphIsSimpleConnected) {
    const Graph gr = random_regular_graph(10, 3, 2020);
    EXPECT_EQ(gr.edges.size(), 15U);
    EXPECT_NO_THROW(gr.validate());
    EXPECT_TRUE(gr.connected());
    std::vector<int> deg(10, 0);
    for (auto [a, b] : gr.edges) {
        ++deg[a];
        ++deg[b];
    }
    for (int d : deg) {
        EXPECT_EQ(d, 3);
    }
    EXPECT_EQ(random_regular_graph(10, 3, 2020).edges, gr.edges);
}

TEST(Qaoa, SingleEdgeFindsCut) {
    const auto r = run_qaoa({Graph{2, {{0, 1}}}, 1}, {.epochs = 100});
    EXPECT_EQ(r.best_cut, 1U);
    EXPECT_LT(r.final_energy, 0.05);
}

TEST(Qaoa, TenNodeInstance) {
    const Graph gr = random_regular_graph(10, 3, 2020);
    const auto r = run_qaoa({gr, 1});
    EXPECT_GE(static_cast<double>(r.best_cut), 0.85 * static_cast<double>(brute_force_maxcut(gr).second));
    EXPECT_LT(r.final_energy, r.initial_energy);
    EXPECT_EQ(cut_value(gr, r.best_bitstring), r.best_cut);
}

// ---- barren plateau ------------------------------------------------------

TEST(Barren, GradientMatchesFiniteDifference) {
    CounterRng rng(3);
    auto [c, b] = random_layered_circuit(3, 4, rng);
    const PauliSum obs{Z(0) * Z(1)};
    const double ps = parameter_shift_grad({c, obs, b}).gradient[0];
    const double fd = oracle::central_diff(
        [&](const std::vector<double>& x) { return oracle::expectation(c, obs, {{"theta", x[0]}}); },
        {b.at("theta")}, 1e-5)[0];
    EXPECT_NEAR(ps, fd, 1e-8);
}

TEST(Barren, SmallScanPositive) {
    const auto v = barren_plateau_scan({2}, 1, 50, 1);
    ASSERT_EQ(v.size(), 1U);
    EXPECT_GT(v[0], 0.0);
}

TEST(Barren, VarianceShrinksWithWidth) {
    const auto v = barren_plateau_scan({2, 6}, 20, 100, 2);
    EXPECT_LT(v[1], v[0]);
}

// ---- Heisenberg, EBM, VQT, QMHL -----------------------------------------

TEST(Heisenberg, TermCounts) {
    const PauliSum h12 = heisenberg_2d(1, 2, 0.7, 0.3);
    ASSERT_EQ(h12.terms().size(), 3U);
    for (const auto& t : h12.terms()) {
        EXPECT_DOUBLE_EQ(t.coefficient(), 0.7);
    }
    EXPECT_EQ(heisenberg_2d(2, 2, 1, 1).terms().size(), 12U);
}

TEST(Heisenberg, GroundEnergyMatchesDiagonalization) {
    const Matrix h = oracle::dense(heisenberg_2d(2, 2, 1, 1), 4);
    Eigen::SelfAdjointEigenSolver<Matrix> es(h);
    // Four-site ring of Pauli exchange bonds: singlet ground energy -8.
    EXPECT_NEAR(es.eigenvalues()[0], -8.0, 1e-9);
    EXPECT_LT(oracle::max_abs_diff(heisenberg_2d(2, 2, 1, 1).matrix(4), h), 1e-12);
}

TEST(Ebm, NormalizedAndEntropyClosedForm) {
    CounterRng rng(1);
    for (std::size_t n : {1U, 3U, 6U, 10U}) {
        std::vector<double> th(n);
        for (auto& t : th) {
            t = rng.uniform(-3, 3);
        }
        const BernoulliEBM ebm(th);
        double total = 0.0;
        for (std::uint64_t x = 0; x < (std::uint64_t{1} << n); ++x) {
            total += ebm.prob(x);
        }
        EXPECT_NEAR(total, 1.0, 1e-12);
        EXPECT_NEAR(ebm.entropy(), entropy_by_enumeration(ebm), 1e-10);
    }
}

TEST(Ebm, EntropyGradientMatchesFiniteDifference) {
    const std::vector<double> th{0.3, -1.2, 2.0};
    const auto fd = oracle::central_diff(
        [](const std::vector<double>& t) { return BernoulliEBM(t).entropy(); }, th, 1e-6);
    const auto an = BernoulliEBM(th).entropy_gradient();
    EXPECT_LT(oracle::max_abs_diff(fd, an), 1e-8);
}

TEST(Ebm, SampleMeansMatchProbabilities) {
    const BernoulliEBM ebm({0.5, -1.0});
    CounterRng rng(4);
    const auto xs = ebm.sample(20000, rng);
    for (std::size_t j = 0; j < 2; ++j) {
        double m = 0.0;
        for (auto x : xs) {
            m += static_cast<double>((x >> j) & 1U);
        }
        m /= 20000.0;
        const double p = ebm.p_one(j);
        EXPECT_LT(std::abs(m - p), 4.0 * std::sqrt(p * (1 - p) / 20000.0));
    }
}

TEST(Vqt, UniformIdentityFreeEnergy) {
    const Circuit identity(1);
    const double l = vqt_free_energy_exact(BernoulliEBM(1), identity, {}, {PauliSum{Z(0)}, 1.0});
    EXPECT_NEAR(l, -std::log(2.0), 1e-12);
}

TEST(Vqt, FreeEnergyBoundedByLogPartition) {
    const ThermalTarget t{heisenberg_2d(1, 3, 1.0, 0.0), 0.7};
    const Circuit qnn = grid_ansatz(1, 3, 1);
    const Matrix gibbs = gibbs_oracle(t.hamiltonian, 3, t.beta);
    const double log_z = std::log(oracle::taylor_expm(-t.beta * oracle::dense(t.hamiltonian, 3)).trace().real());
    CounterRng rng(5);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> th(3);
        for (auto& x : th) {
            x = rng.uniform(-2, 2);
        }
        const BernoulliEBM ebm(th);
        const Bindings b = random_bindings(qnn, rng);
        EXPECT_GE(vqt_free_energy_exact(ebm, qnn, b, t), -log_z - 1e-9);
        // Cross-check against the density matrix: beta tr(rho H) - S(rho).
        const Matrix rho = model_density_matrix(ebm, qnn, b);
        const double e = (rho * oracle::dense(t.hamiltonian, 3)).trace().real();
        EXPECT_NEAR(vqt_free_energy_exact(ebm, qnn, b, t), t.beta * e - entropy_by_enumeration(ebm), 1e-9);
        EXPECT_LE(state_fidelity(rho, gibbs), 1.0 + 1e-9);
    }
}

TEST(Vqt, SampledFreeEnergyWithinThreeSigma) {
    const ThermalTarget t{heisenberg_2d(1, 2, 1.0, 0.0), 1.0};
    const Circuit qnn = grid_ansatz(1, 2, 1);
    CounterRng rng(6);
    const Bindings b = random_bindings(qnn, rng);
    const BernoulliEBM ebm({0.4, -0.8});
    const auto est = vqt_free_energy_sampled(ebm, qnn, b, t, 10000, rng);
    EXPECT_LT(std::abs(est.value - vqt_free_energy_exact(ebm, qnn, b, t)), 3.0 * est.std_error);
}

TEST(Vqt, GradientEstimatorMatchesFiniteDifference) {
    const ThermalTarget t{heisenberg_2d(1, 2, 1.0, 0.0), 1.3};
    const Circuit qnn = grid_ansatz(1, 2, 1);
    CounterRng rng(7);
    const Bindings b = random_bindings(qnn, rng, 1.0);
    const std::vector<double> th{0.6, -0.2};
    const auto names = qnn.symbols();

    // Finite difference of the exact free energy in theta and phi.
    const auto fd_theta = oracle::central_diff(
        [&](const std::vector<double>& x) { return vqt_free_energy_exact(BernoulliEBM(x), qnn, b, t); }, th, 1e-5);
    std::vector<double> phi0;
    for (const auto& s : names) {
        phi0.push_back(b.at(s));
    }
    const auto fd_phi = oracle::central_diff(
        [&](const std::vector<double>& x) {
            return vqt_free_energy_exact(BernoulliEBM(th), qnn, bind_symbols(qnn, x), t);
        },
        phi0, 1e-5);

    // Spread of the estimator at 1e4 samples, from independent replicates.
    constexpr int kReps = 30;
    std::vector<std::vector<double>> reps;
    for (int r = 0; r < kReps; ++r) {
        CounterRng s = rng.split(static_cast<std::uint64_t>(r));
        const auto gr = vqt_gradient(BernoulliEBM(th), qnn, b, t, 10000, s);
        std::vector<double> all = gr.theta;
        all.insert(all.end(), gr.phi.begin(), gr.phi.end());
        reps.push_back(all);
    }
    std::vector<double> want = fd_theta;
    want.insert(want.end(), fd_phi.begin(), fd_phi.end());
    for (std::size_t k = 0; k < want.size(); ++k) {
        double m = 0.0, v = 0.0;
        for (const auto& r : reps) {
            m += r[k] / kReps;
        }
        for (const auto& r : reps) {
            v += (r[k] - m) * (r[k] - m) / (kReps - 1);
        }
        // A single 1e4-sample estimate against 3 sigma, then the replicate mean.
        EXPECT_LE(std::abs(reps[0][k] - want[k]), 3.0 * std::sqrt(v) + 1e-9) << k;
        EXPECT_LE(std::abs(m - want[k]), 3.0 * std::sqrt(v / kReps) + 1e-9) << k;
    }
}

TEST(Vqt, HighTemperatureGivesMaximalEntropy) {
    const ThermalTarget t{heisenberg_2d(1, 2, 1.0, 0.0), 1e-6};
    const Circuit qnn = grid_ansatz(1, 2, 1);
    VqtOptions o;
    o.steps = 300;
    o.samples_per_step = 50;
    const auto r = vqt_train(t, qnn, BernoulliEBM({0.8, -0.5}), o);
    for (double th : r.ebm.theta()) {
        EXPECT_LT(std::abs(th), 0.05);
    }
}

TEST(Vqt, SingleQubitGibbsState) {
    const ThermalTarget t{PauliSum{Z(0)}, 1.0};
    const Circuit qnn = grid_ansatz(1, 1, 1);
    VqtOptions o;
    o.steps = 200;
    const auto r = vqt_train(t, qnn, BernoulliEBM(1), o);
    Matrix gibbs = Matrix::Zero(2, 2);
    gibbs(0, 0) = std::exp(-1.0);
    gibbs(1, 1) = std::exp(1.0);
    gibbs /= gibbs.trace();
    EXPECT_GE(state_fidelity(model_density_matrix(r.ebm, qnn, bind_symbols(qnn, r.phi)), gibbs), 0.99);
}

TEST(Vqt, GibbsStateHelperMatchesOracle) {
    const ThermalTarget t{heisenberg_2d(2, 2, 1.0, 1.0), 1.0};
    const GibbsState gs = gibbs_state(t, 4);
    EXPECT_LT(oracle::max_abs_diff(gs.rho, gibbs_oracle(t.hamiltonian, 4, 1.0)), 1e-9);
}

TEST(Qmhl, ThetaGradientVanishesAtData) {
    const Circuit qnn = grid_ansatz(1, 3, 1);
    CounterRng rng(8);
    const Bindings b = random_bindings(qnn, rng);
    const BernoulliEBM ebm({0.7, -0.3, 1.1});
    const Matrix data = model_density_matrix(ebm, qnn, b);
    const auto g = qmhl_step(data, ebm, qnn, b);
    for (double x : g.theta) {
        EXPECT_LT(std::abs(x), 1e-8);
    }
    for (double x : g.phi) {
        EXPECT_LT(std::abs(x), 1e-8);
    }
}

TEST(Qmhl, MaximallyMixedDrivesBiasesToZero) {
    const Circuit qnn(2);
    const Matrix mixed = Matrix::Identity(4, 4) / 4.0;
    const BernoulliEBM ebm({0.5, -0.9});
    const auto g = qmhl_step(mixed, ebm, qnn, {});
    for (std::size_t j = 0; j < 2; ++j) {
        EXPECT_NEAR(g.theta[j], std::tanh(ebm.theta()[j]), 1e-12);
        EXPECT_GT(g.theta[j] * ebm.theta()[j], 0.0); // descent moves toward 0
    }
}

TEST(Qmhl, GradientsMatchFiniteDifference) {
    const Circuit qnn = grid_ansatz(1, 2, 1);
    CounterRng rng(9);
    const Bindings b0 = random_bindings(qnn, rng);
    const Bindings b1 = random_bindings(qnn, rng);
    const Matrix data = model_density_matrix(BernoulliEBM({1.0, 0.2}), qnn, b0);
    const std::vector<double> th{-0.4, 0.9};
    std::vector<double> phi;
    for (const auto& s : qnn.symbols()) {
        phi.push_back(b1.at(s));
    }
    const auto g = qmhl_step(data, BernoulliEBM(th), qnn, b1);
    const auto fd_t = oracle::central_diff(
        [&](const std::vector<double>& x) { return qmhl_loss(data, BernoulliEBM(x), qnn, b1); }, th, 1e-6);
    const auto fd_p = oracle::central_diff(
        [&](const std::vector<double>& x) { return qmhl_loss(data, BernoulliEBM(th), qnn, bind_symbols(qnn, x)); },
        phi, 1e-6);
    EXPECT_LT(oracle::max_abs_diff(g.theta, fd_t), 1e-7);
    EXPECT_LT(oracle::max_abs_diff(g.phi, fd_p), 1e-7);
}

TEST(Qmhl, CrossEntropyAtLeastVonNeumannEntropy) {
    const Circuit qnn = grid_ansatz(1, 2, 1);
    CounterRng rng(10);
    const Matrix data = model_density_matrix(BernoulliEBM({0.3, 0.8}), qnn, random_bindings(qnn, rng));
    Eigen::SelfAdjointEigenSolver<Matrix> es(data);
    double s = 0.0;
    for (Eigen::Index i = 0; i < 4; ++i) {
        const double l = es.eigenvalues()[i];
        s -= l > 1e-15 ? l * std::log(l) : 0.0;
    }
    for (int trial = 0; trial < 10; ++trial) {
        const BernoulliEBM ebm({rng.uniform(-2, 2), rng.uniform(-2, 2)});
        EXPECT_GE(qmhl_loss(data, ebm, qnn, random_bindings(qnn, rng)), s - 1e-9);
    }
}

TEST(Qmhl, RejectsInvalidDensityMatrix) {
    const Circuit qnn(1);
    Matrix bad = Matrix::Identity(2, 2);
    EXPECT_THROW(qmhl_step(bad, BernoulliEBM(1), qnn, {}), Error);
}

TEST(VqtQmhl, HeisenbergRoundTrip) {
    const ThermalTarget t{heisenberg_2d(2, 2, 1.0, 1.0), 1.0};
    const Circuit qnn = grid_ansatz(2, 2, 2);
    const auto v = vqt_train(t, qnn, BernoulliEBM(4));
    const Matrix rho = model_density_matrix(v.ebm, qnn, bind_symbols(qnn, v.phi));
    EXPECT_GE(state_fidelity(rho, gibbs_state(t, 4).rho), 0.95);
    const auto q = qmhl_train(rho, qnn);
    EXPECT_GE(q.fidelity, 0.95);
}
