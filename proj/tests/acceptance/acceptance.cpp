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

// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits nonzero if any fails. `acceptance 2 5` runs only criteria 2 and 5.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "qcflow/qcflow.hpp"

using namespace qcflow;
namespace g = qcflow::gates;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, double a) {
    char buf[128];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

// --- 1: fusion soundness ---------------------------------------------------

Matrix fused_unitary(const FusedCircuit& f) {
    const Eigen::Index d = Eigen::Index{1} << f.num_qubits;
    Matrix u = Matrix::Identity(d, d);
    for (const auto& fg : f.gates) {
        u = oracle::embed(fg.matrix, fg.targets, f.num_qubits) * u;
    }
    return u;
}

Outcome fusion_soundness() {
    CounterRng rng(101);
    double worst = 0.0;
    for (int i = 0; i < 200; ++i) {
        const std::size_t n = 2 + rng.below(5);
        const std::size_t depth = 1 + rng.below(30);
        const ConcreteCircuit c(oracle::random_circuit(n, depth, rng));
        worst = std::max(worst, oracle::max_abs_diff(fused_unitary(fuse(c)), oracle::circuit_unitary(c.circuit())));
    }
    bool same = true;
    for (auto fam : {bench::Family::RandomDense, bench::Family::Structured}) {
        const ConcreteCircuit c = bench::generate(fam, 16, 40, 7);
        same = same && bench::format_checksum(bench::amplitude_checksum(simulate(c, {.fuse = true}))) ==
                           bench::format_checksum(bench::amplitude_checksum(simulate(c, {.fuse = false})));
    }
    return {worst <= 1e-9 && same,
            "max |U_fused - U_dense| " + fmt("%.2e", worst) + " over 200 circuits (tol 1e-9); n=16 checksums " +
                (same ? "equal" : "DIFFER")};
}

// --- 2: fusion performance ---------------------------------------------------

Outcome fusion_performance() {
    bench::BenchConfig cfg;
    cfg.n_qubits = {16};
    cfg.depth = 40;
    cfg.num_circuits = 100;
    cfg.batch_size = 10;
    cfg.repetitions = 3;
    const auto records = bench::run_bench(cfg);
    double t[2][2] = {};
    bool checksums = true;
    for (std::size_t i = 0; i < records.size(); i += 2) {
        const auto& off = records[i];
        const auto& on = records[i + 1];
        checksums = checksums && off.checksum == on.checksum;
        t[static_cast<int>(off.family)][0] = off.wall_time_s;
        t[static_cast<int>(off.family)][1] = on.wall_time_s;
    }
    const double dense = t[0][0] / t[0][1];
    const double structured = t[1][0] / t[1][1];
    return {structured >= 2.0 && dense >= 1.0 / 1.05 && checksums,
            "unfused/fused median time: structured " + fmt("%.2fx", structured) + " (need >= 2), random_dense " +
                fmt("%.2fx", dense) + " (need >= 1 within 5%)"};
}

// --- 3: gradient equivalence ----------------------------------------------------

PauliSum random_observable(std::size_t n, CounterRng& rng) {
    PauliSum obs;
    for (int k = 0; k < 3; ++k) {
        PauliString p = PauliString::identity(rng.uniform(-1.0, 1.0));
        for (Qubit q = 0; q < n; ++q) {
            switch (rng.below(4)) {
                case 1:
                    p = p * X(q);
                    break;
                case 2:
                    p = p * Y(q);
                    break;
                case 3:
                    p = p * Z(q);
                    break;
                default:
                    break;
            }
        }
        obs += p;
    }
    return obs;
}

GradRequest sps_fixture() {
    Circuit c(3);
    for (Qubit q = 0; q < 3; ++q) {
        c.append(g::H(q));
    }
    const PauliSum cost{0.7 * (Z(0) * Z(1)), -1.3 * (Z(1) * Z(2)), 0.4 * (Z(0) * Z(2))};
    c.append(g::exp(sym("gamma"), cost));
    c.append(g::exp(ParamExpr::symbol("eta", 0.5), PauliSum{X(0), 2.0 * X(1), -X(2)}));
    c.append(g::Ry(1, sym("gamma")));
    const PauliSum obs{0.9 * (Z(0) * Z(1)), -0.6 * X(2), 0.3 * (Y(0) * Y(2)), PauliString::identity(2.0)};
    return GradRequest{c, obs, {{"gamma", 0.37}, {"eta", -0.81}}};
}

Outcome gradient_equivalence() {
    CounterRng rng(303);
    double worst = 0.0;
    for (int i = 0; i < 50; ++i) {
        const std::size_t n = 2 + rng.below(4);
        const Circuit c = oracle::random_circuit(n, 25, rng, true, 8);
        Bindings b;
        for (const auto& s : c.symbols()) {
            b[s] = rng.uniform(-3.0, 3.0);
        }
        const GradRequest req{c, random_observable(n, rng), b};
        worst = std::max(worst, oracle::max_abs_diff(parameter_shift_grad(req).gradient,
                                                     finite_difference_grad(req, FdScheme::Central, 1e-5).gradient));
    }
    const GradRequest req = sps_fixture();
    const auto exact = parameter_shift_grad(req).gradient;
    double worst_z = 0.0;
    for (int mask = 0; mask < 8; ++mask) {
        const StochasticConfig cfg{(mask & 1) != 0, (mask & 2) != 0, (mask & 4) != 0, 10000,
                                   static_cast<std::uint64_t>(500 + mask)};
        const auto st = stochastic_ps_grad(req, cfg);
        for (std::size_t j = 0; j < exact.size(); ++j) {
            const double se = std::sqrt(st.sample_variance[j] / 1e4);
            const double z = se > 0.0 ? std::abs(st.gradient[j] - exact[j]) / se
                                      : (std::abs(st.gradient[j] - exact[j]) < 1e-12 ? 0.0 : INFINITY);
            worst_z = std::max(worst_z, z);
        }
    }
    return {worst <= 1e-4 && worst_z <= 3.0, "max |ps - fd| " + fmt("%.2e", worst) + " (tol 1e-4); stochastic max |z| " +
                                                 fmt("%.2f", worst_z) + " over 8 flag sets (tol 3)"};
}

// --- 4: hybrid backprop -----------------------------------------------------

Outcome hybrid_backprop() {
    using namespace nn;
    Model m;
    const NodeId x = m.tensor_input(2);
    const NodeId circuits = m.circuit_input();
    const NodeId h = m.dense(x, 2, Activation::Linear, 11);
    Circuit model(2);
    model.append(g::Rx(0, sym("p"))).append(g::Ry(1, sym("q"))).append(g::CNOT(0, 1));
    const NodeId qn = m.controlled_pqc(circuits, h, model, {PauliSum{Z(0)}, PauliSum{Z(1)}});
    m.set_output(m.dense(qn, 1, Activation::Sigmoid, 12));

    CounterRng rng(404);
    Tensor xs({5, 2});
    for (auto& v : xs.data()) {
        v = rng.uniform(-1.0, 1.0);
    }
    std::vector<Circuit> inputs;
    for (int b = 0; b < 5; ++b) {
        Circuit c(2);
        c.append(g::Ry(0, rng.uniform(-3, 3))).append(g::Rx(1, rng.uniform(-3, 3)));
        inputs.push_back(c);
    }
    Tensor y({5, 1});
    for (auto& v : y.data()) {
        v = rng.uniform(0.0, 1.0);
    }
    const Batch batch{{xs}, {inputs}};
    const auto p0 = m.flat_parameters();
    m.zero_grad();
    m.backward(loss_backward(Loss::MSE, m.forward(batch), y));
    const auto analytic = m.flat_gradients();
    const auto fd = oracle::central_diff(
        [&](const std::vector<double>& p) {
            m.set_flat_parameters(p);
            return loss_forward(Loss::MSE, m.forward(batch), y);
        },
        p0, 1e-5);
    double worst = 0.0;
    for (std::size_t i = 0; i < p0.size(); ++i) {
        worst = std::max(worst, std::abs(analytic[i] - fd[i]) / std::max(std::abs(fd[i]), 1e-6));
    }
    return {p0.size() <= 10 && worst <= 1e-4,
            std::to_string(p0.size()) + " parameters, max relative error " + fmt("%.2e", worst) + " (tol 1e-4)"};
}

// --- 5: classifier -------------------------------------------------------------

Outcome classifier() {
    const auto r = apps::run_binary_classifier({}, {});
    bool monotone = true;
    double prev = INFINITY;
    for (std::size_t e = 5; e <= r.history.size(); ++e) {
        double avg = 0.0;
        for (std::size_t k = e - 5; k < e; ++k) {
            avg += r.history[k].loss / 5.0;
        }
        monotone = monotone && avg <= prev;
        prev = avg;
    }
    return {r.test_accuracy >= 0.95 && monotone, "test accuracy " + fmt("%.3f", r.test_accuracy) +
                                                     " (need >= 0.95); 5-epoch moving average loss " +
                                                     (monotone ? "non-increasing" : "NOT monotone")};
}

// --- 6: QAOA -----------------------------------------------------------------------

Outcome qaoa() {
    const apps::Graph gr = apps::random_regular_graph(10, 3, 2020);
    const auto r = apps::run_qaoa({gr, 1});
    const auto opt = apps::brute_force_maxcut(gr).second;
    const double ratio = static_cast<double>(r.best_cut) / static_cast<double>(opt);
    return {ratio >= 0.85 && r.final_energy < r.initial_energy,
            "best cut " + std::to_string(r.best_cut) + "/" + std::to_string(opt) + " (need >= 0.85); <H_C> " +
                fmt("%.3f", r.initial_energy) + " -> " + fmt("%.3f", r.final_energy)};
}

// --- 7: QCNN ------------------------------------------------------------------------

Outcome qcnn() {
    const auto results = apps::run_qcnn_variants({});
    std::ofstream csv("acceptance_qcnn.csv");
    csv << "variant,epoch,loss,val_loss,baseline_val_mse\n";
    bool pass = true;
    std::string detail;
    for (const auto& r : results) {
        double best = INFINITY;
        for (const auto& e : r.history) {
            best = std::min(best, e.val_loss);
            csv << apps::qcnn_variant_name(r.variant) << ',' << e.epoch << ',' << e.loss << ',' << e.val_loss << ','
                << r.baseline_val_mse << '\n';
        }
        pass = pass && best < 0.5 * r.baseline_val_mse;
        detail += std::string(detail.empty() ? "" : ", ") + apps::qcnn_variant_name(r.variant) + " " +
                  fmt("%.3f", best) + "/" + fmt("%.3f", r.baseline_val_mse);
    }
    return {pass && results.size() == 3 && csv.good(),
            "best val MSE / untrained (need < 0.5): " + detail + "; curves in acceptance_qcnn.csv"};
}

// --- 8: barren plateau -------------------------------------------------------------

Outcome barren() {
    const auto v = apps::barren_plateau_scan({2, 4, 6, 8}, 50, 200, 5);
    bool decreasing = true;
    for (std::size_t i = 1; i < v.size(); ++i) {
        decreasing = decreasing && v[i] < v[i - 1];
    }
    return {decreasing && v[3] < v[0] / 10.0, "Var(n=2,4,6,8) = " + fmt("%.3e", v[0]) + ", " + fmt("%.3e", v[1]) +
                                                  ", " + fmt("%.3e", v[2]) + ", " + fmt("%.3e", v[3])};
}

// --- 9, 10: VQT and QMHL share one VQT run ----------------------------------

struct ThermalRun {
    apps::ThermalTarget target{apps::heisenberg_2d(2, 2, 1.0, 1.0), 1.0};
    Circuit qnn = apps::grid_ansatz(2, 2, 2);
    apps::VqtResult vqt;
    Matrix rho;
};

ThermalRun& thermal() {
    static ThermalRun run = [] {
        ThermalRun r;
        r.vqt = apps::vqt_train(r.target, r.qnn, apps::BernoulliEBM(4));
        r.rho = apps::model_density_matrix(r.vqt.ebm, r.qnn, apps::bind_symbols(r.qnn, r.vqt.phi));
        return r;
    }();
    return run;
}

Outcome vqt() {
    const ThermalRun& t = thermal();
    const auto gibbs = apps::gibbs_state(t.target, 4);
    const double fid = state_fidelity(t.rho, gibbs.rho);
    const double bound = -gibbs.log_partition;
    double lowest = INFINITY;
    for (const auto& rec : t.vqt.history) {
        lowest = std::min(lowest, rec.exact_loss);
    }
    lowest = std::min(lowest, t.vqt.final_free_energy);
    return {fid >= 0.95 && lowest >= bound - 1e-6, "fidelity " + fmt("%.4f", fid) + " (need >= 0.95); lowest F " +
                                                       fmt("%.6f", lowest) + " vs bound " + fmt("%.6f", bound)};
}

Outcome qmhl() {
    const ThermalRun& t = thermal();
    const auto q = apps::qmhl_train(t.rho, t.qnn);
    const auto g = apps::qmhl_step(t.rho, t.vqt.ebm, t.qnn, apps::bind_symbols(t.qnn, t.vqt.phi));
    double inf_norm = 0.0;
    for (double v : g.theta) {
        inf_norm = std::max(inf_norm, std::abs(v));
    }
    return {q.fidelity >= 0.95 && inf_norm < 1e-8, "fidelity " + fmt("%.4f", q.fidelity) +
                                                       " (need >= 0.95); theta-gradient at the data state " +
                                                       fmt("%.2e", inf_norm) + " (need < 1e-8)"};
}

struct Criterion {
    int id;
    const char* name;
    double budget_s;
    std::function<Outcome()> run;
};

} // namespace

int main(int argc, char** argv) {
    const std::vector<Criterion> all{
        {1, "fusion soundness", 120, fusion_soundness},
        {2, "fusion performance", INFINITY, fusion_performance},
        {3, "gradient equivalence", 300, gradient_equivalence},
        {4, "hybrid backprop", INFINITY, hybrid_backprop},
        {5, "binary classifier", 60, classifier},
        {6, "qaoa maxcut", 120, qaoa},
        {7, "qcnn", 600, qcnn},
        {8, "barren plateau", 600, barren},
        {9, "vqt", 600, vqt},
        {10, "qmhl", INFINITY, qmhl},
    };
    std::set<int> only;
    for (int i = 1; i < argc; ++i) {
        only.insert(std::stoi(argv[i]));
    }
    int failures = 0;
    for (const auto& c : all) {
        if (!only.empty() && only.count(c.id) == 0) {
            continue;
        }
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("threw: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool in_time = secs <= c.budget_s;
        if (!in_time) {
            o.pass = false;
            o.detail += "; over the " + fmt("%.0f", c.budget_s) + " s budget";
        }
        failures += !o.pass;
        std::printf("%s %2d %s: %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(), secs);
        std::fflush(stdout);
    }
    return failures == 0 ? 0 : 1;
}
