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

/**
 * @file
 * The `qcflow` command line. Exit codes: 0 success, 1 usage error,
 * 2 runtime error (bad input file, simulation failure).
 */

#pragma once

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "qcflow/apps/barren.hpp"
#include "qcflow/apps/classifier.hpp"
#include "qcflow/apps/qaoa.hpp"
#include "qcflow/apps/qcnn.hpp"
#include "qcflow/apps/thermal.hpp"
#include "qcflow/bench/bench.hpp"
#include "qcflow/qcflow.hpp"

#ifndef QCFLOW_VERSION
#define QCFLOW_VERSION "unknown"
#endif

namespace qcflow::cli {

namespace detail {

inline std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error("cannot open '" + path + "'");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline Circuit load_circuit(const std::string& path) {
    try {
        return circuit_from_json(read_file(path));
    } catch (const Error& e) {
        throw Error(path + ": " + e.what());
    }
}

inline PauliSum load_observable(const std::string& path) {
    try {
        return pauli_sum_from_json(read_file(path));
    } catch (const Error& e) {
        throw Error(path + ": " + e.what());
    }
}

inline Bindings parse_bindings(const std::vector<std::string>& items) {
    Bindings b;
    for (const auto& item : items) {
        const auto eq = item.find('=');
        if (eq == std::string::npos || eq == 0) {
            throw CLI::ValidationError("--bindings", "expected name=value, got '" + item + "'");
        }
        try {
            std::size_t used = 0;
            const std::string value = item.substr(eq + 1);
            b[item.substr(0, eq)] = std::stod(value, &used);
            if (used != value.size()) {
                throw std::invalid_argument(value);
            }
        } catch (const std::logic_error&) {
            throw CLI::ValidationError("--bindings", "bad number in '" + item + "'");
        }
    }
    return b;
}

inline std::string fmt(double v, int digits = 6) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v + 0.0);
    return buf;
}

inline std::vector<std::size_t> parse_qubit_list(const std::string& s) {
    // "16", "10,12,16" or "10-16" (step 2 with a third field: "10-16:2").
    std::vector<std::size_t> out;
    if (const auto dash = s.find('-'); dash != std::string::npos) {
        const auto colon = s.find(':');
        const std::size_t lo = std::stoul(s.substr(0, dash));
        const std::size_t hi = std::stoul(s.substr(dash + 1, colon == std::string::npos ? std::string::npos
                                                                                          : colon - dash - 1));
        const std::size_t step = colon == std::string::npos ? 1 : std::stoul(s.substr(colon + 1));
        if (step == 0 || hi < lo) {
            throw CLI::ValidationError("--qubits", "bad range '" + s + "'");
        }
        for (std::size_t n = lo; n <= hi; n += step) {
            out.push_back(n);
        }
        return out;
    }
    std::stringstream ss(s);
    for (std::string part; std::getline(ss, part, ',');) {
        out.push_back(std::stoul(part));
    }
    return out;
}

inline std::ofstream open_out(const std::filesystem::path& p) {
    std::ofstream f(p);
    if (!f) {
        throw Error("cannot write '" + p.string() + "'");
    }
    return f;
}

inline void write_json(const std::filesystem::path& p, const nlohmann::json& j) {
    auto f = open_out(p);
    f << j.dump(2) << '\n';
}

struct DemoFlags {
    std::string name;
    std::string out_dir = ".";
    std::uint64_t seed = 0;
    bool seed_set = false;
    std::size_t epochs = 0; // 0 keeps the demo default
    double beta = 1.0;
};

inline double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

inline void demo_classifier(const DemoFlags& f, std::ostream& out) {
    apps::BlochDatasetSpec spec;
    apps::ClassifierOptions o;
    if (f.seed_set) {
        spec.seed = f.seed;
        o.seed = f.seed;
    }
    if (f.epochs > 0) {
        o.epochs = f.epochs;
    }
    const auto r = apps::run_binary_classifier(spec, o);
    const std::filesystem::path dir(f.out_dir);
    auto csv = open_out(dir / "classifier_history.csv");
    nn::write_history_csv(csv, r.history);
    write_json(dir / "classifier_summary.json",
               {{"demo", "classifier"},
                {"data_seed", spec.seed},
                {"model_seed", o.seed},
                {"theta_a", spec.theta_a},
                {"theta_b", spec.theta_b},
                {"num_samples", spec.num_samples},
                {"epochs", o.epochs},
                {"learning_rate", o.lr},
                {"final_loss", r.history.empty() ? 0.0 : r.history.back().loss},
                {"test_accuracy", r.test_accuracy},
                {"theta", r.theta}});
    out << "test accuracy " << fmt(r.test_accuracy, 4) << '\n';
}

inline void demo_qaoa(const DemoFlags& f, std::ostream& out) {
    const std::uint64_t graph_seed = f.seed_set ? f.seed : 2020;
    const apps::Graph g = apps::random_regular_graph(10, 3, graph_seed);
    apps::QaoaOptions o;
    if (f.epochs > 0) {
        o.epochs = f.epochs;
    }
    const auto r = apps::run_qaoa({g, 1}, o);
    const auto [opt_bits, opt_cut] = apps::brute_force_maxcut(g);
    const std::filesystem::path dir(f.out_dir);
    auto csv = open_out(dir / "qaoa_history.csv");
    nn::write_history_csv(csv, r.history);
    nlohmann::json edges = nlohmann::json::array();
    for (const auto& [a, b] : g.edges) {
        edges.push_back({a, b});
    }
    write_json(dir / "qaoa_summary.json", {{"demo", "qaoa"},
                                           {"graph_seed", graph_seed},
                                           {"train_seed", o.seed},
                                           {"edges", edges},
                                           {"p", 1},
                                           {"initial_energy", r.initial_energy},
                                           {"final_energy", r.final_energy},
                                           {"angles", r.angles},
                                           {"best_bitstring", r.best_bitstring},
                                           {"best_cut", r.best_cut},
                                           {"optimal_cut", opt_cut},
                                           {"optimal_bitstring", opt_bits}});
    out << "best cut " << r.best_cut << " of " << opt_cut << '\n';
}

inline void demo_qcnn(const DemoFlags& f, std::ostream& out) {
    apps::QcnnOptions o;
    if (f.seed_set) {
        o.seed = f.seed;
    }
    if (f.epochs > 0) {
        o.epochs = f.epochs;
    }
    const auto t0 = std::chrono::steady_clock::now();
    const auto results = apps::run_qcnn_variants(o);
    const double elapsed = seconds_since(t0);
    const std::filesystem::path dir(f.out_dir);
    auto csv = open_out(dir / "qcnn_history.csv");
    csv << "variant,epoch,loss,val_loss,baseline_val_mse\n";
    nlohmann::json variants = nlohmann::json::array();
    for (const auto& r : results) {
        for (const auto& e : r.history) {
            csv << apps::qcnn_variant_name(r.variant) << ',' << e.epoch << ',' << e.loss << ','
                << e.val_loss << ',' << r.baseline_val_mse << '\n';
        }
        const double last = r.history.empty() ? r.baseline_val_mse : r.history.back().val_loss;
        variants.push_back({{"variant", apps::qcnn_variant_name(r.variant)},
                            {"baseline_val_mse", r.baseline_val_mse},
                            {"final_val_mse", last}});
        out << apps::qcnn_variant_name(r.variant) << " val mse " << fmt(last, 4) << " (untrained "
            << fmt(r.baseline_val_mse, 4) << ")\n";
    }
    write_json(dir / "qcnn_summary.json", {{"demo", "qcnn"},
                                           {"seed", o.seed},
                                           {"n_qubits", o.n_qubits},
                                           {"num_samples", o.num_samples},
                                           {"epochs", o.epochs},
                                           {"learning_rate", o.lr},
                                           {"wall_time_s", elapsed},
                                           {"variants", variants}});
}

inline void demo_barren(const DemoFlags& f, std::ostream& out) {
    const std::uint64_t seed = f.seed_set ? f.seed : 5;
    const std::vector<std::size_t> ns{2, 4, 6, 8};
    const std::size_t depth = 50, trials = 200;
    const auto var = apps::barren_plateau_scan(ns, depth, trials, seed);
    const std::filesystem::path dir(f.out_dir);
    auto csv = open_out(dir / "barren_history.csv");
    csv << "n_qubits,gradient_variance\n";
    for (std::size_t i = 0; i < ns.size(); ++i) {
        csv << ns[i] << ',' << var[i] << '\n';
        out << "n=" << ns[i] << " variance " << var[i] << '\n';
    }
    write_json(dir / "barren_summary.json", {{"demo", "barren"},
                                             {"seed", seed},
                                             {"depth", depth},
                                             {"trials", trials},
                                             {"n_qubits", ns},
                                             {"variance", var}});
}

/// Shared by the vqt and qmhl demos.
inline apps::VqtResult heisenberg_vqt(const apps::ThermalTarget& t, const Circuit& qnn,
                                      const apps::VqtOptions& o, const std::filesystem::path& dir) {
    auto r = apps::vqt_train(t, qnn, apps::BernoulliEBM(qnn.num_qubits()), o);
    auto csv = open_out(dir / "vqt_history.csv");
    csv << "step,free_energy_sampled,free_energy_exact\n";
    for (const auto& rec : r.history) {
        csv << rec.step << ',' << rec.loss << ',';
        if (!std::isnan(rec.exact_loss)) {
            csv << rec.exact_loss;
        }
        csv << '\n';
    }
    return r;
}

inline void demo_thermal(const DemoFlags& f, bool with_qmhl, std::ostream& out) {
    const apps::ThermalTarget t{apps::heisenberg_2d(2, 2, 1.0, 1.0), f.beta};
    const Circuit qnn = apps::grid_ansatz(2, 2, 2);
    apps::VqtOptions vo;
    if (f.seed_set) {
        vo.seed = f.seed;
    }
    if (f.epochs > 0) {
        vo.steps = f.epochs;
    }
    const std::filesystem::path dir(f.out_dir);
    const auto v = heisenberg_vqt(t, qnn, vo, dir);
    const auto gibbs = apps::gibbs_state(t, 4);
    const Matrix rho = apps::model_density_matrix(v.ebm, qnn, apps::bind_symbols(qnn, v.phi));
    const double vqt_fid = state_fidelity(rho, gibbs.rho);
    nlohmann::json summary{{"demo", with_qmhl ? "qmhl" : "vqt"},
                           {"lattice", "2x2"},
                           {"beta", t.beta},
                           {"vqt_seed", vo.seed},
                           {"vqt_steps", vo.steps},
                           {"vqt_fidelity", vqt_fid},
                           {"final_free_energy", v.final_free_energy},
                           {"free_energy_bound", -gibbs.log_partition}};
    out << "vqt fidelity " << fmt(vqt_fid, 4) << '\n';
    if (with_qmhl) {
        apps::QmhlOptions qo;
        if (f.seed_set) {
            qo.seed = f.seed;
        }
        if (f.epochs > 0) {
            qo.steps = f.epochs;
        }
        const auto q = apps::qmhl_train(rho, qnn, qo);
        auto csv = open_out(dir / "qmhl_history.csv");
        csv << "step,loss\n";
        for (std::size_t i = 0; i < q.loss_history.size(); ++i) {
            csv << i << ',' << q.loss_history[i] << '\n';
        }
        summary["qmhl_seed"] = qo.seed;
        summary["qmhl_steps"] = qo.steps;
        summary["qmhl_fidelity"] = q.fidelity;
        out << "qmhl fidelity " << fmt(q.fidelity, 4) << '\n';
    }
    write_json(dir / (with_qmhl ? "qmhl_summary.json" : "vqt_summary.json"), summary);
}

inline const std::vector<std::string>& demo_names() {
    static const std::vector<std::string> names{"classifier", "qaoa", "qcnn", "barren", "vqt", "qmhl"};
    return names;
}

inline void run_demo(const DemoFlags& f, std::ostream& out) {
    std::filesystem::create_directories(f.out_dir);
    if (f.name == "classifier") {
        demo_classifier(f, out);
    } else if (f.name == "qaoa") {
        demo_qaoa(f, out);
    } else if (f.name == "qcnn") {
        demo_qcnn(f, out);
    } else if (f.name == "barren") {
        demo_barren(f, out);
    } else {
        demo_thermal(f, f.name == "qmhl", out);
    }
}

} // namespace detail

/// Runs the command line with the given streams; returns the process exit code.
inline int cli_main(int argc, const char* const* argv, std::ostream& out = std::cout,
                    std::ostream& err = std::cerr) {
    CLI::App app{"qcflow: state-vector simulation, gradients and hybrid training", "qcflow"};
    app.set_version_flag("--version", std::string("qcflow ") + QCFLOW_VERSION);
    app.require_subcommand(1);

    std::string circuit_path, obs_path, out_path;
    std::vector<std::string> binding_items;
    bool no_fuse = false;
    std::size_t shots = 0;
    std::uint64_t seed = 0;

    auto* sim = app.add_subcommand("simulate", "Simulate a circuit and write its final state as JSON");
    sim->add_option("circuit", circuit_path, "Circuit JSON file")->required();
    sim->add_option("--out", out_path, "Write the state here instead of standard output");
    sim->add_option("--bindings", binding_items, "Symbol values, name=value");
    sim->add_flag("--no-fuse", no_fuse, "Apply gates one by one");

    auto* exp = app.add_subcommand("expectation", "Print <psi|H|psi> for a circuit and observable");
    exp->add_option("circuit", circuit_path, "Circuit JSON file")->required();
    exp->add_option("observable", obs_path, "Observable JSON file")->required();
    exp->add_option("--bindings", binding_items, "Symbol values, name=value");
    exp->add_option("--shots", shots, "Estimate from this many shots per term (0 = exact)");
    exp->add_option("--seed", seed, "Sampling seed");

    auto* smp = app.add_subcommand("sample", "Sample bitstrings (qubit 0 first) and print counts");
    smp->add_option("circuit", circuit_path, "Circuit JSON file")->required();
    smp->add_option("--bindings", binding_items, "Symbol values, name=value");
    smp->add_option("--shots", shots, "Number of shots")->required()->check(CLI::PositiveNumber);
    smp->add_option("--seed", seed, "Sampling seed");

    std::string method = "ps";
    std::vector<std::string> sps_flags;
    double epsilon = 1e-5;
    std::size_t sps_samples = 1000;
    auto* grd = app.add_subcommand("grad", "Print d<H>/d(symbol) for every circuit symbol");
    grd->add_option("circuit", circuit_path, "Circuit JSON file")->required();
    grd->add_option("observable", obs_path, "Observable JSON file")->required();
    grd->add_option("--bindings", binding_items, "Symbol values, name=value");
    grd->add_option("--method", method, "fd | central | ps | sps")
        ->check(CLI::IsMember({"fd", "central", "ps", "sps"}));
    grd->add_option("--epsilon", epsilon, "Finite-difference step");
    grd->add_option("--sps-flags", sps_flags, "Stochastic shift sampling: generator, cost, coordinate")
        ->check(CLI::IsMember({"generator", "cost", "coordinate"}));
    grd->add_option("--samples", sps_samples, "Stochastic shift samples")->check(CLI::PositiveNumber);
    grd->add_option("--seed", seed, "Stochastic shift seed");

    bench::BenchConfig cfg;
    std::string qubits = "16", family = "both", fuse_mode = "both", bench_out;
    auto* bch = app.add_subcommand("bench", "Fused vs unfused simulation timing, CSV output");
    bch->add_option("--qubits", qubits, "Qubit counts: 16, 10,12,16 or 10-16[:step]");
    bch->add_option("--depth", cfg.depth, "Layers per circuit");
    bch->add_option("--circuits", cfg.num_circuits, "Circuits per cell");
    bch->add_option("--batch-size", cfg.batch_size, "Circuits per timed batch");
    bch->add_option("--family", family, "random_dense | structured | both")
        ->check(CLI::IsMember({"random_dense", "structured", "both"}));
    bch->add_option("--block-size", cfg.block_size, "Block size of the structured family");
    bch->add_option("--fuse", fuse_mode, "on | off | both")->check(CLI::IsMember({"on", "off", "both"}));
    bch->add_option("--repetitions", cfg.repetitions, "Timing repetitions (median reported)");
    bch->add_option("--workers", cfg.workers, "Worker threads");
    bch->add_option("--seed", cfg.seed, "Circuit seed");
    bch->add_option("--out", bench_out, "Write CSV here instead of standard output");

    detail::DemoFlags demo;
    auto* dem = app.add_subcommand("demo", "Run an example application, writing CSV and JSON");
    dem->add_option("name", demo.name, "classifier | qaoa | qcnn | barren | vqt | qmhl")
        ->required()
        ->check(CLI::IsMember(detail::demo_names()));
    dem->add_option("--out-dir", demo.out_dir, "Directory for the output files");
    auto* seed_opt = dem->add_option("--seed", demo.seed, "Override the demo seed");
    dem->add_option("--epochs", demo.epochs, "Override epochs (steps for vqt and qmhl)");
    dem->add_option("--beta", demo.beta, "Inverse temperature for vqt and qmhl")->check(CLI::PositiveNumber);

    if (argc > 1 && argv[1][0] != '-' && app.get_subcommand_no_throw(argv[1]) == nullptr) {
        err << "error: unknown subcommand '" << argv[1] << "'\n" << app.help();
        return 1;
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 1;
    }

    try {
        const Bindings bindings = detail::parse_bindings(binding_items);
        if (*sim) {
            const Circuit c = detail::load_circuit(circuit_path);
            const StateVector s = simulate(resolve(c, bindings), {.fuse = !no_fuse});
            nlohmann::json amps = nlohmann::json::array();
            for (const auto& a : s.amplitudes()) {
                amps.push_back({a.real(), a.imag()});
            }
            const nlohmann::json j{{"num_qubits", s.num_qubits()}, {"amplitudes", amps}};
            if (out_path.empty()) {
                out << j.dump(2) << '\n';
            } else {
                detail::write_json(out_path, j);
            }
        } else if (*exp) {
            const Circuit c = detail::load_circuit(circuit_path);
            const PauliSum h = detail::load_observable(obs_path);
            const ConcreteCircuit cc = resolve(c, bindings);
            const double v = shots > 0 ? sampled_expectation(cc, h, shots, seed) : expectation(simulate(cc), h);
            out << detail::fmt(v) << '\n';
        } else if (*smp) {
            const Circuit c = detail::load_circuit(circuit_path);
            const SampleBatch b = sample(simulate(resolve(c, bindings)), shots, seed);
            std::map<std::string, std::size_t> counts;
            for (std::size_t i = 0; i < b.shots(); ++i) {
                ++counts[b.str(i)];
            }
            out << "bitstring,count\n";
            for (const auto& [k, v] : counts) {
                out << k << ',' << v << '\n';
            }
        } else if (*grd) {
            const GradRequest req(detail::load_circuit(circuit_path), detail::load_observable(obs_path),
                                  bindings);
            GradResult g;
            if (method == "ps") {
                g = parameter_shift_grad(req);
            } else if (method == "fd" || method == "central") {
                g = finite_difference_grad(req, method == "fd" ? FdScheme::Forward : FdScheme::Central, epsilon);
            } else {
                StochasticConfig sc;
                for (const auto& flag : sps_flags) {
                    sc.sample_generator_terms |= flag == "generator";
                    sc.sample_cost_terms |= flag == "cost";
                    sc.sample_coordinates |= flag == "coordinate";
                }
                sc.num_samples = sps_samples;
                sc.seed = seed;
                g = stochastic_ps_grad(req, sc);
                if (g.degenerate) {
                    err << "warning: a sampling distribution had zero weight; affected components are 0\n";
                }
            }
            out << "symbol,gradient\n";
            for (std::size_t i = 0; i < g.symbols.size(); ++i) {
                out << g.symbols[i] << ',' << detail::fmt(g.gradient[i], 9) << '\n';
            }
        } else if (*bch) {
            cfg.n_qubits = detail::parse_qubit_list(qubits);
            cfg.families = family == "both" ? std::vector{bench::Family::RandomDense, bench::Family::Structured}
                                            : std::vector{bench::parse_family(family)};
            cfg.fuse = fuse_mode == "on"    ? bench::FuseMode::On
                       : fuse_mode == "off" ? bench::FuseMode::Off
                                            : bench::FuseMode::Both;
            const auto records = bench::run_bench(cfg);
            std::ofstream file;
            if (!bench_out.empty()) {
                file = detail::open_out(bench_out);
            }
            std::ostream& os = bench_out.empty() ? out : file;
            bench::write_csv_header(os);
            for (const auto& r : records) {
                bench::write_csv_row(os, r);
            }
        } else if (*dem) {
            demo.seed_set = seed_opt->count() > 0;
            detail::run_demo(demo, out);
        }
    } catch (const CLI::ValidationError& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}

} // namespace qcflow::cli
