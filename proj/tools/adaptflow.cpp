/*
 * Copyright 2026 The AdaptFlow Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// adaptflow command-line tool.
//
// Exit codes: 0 success, 1 invalid model, 2 runtime or usage error.

#include <fstream>
#include <functional>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "adaptflow/engine.hpp"
#include "adaptflow/errors.hpp"
#include "adaptflow/model_io.hpp"
#include "adaptflow/qos.hpp"
#include "adaptflow/runtime.hpp"
#include "adaptflow/simulator.hpp"
#include "adaptflow/tactics.hpp"
#include "adaptflow/trace.hpp"

namespace af = adaptflow;

namespace {

constexpr int kOk = 0;
constexpr int kInvalid = 1;
constexpr int kRuntime = 2;

int guarded(const std::function<int()>& body)
{
    try {
        return body();
    } catch (const af::SyntaxError& e) {
        std::cerr << e.what() << '\n';
        return kInvalid;
    } catch (const af::ValidationError& e) {
        std::cerr << e.what() << '\n';
        return kInvalid;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kRuntime;
    }
}

void collect_labels(const af::ProcessNode& node, std::vector<std::string>& out)
{
    if (node.label)
        out.push_back(*node.label);
    for (const auto& c : node.children)
        collect_labels(c, out);
}

nlohmann::ordered_json qos_json(const af::StructuralQoS& q)
{
    return {{"response_time_ms", q.response_time},
            {"cost", q.cost},
            {"availability", q.availability},
            {"reliability", q.reliability}};
}

int cmd_qos(const std::string& path, bool analytic, int samples, std::uint64_t seed)
{
    af::AdaptiveProcessModel model = af::load_model_file(path);
    af::LeafValues leaves = af::catalog_leaf_values(model);
    std::vector<std::string> labels{std::string(af::kRootLabel)};
    collect_labels(model.workflow, labels);
    nlohmann::ordered_json blocks = nlohmann::ordered_json::object();
    for (const auto& label : labels)
        blocks[label] = qos_json(af::structural_qos(af::resolve_label(model, label), leaves));
    nlohmann::ordered_json out{{"analytic", std::move(blocks)}};

    if (!analytic) {
        // Whole-workflow estimate from the simulator with unlimited bandwidth.
        af::RuntimeModel rt = af::transform(model);
        af::ScenarioScript scenario;
        scenario.seed = seed;
        af::Simulator sim(rt, scenario, af::SimOptions{true});
        for (int i = 0; i < samples; ++i)
            sim.launch_instance();
        sim.drain();
        double rt_sum = 0.0;
        double cost_sum = 0.0;
        std::size_t ok = 0;
        for (const auto& r : sim.records()) {
            cost_sum += r.cost;
            if (r.completed) {
                ++ok;
                rt_sum += static_cast<double>(r.end_ms - r.start_ms);
            }
        }
        double n = samples > 0 ? samples : 1;
        out["simulated"] = {{"samples", samples},
                            {"response_time_ms", ok ? rt_sum / static_cast<double>(ok) : 0.0},
                            {"cost", cost_sum / n},
                            {"availability", static_cast<double>(ok) / n}};
    }
    std::cout << out.dump(2) << '\n';
    return kOk;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Self-adaptive workflow engine and simulator"};
    app.require_subcommand(1);

    std::string path;

    auto* validate = app.add_subcommand("validate", "Parse and validate a model");
    validate->add_option("model", path, "Model file")->required();

    auto* run = app.add_subcommand("run", "Simulate the model's scenario with the MAPE loop");
    run->add_option("model", path, "Model file")->required();
    std::optional<std::uint64_t> seed;
    std::optional<std::int64_t> horizon;
    std::string trace_path;
    std::string report_path;
    bool no_adaptation = false;
    bool verify_causal = false;
    af::EngineConfig config;
    run->add_option("--seed", seed, "Override the scenario seed");
    run->add_option("--horizon-ms", horizon, "Override the scenario horizon")->check(CLI::NonNegativeNumber);
    run->add_option("--trace", trace_path, "Write the JSON-lines trace to this file");
    run->add_option("--report", report_path, "Write the JSON report to this file (default: stdout)");
    run->add_flag("--no-adaptation", no_adaptation, "Disable planning and execution");
    run->add_option("--lambda", config.planner.lambda, "Weight of collateral worsening in tradeoff scores");
    run->add_option("--max-chain-depth", config.planner.max_depth, "Longest trigger chain")->check(CLI::PositiveNumber);
    run->add_option("--period-ms", config.period_ms, "Simulated time between MAPE ticks")->check(CLI::PositiveNumber);
    run->add_option("--battery-budget", config.battery_budget, "Battery budget for level assumptions");
    run->add_flag("--verify-causal", verify_causal, "Check the runtime model against routing after every tick");

    auto* qos = app.add_subcommand("qos", "Structural QoS of every labeled block");
    qos->add_option("model", path, "Model file")->required();
    bool analytic = false;
    int samples = 10000;
    std::uint64_t qos_seed = 1;
    qos->add_flag("--analytic", analytic, "Only the analytic values");
    qos->add_option("--samples", samples, "Simulated instances for the estimate")->check(CLI::PositiveNumber);
    qos->add_option("--seed", qos_seed, "Seed for the estimate");

    auto* dump_rt = app.add_subcommand("dump-runtime-model", "Print the runtime model as JSON");
    dump_rt->add_option("model", path, "Model file")->required();
    auto* dump_ctx = app.add_subcommand("dump-context", "Print the initial context facts, one per line");
    dump_ctx->add_option("model", path, "Model file")->required();
    app.add_subcommand("dump-tactics", "Print the tactic library as JSON");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        // --help and --version succeed; usage errors share the runtime code.
        int code = app.exit(e);
        return code == 0 ? kOk : kRuntime;
    }

    return guarded([&]() -> int {
        if (validate->parsed()) {
            af::load_model_file(path);
            std::cout << "ok: " << path << '\n';
            return kOk;
        }
        if (run->parsed()) {
            af::AdaptiveProcessModel model = af::load_model_file(path);
            if (!model.scenario)
                throw af::Error("model has no scenario to run");
            if (seed)
                model.scenario->seed = *seed;
            if (horizon)
                model.scenario->horizon_ms = *horizon;
            config.adaptation = !no_adaptation;
            config.verify_causal = verify_causal;

            std::ofstream trace_file;
            if (!trace_path.empty()) {
                trace_file.open(trace_path);
                if (!trace_file)
                    throw af::Error("cannot write '" + trace_path + "'");
            }
            af::TraceWriter writer(trace_path.empty() ? nullptr : &trace_file, false);
            af::Engine engine(std::move(model), config, &writer);
            af::RunReport report = engine.run();
            std::string text = af::to_json(report).dump(2) + "\n";
            if (report_path.empty()) {
                std::cout << text;
            } else {
                std::ofstream out(report_path);
                if (!(out << text))
                    throw af::Error("cannot write '" + report_path + "'");
            }
            return kOk;
        }
        if (qos->parsed())
            return cmd_qos(path, analytic, samples, qos_seed);
        if (dump_rt->parsed()) {
            std::cout << af::to_json(af::transform(af::load_model_file(path))).dump(2) << '\n';
            return kOk;
        }
        if (dump_ctx->parsed()) {
            std::cout << af::context_from_runtime(af::transform(af::load_model_file(path))).to_json_lines();
            return kOk;
        }
        std::cout << af::to_json(af::TacticLibrary::builtin()).dump(2) << '\n';
        return kOk;
    });
}
