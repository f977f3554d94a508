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

#ifndef ADAPTFLOW_ENGINE_HPP
#define ADAPTFLOW_ENGINE_HPP

#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "adaptflow/context.hpp"
#include "adaptflow/model.hpp"
#include "adaptflow/planner.hpp"
#include "adaptflow/qos.hpp"
#include "adaptflow/runtime.hpp"
#include "adaptflow/simulator.hpp"
#include "adaptflow/tactics.hpp"

namespace adaptflow {

class TraceWriter;

struct EngineConfig
{
    PlannerConfig planner;
    std::int64_t period_ms = 1000;
    bool adaptation = true;
    // Battery level assumptions: high above 66%, medium above 33% of the budget remaining.
    double battery_budget = 1000.0;
    // Run verify_causal_connection after every tick.
    bool verify_causal = false;
    SimOptions sim;
};

struct BandShare
{
    double acceptable = 0.0;
    double tolerable = 0.0;
    double unacceptable = 0.0;
};

struct RunReport
{
    std::int64_t horizon_ms = 0;
    std::uint64_t seed = 0;
    std::map<std::string, BandShare> time_in_band;
    std::uint64_t launched = 0;
    std::uint64_t completed = 0;
    std::uint64_t failed = 0;
    std::map<std::string, std::uint64_t> adaptations;
    double battery = 0.0;
    double memory = 0.0;
    double cost = 0.0;
    std::uint64_t ticks = 0;
    std::uint64_t causal_mismatches = 0;
};

nlohmann::ordered_json to_json(const RunReport& report);

/*
    MAPE-K engine. Owns the runtime model, the context model and the
    simulator, and interleaves simulation with control ticks every period.
 */
class Engine
{
public:
    Engine(AdaptiveProcessModel model, EngineConfig config = {}, TraceWriter* trace = nullptr);
    Engine(const Engine&) = delete;
    Engine& operator=(const Engine&) = delete;

    /// Simulates to the horizon with ticks, then drains in-flight instances.
    RunReport run();
    /// One Monitor-Analyze-Plan-Execute pass at the simulator's current time.
    void mape_tick();

    const AdaptiveProcessModel& model() const { return model_; }
    const RuntimeModel& runtime() const { return runtime_; }
    const ContextModel& context() const { return context_; }
    Simulator& simulator() { return *sim_; }
    const Simulator& simulator() const { return *sim_; }
    const std::vector<PlanExecution>& executions() const { return executions_; }
    const EvaluationUnit* evaluation_unit(const std::string& property) const;
    std::uint64_t causal_mismatches() const { return causal_mismatches_; }
    RunReport report() const;

    /// Queues a trigger for the next tick.
    void inject_trigger(TriggerEvent trigger);

private:
    struct QueuedTrigger
    {
        TriggerEvent event;
        Chain chain;
    };

    void monitor(std::vector<TriggerEvent>& fired);
    void route_measurement(const Measurement& m, std::vector<TriggerEvent>& fired);
    void update_assumptions();
    void plan_and_execute(QueuedTrigger queued);
    void enact(PlanExecution& execution, const Chain& chain);
    void record_bands(std::int64_t span_ms);
    QoSSnapshot snapshot() const;
    void trace(std::string_view kind, nlohmann::ordered_json fields);

    AdaptiveProcessModel model_;
    EngineConfig config_;
    TraceWriter* trace_;
    RuntimeModel runtime_;
    ContextModel context_;
    std::unique_ptr<Simulator> sim_;
    std::unique_ptr<Planner> planner_;
    ChainGuard guard_;
    std::vector<Checkpoint> checkpoints_;
    std::vector<EvaluationUnit> units_;
    std::deque<QueuedTrigger> queue_;
    std::vector<PlanExecution> executions_;
    std::map<std::string, std::map<QualityLevel, std::int64_t>> band_time_;
    std::map<std::string, std::uint64_t> adaptations_;
    std::int64_t last_tick_ = 0;
    std::uint64_t ticks_ = 0;
    std::uint64_t causal_mismatches_ = 0;
    std::string battery_level_;
};

} // namespace adaptflow

#endif // ADAPTFLOW_ENGINE_HPP
