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

#ifndef ADAPTFLOW_MODEL_HPP
#define ADAPTFLOW_MODEL_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace adaptflow {

/*
    Specification-layer types.

    An adaptive process model is the triple (workflow, quality requirements,
    adaptation plans) plus the service catalog the workflow draws on and an
    optional scenario used by the simulator. Everything here is a plain value
    type: copyable, comparable, free of shared state.
 */

enum class NodeKind { Seq, Loop, Sel, AndPar, Opt, Service };

std::string_view to_string(NodeKind kind);

/// Implicit label of the workflow root.
inline constexpr std::string_view kRootLabel = "root";

/// Probability of taking the optional branch when the model does not declare one.
inline constexpr double kDefaultOptProbability = 0.5;

struct ProcessNode
{
    NodeKind kind = NodeKind::Service;
    std::optional<std::string> label;
    std::vector<ProcessNode> children;
    // Loop only.
    int iterations = 1;
    // Sel: one per child. Opt: a single entry, the probability of taking the child.
    std::vector<double> probabilities;
    // Service only.
    std::string service;

    bool operator==(const ProcessNode&) const = default;
};

struct ProviderProfile
{
    std::string id;
    // Absent latency is legal in a model file but blocks QoS analysis and simulation.
    std::optional<double> latency_mean_ms;
    double latency_stddev_ms = 0.0;
    double failure_probability = 0.0;
    double cost = 0.0;
    double payload_bytes = 0.0;

    bool operator==(const ProviderProfile&) const = default;
};

struct ServiceSpec
{
    std::string name;
    std::vector<ProviderProfile> providers;

    bool operator==(const ServiceSpec&) const = default;
};

enum class PropertyKind { Time, Data, Failure, Count, Constraint, Derived, Aggregated };

std::string_view to_string(PropertyKind kind);

struct PropertySpec
{
    std::string name;
    PropertyKind kind = PropertyKind::Time;

    // Data and Constraint: message field read at the block exit.
    std::string field;
    // Constraint: violated when !(field <op> threshold).
    std::string op;
    double threshold = 0.0;

    // Derived: registry function applied to the latest values of `args`.
    // Aggregated: registry function over the window of `base` samples.
    std::string function;
    std::vector<std::string> args;
    std::string base;
    // Aggregated base declared in place rather than by reference (0 or 1 entries).
    std::vector<PropertySpec> inline_base;
    std::optional<std::int64_t> window_ms;

    bool operator==(const PropertySpec&) const = default;
};

enum class Orientation { HigherIsBetter, LowerIsBetter };

struct TimeInterval
{
    // Empty means per_instance.
    std::optional<std::int64_t> window_ms;

    bool per_instance() const { return !window_ms.has_value(); }
    bool operator==(const TimeInterval&) const = default;
};

struct FuzzyMeasure
{
    Orientation orientation = Orientation::LowerIsBetter;
    double x1 = 0.0;
    double x2 = 0.0;
    TimeInterval interval;

    bool operator==(const FuzzyMeasure&) const = default;
};

struct QualityRequirement
{
    std::string target;
    PropertySpec property;
    FuzzyMeasure fuzzy;
    std::string trigger;

    bool operator==(const QualityRequirement&) const = default;
};

/// Satisfaction band of a requirement, ordered by badness.
enum class QualityLevel { Acceptable, Tolerable, Unacceptable };

std::string_view to_string(QualityLevel level);

enum class Severity { Soft, Hard };

std::string_view to_string(Severity severity);

struct Falsification
{
    Severity severity = Severity::Soft;
    std::string assumption;

    bool operator==(const Falsification&) const = default;
};

/// Trigger name raised when a hard falsification invalidates `assumption`.
std::string falsify_trigger(std::string_view assumption);

struct TacticInvocation
{
    std::string tactic;
    std::vector<std::string> args;
    std::vector<std::string> pre_assumptions;
    // Consequences specific to this option, on top of the plan-level ones.
    std::vector<Falsification> false_assumptions;

    bool operator==(const TacticInvocation&) const = default;
};

enum class FlowKind { Tactic, Alternative, Emit };

/// One step of a plan flow. A flow is an ordered sequence of steps.
struct FlowNode
{
    FlowKind kind = FlowKind::Tactic;
    TacticInvocation tactic;
    // Variations in priority order; each is itself a flow.
    std::vector<std::vector<FlowNode>> alternatives;
    std::string emit;

    bool operator==(const FlowNode&) const = default;
};

using PlanFlow = std::vector<FlowNode>;

struct AdaptationPlan
{
    std::string trigger;
    PlanFlow flow;
    std::vector<std::string> pre_assumptions;
    std::vector<Falsification> false_assumptions;

    bool operator==(const AdaptationPlan&) const = default;
};

enum class ScenarioAction {
    SetProviderFailure,
    SetProviderLatency,
    SetBandwidth,
    AssertAssumption,
    RetractAssumption,
    StartInstances,
};

std::string_view to_string(ScenarioAction action);

struct ScenarioEvent
{
    std::int64_t at_ms = 0;
    ScenarioAction action = ScenarioAction::StartInstances;
    // Provider id or assumption name.
    std::string target;
    // p | mean | bytes_per_ms | rate_per_s
    double value = 0.0;
    // stddev for SetProviderLatency.
    double value2 = 0.0;
    // SetBandwidth with no limit.
    bool unlimited = false;

    bool operator==(const ScenarioEvent&) const = default;
};

struct ScenarioScript
{
    std::uint64_t seed = 0;
    std::int64_t horizon_ms = 0;
    std::vector<ScenarioEvent> events;

    bool operator==(const ScenarioScript&) const = default;
};

struct AdaptiveProcessModel
{
    ProcessNode workflow;
    std::vector<ServiceSpec> services;
    std::vector<QualityRequirement> quality_requirements;
    std::vector<AdaptationPlan> adaptation_plans;
    std::optional<ScenarioScript> scenario;

    const ServiceSpec* find_service(std::string_view name) const;
    const ProviderProfile* find_provider(std::string_view id) const;

    bool operator==(const AdaptiveProcessModel&) const = default;
};

} // namespace adaptflow

#endif // ADAPTFLOW_MODEL_HPP
