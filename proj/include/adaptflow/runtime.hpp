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

#ifndef ADAPTFLOW_RUNTIME_HPP
#define ADAPTFLOW_RUNTIME_HPP

#include <cstdint>
#include <set>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "adaptflow/change_action.hpp"
#include "adaptflow/connector.hpp"
#include "adaptflow/context.hpp"
#include "adaptflow/model.hpp"

namespace adaptflow {

class TacticLibrary;
class Simulator;

enum class InterceptorEventKind { BlockEntry, BlockExit, Failure, Count, DataValue, ConstraintCheck };

std::string_view to_string(InterceptorEventKind kind);

struct InterceptorSpec
{
    std::string id;
    std::string connector_id;
    std::vector<InterceptorEventKind> kinds;

    bool emits(InterceptorEventKind kind) const;
    bool operator==(const InterceptorSpec&) const = default;
};

struct ServiceComponent
{
    std::string id;
    std::string sc_type;
    ProviderProfile provider;
    // Spare provider instance, not part of the workflow until a tactic binds it.
    bool standby = false;

    bool operator==(const ServiceComponent&) const = default;
};

struct ConnectorModel
{
    std::string id;
    ConnectorType type = ConnectorType::Simple;
    ConnectorConfig config;
    std::vector<InterceptorSpec> interceptors;

    bool operator==(const ConnectorModel&) const = default;
};

struct Binding
{
    std::string from;
    std::string to;

    bool operator==(const Binding&) const = default;
};

struct ProcessBlock
{
    std::string label;
    std::string start;
    std::string end;
    std::string path;

    bool operator==(const ProcessBlock&) const = default;
};

struct CheckpointModel
{
    std::string id;
    std::string property_name;
    PropertyKind kind = PropertyKind::Time;
    std::string block;
    std::vector<std::string> source_interceptors;
    // Derived/Aggregated: the properties this checkpoint consumes.
    std::vector<std::string> inputs;

    bool operator==(const CheckpointModel&) const = default;
};

struct EvaluationUnitModel
{
    std::string id;
    std::string property_name;
    FuzzyMeasure fuzzy;
    std::string trigger;
    std::string block;

    bool operator==(const EvaluationUnitModel&) const = default;
};

/// A plan step with tactic arguments bound to runtime ids. Names that are
/// not runtime entities (catalog services, delegates) pass through as is.
struct CompiledStep
{
    FlowKind kind = FlowKind::Tactic;
    TacticInvocation tactic;
    std::vector<std::vector<CompiledStep>> alternatives;
    std::string emit;

    bool operator==(const CompiledStep&) const = default;
};

struct AdaptationPattern
{
    std::string id;
    std::string trigger;
    std::vector<CompiledStep> compiled_flow;
    std::vector<std::string> pre_assumptions;
    std::vector<Falsification> false_assumptions;

    bool operator==(const AdaptationPattern&) const = default;
};

struct RuntimeModel
{
    std::vector<ServiceComponent> components;
    std::vector<ConnectorModel> connectors;
    std::vector<Binding> bindings;
    std::vector<ProcessBlock> process_blocks;
    std::vector<CheckpointModel> checkpoints;
    std::vector<EvaluationUnitModel> evaluation_units;
    std::vector<AdaptationPattern> adaptation_patterns;
    // Catalog used to bind components created by tactics.
    std::vector<ServiceSpec> catalog;
    // Source of fresh ids for tactic-created elements.
    std::uint64_t next_fresh = 0;

    const ServiceComponent* find_component(const std::string& id) const;
    const ConnectorModel* find_connector(const std::string& id) const;
    ConnectorModel* find_connector(const std::string& id);
    const ProcessBlock* find_block(const std::string& label) const;
    bool exists(const std::string& id) const { return find_component(id) || find_connector(id); }

    /// Outbound targets of `id` in positional order.
    std::vector<std::string> out_targets(const std::string& id) const;
    std::vector<std::string> in_sources(const std::string& id) const;

    bool operator==(const RuntimeModel&) const = default;
};

/// Builds the runtime adaptation layer from a validated model. Ids are
/// derived from node paths, so the result is deterministic.
RuntimeModel transform(const AdaptiveProcessModel& model);
RuntimeModel transform(const AdaptiveProcessModel& model, const TacticLibrary& tactics);

/// Enacts a batch on the runtime model, all-or-nothing.
void apply_to_runtime(RuntimeModel& runtime, std::span<const ChangeAction> batch);

/// Structural facts (components, types, connectors, bindings) of a runtime model.
ContextModel context_from_runtime(const RuntimeModel& runtime);

/// Components and connectors reachable from the block start without passing its end.
std::set<std::string> block_members(const RuntimeModel& runtime, const ProcessBlock& block);

/// Differences between the runtime model and the simulator's routing table.
/// An empty result means the two are causally connected.
std::vector<std::string> verify_causal_connection(const RuntimeModel& runtime, const Simulator& sim);

nlohmann::ordered_json to_json(const RuntimeModel& runtime);

} // namespace adaptflow

#endif // ADAPTFLOW_RUNTIME_HPP
