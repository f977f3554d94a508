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

#ifndef ADAPTFLOW_QOS_HPP
#define ADAPTFLOW_QOS_HPP

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "adaptflow/model.hpp"
#include "adaptflow/runtime.hpp"

namespace adaptflow {

/*
    Fuzzy evaluation.

    Bands for orientation '-': value < x1 acceptable, x1 <= value <= x2
    tolerable, value > x2 unacceptable. Orientation '+' mirrors this. The
    tolerable band is closed at both ends.
 */
QualityLevel classify(const FuzzyMeasure& fm, double value);

/// Degree of badness in [0, 1]: 0 inside the acceptable band, a linear ramp
/// across the tolerable band, 1 beyond it. A degenerate band (x1 == x2) is a step.
double badness(const FuzzyMeasure& fm, double value);

struct Measurement
{
    std::string property_name;
    double value = 0.0;
    std::uint64_t instance_id = 0;
    std::int64_t sim_time_ms = 0;

    bool operator==(const Measurement&) const = default;
};

/// Fields an interceptor reads off the message passing its connector.
struct MessageFields
{
    double payload_bytes = 0.0;
    double elapsed_ms = 0.0;
    double battery = 0.0;
    double memory = 0.0;

    std::optional<double> get(std::string_view field) const;
};

struct InterceptorEvent
{
    std::string interceptor_id;
    std::string connector_id;
    InterceptorEventKind kind = InterceptorEventKind::BlockEntry;
    std::uint64_t instance_id = 0;
    std::int64_t time_ms = 0;
    MessageFields fields;
};

struct TriggerEvent
{
    std::string trigger_name;
    Severity severity = Severity::Soft;
    // Property name of the requirement that fired; empty for chained triggers.
    std::string source_qr;
    std::int64_t sim_time_ms = 0;

    bool operator==(const TriggerEvent&) const = default;
};

/// Accumulates interceptor events (or base measurements) into values of one property.
class Checkpoint
{
public:
    Checkpoint(CheckpointModel model, PropertySpec spec);

    const CheckpointModel& model() const { return model_; }
    const PropertySpec& spec() const { return spec_; }

    bool listens_to(const std::string& interceptor_id) const;
    bool consumes(const std::string& property_name) const;

    /// Basic properties. Exit-without-entry events are dropped and counted.
    std::optional<Measurement> ingest(const InterceptorEvent& event);
    /// Derived and Aggregated properties.
    std::optional<Measurement> ingest(const Measurement& base);

    /// Forget open block entries, e.g. after an interceptor is removed.
    void drop_pending();
    std::size_t orphan_events() const { return orphans_; }
    std::size_t pending() const { return pending_.size(); }

private:
    CheckpointModel model_;
    PropertySpec spec_;
    std::map<std::uint64_t, std::int64_t> pending_;
    std::map<std::string, double> latest_inputs_;
    std::deque<std::pair<std::int64_t, double>> window_;
    double count_ = 0.0;
    std::size_t orphans_ = 0;
};

/// Runtime form of a fuzzy measure attached to one property.
class EvaluationUnit
{
public:
    explicit EvaluationUnit(EvaluationUnitModel model);

    const EvaluationUnitModel& model() const { return model_; }
    QualityLevel level() const { return level_; }

    /// Value the fuzzy measure currently classifies: the latest sample, or the
    /// mean over the sliding window.
    std::optional<double> current_value() const;

    /// Updates the classification; fires soft on entering tolerable and hard on
    /// entering unacceptable. Staying in a band or improving fires nothing.
    std::optional<TriggerEvent> evaluate(const Measurement& m);

private:
    EvaluationUnitModel model_;
    QualityLevel level_ = QualityLevel::Acceptable;
    std::deque<std::pair<std::int64_t, double>> window_;
    std::optional<double> latest_;
};

/// Registry of derived-property functions over the latest argument values.
bool is_derived_function(std::string_view name);
double apply_derived(std::string_view name, std::span<const double> args);

/// Aggregations over a window of samples. "ratio" is the fraction of zero
/// samples, i.e. the success ratio of a failure stream.
bool is_aggregation_function(std::string_view name);
double aggregate(std::string_view name, std::span<const double> samples);

struct StructuralQoS
{
    double response_time = 0.0;
    double cost = 0.0;
    double availability = 1.0;
    double reliability = 1.0;

    bool operator==(const StructuralQoS&) const = default;
};

using LeafValues = std::map<std::string, StructuralQoS>;

/// Bottom-up aggregation per process structure: sums and products for
/// sequences, powers for loops, probability-weighted sums for selections,
/// max time for and-parallel. Throws MissingLeafValue.
StructuralQoS structural_qos(const ProcessNode& node, const LeafValues& leaves);

/// Leaf values from each service's first provider; services lacking a
/// latency are omitted so that analysis of them fails by name.
LeafValues catalog_leaf_values(const AdaptiveProcessModel& model);

} // namespace adaptflow

#endif // ADAPTFLOW_QOS_HPP
