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

#include "adaptflow/qos.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "adaptflow/errors.hpp"

namespace adaptflow {

QualityLevel classify(const FuzzyMeasure& fm, double value)
{
    if (fm.orientation == Orientation::LowerIsBetter) {
        if (value < fm.x1)
            return QualityLevel::Acceptable;
        return value <= fm.x2 ? QualityLevel::Tolerable : QualityLevel::Unacceptable;
    }
    if (value > fm.x2)
        return QualityLevel::Acceptable;
    return value >= fm.x1 ? QualityLevel::Tolerable : QualityLevel::Unacceptable;
}

double badness(const FuzzyMeasure& fm, double value)
{
    switch (classify(fm, value)) {
    case QualityLevel::Acceptable: return 0.0;
    case QualityLevel::Unacceptable: return 1.0;
    case QualityLevel::Tolerable: break;
    }
    double width = fm.x2 - fm.x1;
    if (width <= 0.0)
        return 0.5;
    double d = fm.orientation == Orientation::LowerIsBetter ? (value - fm.x1) / width : (fm.x2 - value) / width;
    return std::clamp(d, 0.0, 1.0);
}

std::optional<double> MessageFields::get(std::string_view field) const
{
    if (field == "payload_bytes")
        return payload_bytes;
    if (field == "elapsed_ms")
        return elapsed_ms;
    if (field == "battery")
        return battery;
    if (field == "memory")
        return memory;
    return std::nullopt;
}

namespace {

bool compare(double lhs, const std::string& op, double rhs)
{
    if (op == "<")
        return lhs < rhs;
    if (op == "<=")
        return lhs <= rhs;
    if (op == ">")
        return lhs > rhs;
    if (op == ">=")
        return lhs >= rhs;
    if (op == "==")
        return lhs == rhs;
    if (op == "!=")
        return lhs != rhs;
    return false;
}

std::string base_name(const PropertySpec& spec)
{
    return spec.inline_base.empty() ? spec.base : spec.inline_base.front().name;
}

} // namespace

Checkpoint::Checkpoint(CheckpointModel model, PropertySpec spec) : model_(std::move(model)), spec_(std::move(spec)) { }

bool Checkpoint::listens_to(const std::string& interceptor_id) const
{
    return std::find(model_.source_interceptors.begin(), model_.source_interceptors.end(), interceptor_id)
           != model_.source_interceptors.end();
}

bool Checkpoint::consumes(const std::string& property_name) const
{
    return std::find(model_.inputs.begin(), model_.inputs.end(), property_name) != model_.inputs.end();
}

std::optional<Measurement> Checkpoint::ingest(const InterceptorEvent& e)
{
    auto out = [&](double v) { return Measurement{spec_.name, v, e.instance_id, e.time_ms}; };
    switch (spec_.kind) {
    case PropertyKind::Time:
        if (e.kind == InterceptorEventKind::BlockEntry) {
            pending_[e.instance_id] = e.time_ms;
        } else if (e.kind == InterceptorEventKind::BlockExit) {
            auto it = pending_.find(e.instance_id);
            if (it == pending_.end()) {
                ++orphans_;
                return std::nullopt;
            }
            double rt = static_cast<double>(e.time_ms - it->second);
            pending_.erase(it);
            return out(rt);
        }
        return std::nullopt;
    case PropertyKind::Failure:
        if (e.kind == InterceptorEventKind::BlockEntry) {
            pending_[e.instance_id] = e.time_ms;
            return std::nullopt;
        }
        if (e.kind == InterceptorEventKind::BlockExit || e.kind == InterceptorEventKind::Failure) {
            auto it = pending_.find(e.instance_id);
            if (it == pending_.end()) {
                ++orphans_;
                return std::nullopt;
            }
            pending_.erase(it);
            return out(e.kind == InterceptorEventKind::Failure ? 1.0 : 0.0);
        }
        return std::nullopt;
    case PropertyKind::Count:
        if (e.kind != InterceptorEventKind::Count)
            return std::nullopt;
        count_ += 1.0;
        return out(count_);
    case PropertyKind::Data:
        if (e.kind != InterceptorEventKind::DataValue)
            return std::nullopt;
        if (auto v = e.fields.get(spec_.field))
            return out(*v);
        return std::nullopt;
    case PropertyKind::Constraint:
        if (e.kind != InterceptorEventKind::ConstraintCheck)
            return std::nullopt;
        if (auto v = e.fields.get(spec_.field))
            return out(compare(*v, spec_.op, spec_.threshold) ? 0.0 : 1.0);
        return std::nullopt;
    default: return std::nullopt;
    }
}

std::optional<Measurement> Checkpoint::ingest(const Measurement& base)
{
    if (spec_.kind == PropertyKind::Derived) {
        if (std::find(spec_.args.begin(), spec_.args.end(), base.property_name) == spec_.args.end())
            return std::nullopt;
        latest_inputs_[base.property_name] = base.value;
        std::vector<double> args;
        for (const auto& a : spec_.args) {
            auto it = latest_inputs_.find(a);
            if (it == latest_inputs_.end())
                return std::nullopt;
            args.push_back(it->second);
        }
        return Measurement{spec_.name, apply_derived(spec_.function, args), base.instance_id, base.sim_time_ms};
    }
    if (spec_.kind == PropertyKind::Aggregated) {
        if (base.property_name != base_name(spec_))
            return std::nullopt;
        window_.emplace_back(base.sim_time_ms, base.value);
        if (spec_.window_ms)
            while (!window_.empty() && window_.front().first <= base.sim_time_ms - *spec_.window_ms)
                window_.pop_front();
        std::vector<double> samples;
        samples.reserve(window_.size());
        for (const auto& s : window_)
            samples.push_back(s.second);
        return Measurement{spec_.name, aggregate(spec_.function, samples), base.instance_id, base.sim_time_ms};
    }
    return std::nullopt;
}

void Checkpoint::drop_pending()
{
    orphans_ += pending_.size();
    pending_.clear();
}

EvaluationUnit::EvaluationUnit(EvaluationUnitModel model) : model_(std::move(model)) { }

std::optional<double> EvaluationUnit::current_value() const
{
    if (model_.fuzzy.interval.per_instance())
        return latest_;
    if (window_.empty())
        return std::nullopt;
    double sum = 0.0;
    for (const auto& s : window_)
        sum += s.second;
    return sum / static_cast<double>(window_.size());
}

std::optional<TriggerEvent> EvaluationUnit::evaluate(const Measurement& m)
{
    latest_ = m.value;
    if (auto w = model_.fuzzy.interval.window_ms) {
        window_.emplace_back(m.sim_time_ms, m.value);
        while (!window_.empty() && window_.front().first <= m.sim_time_ms - *w)
            window_.pop_front();
    }
    QualityLevel next = classify(model_.fuzzy, *current_value());
    QualityLevel prev = level_;
    level_ = next;
    if (static_cast<int>(next) <= static_cast<int>(prev) || model_.trigger.empty())
        return std::nullopt;
    Severity sev = next == QualityLevel::Unacceptable ? Severity::Hard : Severity::Soft;
    return TriggerEvent{model_.trigger, sev, model_.property_name, m.sim_time_ms};
}

namespace {

double mean(std::span<const double> xs)
{
    return xs.empty() ? 0.0 : std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

double min_of(std::span<const double> xs)
{
    return xs.empty() ? 0.0 : *std::min_element(xs.begin(), xs.end());
}

double max_of(std::span<const double> xs)
{
    return xs.empty() ? 0.0 : *std::max_element(xs.begin(), xs.end());
}

} // namespace

bool is_derived_function(std::string_view name)
{
    return name == "sum" || name == "difference" || name == "product" || name == "quotient" || name == "avg"
           || name == "min" || name == "max";
}

double apply_derived(std::string_view name, std::span<const double> args)
{
    if (name == "sum")
        return std::accumulate(args.begin(), args.end(), 0.0);
    if (name == "difference")
        return args.empty() ? 0.0 : std::accumulate(args.begin() + 1, args.end(), args[0], std::minus<>());
    if (name == "product")
        return std::accumulate(args.begin(), args.end(), 1.0, std::multiplies<>());
    if (name == "quotient") {
        if (args.size() < 2 || args[1] == 0.0)
            return 0.0;
        return args[0] / args[1];
    }
    if (name == "avg")
        return mean(args);
    if (name == "min")
        return min_of(args);
    if (name == "max")
        return max_of(args);
    throw Error("unknown derived function '" + std::string(name) + "'");
}

bool is_aggregation_function(std::string_view name)
{
    return name == "ratio" || name == "sum" || name == "avg" || name == "min" || name == "max" || name == "count";
}

double aggregate(std::string_view name, std::span<const double> samples)
{
    if (name == "ratio") {
        if (samples.empty())
            return 1.0;
        auto ok = std::count(samples.begin(), samples.end(), 0.0);
        return static_cast<double>(ok) / static_cast<double>(samples.size());
    }
    if (name == "sum")
        return std::accumulate(samples.begin(), samples.end(), 0.0);
    if (name == "avg")
        return mean(samples);
    if (name == "min")
        return min_of(samples);
    if (name == "max")
        return max_of(samples);
    if (name == "count")
        return static_cast<double>(samples.size());
    throw Error("unknown aggregation '" + std::string(name) + "'");
}

StructuralQoS structural_qos(const ProcessNode& node, const LeafValues& leaves)
{
    switch (node.kind) {
    case NodeKind::Service: {
        auto it = leaves.find(node.service);
        if (it == leaves.end())
            throw MissingLeafValue(node.service);
        return it->second;
    }
    case NodeKind::Seq: {
        StructuralQoS q;
        for (const auto& c : node.children) {
            StructuralQoS x = structural_qos(c, leaves);
            q.response_time += x.response_time;
            q.cost += x.cost;
            q.availability *= x.availability;
            q.reliability *= x.reliability;
        }
        return q;
    }
    case NodeKind::AndPar: {
        StructuralQoS q;
        for (const auto& c : node.children) {
            StructuralQoS x = structural_qos(c, leaves);
            q.response_time = std::max(q.response_time, x.response_time);
            q.cost += x.cost;
            q.availability *= x.availability;
            q.reliability *= x.reliability;
        }
        return q;
    }
    case NodeKind::Loop: {
        StructuralQoS x = structural_qos(node.children.at(0), leaves);
        double k = node.iterations;
        return {k * x.response_time, k * x.cost, std::pow(x.availability, k), std::pow(x.reliability, k)};
    }
    case NodeKind::Sel: {
        StructuralQoS q{0.0, 0.0, 0.0, 0.0};
        for (std::size_t i = 0; i < node.children.size(); ++i) {
            StructuralQoS x = structural_qos(node.children[i], leaves);
            double p = node.probabilities.at(i);
            q.response_time += p * x.response_time;
            q.cost += p * x.cost;
            q.availability += p * x.availability;
            q.reliability += p * x.reliability;
        }
        return q;
    }
    case NodeKind::Opt: {
        StructuralQoS x = structural_qos(node.children.at(0), leaves);
        double p = node.probabilities.empty() ? kDefaultOptProbability : node.probabilities[0];
        return {p * x.response_time, p * x.cost, p * x.availability + (1.0 - p), p * x.reliability + (1.0 - p)};
    }
    }
    return {};
}

LeafValues catalog_leaf_values(const AdaptiveProcessModel& model)
{
    LeafValues leaves;
    for (const auto& s : model.services) {
        if (s.providers.empty() || !s.providers.front().latency_mean_ms)
            continue;
        const auto& p = s.providers.front();
        double a = 1.0 - p.failure_probability;
        leaves[s.name] = {*p.latency_mean_ms, p.cost, a, a};
    }
    return leaves;
}

} // namespace adaptflow
