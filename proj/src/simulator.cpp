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

#include "adaptflow/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "adaptflow/errors.hpp"
#include "adaptflow/trace.hpp"

namespace adaptflow {

double Rng::uniform()
{
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

// Box-Muller, one draw per call.
double Rng::normal(double mean, double stddev)
{
    if (stddev <= 0.0)
        return mean;
    double u1 = uniform();
    double u2 = uniform();
    if (u1 < 1e-300)
        u1 = 1e-300;
    return mean + stddev * std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

Simulator::Simulator(const RuntimeModel& runtime, const ScenarioScript& scenario, SimOptions options)
    : horizon_(scenario.horizon_ms), rng_(scenario.seed), options_(options)
{
    for (const auto& s : runtime.catalog)
        for (const auto& p : s.providers)
            providers_.emplace(p.id, p);
    for (const auto& c : runtime.components) {
        providers_.emplace(c.provider.id, c.provider);
        SimNode n;
        n.id = c.id;
        n.is_component = true;
        n.sc_type = c.sc_type;
        n.provider = c.provider.id;
        nodes_[c.id] = std::move(n);
    }
    for (const auto& c : runtime.connectors) {
        SimNode n;
        n.id = c.id;
        n.type = c.type;
        n.config = c.config;
        n.interceptors = c.interceptors;
        nodes_[c.id] = std::move(n);
    }
    for (const auto& b : runtime.bindings)
        if (auto it = nodes_.find(b.from); it != nodes_.end())
            it->second.outs.push_back(b.to);
    if (const ProcessBlock* root = runtime.find_block(std::string(kRootLabel))) {
        root_start_ = root->start;
        root_end_ = root->end;
    }
    scenario_events_ = scenario.events;
    for (std::size_t i = 0; i < scenario_events_.size(); ++i) {
        Event e;
        e.time = scenario_events_[i].at_ms;
        e.kind = EventKind::Scenario;
        e.index = i;
        schedule(std::move(e));
    }
}

std::int64_t Simulator::next_event_time() const
{
    return queue_.empty() ? std::numeric_limits<std::int64_t>::max() : queue_.top().time;
}

void Simulator::schedule(Event event)
{
    event.seq = seq_++;
    queue_.push(std::move(event));
}

bool Simulator::step()
{
    if (queue_.empty())
        return false;
    Event e = queue_.top();
    queue_.pop();
    now_ = std::max(now_, e.time);
    process(e);
    return true;
}

void Simulator::run_until(std::int64_t t)
{
    while (!queue_.empty() && queue_.top().time <= t)
        step();
    now_ = std::max(now_, t);
}

void Simulator::drain()
{
    draining_ = true;
    while (step()) { }
    for (auto& [id, inst] : instances_)
        if (!inst.done)
            fail_instance(id, {}, "unfinished at end of run");
    held_.clear();
}

void Simulator::process(Event& e)
{
    switch (e.kind) {
    case EventKind::Arrive: arrive(e.node, std::move(e.token)); break;
    case EventKind::ServiceDone: service_done(e.node, std::move(e.token)); break;
    case EventKind::Scenario: apply_scenario(scenario_events_[e.index]); break;
    case EventKind::Launch:
        if (e.generation != launch_generation_ || draining_ || now_ >= horizon_ || arrival_rate_ <= 0.0)
            break;
        launch_instance();
        {
            Event next;
            next.time = now_ + std::max<std::int64_t>(1, std::llround(1000.0 / arrival_rate_));
            next.kind = EventKind::Launch;
            next.generation = launch_generation_;
            schedule(std::move(next));
        }
        break;
    }
}

std::uint64_t Simulator::launch_instance()
{
    std::uint64_t id = next_instance_++;
    instances_[id].start_ms = now_;
    ++launched_;
    Event e;
    e.time = now_;
    e.kind = EventKind::Arrive;
    e.node = root_start_;
    e.token.instance = id;
    schedule(std::move(e));
    return id;
}

void Simulator::set_arrival_rate(double rate_per_s)
{
    arrival_rate_ = rate_per_s;
    ++launch_generation_;
    if (rate_per_s <= 0.0)
        return;
    Event e;
    e.time = now_;
    e.kind = EventKind::Launch;
    e.generation = launch_generation_;
    schedule(std::move(e));
}

SimNode* Simulator::find_node(const std::string& id)
{
    auto it = nodes_.find(id);
    return it == nodes_.end() ? nullptr : &it->second;
}

const ProviderProfile* Simulator::provider(const std::string& id) const
{
    auto it = providers_.find(id);
    return it == providers_.end() ? nullptr : &it->second;
}

void Simulator::trace(std::string_view kind, nlohmann::ordered_json fields)
{
    if (trace_)
        trace_->emit(now_, kind, std::move(fields));
}

void Simulator::arrive(const std::string& node_id, Token token)
{
    auto inst_it = instances_.find(token.instance);
    if (inst_it == instances_.end() || inst_it->second.done)
        return;
    Instance& inst = inst_it->second;
    auto node_it = nodes_.find(node_id);
    if (node_it == nodes_.end()) {
        fail_instance(token.instance, node_id, "no route to '" + node_id + "'");
        return;
    }
    // Copy: routing may change while the token is being handled.
    const SimNode node = node_it->second;

    if (node.is_component) {
        const ProviderProfile* p = provider(node.provider);
        double mean = p && p->latency_mean_ms ? *p->latency_mean_ms : 0.0;
        double sd = p ? p->latency_stddev_ms : 0.0;
        auto latency = std::max<std::int64_t>(0, std::llround(rng_.normal(mean, sd)));
        bool failed = p && rng_.bernoulli(p->failure_probability);
        double cost = p ? p->cost : 0.0;
        inst.cost += cost;
        total_cost_ += cost;
        trace("invoke", {{"instance", token.instance},
                         {"component", node.id},
                         {"provider", node.provider},
                         {"latency_ms", latency},
                         {"failed", failed}});
        token.failed = failed;
        Event e;
        e.time = now_ + latency;
        e.kind = EventKind::ServiceDone;
        e.node = node.id;
        e.token = std::move(token);
        schedule(std::move(e));
        return;
    }

    using CT = ConnectorType;
    if (token.failed && node.type != CT::ParallelIn && node.type != CT::SerialIn && node.type != CT::Condition) {
        fail_instance(token.instance, node.id, "service '" + token.from + "' failed");
        return;
    }
    if (!token.failed)
        run_interceptors(node, token, false);

    switch (node.type) {
    case CT::BlockStart:
        inst.open_blocks.insert(node.id);
        forward_first(node, std::move(token));
        break;
    case CT::BlockEnd:
        if (auto it = inst.open_blocks.find(node.config.partner); it != inst.open_blocks.end())
            inst.open_blocks.erase(it);
        if (node.id == root_end_) {
            complete_instance(token.instance);
            break;
        }
        forward_first(node, std::move(token));
        break;
    case CT::SelOut: {
        if (node.outs.empty()) {
            fail_instance(token.instance, node.id, "connector '" + node.id + "' has no outbound binding");
            break;
        }
        double total = 0.0;
        for (std::size_t i = 0; i < node.outs.size(); ++i)
            total += i < node.config.weights.size() ? node.config.weights[i] : 0.0;
        double u = rng_.uniform() * total;
        std::size_t pick = node.outs.size() - 1;
        double acc = 0.0;
        for (std::size_t i = 0; i < node.outs.size(); ++i) {
            acc += i < node.config.weights.size() ? node.config.weights[i] : 0.0;
            if (u < acc) {
                pick = i;
                break;
            }
        }
        dispatch(node, node.outs[pick], std::move(token), 0);
        break;
    }
    case CT::ParOut:
    case CT::ParallelOut:
        if (node.outs.empty()) {
            fail_instance(token.instance, node.id, "connector '" + node.id + "' has no outbound binding");
            break;
        }
        inst.joins[node.config.partner] = {node.outs.size(), 0, false};
        for (const auto& out : node.outs)
            dispatch(node, out, token, 0);
        break;
    case CT::ParIn: {
        JoinState& j = inst.joins[node.id];
        ++j.arrived;
        if (j.arrived >= j.expected) {
            inst.joins.erase(node.id);
            forward_first(node, std::move(token));
        }
        break;
    }
    case CT::ParallelIn: {
        JoinState& j = inst.joins[node.id];
        ++j.arrived;
        if (!token.failed && !j.forwarded) {
            j.forwarded = true;
            forward_first(node, std::move(token));
        } else if (j.arrived >= j.expected && !j.forwarded) {
            fail_instance(token.instance, node.id, "every branch failed");
        }
        break;
    }
    case CT::SerialOut:
        if (node.outs.empty()) {
            fail_instance(token.instance, node.id, "connector '" + node.id + "' has no outbound binding");
            break;
        }
        dispatch(node, node.outs[0], std::move(token), 0);
        break;
    case CT::SerialIn: {
        if (!token.failed) {
            forward_first(node, std::move(token));
            break;
        }
        const SimNode* out = find_node(node.config.partner);
        if (out && out->outs.size() > 1 && token.from == out->outs[0]) {
            token.failed = false;
            dispatch(*out, out->outs[1], std::move(token), 0);
        } else {
            fail_instance(token.instance, node.id, "primary and fallback failed");
        }
        break;
    }
    case CT::Condition: {
        int& attempts = inst.attempts[node.id];
        if (!token.failed) {
            attempts = 0;
            if (node.outs.size() < 2) {
                fail_instance(token.instance, node.id, "connector '" + node.id + "' has no continuation");
                break;
            }
            dispatch(node, node.outs[1], std::move(token), 0);
            break;
        }
        ++attempts;
        if (attempts < static_cast<int>(node.config.param("cap", 5.0)) && !node.outs.empty()) {
            token.failed = false;
            dispatch(node, node.outs[0], std::move(token), 0);
        } else {
            attempts = 0;
            fail_instance(token.instance, node.id, "retry cap reached");
        }
        break;
    }
    case CT::LoopOut: {
        int& count = inst.loop_counts[node.id];
        ++count;
        auto k = static_cast<int>(node.config.param("iterations", 1.0));
        if (count < k && !node.outs.empty()) {
            dispatch(node, node.outs[0], std::move(token), 0);
        } else {
            count = 0;
            if (node.outs.size() < 2) {
                fail_instance(token.instance, node.id, "connector '" + node.id + "' has no loop exit");
                break;
            }
            dispatch(node, node.outs[1], std::move(token), 0);
        }
        break;
    }
    case CT::CompressorOut:
    case CT::CompressorIn: {
        double ratio = node.config.param("ratio", 1.0);
        if (node.type == CT::CompressorOut)
            token.payload *= ratio;
        else if (ratio > 0.0)
            token.payload /= ratio;
        double b = node.config.param("battery_per_message", 0.0);
        inst.battery += b;
        battery_ += b;
        forward_first(node, std::move(token), std::llround(node.config.param("cpu_ms", 0.0)));
        break;
    }
    case CT::DataModifierOut:
    case CT::DataModifierIn: {
        double scale = node.config.param("scale", 1.0);
        if (node.type == CT::DataModifierOut)
            token.payload *= scale;
        else if (scale > 0.0)
            token.payload /= scale;
        forward_first(node, std::move(token), std::llround(node.config.param("cpu_ms", 0.0)));
        break;
    }
    case CT::CacheElement: {
        if (node.outs.size() < 2) {
            fail_instance(token.instance, node.id, "connector '" + node.id + "' has no bypass");
            break;
        }
        if (rng_.bernoulli(node.config.param("hit_ratio", 0.5))) {
            dispatch(node, node.outs[1], std::move(token), 0);
        } else {
            double m = node.config.param("memory_per_message", 0.0);
            inst.memory += m;
            memory_ += m;
            dispatch(node, node.outs[0], std::move(token), 0);
        }
        break;
    }
    case CT::Queue: {
        double m = node.config.param("memory_per_message", 0.0);
        inst.memory += m;
        memory_ += m;
        if (bandwidth_ <= 0.0)
            held_[node.id].push_back(std::move(token));
        else
            forward_first(node, std::move(token));
        break;
    }
    default: forward_first(node, std::move(token)); break;
    }
}

void Simulator::service_done(const std::string& node_id, Token token)
{
    auto inst_it = instances_.find(token.instance);
    if (inst_it == instances_.end() || inst_it->second.done)
        return;
    auto it = nodes_.find(node_id);
    if (it == nodes_.end()) {
        fail_instance(token.instance, node_id, "component '" + node_id + "' was removed");
        return;
    }
    const SimNode node = it->second;
    const ProviderProfile* p = provider(node.provider);
    token.payload = p ? p->payload_bytes : 0.0;
    token.charged = false;
    token.from = node.id;
    if (node.outs.empty()) {
        fail_instance(token.instance, node.id, "component '" + node.id + "' has no outbound binding");
        return;
    }
    dispatch(node, node.outs[0], std::move(token), 0);
}

void Simulator::dispatch(const SimNode& from, const std::string& to, Token token, std::int64_t delay)
{
    auto it = nodes_.find(to);
    if (it == nodes_.end()) {
        fail_instance(token.instance, from.id, "no route to '" + to + "'");
        return;
    }
    const SimNode& target = it->second;
    bool sender_side = !target.is_component && is_sender_side(target.type);
    if (!token.failed && !from.is_component && !sender_side && !token.charged && token.payload > 0.0) {
        if (bandwidth_ <= 0.0) {
            fail_instance(token.instance, from.id, "message lost: link down");
            return;
        }
        delay += std::llround(token.payload / bandwidth_);
        token.charged = true;
    }
    if (from.is_component)
        token.from = from.id;
    Event e;
    e.time = now_ + delay;
    e.kind = EventKind::Arrive;
    e.node = to;
    e.token = std::move(token);
    schedule(std::move(e));
}

void Simulator::forward_first(const SimNode& node, Token token, std::int64_t delay)
{
    if (node.outs.empty()) {
        fail_instance(token.instance, node.id, "connector '" + node.id + "' has no outbound binding");
        return;
    }
    dispatch(node, node.outs[0], std::move(token), delay);
}

void Simulator::run_interceptors(const SimNode& node, const Token& token, bool include_failure)
{
    for (const auto& spec : node.interceptors)
        for (auto kind : spec.kinds)
            if ((kind == InterceptorEventKind::Failure) == include_failure)
                emit_interceptor(spec, kind, token);
}

void Simulator::emit_interceptor(const InterceptorSpec& spec, InterceptorEventKind kind, const Token& token)
{
    InterceptorEvent e;
    e.interceptor_id = spec.id;
    e.connector_id = spec.connector_id;
    e.kind = kind;
    e.instance_id = token.instance;
    e.time_ms = now_;
    e.fields.payload_bytes = token.payload;
    if (auto it = instances_.find(token.instance); it != instances_.end()) {
        e.fields.elapsed_ms = static_cast<double>(now_ - it->second.start_ms);
        e.fields.battery = it->second.battery;
        e.fields.memory = it->second.memory;
    }
    interceptor_events_.push_back(std::move(e));
}

void Simulator::complete_instance(std::uint64_t id)
{
    Instance& inst = instances_.at(id);
    if (inst.done)
        return;
    inst.done = true;
    ++completed_;
    trace("complete", {{"instance", id}, {"elapsed_ms", now_ - inst.start_ms}});
    if (options_.record_instances)
        records_.push_back({id, inst.start_ms, now_, true, inst.cost});
}

void Simulator::fail_instance(std::uint64_t id, const std::string& node, const std::string& reason)
{
    auto it = instances_.find(id);
    if (it == instances_.end() || it->second.done)
        return;
    Instance& inst = it->second;
    inst.done = true;
    ++failed_;
    Token token;
    token.instance = id;
    for (const auto& start : inst.open_blocks)
        if (auto n = nodes_.find(start); n != nodes_.end())
            run_interceptors(n->second, token, true);
    nlohmann::ordered_json fields{{"instance", id}, {"reason", reason}};
    if (!node.empty())
        fields["node"] = node;
    trace("fail", std::move(fields));
    if (options_.record_instances)
        records_.push_back({id, inst.start_ms, now_, false, inst.cost});
}

void Simulator::apply_scenario(const ScenarioEvent& ev)
{
    nlohmann::ordered_json fields{{"action", to_string(ev.action)}};
    if (!ev.target.empty())
        fields["target"] = ev.target;
    switch (ev.action) {
    case ScenarioAction::SetProviderFailure:
        if (auto it = providers_.find(ev.target); it != providers_.end())
            it->second.failure_probability = ev.value;
        fields["p"] = ev.value;
        break;
    case ScenarioAction::SetProviderLatency:
        if (auto it = providers_.find(ev.target); it != providers_.end()) {
            it->second.latency_mean_ms = ev.value;
            it->second.latency_stddev_ms = ev.value2;
        }
        fields["mean"] = ev.value;
        fields["stddev"] = ev.value2;
        break;
    case ScenarioAction::SetBandwidth:
        bandwidth_ = ev.unlimited ? std::numeric_limits<double>::infinity() : ev.value;
        if (ev.unlimited)
            fields["bytes_per_ms"] = "unlimited";
        else
            fields["bytes_per_ms"] = ev.value;
        break;
    case ScenarioAction::AssertAssumption: assumption_updates_.emplace_back(ev.target, true); break;
    case ScenarioAction::RetractAssumption: assumption_updates_.emplace_back(ev.target, false); break;
    case ScenarioAction::StartInstances: fields["rate_per_s"] = ev.value; break;
    }
    trace("scenario_event", std::move(fields));
    if (ev.action == ScenarioAction::StartInstances)
        set_arrival_rate(ev.value);
    if (ev.action == ScenarioAction::SetBandwidth && bandwidth_ > 0.0)
        drain_queues();
}

void Simulator::drain_queues()
{
    auto held = std::move(held_);
    held_.clear();
    for (auto& [id, tokens] : held) {
        auto it = nodes_.find(id);
        for (auto& t : tokens) {
            if (it == nodes_.end())
                fail_instance(t.instance, id, "queue '" + id + "' was removed");
            else
                forward_first(it->second, std::move(t));
        }
    }
}

std::vector<InterceptorEvent> Simulator::take_interceptor_events()
{
    return std::exchange(interceptor_events_, {});
}

std::vector<std::pair<std::string, bool>> Simulator::take_assumption_updates()
{
    return std::exchange(assumption_updates_, {});
}

namespace {

bool excluded(const std::vector<std::string>& except, const std::string& id)
{
    return std::find(except.begin(), except.end(), id) != except.end();
}

} // namespace

void Simulator::configure(std::span<const ChangeAction> batch)
{
    using K = ChangeAction::Kind;
    std::map<std::string, SimNode> next = nodes_;
    auto require = [&](const std::string& id, const ChangeAction& a) -> SimNode& {
        auto it = next.find(id);
        if (it == next.end())
            throw DanglingReference("'" + id + "' does not exist (" + to_string(a) + ")");
        return it->second;
    };
    auto link = [&](SimNode& from, const std::string& to) {
        const SimNode& target = next.at(to);
        if (from.is_component && target.is_component)
            throw TypeError("components '" + from.id + "' and '" + to + "' can only be bound through a connector");
        if (std::find(from.outs.begin(), from.outs.end(), to) != from.outs.end())
            throw DuplicateBinding("'" + from.id + "' is already bound to '" + to + "'");
        from.outs.push_back(to);
    };
    auto bound = [&](const std::string& id) {
        if (!next.at(id).outs.empty())
            return true;
        return std::any_of(next.begin(), next.end(), [&](const auto& kv) {
            const auto& o = kv.second.outs;
            return std::find(o.begin(), o.end(), id) != o.end();
        });
    };
    // First outbound of each removed queue, looked up before the batch.
    std::map<std::string, std::string> removed_queues;

    for (const auto& a : batch) {
        switch (a.kind) {
        case K::AddConnector: {
            if (next.count(a.id))
                throw DuplicateBinding("'" + a.id + "' already exists");
            SimNode n;
            n.id = a.id;
            n.type = a.con_type;
            n.config = a.config;
            next[a.id] = std::move(n);
            break;
        }
        case K::RemoveConnector: {
            SimNode& n = require(a.id, a);
            if (n.is_component)
                throw TypeError("'" + a.id + "' is not a connector");
            if (bound(a.id))
                throw DanglingReference("connector '" + a.id + "' still has bindings");
            auto old = nodes_.find(a.id);
            removed_queues[a.id] = old != nodes_.end() && !old->second.outs.empty() ? old->second.outs[0] : "";
            next.erase(a.id);
            break;
        }
        case K::AddComponent: {
            if (next.count(a.id))
                throw DuplicateBinding("'" + a.id + "' already exists");
            if (!providers_.count(a.provider))
                throw DanglingReference("no provider '" + a.provider + "' for service '" + a.sc_type + "'");
            SimNode n;
            n.id = a.id;
            n.is_component = true;
            n.sc_type = a.sc_type;
            n.provider = a.provider;
            next[a.id] = std::move(n);
            break;
        }
        case K::RemoveComponent: {
            SimNode& n = require(a.id, a);
            if (!n.is_component)
                throw TypeError("'" + a.id + "' is not a component");
            if (bound(a.id))
                throw DanglingReference("component '" + a.id + "' still has bindings");
            next.erase(a.id);
            break;
        }
        case K::AddBinding: {
            SimNode& from = require(a.from, a);
            require(a.to, a);
            link(from, a.to);
            break;
        }
        case K::RemoveBinding: {
            auto it = next.find(a.from);
            auto pos = it == next.end() ? std::vector<std::string>::iterator{}
                                        : std::find(it->second.outs.begin(), it->second.outs.end(), a.to);
            if (it == next.end() || pos == it->second.outs.end())
                throw DanglingReference("no binding '" + a.from + "' -> '" + a.to + "'");
            it->second.outs.erase(pos);
            break;
        }
        case K::SetConnectorParam: {
            auto it = next.find(a.id);
            if (it == next.end() || it->second.is_component)
                throw DanglingReference("no connector '" + a.id + "'");
            it->second.config.params[a.key] = a.value;
            break;
        }
        case K::ForEachInBinding: {
            require(a.id, a);
            const SimNode& target = require(a.to, a);
            bool target_component = target.is_component;
            for (auto& [id, n] : next) {
                if (excluded(a.except, id))
                    continue;
                for (auto& out : n.outs) {
                    if (out != a.id)
                        continue;
                    if (n.is_component && target_component)
                        throw TypeError("components '" + id + "' and '" + a.to + "' can only be bound through a connector");
                    if (std::find(n.outs.begin(), n.outs.end(), a.to) != n.outs.end())
                        throw DuplicateBinding("'" + id + "' is already bound to '" + a.to + "'");
                    out = a.to;
                }
            }
            break;
        }
        case K::ForEachOutBinding: {
            SimNode& src = require(a.id, a);
            require(a.from, a);
            std::vector<std::string> moved;
            std::vector<std::string> kept;
            for (const auto& y : src.outs)
                (excluded(a.except, y) ? kept : moved).push_back(y);
            src.outs = std::move(kept);
            SimNode& dst = next.at(a.from);
            for (const auto& y : moved)
                link(dst, y);
            break;
        }
        }
    }

    nodes_ = std::move(next);
    for (const auto& [queue, first_out] : removed_queues) {
        auto it = held_.find(queue);
        if (it == held_.end())
            continue;
        auto tokens = std::move(it->second);
        held_.erase(it);
        auto target = nodes_.find(first_out);
        for (auto& t : tokens) {
            if (target == nodes_.end()) {
                fail_instance(t.instance, queue, "queue '" + queue + "' removed with messages held");
            } else {
                SimNode ghost;
                ghost.id = queue;
                trace("reconfigure", {{"actions", nlohmann::ordered_json::array()},
                                      {"rerouted_instance", t.instance},
                                      {"to", first_out}});
                dispatch(ghost, first_out, std::move(t), 0);
            }
        }
    }
}

void Simulator::install_interceptor(const InterceptorSpec& spec)
{
    auto it = nodes_.find(spec.connector_id);
    if (it == nodes_.end() || it->second.is_component)
        throw NotFound("no connector '" + spec.connector_id + "'");
    it->second.interceptors.push_back(spec);
}

void Simulator::uninstall_interceptor(const std::string& id)
{
    for (auto& [nid, n] : nodes_) {
        auto pos = std::find_if(n.interceptors.begin(), n.interceptors.end(),
                                [&](const InterceptorSpec& s) { return s.id == id; });
        if (pos != n.interceptors.end()) {
            n.interceptors.erase(pos);
            return;
        }
    }
    throw NotFound("no interceptor '" + id + "'");
}

std::uint64_t Simulator::state_hash() const
{
    std::uint64_t h = 1469598103934665603ULL;
    auto mix = [&](std::string_view s) {
        for (unsigned char c : s) {
            h ^= c;
            h *= 1099511628211ULL;
        }
        h ^= 0xff;
        h *= 1099511628211ULL;
    };
    for (const auto& [id, n] : nodes_) {
        mix(id);
        mix(n.provider);
        for (const auto& o : n.outs)
            mix(o);
    }
    mix(std::to_string(now_));
    mix(std::to_string(launched_) + "/" + std::to_string(completed_) + "/" + std::to_string(failed_));
    mix(std::to_string(queue_.size()));
    mix(std::to_string(next_event_time()));
    return h;
}

} // namespace adaptflow
