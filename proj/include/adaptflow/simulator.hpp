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

#ifndef ADAPTFLOW_SIMULATOR_HPP
#define ADAPTFLOW_SIMULATOR_HPP

#include <cstdint>
#include <deque>
#include <limits>
#include <map>
#include <queue>
#include <random>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "adaptflow/change_action.hpp"
#include "adaptflow/model.hpp"
#include "adaptflow/qos.hpp"
#include "adaptflow/runtime.hpp"

namespace adaptflow {

class TraceWriter;

/*
    Deterministic discrete-event simulator of the execution layer.

    Workflow instances are tokens travelling through service components and
    connectors. Services sample a latency (normal, clamped at zero, rounded to
    whole milliseconds) and an independent Bernoulli failure from their live
    provider profile. Connectors route according to their kind. A message
    crossing a link pays payload_bytes / bandwidth once per hop between two
    services; with bandwidth 0 the link is down and the message is lost unless
    a queue holds it.

    Single-threaded. Reconfiguration happens only between events.
 */

/// Routing entry mirrored from the runtime model.
struct SimNode
{
    std::string id;
    bool is_component = false;
    std::string sc_type;
    std::string provider;
    ConnectorType type = ConnectorType::Simple;
    ConnectorConfig config;
    std::vector<std::string> outs;
    std::vector<InterceptorSpec> interceptors;
};

struct InstanceRecord
{
    std::uint64_t id = 0;
    std::int64_t start_ms = 0;
    std::int64_t end_ms = 0;
    bool completed = false;
    double cost = 0.0;
};

struct SimOptions
{
    // Keep a record per finished instance (needed by Monte Carlo checks).
    bool record_instances = false;
};

/// Small portable generator: mt19937_64 with explicit uniform and normal transforms.
class Rng
{
public:
    explicit Rng(std::uint64_t seed = 0) : engine_(seed) { }

    double uniform();
    double normal(double mean, double stddev);
    bool bernoulli(double p) { return p > 0.0 && uniform() < p; }

private:
    std::mt19937_64 engine_;
};

class Simulator
{
public:
    Simulator(const RuntimeModel& runtime, const ScenarioScript& scenario, SimOptions options = {});

    void set_trace(TraceWriter* trace) { trace_ = trace; }

    std::int64_t now() const { return now_; }
    std::int64_t horizon() const { return horizon_; }
    bool has_pending_events() const { return !queue_.empty(); }
    std::int64_t next_event_time() const;

    /// Processes the earliest event. Returns false when the queue is empty.
    bool step();
    /// Processes every event with time <= t, then advances the clock to t.
    void run_until(std::int64_t t);
    /// Runs to quiescence without launching new instances; instances still
    /// held afterwards fail.
    void drain();

    /// Interceptor events emitted since the last call.
    std::vector<InterceptorEvent> take_interceptor_events();
    /// Assumption changes requested by scenario events since the last call.
    std::vector<std::pair<std::string, bool>> take_assumption_updates();

    /// Enacts a batch on the routing table between events, all-or-nothing.
    void configure(std::span<const ChangeAction> batch);

    void install_interceptor(const InterceptorSpec& spec);
    void uninstall_interceptor(const std::string& id);

    /// Starts one instance at the current time.
    std::uint64_t launch_instance();
    void set_arrival_rate(double rate_per_s);

    const std::map<std::string, SimNode>& routing() const { return nodes_; }
    SimNode* find_node(const std::string& id);
    const ProviderProfile* provider(const std::string& id) const;
    double bandwidth() const { return bandwidth_; }

    std::uint64_t launched() const { return launched_; }
    std::uint64_t completed() const { return completed_; }
    std::uint64_t failed() const { return failed_; }
    std::uint64_t in_flight() const { return launched_ - completed_ - failed_; }
    double battery() const { return battery_; }
    double memory() const { return memory_; }
    double total_cost() const { return total_cost_; }
    const std::vector<InstanceRecord>& records() const { return records_; }

    /// Digest of routing, clock, counters and pending events.
    std::uint64_t state_hash() const;

private:
    struct Token
    {
        std::uint64_t instance = 0;
        double payload = 0.0;
        bool failed = false;
        bool charged = false;
        std::string from;
    };

    enum class EventKind { Arrive, ServiceDone, Scenario, Launch };

    struct Event
    {
        std::int64_t time = 0;
        std::uint64_t seq = 0;
        EventKind kind = EventKind::Arrive;
        std::string node;
        Token token;
        std::size_t index = 0;
        std::uint64_t generation = 0;

        bool operator>(const Event& o) const { return time != o.time ? time > o.time : seq > o.seq; }
    };

    struct JoinState
    {
        std::size_t expected = 0;
        std::size_t arrived = 0;
        bool forwarded = false;
    };

    struct Instance
    {
        std::int64_t start_ms = 0;
        bool done = false;
        double battery = 0.0;
        double memory = 0.0;
        double cost = 0.0;
        std::multiset<std::string> open_blocks;
        std::map<std::string, int> loop_counts;
        std::map<std::string, int> attempts;
        std::map<std::string, JoinState> joins;
    };

    void schedule(Event event);
    void process(Event& event);
    void arrive(const std::string& node_id, Token token);
    void service_done(const std::string& node_id, Token token);
    void dispatch(const SimNode& from, const std::string& to, Token token, std::int64_t delay);
    void forward_first(const SimNode& node, Token token, std::int64_t delay = 0);
    void run_interceptors(const SimNode& node, const Token& token, bool include_failure);
    void emit_interceptor(const InterceptorSpec& spec, InterceptorEventKind kind, const Token& token);
    void complete_instance(std::uint64_t id);
    void fail_instance(std::uint64_t id, const std::string& node, const std::string& reason);
    void apply_scenario(const ScenarioEvent& ev);
    void drain_queues();
    void trace(std::string_view kind, nlohmann::ordered_json fields);

    std::int64_t now_ = 0;
    std::int64_t horizon_ = 0;
    std::uint64_t seq_ = 0;
    std::priority_queue<Event, std::vector<Event>, std::greater<>> queue_;
    std::map<std::string, SimNode> nodes_;
    std::map<std::string, ProviderProfile> providers_;
    std::map<std::uint64_t, Instance> instances_;
    std::map<std::string, std::deque<Token>> held_;
    std::vector<ScenarioEvent> scenario_events_;
    std::string root_start_;
    std::string root_end_;
    Rng rng_;
    double bandwidth_ = std::numeric_limits<double>::infinity();
    double battery_ = 0.0;
    double memory_ = 0.0;
    double total_cost_ = 0.0;
    double arrival_rate_ = 0.0;
    std::uint64_t launch_generation_ = 0;
    std::uint64_t next_instance_ = 1;
    std::uint64_t launched_ = 0;
    std::uint64_t completed_ = 0;
    std::uint64_t failed_ = 0;
    bool draining_ = false;
    SimOptions options_;
    std::vector<InstanceRecord> records_;
    std::vector<InterceptorEvent> interceptor_events_;
    std::vector<std::pair<std::string, bool>> assumption_updates_;
    TraceWriter* trace_ = nullptr;
};

} // namespace adaptflow

#endif // ADAPTFLOW_SIMULATOR_HPP
