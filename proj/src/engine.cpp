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

#include "adaptflow/engine.hpp"

#include <algorithm>

#include "adaptflow/errors.hpp"
#include "adaptflow/model_io.hpp"
#include "adaptflow/trace.hpp"

namespace adaptflow {

nlohmann::ordered_json to_json(const RunReport& r)
{
    nlohmann::ordered_json j;
    j["horizon_ms"] = r.horizon_ms;
    j["seed"] = r.seed;
    nlohmann::ordered_json bands = nlohmann::ordered_json::object();
    for (const auto& [name, b] : r.time_in_band)
        bands[name] = {{"acceptable", b.acceptable}, {"tolerable", b.tolerable}, {"unacceptable", b.unacceptable}};
    j["time_in_band_percent"] = std::move(bands);
    j["instances"] = {{"launched", r.launched}, {"completed", r.completed}, {"failed", r.failed}};
    nlohmann::ordered_json adaptations = nlohmann::ordered_json::object();
    for (const auto& [kind, n] : r.adaptations)
        adaptations[kind] = n;
    j["adaptations"] = std::move(adaptations);
    j["resources"] = {{"battery", r.battery}, {"memory", r.memory}, {"cost", r.cost}};
    j["ticks"] = r.ticks;
    j["causal_mismatches"] = r.causal_mismatches;
    return j;
}

Engine::Engine(AdaptiveProcessModel model, EngineConfig config, TraceWriter* trace)
    : model_(std::move(model)), config_(config), trace_(trace), guard_(config.planner.max_depth)
{
    const TacticLibrary& library = TacticLibrary::builtin();
    runtime_ = transform(model_, library);
    context_ = context_from_runtime(runtime_);
    sim_ = std::make_unique<Simulator>(runtime_, model_.scenario.value_or(ScenarioScript{}), config_.sim);
    sim_->set_trace(trace_);
    planner_ = std::make_unique<Planner>(model_, library, config_.planner);

    auto declared = declared_properties(model_);
    for (const auto& cp : runtime_.checkpoints) {
        auto it = std::find_if(declared.begin(), declared.end(),
                               [&](const DeclaredProperty& d) { return d.spec->name == cp.property_name; });
        if (it == declared.end())
            throw TransformError("checkpoint '" + cp.id + "' has no property");
        checkpoints_.emplace_back(cp, *it->spec);
    }
    for (const auto& u : runtime_.evaluation_units)
        units_.emplace_back(u);
    update_assumptions();
}

const EvaluationUnit* Engine::evaluation_unit(const std::string& property) const
{
    for (const auto& u : units_)
        if (u.model().property_name == property)
            return &u;
    return nullptr;
}

void Engine::inject_trigger(TriggerEvent trigger)
{
    queue_.push_back({std::move(trigger), {}});
}

void Engine::trace(std::string_view kind, nlohmann::ordered_json fields)
{
    if (trace_)
        trace_->emit(sim_->now(), kind, std::move(fields));
}

RunReport Engine::run()
{
    std::int64_t horizon = sim_->horizon();
    std::int64_t period = std::max<std::int64_t>(1, config_.period_ms);
    for (std::int64_t t = period; t <= horizon; t += period) {
        sim_->run_until(t);
        mape_tick();
    }
    if (last_tick_ < horizon) {
        sim_->run_until(horizon);
        mape_tick();
    }
    sim_->drain();
    return report();
}

void Engine::mape_tick()
{
    ++ticks_;
    update_assumptions();
    std::vector<TriggerEvent> fired;
    monitor(fired);
    if (config_.adaptation) {
        for (auto& f : fired)
            queue_.push_back({std::move(f), {}});
        while (!queue_.empty()) {
            QueuedTrigger q = std::move(queue_.front());
            queue_.pop_front();
            plan_and_execute(std::move(q));
        }
    } else {
        queue_.clear();
    }
    record_bands(sim_->now() - last_tick_);
    last_tick_ = sim_->now();
    if (config_.verify_causal)
        causal_mismatches_ += verify_causal_connection(runtime_, *sim_).size();
}

void Engine::update_assumptions()
{
    for (const auto& [name, holds] : sim_->take_assumption_updates())
        context_.assert_fact(Proposition::assumption(name, holds));

    double remaining = config_.battery_budget - sim_->battery();
    std::string level = remaining > 0.66 * config_.battery_budget   ? "high"
                        : remaining > 0.33 * config_.battery_budget ? "medium"
                                                                    : "low";
    if (level == battery_level_)
        return;
    battery_level_ = level;
    for (const char* l : {"high", "medium", "low"})
        context_.assert_fact(Proposition::assumption(std::string("battery is ") + l, level == l));
}

void Engine::monitor(std::vector<TriggerEvent>& fired)
{
    for (const auto& e : sim_->take_interceptor_events())
        for (auto& cp : checkpoints_)
            if (cp.listens_to(e.interceptor_id))
                if (auto m = cp.ingest(e))
                    route_measurement(*m, fired);
}

void Engine::route_measurement(const Measurement& m, std::vector<TriggerEvent>& fired)
{
    nlohmann::ordered_json fields{{"property", m.property_name}, {"value", m.value}};
    if (m.instance_id)
        fields["instance"] = m.instance_id;
    fields["measured_at"] = m.sim_time_ms;
    trace("measure", std::move(fields));
    context_.assert_fact(Proposition::property_value(m.property_name, m.value));

    for (auto& cp : checkpoints_)
        if (cp.consumes(m.property_name))
            if (auto derived = cp.ingest(m))
                route_measurement(*derived, fired);

    for (auto& unit : units_) {
        if (unit.model().property_name != m.property_name)
            continue;
        auto t = unit.evaluate(m);
        double value = unit.current_value().value_or(m.value);
        trace("classify", {{"property", m.property_name},
                           {"value", value},
                           {"level", to_string(unit.level())},
                           {"badness", badness(unit.model().fuzzy, value)}});
        context_.assert_fact(Proposition::quality_level(m.property_name, unit.level()));
        if (t) {
            trace("trigger", {{"name", t->trigger_name}, {"severity", to_string(t->severity)}, {"source", t->source_qr}});
            fired.push_back(std::move(*t));
        }
    }
}

QoSSnapshot Engine::snapshot() const
{
    QoSSnapshot s;
    for (const auto& u : units_)
        if (auto v = u.current_value())
            s.values[u.model().property_name] = *v;
    s.bandwidth = sim_->bandwidth();
    for (const auto& c : runtime_.components)
        if (const ProviderProfile* p = sim_->provider(c.provider.id))
            s.providers[p->id] = *p;
    for (const auto& svc : runtime_.catalog)
        for (const auto& prov : svc.providers)
            if (const ProviderProfile* p = sim_->provider(prov.id))
                s.providers[p->id] = *p;
    return s;
}

void Engine::plan_and_execute(QueuedTrigger queued)
{
    const TriggerEvent& trigger = queued.event;
    std::optional<PlanExecution> ex;
    try {
        ex = planner_->select_pattern(trigger, runtime_, context_, snapshot());
    } catch (const Error& e) {
        trace("plan_rejected", {{"trigger", trigger.trigger_name}, {"reason", e.what()}, {"outcome", "failed"}});
        return;
    }
    if (!ex) {
        trace("plan_rejected", {{"trigger", trigger.trigger_name}, {"reason", "no adaptation plan matches"}});
        return;
    }
    if (ex->outcome != PlanOutcome::Enacted) {
        trace("plan_rejected", {{"trigger", trigger.trigger_name},
                                {"pattern", ex->pattern_id},
                                {"reason", ex->reason},
                                {"outcome", to_string(ex->outcome)}});
        executions_.push_back(std::move(*ex));
        return;
    }
    if (std::string why = guard_.blocks(queued.chain, trigger.trigger_name, ex->pattern_id); !why.empty()) {
        trace("plan_rejected", {{"trigger", trigger.trigger_name}, {"pattern", ex->pattern_id}, {"reason", why}});
        return;
    }
    enact(*ex, queued.chain);
}

void Engine::enact(PlanExecution& ex, const Chain& chain)
{
    nlohmann::ordered_json path = nlohmann::ordered_json::array();
    for (const auto& inv : ex.chosen_path)
        path.push_back({{"tactic", inv.tactic}, {"args", inv.args}});
    trace("plan_selected", {{"pattern", ex.pattern_id},
                            {"trigger", ex.trigger_event.trigger_name},
                            {"score", ex.tradeoff.score},
                            {"admissible", ex.tradeoff.admissible},
                            {"path", std::move(path)}});
    try {
        sim_->configure(ex.batch);
    } catch (const Error& e) {
        ex.outcome = PlanOutcome::Failed;
        ex.reason = e.what();
        trace("plan_rejected", {{"trigger", ex.trigger_event.trigger_name},
                                {"pattern", ex.pattern_id},
                                {"reason", ex.reason},
                                {"outcome", "failed"}});
        executions_.push_back(std::move(ex));
        return;
    }
    runtime_ = ex.runtime_after;
    context_ = ex.context_after;

    for (const auto& ct : ex.applied) {
        trace("tactic_applied", {{"pattern", ex.pattern_id}, {"tactic", ct.kind}, {"args", ct.args}});
        ++adaptations_[ct.kind];
    }
    nlohmann::ordered_json actions = nlohmann::ordered_json::array();
    for (const auto& a : ex.batch)
        actions.push_back(to_string(a));
    trace("reconfigure", {{"pattern", ex.pattern_id}, {"actions", std::move(actions)}});

    Chain next = chain;
    next.emplace_back(ex.trigger_event.trigger_name, ex.pattern_id);
    for (const auto& f : ex.emitted_falsifications) {
        trace("falsification", {{"assumption", f.assumption}, {"severity", to_string(f.severity)}, {"pattern", ex.pattern_id}});
        if (f.severity != Severity::Hard)
            continue;
        context_.assert_fact(Proposition::assumption(f.assumption, false));
        try {
            for (auto& t : handle_falsification(f, guard_, next, sim_->now()))
                queue_.push_back({std::move(t), next});
        } catch (const ChainDepthExceeded& e) {
            trace("plan_rejected", {{"trigger", falsify_trigger(f.assumption)}, {"reason", e.what()}});
        }
    }
    for (const auto& name : ex.emitted_triggers)
        queue_.push_back({TriggerEvent{name, Severity::Hard, {}, sim_->now()}, next});
    executions_.push_back(std::move(ex));
}

void Engine::record_bands(std::int64_t span_ms)
{
    if (span_ms <= 0)
        return;
    for (const auto& u : units_)
        band_time_[u.model().property_name][u.level()] += span_ms;
}

RunReport Engine::report() const
{
    RunReport r;
    r.horizon_ms = sim_->horizon();
    r.seed = model_.scenario ? model_.scenario->seed : 0;
    for (const auto& u : units_) {
        const std::string& name = u.model().property_name;
        BandShare share;
        auto it = band_time_.find(name);
        std::int64_t total = 0;
        if (it != band_time_.end())
            for (const auto& [level, t] : it->second)
                total += t;
        if (total == 0) {
            share.acceptable = 100.0;
        } else {
            auto pct = [&](QualityLevel l) {
                auto jt = it->second.find(l);
                return jt == it->second.end() ? 0.0 : 100.0 * static_cast<double>(jt->second) / static_cast<double>(total);
            };
            share.acceptable = pct(QualityLevel::Acceptable);
            share.tolerable = pct(QualityLevel::Tolerable);
            share.unacceptable = pct(QualityLevel::Unacceptable);
        }
        r.time_in_band[name] = share;
    }
    r.launched = sim_->launched();
    r.completed = sim_->completed();
    r.failed = sim_->failed();
    r.adaptations = adaptations_;
    r.battery = sim_->battery();
    r.memory = sim_->memory();
    r.cost = sim_->total_cost();
    r.ticks = ticks_;
    r.causal_mismatches = causal_mismatches_;
    return r;
}

} // namespace adaptflow
