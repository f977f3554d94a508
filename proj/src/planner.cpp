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

#include "adaptflow/planner.hpp"

#include <algorithm>
#include <cmath>

#include "adaptflow/errors.hpp"
#include "adaptflow/model_io.hpp"

namespace adaptflow {

std::string_view to_string(PlanOutcome outcome)
{
    switch (outcome) {
    case PlanOutcome::Enacted: return "enacted";
    case PlanOutcome::RejectedByTradeoff: return "rejected_by_tradeoff";
    case PlanOutcome::NoViableOption: return "no_viable_option";
    case PlanOutcome::Failed: return "failed";
    }
    return "?";
}

std::string ChainGuard::blocks(const Chain& chain, const std::string& trigger, const std::string& pattern) const
{
    for (const auto& [t, p] : chain)
        if (t == trigger && p == pattern)
            return "cycle: '" + trigger + "' already handled by " + pattern + " in this chain";
    if (static_cast<int>(chain.size()) >= max_depth_)
        return "chain depth " + std::to_string(chain.size()) + " reached the limit of " + std::to_string(max_depth_);
    return {};
}

std::vector<TriggerEvent> handle_falsification(const Falsification& f, const ChainGuard& guard, const Chain& chain,
                                               std::int64_t now_ms)
{
    if (f.severity != Severity::Hard)
        return {};
    if (static_cast<int>(chain.size()) >= guard.max_depth())
        throw ChainDepthExceeded("falsification of '" + f.assumption + "' exceeds chain depth "
                                 + std::to_string(guard.max_depth()));
    return {TriggerEvent{falsify_trigger(f.assumption), Severity::Hard, {}, now_ms}};
}

Planner::Planner(const AdaptiveProcessModel& model, const TacticLibrary& library, PlannerConfig config)
    : model_(&model), library_(&library), config_(config)
{
    LeafValues leaves = catalog_leaf_values(model);
    for (const auto& qr : model.quality_requirements) {
        if (block_qos_.count(qr.target))
            continue;
        try {
            block_qos_[qr.target] = structural_qos(resolve_label(model, qr.target), leaves);
        } catch (const Error&) {
            // Blocks that cannot be analysed start from the neutral element.
            block_qos_[qr.target] = StructuralQoS{};
        }
    }
}

std::optional<std::pair<std::string, bool>> Planner::requirement_attribute(const AdaptiveProcessModel& model,
                                                                           const QualityRequirement& qr)
{
    auto from_kind = [&](const PropertySpec& p) -> std::optional<std::pair<std::string, bool>> {
        switch (p.kind) {
        case PropertyKind::Time: return std::pair<std::string, bool>{"response_time", false};
        case PropertyKind::Failure: return std::pair<std::string, bool>{"availability", true};
        case PropertyKind::Data:
            if (p.field == "elapsed_ms")
                return std::pair<std::string, bool>{"response_time", false};
            if (p.field == "battery" || p.field == "memory" || p.field == "payload_bytes")
                return std::pair<std::string, bool>{p.field, false};
            return std::nullopt;
        default: return std::nullopt;
        }
    };
    const PropertySpec& p = qr.property;
    if (p.kind != PropertyKind::Aggregated)
        return from_kind(p);
    const PropertySpec* base = p.inline_base.empty() ? nullptr : &p.inline_base.front();
    if (!base)
        for (const auto& d : declared_properties(model))
            if (d.spec->name == p.base)
                base = d.spec;
    if (!base)
        return std::nullopt;
    if (base->kind == PropertyKind::Failure) {
        if (p.function == "ratio")
            return std::pair<std::string, bool>{"availability", false};
        if (p.function == "avg")
            return std::pair<std::string, bool>{"availability", true};
        return std::nullopt;
    }
    if (p.function == "avg" || p.function == "min" || p.function == "max")
        return from_kind(*base);
    return std::nullopt;
}

Attributes Planner::service_attributes(const std::string& service, const QoSSnapshot& now) const
{
    Attributes a;
    const ServiceSpec* s = model_->find_service(service);
    if (!s || s->providers.empty())
        return a;
    ProviderProfile p = s->providers.front();
    if (auto it = now.providers.find(p.id); it != now.providers.end())
        p = it->second;
    a.response_time = p.latency_mean_ms.value_or(0.0);
    a.cost = p.cost;
    a.availability = a.reliability = 1.0 - p.failure_probability;
    a.payload_bytes = p.payload_bytes;
    a.transit_ms = now.bandwidth > 0.0 && std::isfinite(now.bandwidth) ? p.payload_bytes / now.bandwidth : 0.0;
    return a;
}

Attributes Planner::element_attributes(const RuntimeModel& runtime, const std::string& id,
                                       const QoSSnapshot& now) const
{
    Attributes a;
    const ServiceComponent* c = runtime.find_component(id);
    if (!c)
        return a;
    ProviderProfile p = c->provider;
    if (auto it = now.providers.find(p.id); it != now.providers.end())
        p = it->second;
    a.response_time = p.latency_mean_ms.value_or(0.0);
    a.cost = p.cost;
    a.availability = a.reliability = 1.0 - p.failure_probability;
    a.payload_bytes = p.payload_bytes;
    a.transit_ms = now.bandwidth > 0.0 && std::isfinite(now.bandwidth) ? p.payload_bytes / now.bandwidth : 0.0;
    return a;
}

std::vector<const AdaptationPattern*> Planner::candidates(const TriggerEvent& trigger, const RuntimeModel& runtime,
                                                          const ContextModel& ctx) const
{
    std::vector<const AdaptationPattern*> out;
    for (const auto& p : runtime.adaptation_patterns) {
        if (p.trigger != trigger.trigger_name)
            continue;
        if (std::all_of(p.pre_assumptions.begin(), p.pre_assumptions.end(),
                        [&](const std::string& a) { return ctx.assumption(a); }))
            out.push_back(&p);
    }
    return out;
}

namespace {

struct Walk
{
    RuntimeModel runtime;
    ContextModel ctx;
    std::vector<TacticInvocation> path;
    std::vector<ConcreteTactic> applied;
    std::vector<Falsification> falsifications;
    std::vector<std::string> emitted;
    std::vector<ChangeAction> batch;
};

// Walks `steps` on `w`; on failure `w` is left partially updated and the reason is returned.
std::string walk_steps(const std::vector<CompiledStep>& steps, Walk& w, const TacticLibrary& library)
{
    for (const auto& step : steps) {
        switch (step.kind) {
        case FlowKind::Emit: w.emitted.push_back(step.emit); break;
        case FlowKind::Alternative: {
            std::string reasons;
            bool committed = false;
            for (const auto& variation : step.alternatives) {
                Walk trial = w;
                std::string why = walk_steps(variation, trial, library);
                if (why.empty()) {
                    w = std::move(trial);
                    committed = true;
                    break;
                }
                reasons += (reasons.empty() ? "" : "; ") + why;
            }
            if (!committed)
                return "no alternative applies (" + reasons + ")";
            break;
        }
        case FlowKind::Tactic: {
            const TacticInvocation& inv = step.tactic;
            const TacticTemplate* tpl = library.find(inv.tactic);
            if (!tpl)
                return "unknown tactic '" + inv.tactic + "'";
            TacticEnv env;
            env.catalog = &w.runtime.catalog;
            env.fresh_counter = &w.runtime.next_fresh;
            env.pre_assumptions = inv.pre_assumptions;
            try {
                ConcreteTactic ct = instantiate(*tpl, inv.args, w.ctx, env);
                w.ctx = adaptflow::apply(ct.batch, w.ctx);
                apply_to_runtime(w.runtime, ct.batch);
                w.batch.insert(w.batch.end(), ct.batch.begin(), ct.batch.end());
                w.path.push_back(inv);
                w.falsifications.insert(w.falsifications.end(), inv.false_assumptions.begin(),
                                        inv.false_assumptions.end());
                w.applied.push_back(std::move(ct));
            } catch (const Error& e) {
                return e.what();
            }
            break;
        }
        }
    }
    return {};
}

} // namespace

PlanExecution Planner::walk_flow(const AdaptationPattern& pattern, const TriggerEvent& trigger,
                                 const RuntimeModel& runtime, const ContextModel& ctx) const
{
    PlanExecution ex;
    ex.pattern_id = pattern.id;
    ex.trigger_event = trigger;
    Walk w{runtime, ctx, {}, {}, {}, {}, {}};
    std::string why = walk_steps(pattern.compiled_flow, w, *library_);
    if (!why.empty()) {
        ex.outcome = PlanOutcome::NoViableOption;
        ex.reason = why;
        return ex;
    }
    if (w.path.empty()) {
        ex.outcome = PlanOutcome::NoViableOption;
        ex.reason = "flow applies no tactic";
        ex.emitted_triggers = std::move(w.emitted);
        return ex;
    }
    ex.outcome = PlanOutcome::Enacted;
    ex.chosen_path = std::move(w.path);
    ex.applied = std::move(w.applied);
    ex.emitted_falsifications = std::move(w.falsifications);
    ex.emitted_falsifications.insert(ex.emitted_falsifications.end(), pattern.false_assumptions.begin(),
                                     pattern.false_assumptions.end());
    ex.emitted_triggers = std::move(w.emitted);
    ex.batch = std::move(w.batch);
    ex.runtime_after = std::move(w.runtime);
    ex.context_after = std::move(w.ctx);
    return ex;
}

TradeoffScore Planner::score_tradeoff(const PlanExecution& execution, const RuntimeModel& runtime,
                                      const QoSSnapshot& now) const
{
    TradeoffScore result;
    double improvement = 0.0;
    double worsening = 0.0;
    for (const auto& qr : model_->quality_requirements) {
        const std::string& name = qr.property.name;
        auto cur = now.values.find(name);
        if (cur == now.values.end())
            continue;
        double predicted = cur->second;
        auto attr = requirement_attribute(*model_, qr);
        const ProcessBlock* block = runtime.find_block(qr.target);
        if (attr && block) {
            auto [attribute, complement] = *attr;
            StructuralQoS q = block_qos_.count(qr.target) ? block_qos_.at(qr.target) : StructuralQoS{};
            Attributes b;
            b.response_time = q.response_time;
            b.cost = q.cost;
            b.availability = q.availability;
            b.reliability = q.reliability;
            b.set(attribute, complement ? 1.0 - cur->second : cur->second);
            std::set<std::string> members = block_members(runtime, *block);
            for (const auto& ct : execution.applied) {
                if (!members.count(ct.primary))
                    continue;
                EffectInputs in;
                in.block = b;
                in.primary = element_attributes(runtime, ct.primary, now);
                in.secondary = ct.secondary_service.empty() ? element_attributes(runtime, ct.secondary, now)
                                                            : service_attributes(ct.secondary_service, now);
                in.params = ct.params;
                b = predict_effect(ct, *library_, in);
            }
            double v = b.get(attribute);
            predicted = complement ? 1.0 - v : v;
        }
        result.predicted[name] = predicted;
        double before = badness(qr.fuzzy, cur->second);
        double after = badness(qr.fuzzy, predicted);
        if (name == execution.trigger_event.source_qr)
            improvement += before - after;
        else
            worsening += std::max(0.0, after - before);
        if (classify(qr.fuzzy, cur->second) == QualityLevel::Acceptable
            && classify(qr.fuzzy, predicted) == QualityLevel::Unacceptable)
            result.admissible = false;
    }
    result.score = improvement - config_.lambda * worsening;
    return result;
}

std::optional<PlanExecution> Planner::select_pattern(const TriggerEvent& trigger, const RuntimeModel& runtime,
                                                     const ContextModel& ctx, const QoSSnapshot& now) const
{
    auto cands = candidates(trigger, runtime, ctx);
    if (cands.empty())
        return std::nullopt;
    std::optional<PlanExecution> best;
    std::optional<PlanExecution> first_failure;
    for (const AdaptationPattern* p : cands) {
        PlanExecution ex = walk_flow(*p, trigger, runtime, ctx);
        if (ex.outcome != PlanOutcome::Enacted) {
            if (!first_failure)
                first_failure = std::move(ex);
            continue;
        }
        ex.tradeoff = score_tradeoff(ex, runtime, now);
        bool better = !best || (ex.tradeoff.admissible && !best->tradeoff.admissible)
                      || (ex.tradeoff.admissible == best->tradeoff.admissible
                          && ex.tradeoff.score > best->tradeoff.score + 1e-12);
        if (better)
            best = std::move(ex);
    }
    if (!best)
        return first_failure;
    if (!best->tradeoff.admissible) {
        best->outcome = PlanOutcome::RejectedByTradeoff;
        best->reason = "every candidate pushes an acceptable requirement to unacceptable";
    }
    return best;
}

} // namespace adaptflow
