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

#include "adaptflow/runtime.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <map>

#include "adaptflow/errors.hpp"
#include "adaptflow/model_io.hpp"
#include "adaptflow/simulator.hpp"
#include "adaptflow/tactics.hpp"

namespace adaptflow {

std::string_view to_string(InterceptorEventKind kind)
{
    switch (kind) {
    case InterceptorEventKind::BlockEntry: return "block_entry";
    case InterceptorEventKind::BlockExit: return "block_exit";
    case InterceptorEventKind::Failure: return "failure";
    case InterceptorEventKind::Count: return "count";
    case InterceptorEventKind::DataValue: return "data_value";
    case InterceptorEventKind::ConstraintCheck: return "constraint_check";
    }
    return "?";
}

bool InterceptorSpec::emits(InterceptorEventKind kind) const
{
    return std::find(kinds.begin(), kinds.end(), kind) != kinds.end();
}

const ServiceComponent* RuntimeModel::find_component(const std::string& id) const
{
    for (const auto& c : components)
        if (c.id == id)
            return &c;
    return nullptr;
}

const ConnectorModel* RuntimeModel::find_connector(const std::string& id) const
{
    for (const auto& c : connectors)
        if (c.id == id)
            return &c;
    return nullptr;
}

ConnectorModel* RuntimeModel::find_connector(const std::string& id)
{
    for (auto& c : connectors)
        if (c.id == id)
            return &c;
    return nullptr;
}

const ProcessBlock* RuntimeModel::find_block(const std::string& label) const
{
    for (const auto& b : process_blocks)
        if (b.label == label)
            return &b;
    return nullptr;
}

std::vector<std::string> RuntimeModel::out_targets(const std::string& id) const
{
    std::vector<std::string> out;
    for (const auto& b : bindings)
        if (b.from == id)
            out.push_back(b.to);
    return out;
}

std::vector<std::string> RuntimeModel::in_sources(const std::string& id) const
{
    std::vector<std::string> out;
    for (const auto& b : bindings)
        if (b.to == id)
            out.push_back(b.from);
    return out;
}

namespace {

struct Ends
{
    std::string entry;
    std::string exit;
};

class Builder
{
public:
    Builder(const AdaptiveProcessModel& m, RuntimeModel& rt) : m_(m), rt_(rt) { }

    Ends build(const ProcessNode& n, const std::string& path, bool top)
    {
        Ends inner = build_structure(n, path);
        if (!top && !n.label)
            return inner;
        std::string start = path + ".BlockStart";
        std::string end = path + ".BlockEnd";
        ConnectorConfig sc, ec;
        sc.partner = end;
        ec.partner = start;
        connector(start, ConnectorType::BlockStart, sc);
        connector(end, ConnectorType::BlockEnd, ec);
        bind(start, inner.entry);
        bind(inner.exit, end);
        if (top)
            rt_.process_blocks.push_back({std::string(kRootLabel), start, end, path});
        if (n.label && *n.label != kRootLabel)
            rt_.process_blocks.push_back({*n.label, start, end, path});
        return {start, end};
    }

    std::map<const ProcessNode*, std::string> service_components;

private:
    Ends build_structure(const ProcessNode& n, const std::string& path)
    {
        auto child = [&](std::size_t i) { return build(n.children[i], path + "." + std::to_string(i), false); };
        switch (n.kind) {
        case NodeKind::Service: {
            std::string id = path + ".SC:" + n.service;
            const ServiceSpec* s = m_.find_service(n.service);
            if (!s || s->providers.empty())
                throw TransformError("service '" + n.service + "' has no provider");
            rt_.components.push_back({id, n.service, s->providers.front(), false});
            service_components[&n] = id;
            return {id, id};
        }
        case NodeKind::Seq: {
            Ends first = child(0);
            Ends prev = first;
            for (std::size_t i = 1; i < n.children.size(); ++i) {
                Ends next = child(i);
                std::string in = path + ".SeqIn." + std::to_string(i);
                std::string out = path + ".SeqOut." + std::to_string(i);
                connector(in, ConnectorType::SeqIn);
                connector(out, ConnectorType::SeqOut);
                bind(prev.exit, in);
                bind(in, out);
                bind(out, next.entry);
                prev = next;
            }
            return {first.entry, prev.exit};
        }
        case NodeKind::Loop: {
            std::string in = path + ".LoopIn";
            std::string out = path + ".LoopOut";
            ConnectorConfig ic, oc;
            ic.partner = out;
            oc.partner = in;
            oc.params["iterations"] = n.iterations;
            connector(in, ConnectorType::LoopIn, ic);
            connector(out, ConnectorType::LoopOut, oc);
            Ends body = child(0);
            bind(in, body.entry);
            bind(body.exit, out);
            bind(out, in);
            return {in, out};
        }
        case NodeKind::Sel:
        case NodeKind::Opt: {
            std::string out = path + ".SelOut";
            std::string in = path + ".SelIn";
            ConnectorConfig oc, ic;
            oc.partner = in;
            ic.partner = out;
            if (n.kind == NodeKind::Sel) {
                oc.weights = n.probabilities;
            } else {
                double p = n.probabilities.empty() ? kDefaultOptProbability : n.probabilities[0];
                oc.weights = {p, 1.0 - p};
            }
            connector(out, ConnectorType::SelOut, oc);
            connector(in, ConnectorType::SelIn, ic);
            for (std::size_t i = 0; i < n.children.size(); ++i) {
                Ends c = child(i);
                bind(out, c.entry);
                bind(c.exit, in);
            }
            if (n.kind == NodeKind::Opt)
                bind(out, in);
            return {out, in};
        }
        case NodeKind::AndPar: {
            std::string out = path + ".ParOut";
            std::string in = path + ".ParIn";
            ConnectorConfig oc, ic;
            oc.partner = in;
            ic.partner = out;
            connector(out, ConnectorType::ParOut, oc);
            connector(in, ConnectorType::ParIn, ic);
            for (std::size_t i = 0; i < n.children.size(); ++i) {
                Ends c = child(i);
                bind(out, c.entry);
                bind(c.exit, in);
            }
            return {out, in};
        }
        }
        throw TransformError("unknown node kind");
    }

    void connector(const std::string& id, ConnectorType type, ConnectorConfig config = {})
    {
        rt_.connectors.push_back({id, type, std::move(config), {}});
    }

    void bind(const std::string& from, const std::string& to) { rt_.bindings.push_back({from, to}); }

    const AdaptiveProcessModel& m_;
    RuntimeModel& rt_;
};

void walk_nodes(const ProcessNode& n, const std::function<void(const ProcessNode&)>& fn)
{
    fn(n);
    for (const auto& c : n.children)
        walk_nodes(c, fn);
}

struct ArgResolver
{
    const AdaptiveProcessModel& model;
    const RuntimeModel& rt;
    const std::map<const ProcessNode*, std::string>& components;

    std::optional<std::string> component_for(const std::string& name) const
    {
        const ProcessNode* by_label = nullptr;
        const ProcessNode* by_service = nullptr;
        walk_nodes(model.workflow, [&](const ProcessNode& n) {
            if (n.kind != NodeKind::Service)
                return;
            if (n.label == name && !by_label)
                by_label = &n;
            if (n.service == name && !by_service)
                by_service = &n;
        });
        const ProcessNode* hit = by_label ? by_label : by_service;
        if (!hit)
            return std::nullopt;
        return components.at(hit);
    }

    std::string resolve(const ArgSpec& spec, const std::string& arg) const
    {
        switch (spec.role) {
        case ArgRole::Component:
            if (auto c = component_for(arg))
                return *c;
            throw TransformError("argument '" + arg + "' does not name a workflow service");
        case ArgRole::Anchor:
            if (auto c = component_for(arg))
                return *c;
            if (const ProcessBlock* b = rt.find_block(arg))
                return b->start;
            throw TransformError("argument '" + arg + "' names no service or block");
        case ArgRole::Peer: {
            for (const auto& c : rt.components)
                if (c.standby && c.provider.id == arg)
                    return c.id;
            for (const auto& c : rt.components)
                if (!c.standby && c.provider.id == arg)
                    return c.id;
            if (auto c = component_for(arg))
                return *c;
            throw TransformError("argument '" + arg + "' names no provider or service");
        }
        default: return arg;
        }
    }

    std::vector<CompiledStep> compile(const PlanFlow& flow, const TacticLibrary& tactics) const
    {
        std::vector<CompiledStep> out;
        for (const auto& n : flow) {
            CompiledStep s;
            s.kind = n.kind;
            s.emit = n.emit;
            s.tactic = n.tactic;
            if (n.kind == FlowKind::Tactic) {
                const TacticTemplate& t = tactics.at(n.tactic.tactic);
                for (std::size_t i = 0; i < n.tactic.args.size() && i < t.args.size(); ++i)
                    s.tactic.args[i] = resolve(t.args[i], n.tactic.args[i]);
            }
            for (const auto& a : n.alternatives)
                s.alternatives.push_back(compile(a, tactics));
            out.push_back(std::move(s));
        }
        return out;
    }
};

} // namespace

RuntimeModel transform(const AdaptiveProcessModel& model)
{
    return transform(model, TacticLibrary::builtin());
}

RuntimeModel transform(const AdaptiveProcessModel& model, const TacticLibrary& tactics)
{
    RuntimeModel rt;
    rt.catalog = model.services;
    Builder builder(model, rt);
    builder.build(model.workflow, "root", true);

    for (const auto& s : model.services)
        for (std::size_t i = 1; i < s.providers.size(); ++i)
            rt.components.push_back({"standby.SC:" + s.name + "@" + s.providers[i].id, s.name, s.providers[i], true});

    for (const auto& d : declared_properties(model)) {
        const PropertySpec& p = *d.spec;
        const ProcessBlock* block = rt.find_block(d.target);
        if (!block)
            throw TransformError("no block '" + d.target + "' for property '" + p.name + "'");
        CheckpointModel cp{p.name + ".cp", p.name, p.kind, d.target, {}, {}};
        auto install = [&](const std::string& con, const std::string& suffix, std::vector<InterceptorEventKind> kinds) {
            std::string id = p.name + ".icp." + suffix;
            rt.find_connector(con)->interceptors.push_back({id, con, std::move(kinds)});
            cp.source_interceptors.push_back(id);
        };
        using IK = InterceptorEventKind;
        switch (p.kind) {
        case PropertyKind::Time:
            install(block->start, "entry", {IK::BlockEntry});
            install(block->end, "exit", {IK::BlockExit});
            break;
        case PropertyKind::Failure:
            install(block->start, "entry", {IK::BlockEntry, IK::Failure});
            install(block->end, "exit", {IK::BlockExit});
            break;
        case PropertyKind::Count: install(block->end, "exit", {IK::Count}); break;
        case PropertyKind::Data: install(block->end, "exit", {IK::DataValue}); break;
        case PropertyKind::Constraint: install(block->end, "exit", {IK::ConstraintCheck}); break;
        case PropertyKind::Derived: cp.inputs = p.args; break;
        case PropertyKind::Aggregated:
            cp.inputs.push_back(p.inline_base.empty() ? p.base : p.inline_base.front().name);
            break;
        }
        rt.checkpoints.push_back(std::move(cp));
    }

    for (const auto& q : model.quality_requirements)
        rt.evaluation_units.push_back({q.property.name + ".eval", q.property.name, q.fuzzy, q.trigger, q.target});

    ArgResolver resolver{model, rt, builder.service_components};
    for (std::size_t i = 0; i < model.adaptation_plans.size(); ++i) {
        const auto& plan = model.adaptation_plans[i];
        AdaptationPattern pat;
        pat.id = "plan-" + std::to_string(i + 1);
        pat.trigger = plan.trigger;
        pat.compiled_flow = resolver.compile(plan.flow, tactics);
        pat.pre_assumptions = plan.pre_assumptions;
        pat.false_assumptions = plan.false_assumptions;
        rt.adaptation_patterns.push_back(std::move(pat));
    }
    return rt;
}

namespace {

bool excluded(const std::vector<std::string>& except, const std::string& id)
{
    return std::find(except.begin(), except.end(), id) != except.end();
}

void enact(RuntimeModel& rt, const ChangeAction& a)
{
    using K = ChangeAction::Kind;
    auto require = [&](const std::string& id) {
        if (!rt.exists(id))
            throw DanglingReference("'" + id + "' does not exist (" + to_string(a) + ")");
    };
    auto check_pair = [&](const std::string& from, const std::string& to) {
        require(from);
        require(to);
        if (rt.find_component(from) && rt.find_component(to))
            throw TypeError("components '" + from + "' and '" + to + "' can only be bound through a connector");
        for (const auto& b : rt.bindings)
            if (b.from == from && b.to == to)
                throw DuplicateBinding("'" + from + "' is already bound to '" + to + "'");
    };
    auto has_bindings = [&](const std::string& id) {
        return std::any_of(rt.bindings.begin(), rt.bindings.end(),
                           [&](const Binding& b) { return b.from == id || b.to == id; });
    };

    switch (a.kind) {
    case K::AddConnector:
        if (rt.exists(a.id))
            throw DuplicateBinding("'" + a.id + "' already exists");
        rt.connectors.push_back({a.id, a.con_type, a.config, {}});
        break;
    case K::RemoveConnector: {
        require(a.id);
        if (!rt.find_connector(a.id))
            throw TypeError("'" + a.id + "' is not a connector");
        if (has_bindings(a.id))
            throw DanglingReference("connector '" + a.id + "' still has bindings");
        std::erase_if(rt.connectors, [&](const ConnectorModel& c) { return c.id == a.id; });
        break;
    }
    case K::AddComponent: {
        if (rt.exists(a.id))
            throw DuplicateBinding("'" + a.id + "' already exists");
        const ProviderProfile* prov = nullptr;
        for (const auto& s : rt.catalog)
            for (const auto& p : s.providers)
                if (p.id == a.provider && s.name == a.sc_type)
                    prov = &p;
        if (!prov)
            throw DanglingReference("no provider '" + a.provider + "' for service '" + a.sc_type + "'");
        rt.components.push_back({a.id, a.sc_type, *prov, false});
        break;
    }
    case K::RemoveComponent:
        require(a.id);
        if (!rt.find_component(a.id))
            throw TypeError("'" + a.id + "' is not a component");
        if (has_bindings(a.id))
            throw DanglingReference("component '" + a.id + "' still has bindings");
        std::erase_if(rt.components, [&](const ServiceComponent& c) { return c.id == a.id; });
        break;
    case K::AddBinding:
        check_pair(a.from, a.to);
        rt.bindings.push_back({a.from, a.to});
        break;
    case K::RemoveBinding: {
        auto it = std::find(rt.bindings.begin(), rt.bindings.end(), Binding{a.from, a.to});
        if (it == rt.bindings.end())
            throw DanglingReference("no binding '" + a.from + "' -> '" + a.to + "'");
        rt.bindings.erase(it);
        break;
    }
    case K::SetConnectorParam: {
        ConnectorModel* c = rt.find_connector(a.id);
        if (!c)
            throw DanglingReference("no connector '" + a.id + "'");
        c->config.params[a.key] = a.value;
        break;
    }
    case K::ForEachInBinding: {
        require(a.id);
        require(a.to);
        for (auto& b : rt.bindings) {
            if (b.to != a.id || excluded(a.except, b.from))
                continue;
            if (rt.find_component(b.from) && rt.find_component(a.to))
                throw TypeError("components '" + b.from + "' and '" + a.to + "' can only be bound through a connector");
            if (std::find(rt.bindings.begin(), rt.bindings.end(), Binding{b.from, a.to}) != rt.bindings.end())
                throw DuplicateBinding("'" + b.from + "' is already bound to '" + a.to + "'");
            b.to = a.to;
        }
        break;
    }
    case K::ForEachOutBinding: {
        require(a.id);
        require(a.from);
        std::vector<Binding> moved;
        std::vector<Binding> kept;
        for (const auto& b : rt.bindings) {
            if (b.from == a.id && !excluded(a.except, b.to))
                moved.push_back({a.from, b.to});
            else
                kept.push_back(b);
        }
        rt.bindings = std::move(kept);
        for (const auto& b : moved) {
            if (rt.find_component(b.from) && rt.find_component(b.to))
                throw TypeError("components '" + b.from + "' and '" + b.to + "' can only be bound through a connector");
            if (std::find(rt.bindings.begin(), rt.bindings.end(), b) != rt.bindings.end())
                throw DuplicateBinding("'" + b.from + "' is already bound to '" + b.to + "'");
            rt.bindings.push_back(b);
        }
        break;
    }
    }
}

} // namespace

void apply_to_runtime(RuntimeModel& runtime, std::span<const ChangeAction> batch)
{
    RuntimeModel next = runtime;
    for (const auto& a : batch)
        enact(next, a);
    runtime = std::move(next);
}

ContextModel context_from_runtime(const RuntimeModel& runtime)
{
    ContextModel ctx;
    for (const auto& c : runtime.components) {
        ctx.assert_unversioned(Proposition::is_component(c.id));
        ctx.assert_unversioned(Proposition::component_type(c.id, c.sc_type));
    }
    for (const auto& c : runtime.connectors) {
        ctx.assert_unversioned(Proposition::is_connector(c.id));
        ctx.assert_unversioned(Proposition::connector_type(c.id, c.type));
    }
    for (const auto& b : runtime.bindings)
        ctx.assert_unversioned(Proposition::bind(b.from, b.to));
    ctx.bump_revision();
    return ctx;
}

std::set<std::string> block_members(const RuntimeModel& runtime, const ProcessBlock& block)
{
    std::set<std::string> seen{block.start};
    std::deque<std::string> todo{block.start};
    while (!todo.empty()) {
        std::string id = todo.front();
        todo.pop_front();
        if (id == block.end)
            continue;
        for (const auto& next : runtime.out_targets(id))
            if (seen.insert(next).second)
                todo.push_back(next);
    }
    return seen;
}

std::vector<std::string> verify_causal_connection(const RuntimeModel& runtime, const Simulator& sim)
{
    std::vector<std::string> issues;
    const auto& routing = sim.routing();
    std::set<std::string> model_ids;
    for (const auto& c : runtime.components) {
        model_ids.insert(c.id);
        auto it = routing.find(c.id);
        if (it == routing.end()) {
            issues.push_back("component '" + c.id + "' missing from routing");
            continue;
        }
        if (!it->second.is_component || it->second.sc_type != c.sc_type || it->second.provider != c.provider.id)
            issues.push_back("component '" + c.id + "' differs in routing");
    }
    for (const auto& c : runtime.connectors) {
        model_ids.insert(c.id);
        auto it = routing.find(c.id);
        if (it == routing.end()) {
            issues.push_back("connector '" + c.id + "' missing from routing");
            continue;
        }
        const SimNode& n = it->second;
        if (n.is_component || n.type != c.type || !(n.config == c.config))
            issues.push_back("connector '" + c.id + "' differs in routing");
        if (n.interceptors != c.interceptors)
            issues.push_back("interceptors of '" + c.id + "' differ in routing");
    }
    for (const auto& [id, node] : routing) {
        if (!model_ids.count(id)) {
            issues.push_back("routing has unknown node '" + id + "'");
            continue;
        }
        auto expected = runtime.out_targets(id);
        if (expected != node.outs)
            issues.push_back("bindings of '" + id + "' differ in routing");
    }
    return issues;
}

nlohmann::ordered_json to_json(const RuntimeModel& rt)
{
    using nlohmann::ordered_json;
    ordered_json j;
    ordered_json comps = ordered_json::array();
    for (const auto& c : rt.components) {
        ordered_json cj{{"id", c.id}, {"sc_type", c.sc_type}, {"provider", c.provider.id}};
        if (c.standby)
            cj["standby"] = true;
        comps.push_back(std::move(cj));
    }
    j["components"] = std::move(comps);

    ordered_json cons = ordered_json::array();
    for (const auto& c : rt.connectors) {
        ordered_json cj{{"id", c.id}, {"type", to_string(c.type)}};
        if (!c.config.partner.empty())
            cj["partner"] = c.config.partner;
        if (!c.config.weights.empty())
            cj["weights"] = c.config.weights;
        if (!c.config.params.empty())
            cj["params"] = c.config.params;
        if (!c.config.delegate.empty())
            cj["delegate"] = c.config.delegate;
        if (!c.interceptors.empty()) {
            ordered_json icps = ordered_json::array();
            for (const auto& i : c.interceptors) {
                ordered_json kinds = ordered_json::array();
                for (auto k : i.kinds)
                    kinds.push_back(to_string(k));
                icps.push_back({{"id", i.id}, {"kinds", kinds}});
            }
            cj["interceptors"] = std::move(icps);
        }
        cons.push_back(std::move(cj));
    }
    j["connectors"] = std::move(cons);

    ordered_json binds = ordered_json::array();
    for (const auto& b : rt.bindings)
        binds.push_back({{"from", b.from}, {"to", b.to}});
    j["bindings"] = std::move(binds);

    ordered_json blocks = ordered_json::array();
    for (const auto& b : rt.process_blocks)
        blocks.push_back({{"label", b.label}, {"start", b.start}, {"end", b.end}});
    j["process_blocks"] = std::move(blocks);

    ordered_json cps = ordered_json::array();
    for (const auto& c : rt.checkpoints) {
        ordered_json cj{{"id", c.id}, {"property", c.property_name}, {"kind", to_string(c.kind)}, {"block", c.block}};
        if (!c.source_interceptors.empty())
            cj["interceptors"] = c.source_interceptors;
        if (!c.inputs.empty())
            cj["inputs"] = c.inputs;
        cps.push_back(std::move(cj));
    }
    j["checkpoints"] = std::move(cps);

    ordered_json units = ordered_json::array();
    for (const auto& u : rt.evaluation_units) {
        ordered_json uj{{"id", u.id}, {"property", u.property_name}, {"block", u.block}};
        if (!u.trigger.empty())
            uj["trigger"] = u.trigger;
        units.push_back(std::move(uj));
    }
    j["evaluation_units"] = std::move(units);

    ordered_json pats = ordered_json::array();
    for (const auto& p : rt.adaptation_patterns)
        pats.push_back({{"id", p.id}, {"trigger", p.trigger}});
    j["adaptation_patterns"] = std::move(pats);
    return j;
}

} // namespace adaptflow
