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

#include "adaptflow/model_io.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "adaptflow/errors.hpp"
#include "adaptflow/qos.hpp"
#include "adaptflow/tactics.hpp"

namespace adaptflow {

using nlohmann::json;
using nlohmann::ordered_json;

std::string_view to_string(NodeKind kind)
{
    switch (kind) {
    case NodeKind::Seq: return "seq";
    case NodeKind::Loop: return "loop";
    case NodeKind::Sel: return "sel";
    case NodeKind::AndPar: return "and_par";
    case NodeKind::Opt: return "opt";
    case NodeKind::Service: return "service";
    }
    return "?";
}

std::string_view to_string(PropertyKind kind)
{
    switch (kind) {
    case PropertyKind::Time: return "time";
    case PropertyKind::Data: return "data";
    case PropertyKind::Failure: return "failure";
    case PropertyKind::Count: return "count";
    case PropertyKind::Constraint: return "constraint";
    case PropertyKind::Derived: return "derived";
    case PropertyKind::Aggregated: return "aggregated";
    }
    return "?";
}

std::string_view to_string(QualityLevel level)
{
    switch (level) {
    case QualityLevel::Acceptable: return "acceptable";
    case QualityLevel::Tolerable: return "tolerable";
    case QualityLevel::Unacceptable: return "unacceptable";
    }
    return "?";
}

std::string_view to_string(Severity severity)
{
    return severity == Severity::Hard ? "hard" : "soft";
}

std::string_view to_string(ScenarioAction action)
{
    switch (action) {
    case ScenarioAction::SetProviderFailure: return "set_provider_failure";
    case ScenarioAction::SetProviderLatency: return "set_provider_latency";
    case ScenarioAction::SetBandwidth: return "set_bandwidth";
    case ScenarioAction::AssertAssumption: return "assert_assumption";
    case ScenarioAction::RetractAssumption: return "retract_assumption";
    case ScenarioAction::StartInstances: return "start_instances";
    }
    return "?";
}

std::string falsify_trigger(std::string_view assumption)
{
    return "Falsify: " + std::string(assumption);
}

const ServiceSpec* AdaptiveProcessModel::find_service(std::string_view name) const
{
    for (const auto& s : services)
        if (s.name == name)
            return &s;
    return nullptr;
}

const ProviderProfile* AdaptiveProcessModel::find_provider(std::string_view id) const
{
    for (const auto& s : services)
        for (const auto& p : s.providers)
            if (p.id == id)
                return &p;
    return nullptr;
}

const std::vector<std::string>& message_fields()
{
    static const std::vector<std::string> fields{"payload_bytes", "elapsed_ms", "battery", "memory"};
    return fields;
}

namespace {

// Thin reader over a JSON object that tracks its location for diagnostics
// and rejects keys nobody asked for.
class Reader
{
public:
    Reader(const json& j, std::string path) : j_(j), path_(std::move(path))
    {
        if (!j_.is_object())
            throw ValidationError(path_, "expected an object");
    }

    const std::string& path() const { return path_; }
    bool has(const char* key) const { return j_.contains(key); }

    const json& at(const char* key)
    {
        seen_.insert(key);
        auto it = j_.find(key);
        if (it == j_.end())
            throw ValidationError(path_, std::string("missing field '") + key + "'");
        return *it;
    }

    const json* maybe(const char* key)
    {
        seen_.insert(key);
        auto it = j_.find(key);
        return it == j_.end() ? nullptr : &*it;
    }

    std::string str(const char* key)
    {
        const json& v = at(key);
        if (!v.is_string())
            throw ValidationError(path_ + "." + key, "expected a string");
        return v.get<std::string>();
    }

    std::optional<std::string> opt_str(const char* key)
    {
        if (!has(key)) {
            seen_.insert(key);
            return std::nullopt;
        }
        return str(key);
    }

    double num(const char* key)
    {
        const json& v = at(key);
        if (!v.is_number())
            throw ValidationError(path_ + "." + key, "expected a number");
        return v.get<double>();
    }

    double num_or(const char* key, double fallback) { return has(key) ? num(key) : (seen_.insert(key), fallback); }

    std::int64_t integer(const char* key)
    {
        const json& v = at(key);
        if (!v.is_number_integer())
            throw ValidationError(path_ + "." + key, "expected an integer");
        return v.get<std::int64_t>();
    }

    const json& array(const char* key)
    {
        const json& v = at(key);
        if (!v.is_array())
            throw ValidationError(path_ + "." + key, "expected an array");
        return v;
    }

    std::vector<std::string> strings(const char* key)
    {
        std::vector<std::string> out;
        if (!has(key)) {
            seen_.insert(key);
            return out;
        }
        const json& arr = array(key);
        for (const auto& v : arr) {
            if (!v.is_string())
                throw ValidationError(path_ + "." + key, "expected strings");
            out.push_back(v.get<std::string>());
        }
        return out;
    }

    void finish() const
    {
        for (auto it = j_.begin(); it != j_.end(); ++it)
            if (!seen_.count(it.key()))
                throw ValidationError(path_, "unknown field '" + it.key() + "'");
    }

private:
    const json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

std::string indexed(const std::string& path, std::size_t i)
{
    return path + "[" + std::to_string(i) + "]";
}

NodeKind node_kind_from(const std::string& s, const std::string& path)
{
    for (auto k : {NodeKind::Seq, NodeKind::Loop, NodeKind::Sel, NodeKind::AndPar, NodeKind::Opt, NodeKind::Service})
        if (to_string(k) == s)
            return k;
    throw ValidationError(path, "unknown node kind '" + s + "'");
}

ProcessNode read_node(const json& j, const std::string& path)
{
    Reader r(j, path);
    ProcessNode n;
    n.kind = node_kind_from(r.str("kind"), path);
    n.label = r.opt_str("label");
    std::string where = n.label ? "node '" + *n.label + "'" : path;
    if (n.kind == NodeKind::Service) {
        n.service = r.str("service");
    } else {
        const json& children = r.array("children");
        for (std::size_t i = 0; i < children.size(); ++i)
            n.children.push_back(read_node(children[i], indexed(path + ".children", i)));
    }
    if (n.kind == NodeKind::Loop)
        n.iterations = static_cast<int>(r.integer("k"));
    if (n.kind == NodeKind::Sel || n.kind == NodeKind::Opt) {
        if (const json* p = r.maybe("probabilities")) {
            if (!p->is_array())
                throw ValidationError(where, "probabilities must be an array");
            for (const auto& v : *p) {
                if (!v.is_number())
                    throw ValidationError(where, "probabilities must be numbers");
                n.probabilities.push_back(v.get<double>());
            }
        }
    }
    r.finish();
    return n;
}

ProviderProfile read_provider(const json& j, const std::string& path)
{
    Reader r(j, path);
    ProviderProfile p;
    p.id = r.str("id");
    if (r.has("latency_mean_ms"))
        p.latency_mean_ms = r.num("latency_mean_ms");
    else
        r.maybe("latency_mean_ms");
    p.latency_stddev_ms = r.num_or("latency_stddev_ms", 0.0);
    p.failure_probability = r.num_or("failure_probability", 0.0);
    p.cost = r.num_or("cost", 0.0);
    p.payload_bytes = r.num_or("payload_bytes", 0.0);
    r.finish();
    return p;
}

PropertyKind property_kind_from(const std::string& s, const std::string& path)
{
    for (auto k : {PropertyKind::Time, PropertyKind::Data, PropertyKind::Failure, PropertyKind::Count,
                   PropertyKind::Constraint, PropertyKind::Derived, PropertyKind::Aggregated})
        if (to_string(k) == s)
            return k;
    throw ValidationError(path, "unknown property kind '" + s + "'");
}

PropertySpec read_property(const json& j, const std::string& path)
{
    Reader r(j, path);
    PropertySpec p;
    p.name = r.str("name");
    p.kind = property_kind_from(r.str("kind"), path);
    switch (p.kind) {
    case PropertyKind::Data: p.field = r.str("field"); break;
    case PropertyKind::Constraint:
        p.field = r.str("field");
        p.op = r.str("op");
        p.threshold = r.num("value");
        break;
    case PropertyKind::Derived:
        p.function = r.str("function");
        p.args = r.strings("args");
        break;
    case PropertyKind::Aggregated: {
        p.function = r.str("function");
        const json& base = r.at("base");
        if (base.is_string())
            p.base = base.get<std::string>();
        else
            p.inline_base.push_back(read_property(base, path + ".base"));
        if (r.has("window_ms"))
            p.window_ms = r.integer("window_ms");
        else
            r.maybe("window_ms");
        break;
    }
    default: break;
    }
    r.finish();
    return p;
}

FuzzyMeasure read_fuzzy(const json& j, const std::string& path)
{
    Reader r(j, path);
    FuzzyMeasure fm;
    std::string o = r.str("orientation");
    if (o == "+")
        fm.orientation = Orientation::HigherIsBetter;
    else if (o == "-")
        fm.orientation = Orientation::LowerIsBetter;
    else
        throw ValidationError(path, "orientation must be '+' or '-'");
    fm.x1 = r.num("x1");
    fm.x2 = r.num("x2");
    if (const json* iv = r.maybe("interval")) {
        if (iv->is_string()) {
            if (iv->get<std::string>() != "per_instance")
                throw ValidationError(path, "interval must be \"per_instance\" or {\"window_ms\": n}");
        } else {
            Reader ir(*iv, path + ".interval");
            fm.interval.window_ms = ir.integer("window_ms");
            ir.finish();
        }
    }
    r.finish();
    return fm;
}

std::vector<Falsification> read_falsifications(Reader& r, const char* key)
{
    std::vector<Falsification> out;
    const json* arr = r.maybe(key);
    if (!arr)
        return out;
    if (!arr->is_array())
        throw ValidationError(r.path() + "." + key, "expected an array");
    for (std::size_t i = 0; i < arr->size(); ++i) {
        Reader fr((*arr)[i], indexed(r.path() + "." + key, i));
        Falsification f;
        std::string sev = fr.str("severity");
        if (sev == "hard")
            f.severity = Severity::Hard;
        else if (sev == "soft")
            f.severity = Severity::Soft;
        else
            throw ValidationError(fr.path(), "severity must be hard or soft");
        f.assumption = fr.str("assumption");
        fr.finish();
        out.push_back(std::move(f));
    }
    return out;
}

PlanFlow read_flow(const json& j, const std::string& path);

FlowNode read_flow_node(const json& j, const std::string& path)
{
    Reader r(j, path);
    FlowNode n;
    if (r.has("tactic")) {
        n.kind = FlowKind::Tactic;
        n.tactic.tactic = r.str("tactic");
        n.tactic.args = r.strings("args");
        n.tactic.pre_assumptions = r.strings("pre_assumptions");
        n.tactic.false_assumptions = read_falsifications(r, "false_assumptions");
    } else if (r.has("alternative")) {
        n.kind = FlowKind::Alternative;
        const json& alts = r.array("alternative");
        for (std::size_t i = 0; i < alts.size(); ++i)
            n.alternatives.push_back(read_flow(alts[i], indexed(path + ".alternative", i)));
    } else if (r.has("emit")) {
        n.kind = FlowKind::Emit;
        n.emit = r.str("emit");
    } else {
        throw ValidationError(path, "flow node needs one of tactic, alternative, emit");
    }
    r.finish();
    return n;
}

PlanFlow read_flow(const json& j, const std::string& path)
{
    if (!j.is_array())
        throw ValidationError(path, "expected an array of flow nodes");
    PlanFlow flow;
    for (std::size_t i = 0; i < j.size(); ++i)
        flow.push_back(read_flow_node(j[i], indexed(path, i)));
    return flow;
}

ScenarioEvent read_event(const json& j, const std::string& path)
{
    Reader r(j, path);
    ScenarioEvent e;
    e.at_ms = r.integer("at_ms");
    std::string action = r.str("action");
    if (action == "set_provider_failure") {
        e.action = ScenarioAction::SetProviderFailure;
        e.target = r.str("provider");
        e.value = r.num("p");
    } else if (action == "set_provider_latency") {
        e.action = ScenarioAction::SetProviderLatency;
        e.target = r.str("provider");
        e.value = r.num("mean");
        e.value2 = r.num_or("stddev", 0.0);
    } else if (action == "set_bandwidth") {
        e.action = ScenarioAction::SetBandwidth;
        const json& bw = r.at("bytes_per_ms");
        if (bw.is_string() && bw.get<std::string>() == "unlimited")
            e.unlimited = true;
        else if (bw.is_number())
            e.value = bw.get<double>();
        else
            throw ValidationError(path, "bytes_per_ms must be a number or \"unlimited\"");
    } else if (action == "assert_assumption" || action == "retract_assumption") {
        e.action = action == "assert_assumption" ? ScenarioAction::AssertAssumption : ScenarioAction::RetractAssumption;
        e.target = r.str("name");
    } else if (action == "start_instances") {
        e.action = ScenarioAction::StartInstances;
        e.value = r.num("rate_per_s");
    } else {
        throw ValidationError(path, "unknown scenario action '" + action + "'");
    }
    r.finish();
    return e;
}

AdaptiveProcessModel read_model(const json& j)
{
    Reader r(j, "model");
    AdaptiveProcessModel m;
    m.workflow = read_node(r.at("workflow"), "workflow");

    const json& services = r.array("services");
    for (std::size_t i = 0; i < services.size(); ++i) {
        std::string path = indexed("services", i);
        Reader sr(services[i], path);
        ServiceSpec s;
        s.name = sr.str("name");
        const json& providers = sr.array("providers");
        for (std::size_t k = 0; k < providers.size(); ++k)
            s.providers.push_back(read_provider(providers[k], indexed("service '" + s.name + "'.providers", k)));
        sr.finish();
        m.services.push_back(std::move(s));
    }

    if (const json* qrs = r.maybe("quality_requirements")) {
        if (!qrs->is_array())
            throw ValidationError("quality_requirements", "expected an array");
        for (std::size_t i = 0; i < qrs->size(); ++i) {
            std::string path = indexed("quality_requirements", i);
            Reader qr(( *qrs)[i], path);
            QualityRequirement q;
            q.target = qr.str("target");
            q.property = read_property(qr.at("property"), path + ".property");
            q.fuzzy = read_fuzzy(qr.at("fuzzy"), path + ".fuzzy");
            q.trigger = qr.opt_str("trigger").value_or("");
            qr.finish();
            m.quality_requirements.push_back(std::move(q));
        }
    }

    if (const json* plans = r.maybe("adaptation_plans")) {
        if (!plans->is_array())
            throw ValidationError("adaptation_plans", "expected an array");
        for (std::size_t i = 0; i < plans->size(); ++i) {
            std::string path = indexed("adaptation_plans", i);
            Reader pr((*plans)[i], path);
            AdaptationPlan p;
            p.trigger = pr.str("trigger");
            p.pre_assumptions = pr.strings("pre_assumptions");
            p.false_assumptions = read_falsifications(pr, "false_assumptions");
            p.flow = read_flow(pr.at("flow"), path + ".flow");
            pr.finish();
            m.adaptation_plans.push_back(std::move(p));
        }
    }

    if (const json* sc = r.maybe("scenario")) {
        Reader sr(*sc, "scenario");
        ScenarioScript s;
        const json& seed = sr.at("seed");
        if (!seed.is_number_unsigned() && !(seed.is_number_integer() && seed.get<std::int64_t>() >= 0))
            throw ValidationError("scenario.seed", "expected a non-negative integer");
        s.seed = seed.get<std::uint64_t>();
        s.horizon_ms = sr.integer("horizon_ms");
        if (const json* evs = sr.maybe("events")) {
            if (!evs->is_array())
                throw ValidationError("scenario.events", "expected an array");
            for (std::size_t i = 0; i < evs->size(); ++i)
                s.events.push_back(read_event((*evs)[i], indexed("scenario.events", i)));
        }
        sr.finish();
        m.scenario = std::move(s);
    }
    r.finish();
    return m;
}

ordered_json write_node(const ProcessNode& n)
{
    ordered_json j;
    j["kind"] = to_string(n.kind);
    if (n.label)
        j["label"] = *n.label;
    if (n.kind == NodeKind::Loop)
        j["k"] = n.iterations;
    if (!n.probabilities.empty())
        j["probabilities"] = n.probabilities;
    if (n.kind == NodeKind::Service) {
        j["service"] = n.service;
    } else {
        ordered_json children = ordered_json::array();
        for (const auto& c : n.children)
            children.push_back(write_node(c));
        j["children"] = std::move(children);
    }
    return j;
}

ordered_json write_property(const PropertySpec& p)
{
    ordered_json j;
    j["name"] = p.name;
    j["kind"] = to_string(p.kind);
    switch (p.kind) {
    case PropertyKind::Data: j["field"] = p.field; break;
    case PropertyKind::Constraint:
        j["field"] = p.field;
        j["op"] = p.op;
        j["value"] = p.threshold;
        break;
    case PropertyKind::Derived:
        j["function"] = p.function;
        j["args"] = p.args;
        break;
    case PropertyKind::Aggregated:
        j["function"] = p.function;
        if (!p.inline_base.empty())
            j["base"] = write_property(p.inline_base.front());
        else
            j["base"] = p.base;
        if (p.window_ms)
            j["window_ms"] = *p.window_ms;
        break;
    default: break;
    }
    return j;
}

ordered_json write_falsifications(const std::vector<Falsification>& fs)
{
    ordered_json arr = ordered_json::array();
    for (const auto& f : fs)
        arr.push_back({{"severity", to_string(f.severity)}, {"assumption", f.assumption}});
    return arr;
}

ordered_json write_flow(const PlanFlow& flow)
{
    ordered_json arr = ordered_json::array();
    for (const auto& n : flow) {
        ordered_json j;
        switch (n.kind) {
        case FlowKind::Tactic:
            j["tactic"] = n.tactic.tactic;
            j["args"] = n.tactic.args;
            if (!n.tactic.pre_assumptions.empty())
                j["pre_assumptions"] = n.tactic.pre_assumptions;
            if (!n.tactic.false_assumptions.empty())
                j["false_assumptions"] = write_falsifications(n.tactic.false_assumptions);
            break;
        case FlowKind::Alternative: {
            ordered_json alts = ordered_json::array();
            for (const auto& a : n.alternatives)
                alts.push_back(write_flow(a));
            j["alternative"] = std::move(alts);
            break;
        }
        case FlowKind::Emit: j["emit"] = n.emit; break;
        }
        arr.push_back(std::move(j));
    }
    return arr;
}

ordered_json write_event(const ScenarioEvent& e)
{
    ordered_json j;
    j["at_ms"] = e.at_ms;
    j["action"] = to_string(e.action);
    switch (e.action) {
    case ScenarioAction::SetProviderFailure:
        j["provider"] = e.target;
        j["p"] = e.value;
        break;
    case ScenarioAction::SetProviderLatency:
        j["provider"] = e.target;
        j["mean"] = e.value;
        j["stddev"] = e.value2;
        break;
    case ScenarioAction::SetBandwidth:
        if (e.unlimited)
            j["bytes_per_ms"] = "unlimited";
        else
            j["bytes_per_ms"] = e.value;
        break;
    case ScenarioAction::AssertAssumption:
    case ScenarioAction::RetractAssumption: j["name"] = e.target; break;
    case ScenarioAction::StartInstances: j["rate_per_s"] = e.value; break;
    }
    return j;
}

// ---- validation ----

void collect_nodes(const ProcessNode& n, std::vector<const ProcessNode*>& out)
{
    out.push_back(&n);
    for (const auto& c : n.children)
        collect_nodes(c, out);
}

std::string describe(const ProcessNode& n, const std::string& path)
{
    return n.label ? "node '" + *n.label + "'" : "node " + path;
}

void validate_node(const AdaptiveProcessModel& m, const ProcessNode& n, const std::string& path, bool top,
                   std::set<std::string>& labels)
{
    std::string where = describe(n, path);
    if (n.label) {
        if (n.label->empty())
            throw ValidationError(where, "empty label");
        if (*n.label == kRootLabel && !top)
            throw ValidationError("label 'root'", "the label is reserved for the whole workflow");
        if (!labels.insert(*n.label).second)
            throw ValidationError("label '" + *n.label + "'", "label is used more than once");
    }
    auto arity = [&](std::size_t lo, std::size_t hi) {
        if (n.children.size() < lo || n.children.size() > hi)
            throw ValidationError(where, std::string(to_string(n.kind)) + " node has " + std::to_string(n.children.size())
                                             + " children");
    };
    switch (n.kind) {
    case NodeKind::Service:
        if (!n.children.empty())
            throw ValidationError(where, "service node cannot have children");
        if (!m.find_service(n.service))
            throw ValidationError("service '" + n.service + "'", "not in the catalog (" + where + ")");
        break;
    case NodeKind::Seq: arity(1, SIZE_MAX); break;
    case NodeKind::AndPar: arity(2, SIZE_MAX); break;
    case NodeKind::Sel: {
        arity(2, SIZE_MAX);
        if (n.probabilities.size() != n.children.size())
            throw ValidationError(where, "needs one probability per branch");
        double sum = 0.0;
        for (double p : n.probabilities) {
            if (!(p >= 0.0 && p <= 1.0))
                throw ValidationError(where, "probability out of [0, 1]");
            sum += p;
        }
        if (std::abs(sum - 1.0) > 1e-9)
            throw ValidationError(where, "branch probabilities sum to " + std::to_string(sum) + ", not 1");
        break;
    }
    case NodeKind::Loop:
        arity(1, 1);
        if (n.iterations < 1)
            throw ValidationError(where, "loop count must be at least 1");
        break;
    case NodeKind::Opt:
        arity(1, 1);
        if (n.probabilities.size() > 1)
            throw ValidationError(where, "opt takes a single probability");
        if (!n.probabilities.empty() && !(n.probabilities[0] >= 0.0 && n.probabilities[0] <= 1.0))
            throw ValidationError(where, "probability out of [0, 1]");
        break;
    }
    if (n.kind != NodeKind::Sel && n.kind != NodeKind::Opt && !n.probabilities.empty())
        throw ValidationError(where, "probabilities only apply to sel and opt");
    for (std::size_t i = 0; i < n.children.size(); ++i)
        validate_node(m, n.children[i], indexed(path + ".children", i), false, labels);
}

void validate_catalog(const AdaptiveProcessModel& m)
{
    std::set<std::string> names, providers;
    for (const auto& s : m.services) {
        std::string where = "service '" + s.name + "'";
        if (s.name.empty())
            throw ValidationError("services", "service without a name");
        if (!names.insert(s.name).second)
            throw ValidationError(where, "declared twice");
        if (s.providers.empty())
            throw ValidationError(where, "needs at least one provider");
        for (const auto& p : s.providers) {
            std::string pw = "provider '" + p.id + "'";
            if (p.id.empty())
                throw ValidationError(where, "provider without an id");
            if (!providers.insert(p.id).second)
                throw ValidationError(pw, "declared twice");
            if (p.latency_mean_ms && !(*p.latency_mean_ms >= 0.0))
                throw ValidationError(pw, "negative latency");
            if (!(p.latency_stddev_ms >= 0.0))
                throw ValidationError(pw, "negative latency deviation");
            if (!(p.failure_probability >= 0.0 && p.failure_probability <= 1.0))
                throw ValidationError(pw, "failure probability out of [0, 1]");
            if (!(p.cost >= 0.0))
                throw ValidationError(pw, "negative cost");
            if (!(p.payload_bytes >= 0.0))
                throw ValidationError(pw, "negative payload");
        }
    }
}

void validate_property(const PropertySpec& p)
{
    std::string where = "property '" + p.name + "'";
    if (p.name.empty())
        throw ValidationError("quality_requirements", "property without a name");
    switch (p.kind) {
    case PropertyKind::Data:
        if (std::find(message_fields().begin(), message_fields().end(), p.field) == message_fields().end())
            throw ValidationError(where, "unknown message field '" + p.field + "'");
        break;
    case PropertyKind::Constraint: {
        static const std::set<std::string> ops{"<", "<=", ">", ">=", "==", "!="};
        if (std::find(message_fields().begin(), message_fields().end(), p.field) == message_fields().end())
            throw ValidationError(where, "unknown message field '" + p.field + "'");
        if (!ops.count(p.op))
            throw ValidationError(where, "unknown comparison '" + p.op + "'");
        break;
    }
    case PropertyKind::Derived:
        if (!is_derived_function(p.function))
            throw ValidationError(where, "unknown function '" + p.function + "'");
        if (p.args.empty())
            throw ValidationError(where, "derived property needs arguments");
        break;
    case PropertyKind::Aggregated:
        if (!is_aggregation_function(p.function))
            throw ValidationError(where, "unknown aggregation '" + p.function + "'");
        if (p.inline_base.empty() && p.base.empty())
            throw ValidationError(where, "aggregation needs a base property");
        if (p.window_ms && *p.window_ms <= 0)
            throw ValidationError(where, "window must be positive");
        for (const auto& b : p.inline_base)
            validate_property(b);
        break;
    default: break;
    }
}

void validate_requirements(const AdaptiveProcessModel& m)
{
    for (const auto& q : m.quality_requirements) {
        if (q.target != kRootLabel) {
            std::vector<const ProcessNode*> nodes;
            collect_nodes(m.workflow, nodes);
            bool found = std::any_of(nodes.begin(), nodes.end(), [&](const ProcessNode* n) { return n->label == q.target; });
            if (!found)
                throw ValidationError("label '" + q.target + "'",
                                      "requirement '" + q.property.name + "' targets an undeclared block");
        }
        validate_property(q.property);
        std::string where = "requirement '" + q.property.name + "'";
        if (!(q.fuzzy.x1 <= q.fuzzy.x2))
            throw ValidationError(where, "x1 must not exceed x2");
        if (q.fuzzy.interval.window_ms && *q.fuzzy.interval.window_ms <= 0)
            throw ValidationError(where, "window must be positive");
    }

    std::map<std::string, const PropertySpec*> by_name;
    for (const auto& d : declared_properties(m))
        if (!by_name.emplace(d.spec->name, d.spec).second)
            throw ValidationError("property '" + d.spec->name + "'", "declared twice");

    auto references = [](const PropertySpec& p) {
        std::vector<std::string> refs;
        if (p.kind == PropertyKind::Derived)
            refs = p.args;
        else if (p.kind == PropertyKind::Aggregated && p.inline_base.empty())
            refs.push_back(p.base);
        return refs;
    };
    for (const auto& [name, spec] : by_name)
        for (const auto& ref : references(*spec))
            if (!by_name.count(ref))
                throw ValidationError("property '" + name + "'", "references undeclared property '" + ref + "'");

    // Cycle detection: depth-first with colors.
    std::map<std::string, int> color;
    std::function<void(const std::string&)> visit = [&](const std::string& name) {
        color[name] = 1;
        for (const auto& ref : references(*by_name.at(name))) {
            if (color[ref] == 1)
                throw ValidationError("property '" + ref + "'", "cyclic property reference via '" + name + "'");
            if (color[ref] == 0)
                visit(ref);
        }
        color[name] = 2;
    };
    for (const auto& [name, spec] : by_name)
        if (color[name] == 0)
            visit(name);
}

struct FlowScan
{
    std::set<std::string> emitted;
    std::set<std::string> falsified;
};

void scan_flow(const PlanFlow& flow, FlowScan& scan)
{
    for (const auto& n : flow) {
        if (n.kind == FlowKind::Emit)
            scan.emitted.insert(n.emit);
        for (const auto& f : n.tactic.false_assumptions)
            if (f.severity == Severity::Hard)
                scan.falsified.insert(f.assumption);
        for (const auto& a : n.alternatives)
            scan_flow(a, scan);
    }
}

void validate_arg(const AdaptiveProcessModel& m, const std::set<std::string>& labels,
                  const std::set<std::string>& used_services, const ArgSpec& spec, const std::string& arg,
                  const std::string& where)
{
    auto fail = [&](const std::string& why) { throw ValidationError(where, "argument '" + arg + "' " + why); };
    switch (spec.role) {
    case ArgRole::Component:
        if (!used_services.count(arg) && !labels.count(arg))
            fail("is not a service of the workflow");
        break;
    case ArgRole::Anchor:
        if (!used_services.count(arg) && !labels.count(arg) && arg != kRootLabel)
            fail("is neither a workflow service nor a block label");
        break;
    case ArgRole::NewService:
        if (!m.find_service(arg))
            fail("is not a catalog service");
        break;
    case ArgRole::Peer:
        if (!m.find_provider(arg) && !used_services.count(arg) && !labels.count(arg))
            fail("is neither a provider nor a workflow service");
        break;
    case ArgRole::Delegate:
        if (!payload_delegates().count(arg))
            fail("is not a known payload function");
        break;
    case ArgRole::Filter:
        if (!cache_filters().count(arg))
            fail("is not a known cache filter");
        break;
    case ArgRole::Condition: {
        const auto& conds = retry_conditions();
        if (std::find(conds.begin(), conds.end(), arg) == conds.end())
            fail("is not a known condition");
        break;
    }
    }
}

void validate_flow(const AdaptiveProcessModel& m, const TacticLibrary& tactics, const PlanFlow& flow,
                   const std::string& plan, const std::set<std::string>& labels,
                   const std::set<std::string>& used_services)
{
    if (flow.empty())
        throw ValidationError(plan, "empty flow");
    for (const auto& n : flow) {
        switch (n.kind) {
        case FlowKind::Tactic: {
            std::string where = plan + " tactic '" + n.tactic.tactic + "'";
            const TacticTemplate* t = tactics.find(n.tactic.tactic);
            if (!t)
                throw ValidationError(where, "unknown tactic");
            std::size_t argc = n.tactic.args.size();
            if (argc < t->min_arity() || argc > t->max_arity())
                throw ValidationError(where, "takes " + std::to_string(t->min_arity()) + ".."
                                                 + std::to_string(t->max_arity()) + " arguments, got "
                                                 + std::to_string(argc));
            for (std::size_t i = 0; i < argc; ++i)
                validate_arg(m, labels, used_services, t->args[i], n.tactic.args[i], where);
            for (const auto& f : n.tactic.false_assumptions)
                if (f.assumption.empty())
                    throw ValidationError(where, "falsification without an assumption");
            break;
        }
        case FlowKind::Alternative:
            if (n.alternatives.size() < 2)
                throw ValidationError(plan, "alternative needs at least two variations");
            for (const auto& a : n.alternatives)
                validate_flow(m, tactics, a, plan, labels, used_services);
            break;
        case FlowKind::Emit:
            if (n.emit.empty())
                throw ValidationError(plan, "emit without a trigger name");
            break;
        }
    }
}

void validate_plans(const AdaptiveProcessModel& m, const TacticLibrary& tactics)
{
    std::vector<const ProcessNode*> nodes;
    collect_nodes(m.workflow, nodes);
    std::set<std::string> labels, used_services;
    for (const auto* n : nodes) {
        if (n->label)
            labels.insert(*n->label);
        if (n->kind == NodeKind::Service)
            used_services.insert(n->service);
    }

    std::set<std::string> known;
    for (const auto& q : m.quality_requirements)
        if (!q.trigger.empty())
            known.insert(q.trigger);
    FlowScan scan;
    for (const auto& p : m.adaptation_plans) {
        scan_flow(p.flow, scan);
        for (const auto& f : p.false_assumptions)
            if (f.severity == Severity::Hard)
                scan.falsified.insert(f.assumption);
    }
    known.insert(scan.emitted.begin(), scan.emitted.end());
    for (const auto& a : scan.falsified)
        known.insert(falsify_trigger(a));

    for (std::size_t i = 0; i < m.adaptation_plans.size(); ++i) {
        const auto& p = m.adaptation_plans[i];
        std::string plan = "plan '" + p.trigger + "'";
        if (!known.count(p.trigger))
            throw ValidationError("trigger '" + p.trigger + "'", "no requirement, falsification or emit produces it");
        for (const auto& f : p.false_assumptions)
            if (f.assumption.empty())
                throw ValidationError(plan, "falsification without an assumption");
        validate_flow(m, tactics, p.flow, plan, labels, used_services);
    }
}

void validate_scenario(const AdaptiveProcessModel& m)
{
    if (!m.scenario)
        return;
    const auto& s = *m.scenario;
    if (s.horizon_ms < 0)
        throw ValidationError("scenario", "negative horizon");
    std::int64_t last = 0;
    for (std::size_t i = 0; i < s.events.size(); ++i) {
        const auto& e = s.events[i];
        std::string where = indexed("scenario.events", i);
        if (e.at_ms < last)
            throw ValidationError(where, "events must be in time order");
        if (e.at_ms > s.horizon_ms)
            throw ValidationError(where, "event after the horizon");
        last = e.at_ms;
        switch (e.action) {
        case ScenarioAction::SetProviderFailure:
            if (!m.find_provider(e.target))
                throw ValidationError("provider '" + e.target + "'", "unknown provider in " + where);
            if (!(e.value >= 0.0 && e.value <= 1.0))
                throw ValidationError(where, "failure probability out of [0, 1]");
            break;
        case ScenarioAction::SetProviderLatency:
            if (!m.find_provider(e.target))
                throw ValidationError("provider '" + e.target + "'", "unknown provider in " + where);
            if (!(e.value >= 0.0) || !(e.value2 >= 0.0))
                throw ValidationError("provider '" + e.target + "'", "negative latency in " + where);
            break;
        case ScenarioAction::SetBandwidth:
            if (!e.unlimited && !(e.value >= 0.0))
                throw ValidationError(where, "negative bandwidth");
            break;
        case ScenarioAction::StartInstances:
            if (!(e.value >= 0.0))
                throw ValidationError(where, "negative arrival rate");
            break;
        case ScenarioAction::AssertAssumption:
        case ScenarioAction::RetractAssumption:
            if (e.target.empty())
                throw ValidationError(where, "assumption without a name");
            break;
        }
    }
}

} // namespace

void validate_model(const AdaptiveProcessModel& model, const TacticLibrary& tactics)
{
    validate_catalog(model);
    std::set<std::string> labels;
    validate_node(model, model.workflow, "workflow", true, labels);
    validate_requirements(model);
    validate_plans(model, tactics);
    validate_scenario(model);
}

AdaptiveProcessModel parse_model(std::string_view text, const TacticLibrary& tactics)
{
    json j;
    try {
        j = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        std::size_t offset = e.byte == 0 ? 0 : e.byte - 1;
        offset = std::min(offset, text.size());
        std::size_t line = 1, column = 1;
        for (std::size_t i = 0; i < offset; ++i) {
            if (text[i] == '\n') {
                ++line;
                column = 1;
            } else {
                ++column;
            }
        }
        std::string what = e.what();
        auto pos = what.find("parse error");
        throw SyntaxError(pos == std::string::npos ? what : what.substr(pos), line, column);
    }
    AdaptiveProcessModel m = read_model(j);
    validate_model(m, tactics);
    return m;
}

AdaptiveProcessModel parse_model(std::string_view text)
{
    return parse_model(text, TacticLibrary::builtin());
}

AdaptiveProcessModel load_model_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw NotFound("cannot open '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_model(ss.str());
}

std::string serialize_model(const AdaptiveProcessModel& m)
{
    ordered_json j;
    j["workflow"] = write_node(m.workflow);
    ordered_json services = ordered_json::array();
    for (const auto& s : m.services) {
        ordered_json providers = ordered_json::array();
        for (const auto& p : s.providers) {
            ordered_json pj;
            pj["id"] = p.id;
            if (p.latency_mean_ms)
                pj["latency_mean_ms"] = *p.latency_mean_ms;
            pj["latency_stddev_ms"] = p.latency_stddev_ms;
            pj["failure_probability"] = p.failure_probability;
            pj["cost"] = p.cost;
            pj["payload_bytes"] = p.payload_bytes;
            providers.push_back(std::move(pj));
        }
        services.push_back({{"name", s.name}, {"providers", std::move(providers)}});
    }
    j["services"] = std::move(services);

    ordered_json qrs = ordered_json::array();
    for (const auto& q : m.quality_requirements) {
        ordered_json qj;
        qj["target"] = q.target;
        qj["property"] = write_property(q.property);
        ordered_json fj;
        fj["orientation"] = q.fuzzy.orientation == Orientation::HigherIsBetter ? "+" : "-";
        fj["x1"] = q.fuzzy.x1;
        fj["x2"] = q.fuzzy.x2;
        if (q.fuzzy.interval.window_ms)
            fj["interval"] = ordered_json{{"window_ms", *q.fuzzy.interval.window_ms}};
        else
            fj["interval"] = "per_instance";
        qj["fuzzy"] = std::move(fj);
        if (!q.trigger.empty())
            qj["trigger"] = q.trigger;
        qrs.push_back(std::move(qj));
    }
    j["quality_requirements"] = std::move(qrs);

    ordered_json plans = ordered_json::array();
    for (const auto& p : m.adaptation_plans) {
        ordered_json pj;
        pj["trigger"] = p.trigger;
        if (!p.pre_assumptions.empty())
            pj["pre_assumptions"] = p.pre_assumptions;
        if (!p.false_assumptions.empty())
            pj["false_assumptions"] = write_falsifications(p.false_assumptions);
        pj["flow"] = write_flow(p.flow);
        plans.push_back(std::move(pj));
    }
    j["adaptation_plans"] = std::move(plans);

    if (m.scenario) {
        ordered_json sj;
        sj["seed"] = m.scenario->seed;
        sj["horizon_ms"] = m.scenario->horizon_ms;
        ordered_json evs = ordered_json::array();
        for (const auto& e : m.scenario->events)
            evs.push_back(write_event(e));
        sj["events"] = std::move(evs);
        j["scenario"] = std::move(sj);
    }
    return j.dump(2) + "\n";
}

const ProcessNode& resolve_label(const AdaptiveProcessModel& model, std::string_view label)
{
    if (label == kRootLabel)
        return model.workflow;
    std::vector<const ProcessNode*> nodes;
    collect_nodes(model.workflow, nodes);
    for (const auto* n : nodes)
        if (n->label && *n->label == label)
            return *n;
    throw NotFound("no block labeled '" + std::string(label) + "'");
}

std::vector<DeclaredProperty> declared_properties(const AdaptiveProcessModel& model)
{
    std::vector<DeclaredProperty> out;
    std::function<void(const PropertySpec&, const std::string&)> add = [&](const PropertySpec& p, const std::string& t) {
        for (const auto& b : p.inline_base)
            add(b, t);
        out.push_back({&p, t});
    };
    for (const auto& q : model.quality_requirements)
        add(q.property, q.target);
    return out;
}

std::vector<std::string> declared_assumptions(const AdaptiveProcessModel& model)
{
    std::set<std::string> names;
    std::function<void(const PlanFlow&)> scan = [&](const PlanFlow& flow) {
        for (const auto& n : flow) {
            names.insert(n.tactic.pre_assumptions.begin(), n.tactic.pre_assumptions.end());
            for (const auto& f : n.tactic.false_assumptions)
                names.insert(f.assumption);
            for (const auto& a : n.alternatives)
                scan(a);
        }
    };
    for (const auto& p : model.adaptation_plans) {
        names.insert(p.pre_assumptions.begin(), p.pre_assumptions.end());
        for (const auto& f : p.false_assumptions)
            names.insert(f.assumption);
        scan(p.flow);
    }
    if (model.scenario)
        for (const auto& e : model.scenario->events)
            if (e.action == ScenarioAction::AssertAssumption || e.action == ScenarioAction::RetractAssumption)
                names.insert(e.target);
    return {names.begin(), names.end()};
}

} // namespace adaptflow
