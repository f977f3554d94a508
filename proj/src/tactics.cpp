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

#include "adaptflow/tactics.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "adaptflow/errors.hpp"

namespace adaptflow {

std::string_view to_string(ArgRole role)
{
    switch (role) {
    case ArgRole::Component: return "component";
    case ArgRole::Anchor: return "anchor";
    case ArgRole::NewService: return "new_service";
    case ArgRole::Peer: return "peer";
    case ArgRole::Delegate: return "delegate";
    case ArgRole::Filter: return "filter";
    case ArgRole::Condition: return "condition";
    }
    return "?";
}

double Attributes::get(std::string_view a) const
{
    if (a == "response_time")
        return response_time;
    if (a == "cost")
        return cost;
    if (a == "availability")
        return availability;
    if (a == "reliability")
        return reliability;
    if (a == "payload_bytes")
        return payload_bytes;
    if (a == "transit_ms")
        return transit_ms;
    if (a == "battery")
        return battery;
    if (a == "memory")
        return memory;
    throw Error("unknown attribute '" + std::string(a) + "'");
}

void Attributes::set(std::string_view a, double v)
{
    if (a == "response_time")
        response_time = v;
    else if (a == "cost")
        cost = v;
    else if (a == "availability")
        availability = v;
    else if (a == "reliability")
        reliability = v;
    else if (a == "payload_bytes")
        payload_bytes = v;
    else if (a == "transit_ms")
        transit_ms = v;
    else if (a == "battery")
        battery = v;
    else if (a == "memory")
        memory = v;
    else
        throw Error("unknown attribute '" + std::string(a) + "'");
}

double EffectInputs::param(const std::string& key, double fallback) const
{
    auto it = params.find(key);
    return it == params.end() ? fallback : it->second;
}

std::size_t TacticTemplate::min_arity() const
{
    return static_cast<std::size_t>(std::count_if(args.begin(), args.end(), [](const ArgSpec& a) { return !a.optional; }));
}

const std::map<std::string, PayloadDelegate>& payload_delegates()
{
    static const std::map<std::string, PayloadDelegate> d{
        {"merge", {0.7, 1.0}},
        {"sample", {0.1, 1.0}},
        {"summarize", {0.5, 2.0}},
        {"truncate", {0.25, 1.0}},
    };
    return d;
}

const std::map<std::string, double>& cache_filters()
{
    static const std::map<std::string, double> f{
        {"any", 0.5},
        {"recent", 0.3},
        {"static_content", 0.8},
    };
    return f;
}

const std::vector<std::string>& retry_conditions()
{
    static const std::vector<std::string> c{"success"};
    return c;
}

namespace {

using CT = ConnectorType;
using CA = ChangeAction;

Term V(const std::string& name)
{
    return Term::var(name);
}

PatternVar comp(std::string n)
{
    return {std::move(n), VarType::Component};
}

PatternVar any(std::string n)
{
    return {std::move(n), VarType::Any};
}

ConnectorConfig cfg(std::string partner = {}, std::map<std::string, double> params = {}, std::string delegate = {})
{
    ConnectorConfig c;
    c.partner = std::move(partner);
    c.params = std::move(params);
    c.delegate = std::move(delegate);
    return c;
}

// Replaces the factor `old_value` of a product by `new_value`.
double swap_factor(double product, double old_value, double new_value)
{
    if (old_value < 1e-9)
        return std::clamp(new_value, 0.0, 1.0);
    return std::clamp(product / old_value * new_value, 0.0, 1.0);
}

double either(double a, double b)
{
    return 1.0 - (1.0 - a) * (1.0 - b);
}

// forall Y: bind(anchor, Y) in the frame -> bind(to, Y) now
ForAllClause outs_moved(const std::string& anchor, const std::string& to, bool keep_anchor = false)
{
    ForAllClause c{any("Y"), Atom::bind(V(anchor), V("Y")), {Atom::bind(V(to), V("Y"))}};
    if (!keep_anchor)
        c.consequents.push_back(!Atom::bind(V(anchor), V("Y")));
    return c;
}

// forall X: bind(X, anchor) in the frame -> bind(X, to) now
ForAllClause ins_moved(const std::string& anchor, const std::string& to)
{
    return {any("X"), Atom::bind(V("X"), V(anchor)), {Atom::bind(V("X"), V(to)), !Atom::bind(V("X"), V(anchor))}};
}

TacticTemplate parallel_like(bool serial)
{
    TacticTemplate t;
    std::string out = serial ? "SerOutCon" : "ParOutCon";
    std::string in = serial ? "SerInCon" : "ParInCon";
    CT out_type = serial ? CT::SerialOut : CT::ParallelOut;
    CT in_type = serial ? CT::SerialIn : CT::ParallelIn;
    t.kind = serial ? "serial" : "parallel";
    t.category = "activity";
    t.description = serial ? "Invoke a spare component of the same type when SC fails."
                           : "Invoke SC and a spare component of the same type at once; the first response wins.";
    t.args = {{"SC", ArgRole::Component}, {"SC2", ArgRole::Peer, true}};
    t.supporting_connectors = {out_type, in_type};
    t.precondition.vars = {comp("SC2")};
    t.precondition.atoms = {Atom::is_component(V("SC")), Atom::is_component(V("SC2")),
                            Atom::same_component_type(V("SC"), V("SC2")), Atom::distinct(V("SC"), V("SC2")),
                            Atom::isolated(V("SC2"))};
    t.pre_state.vars = {any("ConX"), any("ConY")};
    t.pre_state.atoms = {Atom::bind(V("ConX"), V("SC")), Atom::bind(V("SC"), V("ConY"))};
    t.fresh = {{out, out}, {in, in}};
    t.change_actions = {
        CA::add_connector("?" + out, out_type, cfg("?" + in)),
        CA::add_connector("?" + in, in_type, cfg("?" + out)),
        CA::add_binding("?" + out, "?SC"),
        CA::add_binding("?" + out, "?SC2"),
        CA::add_binding("?SC", "?" + in),
        CA::add_binding("?SC2", "?" + in),
        CA::for_each_in_binding("?SC", "?" + out, {"?" + out}),
        CA::for_each_out_binding("?SC", "?" + in, {"?" + in}),
    };
    t.post_state.atoms = {Atom::connector_type_is(V(out), out_type), Atom::connector_type_is(V(in), in_type),
                          Atom::bind(V(out), V("SC")), Atom::bind(V(out), V("SC2")), Atom::bind(V("SC"), V(in)),
                          Atom::bind(V("SC2"), V(in))};
    t.post_state.forall = {
        {any("X"), Atom::bind(V("X"), V("SC")), {Atom::bind(V("X"), V(out))}},
        {any("Y"), Atom::bind(V("SC"), V("Y")), {Atom::bind(V(in), V("Y"))}},
    };
    if (!serial) {
        t.effects = {
            {"availability", "A(pb) = A(pb) / A(SC) * (1 - (1 - A(SC)) * (1 - A(SC')))",
             [](const EffectInputs& in) {
                 return swap_factor(in.block.availability, in.primary.availability,
                                    either(in.primary.availability, in.secondary.availability));
             }},
            {"reliability", "R(pb) = R(pb) / R(SC) * (1 - (1 - R(SC)) * (1 - R(SC')))",
             [](const EffectInputs& in) {
                 return swap_factor(in.block.reliability, in.primary.reliability,
                                    either(in.primary.reliability, in.secondary.reliability));
             }},
            {"cost", "C(pb) = C(pb) + C(SC')", [](const EffectInputs& in) { return in.block.cost + in.secondary.cost; }},
            {"response_time", "T(pb) = T(pb) - T(SC) + min(T(SC), T(SC'))",
             [](const EffectInputs& in) {
                 return in.block.response_time - in.primary.response_time
                        + std::min(in.primary.response_time, in.secondary.response_time);
             }},
        };
    } else {
        t.effects = {
            {"availability", "A(pb) = A(pb) / A(SC) * (1 - (1 - A(SC)) * (1 - A(SC')))",
             [](const EffectInputs& in) {
                 return swap_factor(in.block.availability, in.primary.availability,
                                    either(in.primary.availability, in.secondary.availability));
             }},
            {"reliability", "R(pb) = R(pb) / R(SC) * (1 - (1 - R(SC)) * (1 - R(SC')))",
             [](const EffectInputs& in) {
                 return swap_factor(in.block.reliability, in.primary.reliability,
                                    either(in.primary.reliability, in.secondary.reliability));
             }},
            {"cost", "C(pb) = C(pb) + (1 - A(SC)) * C(SC')",
             [](const EffectInputs& in) {
                 return in.block.cost + (1.0 - in.primary.availability) * in.secondary.cost;
             }},
            {"response_time", "T(pb) = T(pb) + (1 - A(SC)) * T(SC')",
             [](const EffectInputs& in) {
                 return in.block.response_time + (1.0 - in.primary.availability) * in.secondary.response_time;
             }},
        };
    }
    return t;
}

TacticTemplate reexecute()
{
    TacticTemplate t;
    t.kind = "reexecute";
    t.category = "activity";
    t.description = "Re-invoke E through a condition connector until the condition holds or the cap is reached.";
    t.args = {{"E", ArgRole::Component}, {"Cond", ArgRole::Condition, true}};
    t.supporting_connectors = {CT::Condition};
    t.precondition.atoms = {Atom::is_component(V("E"))};
    t.pre_state.vars = {any("ConY")};
    t.pre_state.atoms = {Atom::bind(V("E"), V("ConY"))};
    t.fresh = {{"CondCon", "CondCon"}};
    t.params = {{"cap", 5.0}};
    t.change_actions = {
        CA::add_connector("?CondCon", CT::Condition, cfg({}, {{"cap", 5.0}}, "?Cond")),
        CA::add_binding("?CondCon", "?E"),
        CA::for_each_out_binding("?E", "?CondCon", {"?CondCon"}),
        CA::add_binding("?E", "?CondCon"),
    };
    t.post_state.atoms = {Atom::connector_type_is(V("CondCon"), CT::Condition), Atom::bind(V("E"), V("CondCon")),
                          Atom::bind(V("CondCon"), V("E"))};
    t.post_state.forall = {outs_moved("E", "CondCon")};
    auto attempts = [](const EffectInputs& in) {
        double a = in.primary.availability;
        double n = in.param("cap", 5.0);
        return a < 1e-9 ? n : (1.0 - std::pow(1.0 - a, n)) / a;
    };
    t.effects = {
        {"availability", "A(pb) = A(pb) / A(E) * (1 - (1 - A(E))^cap)",
         [](const EffectInputs& in) {
             double a = in.primary.availability;
             return swap_factor(in.block.availability, a, 1.0 - std::pow(1.0 - a, in.param("cap", 5.0)));
         }},
        {"reliability", "R(pb) = R(pb) / R(E) * (1 - (1 - R(E))^cap)",
         [](const EffectInputs& in) {
             double r = in.primary.reliability;
             return swap_factor(in.block.reliability, r, 1.0 - std::pow(1.0 - r, in.param("cap", 5.0)));
         }},
        {"response_time", "T(pb) = T(pb) + T(E) * (attempts - 1), attempts = (1 - (1 - A(E))^cap) / A(E)",
         [attempts](const EffectInputs& in) {
             return in.block.response_time + in.primary.response_time * (attempts(in) - 1.0);
         }},
        {"cost", "C(pb) = C(pb) + C(E) * (attempts - 1)",
         [attempts](const EffectInputs& in) { return in.block.cost + in.primary.cost * (attempts(in) - 1.0); }},
    };
    return t;
}

TacticTemplate skip()
{
    TacticTemplate t;
    t.kind = "skip";
    t.category = "structure";
    t.description = "Bypass activity R: its predecessors are bound to its successor.";
    t.args = {{"R", ArgRole::Component}};
    t.precondition.atoms = {Atom::is_component(V("R"))};
    t.pre_state.vars = {any("ConY")};
    t.pre_state.atoms = {Atom::bind(V("R"), V("ConY"))};
    t.pre_state.forall = {{any("X"), Atom::bind(V("X"), V("R")), {!Atom::bind(V("X"), V("ConY"))}}};
    t.change_actions = {
        CA::for_each_in_binding("?R", "?ConY"),
        CA::remove_binding("?R", "?ConY"),
    };
    t.post_state.atoms = {!Atom::bind(V("R"), V("ConY"))};
    t.post_state.forall = {ins_moved("R", "ConY")};
    t.effects = {
        {"response_time", "T(pb) = T(pb) - T(R)",
         [](const EffectInputs& in) { return std::max(0.0, in.block.response_time - in.primary.response_time); }},
        {"cost", "C(pb) = C(pb) - C(R)", [](const EffectInputs& in) { return std::max(0.0, in.block.cost - in.primary.cost); }},
        {"availability", "A(pb) = A(pb) / A(R)",
         [](const EffectInputs& in) { return swap_factor(in.block.availability, in.primary.availability, 1.0); }},
        {"reliability", "R(pb) = R(pb) / R(R)",
         [](const EffectInputs& in) { return swap_factor(in.block.reliability, in.primary.reliability, 1.0); }},
    };
    return t;
}

TacticTemplate add()
{
    TacticTemplate t;
    t.kind = "add";
    t.category = "structure";
    t.description = "Splice a new activity S after E (a component or the start of a block) via Simple connectors.";
    t.args = {{"E", ArgRole::Anchor}, {"S", ArgRole::NewService}};
    t.supporting_connectors = {CT::Simple};
    t.pre_state.vars = {any("ConY")};
    t.pre_state.atoms = {Atom::bind(V("E"), V("ConY"))};
    t.fresh = {{"N", "SC"}, {"C1", "SimpleCon"}, {"C2", "SimpleCon"}};
    t.change_actions = {
        CA::add_component("?N", "?S", ""),
        CA::add_connector("?C1", CT::Simple),
        CA::add_connector("?C2", CT::Simple),
        CA::for_each_out_binding("?E", "?C2"),
        CA::add_binding("?E", "?C1"),
        CA::add_binding("?C1", "?N"),
        CA::add_binding("?N", "?C2"),
    };
    t.post_state.atoms = {Atom::is_component(V("N")), Atom::component_type_is(V("N"), "?S"),
                          Atom::bind(V("E"), V("C1")), Atom::bind(V("C1"), V("N")), Atom::bind(V("N"), V("C2"))};
    t.post_state.forall = {outs_moved("E", "C2")};
    t.effects = {
        {"response_time", "T(pb) = T(pb) + T(S)",
         [](const EffectInputs& in) { return in.block.response_time + in.secondary.response_time; }},
        {"cost", "C(pb) = C(pb) + C(S)", [](const EffectInputs& in) { return in.block.cost + in.secondary.cost; }},
        {"availability", "A(pb) = A(pb) * A(S)",
         [](const EffectInputs& in) { return in.block.availability * in.secondary.availability; }},
        {"reliability", "R(pb) = R(pb) * R(S)",
         [](const EffectInputs& in) { return in.block.reliability * in.secondary.reliability; }},
    };
    return t;
}

TacticTemplate replace()
{
    TacticTemplate t;
    t.kind = "replace";
    t.category = "structure";
    t.description = "Put a new activity S in the place of R; R is left unbound.";
    t.args = {{"R", ArgRole::Component}, {"S", ArgRole::NewService}};
    t.precondition.atoms = {Atom::is_component(V("R"))};
    t.pre_state.vars = {any("ConX"), any("ConY")};
    t.pre_state.atoms = {Atom::bind(V("ConX"), V("R")), Atom::bind(V("R"), V("ConY"))};
    t.fresh = {{"N", "SC"}};
    t.change_actions = {
        CA::add_component("?N", "?S", ""),
        CA::for_each_in_binding("?R", "?N"),
        CA::for_each_out_binding("?R", "?N"),
    };
    t.post_state.atoms = {Atom::is_component(V("N")), Atom::component_type_is(V("N"), "?S"), Atom::isolated(V("R"))};
    t.post_state.forall = {ins_moved("R", "N"), outs_moved("R", "N")};
    t.effects = {
        {"response_time", "T(pb) = T(pb) - T(R) + T(S)",
         [](const EffectInputs& in) {
             return in.block.response_time - in.primary.response_time + in.secondary.response_time;
         }},
        {"cost", "C(pb) = C(pb) - C(R) + C(S)",
         [](const EffectInputs& in) { return in.block.cost - in.primary.cost + in.secondary.cost; }},
        {"availability", "A(pb) = A(pb) / A(R) * A(S)",
         [](const EffectInputs& in) {
             return swap_factor(in.block.availability, in.primary.availability, in.secondary.availability);
         }},
        {"reliability", "R(pb) = R(pb) / R(R) * R(S)",
         [](const EffectInputs& in) {
             return swap_factor(in.block.reliability, in.primary.reliability, in.secondary.reliability);
         }},
    };
    return t;
}

// Sender-side connector after E1 and receiver-side connector before E2.
TacticTemplate link_pair(const std::string& kind)
{
    bool compress = kind == "compress";
    CT out_type = compress ? CT::CompressorOut : CT::DataModifierOut;
    CT in_type = compress ? CT::CompressorIn : CT::DataModifierIn;
    std::string out = compress ? "CompOutCon" : "ModOutCon";
    std::string in = compress ? "CompInCon" : "ModInCon";
    TacticTemplate t;
    t.kind = kind;
    t.category = "communication";
    t.description = compress ? "Compress messages leaving E1 and decompress them before E2."
                             : "Aggregate messages leaving E1 with a payload function and expand them before E2.";
    t.args = {{"E1", ArgRole::Component}, {"E2", ArgRole::Component}};
    if (!compress)
        t.args.push_back({"Fn", ArgRole::Delegate});
    t.supporting_connectors = {out_type, in_type};
    t.precondition.atoms = {Atom::is_component(V("E1")), Atom::is_component(V("E2")), Atom::distinct(V("E1"), V("E2"))};
    t.pre_state.vars = {any("ConX"), any("ConY")};
    t.pre_state.atoms = {Atom::bind(V("E1"), V("ConY")), Atom::bind(V("ConX"), V("E2"))};
    t.fresh = {{out, out}, {in, in}};
    std::map<std::string, double> params;
    if (compress)
        params = {{"ratio", 0.3}, {"cpu_ms", 5.0}, {"battery_per_message", 1.0}};
    else
        params = {{"scale", 1.0}, {"cpu_ms", 0.0}};
    t.params = params;
    std::string delegate = compress ? "" : "?Fn";
    t.change_actions = {
        CA::add_connector("?" + out, out_type, cfg("?" + in, params, delegate)),
        CA::add_connector("?" + in, in_type, cfg("?" + out, params, delegate)),
        CA::for_each_out_binding("?E1", "?" + out),
        CA::add_binding("?E1", "?" + out),
        CA::for_each_in_binding("?E2", "?" + in),
        CA::add_binding("?" + in, "?E2"),
    };
    t.post_state.atoms = {Atom::connector_type_is(V(out), out_type), Atom::connector_type_is(V(in), in_type),
                          Atom::bind(V("E1"), V(out)), Atom::bind(V(in), V("E2"))};
    t.post_state.forall = {
        {any("Y"), Atom::bind(V("E1"), V("Y")), {Atom::bind(V(out), V("Y"))}},
        {any("X"), Atom::bind(V("X"), V("E2")), {Atom::bind(V("X"), V(in))}},
    };
    std::string factor = compress ? "ratio" : "scale";
    t.effects = {
        {"response_time", "T(pb) = T(pb) - transit(E1) * (1 - " + factor + ") + 2 * cpu_ms",
         [factor](const EffectInputs& in) {
             double f = in.param(factor, 1.0);
             return in.block.response_time - in.primary.transit_ms * (1.0 - f) + 2.0 * in.param("cpu_ms", 0.0);
         }},
        {"transit_ms", "transit(E1) = transit(E1) * " + factor,
         [factor](const EffectInputs& in) { return in.primary.transit_ms * in.param(factor, 1.0); }},
    };
    if (compress)
        t.effects.push_back({"battery", "battery(pb) = battery(pb) + 2 * battery_per_message",
                             [](const EffectInputs& in) {
                                 return in.block.battery + 2.0 * in.param("battery_per_message", 0.0);
                             }});
    return t;
}

TacticTemplate reduce()
{
    TacticTemplate t;
    t.kind = "reduce";
    t.category = "communication";
    t.description = "Shrink messages leaving E with a payload function.";
    t.args = {{"E", ArgRole::Component}, {"Fn", ArgRole::Delegate}};
    t.supporting_connectors = {CT::DataModifierOut};
    t.precondition.atoms = {Atom::is_component(V("E"))};
    t.pre_state.vars = {any("ConY")};
    t.pre_state.atoms = {Atom::bind(V("E"), V("ConY"))};
    t.fresh = {{"ModOutCon", "ModOutCon"}};
    t.params = {{"scale", 1.0}, {"cpu_ms", 0.0}};
    t.change_actions = {
        CA::add_connector("?ModOutCon", CT::DataModifierOut, cfg({}, t.params, "?Fn")),
        CA::for_each_out_binding("?E", "?ModOutCon"),
        CA::add_binding("?E", "?ModOutCon"),
    };
    t.post_state.atoms = {Atom::connector_type_is(V("ModOutCon"), CT::DataModifierOut),
                          Atom::bind(V("E"), V("ModOutCon"))};
    t.post_state.forall = {{any("Y"), Atom::bind(V("E"), V("Y")), {Atom::bind(V("ModOutCon"), V("Y"))}}};
    t.effects = {
        {"response_time", "T(pb) = T(pb) - transit(E) * (1 - scale) + cpu_ms",
         [](const EffectInputs& in) {
             return in.block.response_time - in.primary.transit_ms * (1.0 - in.param("scale", 1.0))
                    + in.param("cpu_ms", 0.0);
         }},
        {"payload_bytes", "payload(pb) = payload(pb) * scale",
         [](const EffectInputs& in) { return in.block.payload_bytes * in.param("scale", 1.0); }},
        {"transit_ms", "transit(E) = transit(E) * scale",
         [](const EffectInputs& in) { return in.primary.transit_ms * in.param("scale", 1.0); }},
    };
    return t;
}

TacticTemplate cache()
{
    TacticTemplate t;
    t.kind = "cache";
    t.category = "communication";
    t.description = "Answer a share of the requests for E from a cache; hits bypass E.";
    t.args = {{"E", ArgRole::Component}, {"Filter", ArgRole::Filter, true}};
    t.supporting_connectors = {CT::CacheElement};
    t.precondition.atoms = {Atom::is_component(V("E"))};
    t.pre_state.vars = {any("ConY")};
    t.pre_state.atoms = {Atom::bind(V("E"), V("ConY"))};
    t.fresh = {{"CacheCon", "CacheCon"}};
    t.params = {{"hit_ratio", 0.5}, {"memory_per_message", 1.0}};
    t.change_actions = {
        CA::add_connector("?CacheCon", CT::CacheElement, cfg({}, t.params, "?Filter")),
        CA::for_each_in_binding("?E", "?CacheCon"),
        CA::add_binding("?CacheCon", "?E"),
        CA::add_binding("?CacheCon", "?ConY"),
    };
    t.post_state.atoms = {Atom::connector_type_is(V("CacheCon"), CT::CacheElement), Atom::bind(V("CacheCon"), V("E")),
                          Atom::bind(V("CacheCon"), V("ConY"))};
    t.post_state.forall = {ins_moved("E", "CacheCon")};
    t.effects = {
        {"response_time", "T(pb) = T(pb) - hit_ratio * T(E)",
         [](const EffectInputs& in) {
             return in.block.response_time - in.param("hit_ratio", 0.5) * in.primary.response_time;
         }},
        {"cost", "C(pb) = C(pb) - hit_ratio * C(E)",
         [](const EffectInputs& in) { return in.block.cost - in.param("hit_ratio", 0.5) * in.primary.cost; }},
        {"availability", "A(pb) = A(pb) / A(E) * (h + (1 - h) * A(E))",
         [](const EffectInputs& in) {
             double h = in.param("hit_ratio", 0.5);
             return swap_factor(in.block.availability, in.primary.availability, h + (1.0 - h) * in.primary.availability);
         }},
        {"memory", "memory(pb) = memory(pb) + (1 - h) * memory_per_message",
         [](const EffectInputs& in) {
             return in.block.memory + (1.0 - in.param("hit_ratio", 0.5)) * in.param("memory_per_message", 0.0);
         }},
    };
    return t;
}

TacticTemplate add_queue()
{
    TacticTemplate t;
    t.kind = "add_queue";
    t.category = "communication";
    t.description = "Hold messages leaving E while the link is down and forward them when it is restored.";
    t.args = {{"E", ArgRole::Component}};
    t.supporting_connectors = {CT::Queue};
    t.precondition.atoms = {Atom::is_component(V("E"))};
    t.pre_state.vars = {any("ConY")};
    t.pre_state.atoms = {Atom::bind(V("E"), V("ConY"))};
    t.fresh = {{"QueueCon", "QueueCon"}};
    t.params = {{"memory_per_message", 1.0}};
    t.change_actions = {
        CA::add_connector("?QueueCon", CT::Queue, cfg({}, t.params)),
        CA::for_each_out_binding("?E", "?QueueCon"),
        CA::add_binding("?E", "?QueueCon"),
    };
    t.post_state.atoms = {Atom::connector_type_is(V("QueueCon"), CT::Queue), Atom::bind(V("E"), V("QueueCon"))};
    t.post_state.forall = {{any("Y"), Atom::bind(V("E"), V("Y")), {Atom::bind(V("QueueCon"), V("Y"))}}};
    t.effects = {
        {"memory", "memory(pb) = memory(pb) + memory_per_message",
         [](const EffectInputs& in) { return in.block.memory + in.param("memory_per_message", 0.0); }},
    };
    return t;
}

std::string substitute(const std::string& s, const Assignment& binding)
{
    if (s.size() < 2 || s[0] != '?')
        return s;
    auto it = binding.find(s.substr(1));
    return it == binding.end() ? std::string() : it->second;
}

Atom substitute_text(Atom atom, const Assignment& binding)
{
    if (atom.kind == AtomKind::ComponentTypeIs)
        atom.text = substitute(atom.text, binding);
    return atom;
}

StatePattern substitute_texts(StatePattern p, const Assignment& binding)
{
    for (auto& a : p.atoms)
        a = substitute_text(a, binding);
    for (auto& c : p.forall)
        for (auto& a : c.consequents)
            a = substitute_text(a, binding);
    return p;
}

StatePattern conjoin(const StatePattern& a, const StatePattern& b)
{
    StatePattern out = a;
    out.vars.insert(out.vars.end(), b.vars.begin(), b.vars.end());
    out.atoms.insert(out.atoms.end(), b.atoms.begin(), b.atoms.end());
    out.forall.insert(out.forall.end(), b.forall.begin(), b.forall.end());
    return out;
}

bool is_entity_role(ArgRole r)
{
    return r == ArgRole::Component || r == ArgRole::Anchor || r == ArgRole::Peer;
}

} // namespace

TacticLibrary make_builtin_library()
{
    TacticLibrary lib;
    lib.register_tactic(skip());
    lib.register_tactic(add());
    lib.register_tactic(replace());
    lib.register_tactic(parallel_like(false));
    lib.register_tactic(parallel_like(true));
    lib.register_tactic(reexecute());
    lib.register_tactic(link_pair("compress"));
    lib.register_tactic(link_pair("aggregate"));
    lib.register_tactic(reduce());
    lib.register_tactic(cache());
    lib.register_tactic(add_queue());
    return lib;
}

const TacticLibrary& TacticLibrary::builtin()
{
    static const TacticLibrary lib = make_builtin_library();
    return lib;
}

void TacticLibrary::register_tactic(TacticTemplate tactic)
{
    if (tactic.kind.empty())
        throw Error("tactic without a kind");
    if (templates_.count(tactic.kind))
        throw Error("tactic '" + tactic.kind + "' is already registered");
    std::string kind = tactic.kind;
    templates_.emplace(std::move(kind), std::move(tactic));
}

const TacticTemplate* TacticLibrary::find(std::string_view kind) const
{
    auto it = templates_.find(kind);
    return it == templates_.end() ? nullptr : &it->second;
}

const TacticTemplate& TacticLibrary::at(std::string_view kind) const
{
    if (const auto* t = find(kind))
        return *t;
    throw NotFound("no tactic '" + std::string(kind) + "'");
}

std::vector<std::string> TacticLibrary::kinds() const
{
    std::vector<std::string> out;
    for (const auto& [k, t] : templates_)
        out.push_back(k);
    return out;
}

ConcreteTactic instantiate(const TacticTemplate& tpl, std::span<const std::string> args, const ContextModel& ctx,
                           TacticEnv& env)
{
    if (args.size() < tpl.min_arity() || args.size() > tpl.max_arity())
        throw ArityError(tpl.kind + " takes " + std::to_string(tpl.min_arity()) + ".." + std::to_string(tpl.max_arity())
                         + " arguments, got " + std::to_string(args.size()));

    ConcreteTactic ct;
    ct.kind = tpl.kind;
    ct.args.assign(args.begin(), args.end());
    ct.params = tpl.params;

    Assignment binding;
    Assignment entity_args;
    for (std::size_t i = 0; i < args.size(); ++i) {
        const ArgSpec& spec = tpl.args[i];
        const std::string& arg = args[i];
        binding[spec.var] = arg;
        if (is_entity_role(spec.role)) {
            if (!ctx.exists(arg))
                throw PreconditionFailed(tpl.kind + ": '" + arg + "' is not in the context");
            entity_args[spec.var] = arg;
        }
        switch (spec.role) {
        case ArgRole::NewService: {
            bool known = false;
            if (env.catalog)
                for (const auto& s : *env.catalog)
                    known = known || (s.name == arg && !s.providers.empty());
            if (!known)
                throw PreconditionFailed(tpl.kind + ": service '" + arg + "' is not in the catalog");
            ct.secondary_service = arg;
            break;
        }
        case ArgRole::Delegate: {
            auto it = payload_delegates().find(arg);
            if (it == payload_delegates().end())
                throw PreconditionFailed(tpl.kind + ": unknown payload function '" + arg + "'");
            ct.params["scale"] = it->second.scale;
            ct.params["cpu_ms"] = it->second.cpu_ms;
            break;
        }
        case ArgRole::Filter: {
            auto it = cache_filters().find(arg);
            if (it == cache_filters().end())
                throw PreconditionFailed(tpl.kind + ": unknown cache filter '" + arg + "'");
            ct.params["hit_ratio"] = it->second;
            break;
        }
        case ArgRole::Condition: {
            const auto& c = retry_conditions();
            if (std::find(c.begin(), c.end(), arg) == c.end())
                throw PreconditionFailed(tpl.kind + ": unknown condition '" + arg + "'");
            break;
        }
        default: break;
        }
    }
    // Defaults for omitted optional non-entity arguments.
    for (std::size_t i = args.size(); i < tpl.args.size(); ++i) {
        if (tpl.args[i].role == ArgRole::Filter)
            binding[tpl.args[i].var] = "any";
        if (tpl.args[i].role == ArgRole::Condition)
            binding[tpl.args[i].var] = retry_conditions().front();
    }
    for (const auto& [k, v] : env.param_overrides)
        ct.params[k] = v;

    StatePattern required = conjoin(tpl.precondition, tpl.pre_state);
    for (const auto& a : env.pre_assumptions)
        required.atoms.push_back(Atom::assumption(a));
    required = substitute_texts(bind_pattern(required, entity_args), binding);
    EntailmentResult r = entails(ctx, required);
    if (!r.holds)
        throw PreconditionFailed(tpl.kind + ": precondition not satisfied: " + r.failed_conjunct);
    for (const auto& [var, id] : r.witness)
        binding[var] = id;

    if (!tpl.fresh.empty()) {
        std::uint64_t local = 0;
        std::uint64_t* counter = env.fresh_counter ? env.fresh_counter : &local;
        auto fresh_id = [](std::uint64_t n, const FreshVar& f) {
            return "t" + std::to_string(n) + "." + f.stem + (f.stem == f.var ? "" : "." + f.var);
        };
        for (;;) {
            std::uint64_t n = ++*counter;
            bool clash = false;
            for (const auto& f : tpl.fresh)
                clash = clash || ctx.exists(fresh_id(n, f));
            if (clash)
                continue;
            for (const auto& f : tpl.fresh)
                binding[f.var] = fresh_id(n, f);
            break;
        }
    }

    for (const auto& proto : tpl.change_actions) {
        ChangeAction a = proto;
        a.id = substitute(a.id, binding);
        a.from = substitute(a.from, binding);
        a.to = substitute(a.to, binding);
        a.sc_type = substitute(a.sc_type, binding);
        a.config.partner = substitute(a.config.partner, binding);
        a.config.delegate = substitute(a.config.delegate, binding);
        for (auto& e : a.except)
            e = substitute(e, binding);
        for (auto& [k, v] : a.config.params)
            if (auto it = ct.params.find(k); it != ct.params.end())
                v = it->second;
        if (a.kind == ChangeAction::Kind::AddComponent && a.provider.empty()) {
            for (const auto& s : *env.catalog)
                if (s.name == a.sc_type)
                    a.provider = s.providers.front().id;
        }
        ct.batch.push_back(std::move(a));
    }

    ct.binding = binding;
    ct.post_state = substitute_texts(bind_pattern(tpl.post_state, binding), binding);
    if (!tpl.args.empty())
        ct.primary = binding.count(tpl.args[0].var) ? binding.at(tpl.args[0].var) : "";
    for (const char* v : {"SC2", "E2", "N"})
        if (binding.count(v)) {
            ct.secondary = binding.at(v);
            break;
        }
    return ct;
}

ContextModel apply(std::span<const ChangeAction> batch, const ContextModel& ctx)
{
    using K = ChangeAction::Kind;
    ContextModel next = ctx;
    auto require = [&](const std::string& id, const ChangeAction& a) {
        if (!next.exists(id))
            throw DanglingReference("'" + id + "' does not exist (" + to_string(a) + ")");
    };
    auto has_bindings = [&](const std::string& id) {
        return !next.in_bindings(id).empty() || !next.out_bindings(id).empty();
    };
    auto rebind = [&](const std::string& from, const std::string& to) {
        if (next.bound(from, to))
            throw DuplicateBinding("'" + from + "' is already bound to '" + to + "'");
        next.assert_unversioned(Proposition::bind(from, to));
    };
    auto excluded = [](const ChangeAction& a, const std::string& id) {
        return std::find(a.except.begin(), a.except.end(), id) != a.except.end();
    };

    for (const auto& a : batch) {
        switch (a.kind) {
        case K::AddConnector:
            if (next.exists(a.id))
                throw DuplicateBinding("'" + a.id + "' already exists");
            next.assert_unversioned(Proposition::is_connector(a.id));
            next.assert_unversioned(Proposition::connector_type(a.id, a.con_type));
            break;
        case K::RemoveConnector:
            if (!next.is_connector(a.id))
                throw DanglingReference("no connector '" + a.id + "'");
            if (has_bindings(a.id))
                throw DanglingReference("connector '" + a.id + "' still has bindings");
            next.retract_unversioned(Proposition::is_connector(a.id));
            next.retract_unversioned(Proposition::connector_type(a.id, a.con_type));
            break;
        case K::AddComponent:
            if (next.exists(a.id))
                throw DuplicateBinding("'" + a.id + "' already exists");
            next.assert_unversioned(Proposition::is_component(a.id));
            next.assert_unversioned(Proposition::component_type(a.id, a.sc_type));
            break;
        case K::RemoveComponent:
            if (!next.is_component(a.id))
                throw DanglingReference("no component '" + a.id + "'");
            if (has_bindings(a.id))
                throw DanglingReference("component '" + a.id + "' still has bindings");
            next.retract_unversioned(Proposition::is_component(a.id));
            next.retract_unversioned(Proposition::component_type(a.id, {}));
            break;
        case K::AddBinding:
            require(a.from, a);
            require(a.to, a);
            rebind(a.from, a.to);
            break;
        case K::RemoveBinding:
            if (!next.retract_unversioned(Proposition::bind(a.from, a.to)))
                throw DanglingReference("no binding '" + a.from + "' -> '" + a.to + "'");
            break;
        case K::SetConnectorParam:
            if (!next.is_connector(a.id))
                throw DanglingReference("no connector '" + a.id + "'");
            break;
        case K::ForEachInBinding:
            require(a.id, a);
            require(a.to, a);
            for (const auto& x : next.in_bindings(a.id)) {
                if (excluded(a, x))
                    continue;
                next.retract_unversioned(Proposition::bind(x, a.id));
                rebind(x, a.to);
            }
            break;
        case K::ForEachOutBinding:
            require(a.id, a);
            require(a.from, a);
            for (const auto& y : next.out_bindings(a.id)) {
                if (excluded(a, y))
                    continue;
                next.retract_unversioned(Proposition::bind(a.id, y));
                rebind(a.from, y);
            }
            break;
        }
    }
    next.bump_revision();
    return next;
}

Attributes predict_effect(const ConcreteTactic& tactic, const TacticLibrary& library, const EffectInputs& inputs)
{
    const TacticTemplate& t = library.at(tactic.kind);
    EffectInputs in = inputs;
    for (const auto& [k, v] : tactic.params)
        in.params.emplace(k, v);
    Attributes out = inputs.block;
    for (const auto& e : t.effects)
        out.set(e.attribute, e.fn(in));
    return out;
}

nlohmann::ordered_json to_json(const TacticTemplate& t)
{
    using nlohmann::ordered_json;
    ordered_json j;
    j["kind"] = t.kind;
    j["category"] = t.category;
    j["description"] = t.description;
    ordered_json args = ordered_json::array();
    for (const auto& a : t.args) {
        ordered_json aj{{"var", a.var}, {"role", to_string(a.role)}};
        if (a.optional)
            aj["optional"] = true;
        args.push_back(std::move(aj));
    }
    j["args"] = std::move(args);
    ordered_json cons = ordered_json::array();
    for (auto c : t.supporting_connectors)
        cons.push_back(to_string(c));
    j["supporting_connectors"] = std::move(cons);
    j["precondition"] = to_string(t.precondition);
    j["pre_state"] = to_string(t.pre_state);
    ordered_json actions = ordered_json::array();
    for (const auto& a : t.change_actions)
        actions.push_back(to_string(a));
    j["change_actions"] = std::move(actions);
    j["post_state"] = to_string(t.post_state);
    ordered_json effects = ordered_json::array();
    for (const auto& e : t.effects)
        effects.push_back({{"attribute", e.attribute}, {"formula", e.formula}});
    j["expected_effect"] = std::move(effects);
    if (!t.params.empty())
        j["params"] = t.params;
    return j;
}

nlohmann::ordered_json to_json(const TacticLibrary& library)
{
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& k : library.kinds())
        arr.push_back(to_json(library.at(k)));
    return arr;
}

} // namespace adaptflow
