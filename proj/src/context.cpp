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

#include "adaptflow/context.hpp"

#include <algorithm>
#include <functional>
#include <stdexcept>

#include <json.hpp>

#include "adaptflow/errors.hpp"

namespace adaptflow {

std::string_view to_string(PropKind kind)
{
    switch (kind) {
    case PropKind::IsComponent: return "is_component";
    case PropKind::ComponentType: return "component_type";
    case PropKind::IsConnector: return "is_connector";
    case PropKind::ConnectorType: return "connector_type";
    case PropKind::Bind: return "bind";
    case PropKind::PropertyValue: return "property_value";
    case PropKind::QualityLevel: return "quality_level";
    case PropKind::Assumption: return "assumption";
    }
    return "?";
}

Proposition Proposition::is_component(std::string sc)
{
    return {PropKind::IsComponent, std::move(sc)};
}

Proposition Proposition::component_type(std::string sc, std::string sc_type)
{
    return {PropKind::ComponentType, std::move(sc), std::move(sc_type)};
}

Proposition Proposition::is_connector(std::string con)
{
    return {PropKind::IsConnector, std::move(con)};
}

Proposition Proposition::connector_type(std::string con, ConnectorType type)
{
    return {PropKind::ConnectorType, std::move(con), std::string(to_string(type))};
}

Proposition Proposition::bind(std::string from, std::string to)
{
    return {PropKind::Bind, std::move(from), std::move(to)};
}

Proposition Proposition::property_value(std::string name, double value)
{
    Proposition p{PropKind::PropertyValue, std::move(name)};
    p.value = value;
    return p;
}

Proposition Proposition::quality_level(std::string name, QualityLevel level)
{
    Proposition p{PropKind::QualityLevel, std::move(name)};
    p.level = level;
    return p;
}

Proposition Proposition::assumption(std::string name, bool holds)
{
    Proposition p{PropKind::Assumption, std::move(name)};
    p.flag = holds;
    return p;
}

namespace {

nlohmann::ordered_json fact_json(const Proposition& p)
{
    nlohmann::ordered_json j;
    j["kind"] = to_string(p.kind);
    switch (p.kind) {
    case PropKind::IsComponent:
    case PropKind::IsConnector: j["id"] = p.a; break;
    case PropKind::ComponentType:
    case PropKind::ConnectorType:
        j["id"] = p.a;
        j["type"] = p.b;
        break;
    case PropKind::Bind:
        j["from"] = p.a;
        j["to"] = p.b;
        break;
    case PropKind::PropertyValue:
        j["name"] = p.a;
        j["value"] = p.value;
        break;
    case PropKind::QualityLevel:
        j["name"] = p.a;
        j["level"] = to_string(p.level);
        break;
    case PropKind::Assumption:
        j["name"] = p.a;
        j["holds"] = p.flag;
        break;
    }
    return j;
}

} // namespace

std::string to_string(const Proposition& p)
{
    return fact_json(p).dump();
}

ContextModel::Key ContextModel::key_of(const Proposition& p)
{
    return {p.kind, p.a, p.kind == PropKind::Bind ? p.b : std::string()};
}

void ContextModel::check_typing(const Proposition& p) const
{
    if (p.kind == PropKind::Bind && is_component(p.a) && is_component(p.b))
        throw TypeError("components '" + p.a + "' and '" + p.b + "' can only be bound through a connector");
}

void ContextModel::assert_fact(const Proposition& p)
{
    assert_unversioned(p);
    ++revision_;
}

bool ContextModel::retract_fact(const Proposition& p)
{
    bool existed = retract_unversioned(p);
    ++revision_;
    return existed;
}

void ContextModel::assert_unversioned(const Proposition& p)
{
    check_typing(p);
    facts_[key_of(p)] = p;
    if (p.kind == PropKind::Bind)
        reverse_binds_.emplace(p.b, p.a);
}

bool ContextModel::retract_unversioned(const Proposition& p)
{
    if (facts_.erase(key_of(p)) == 0)
        return false;
    if (p.kind == PropKind::Bind)
        reverse_binds_.erase({p.b, p.a});
    return true;
}

bool ContextModel::holds(const Proposition& p) const
{
    const Proposition* f = find(key_of(p));
    return f && *f == p;
}

const Proposition* ContextModel::find(const Key& key) const
{
    auto it = facts_.find(key);
    return it == facts_.end() ? nullptr : &it->second;
}

bool ContextModel::is_component(const std::string& id) const
{
    return facts_.count({PropKind::IsComponent, id, {}}) > 0;
}

bool ContextModel::is_connector(const std::string& id) const
{
    return facts_.count({PropKind::IsConnector, id, {}}) > 0;
}

std::optional<std::string> ContextModel::component_type(const std::string& sc) const
{
    if (const auto* f = find({PropKind::ComponentType, sc, {}}))
        return f->b;
    return std::nullopt;
}

std::optional<std::string> ContextModel::connector_type(const std::string& con) const
{
    if (const auto* f = find({PropKind::ConnectorType, con, {}}))
        return f->b;
    return std::nullopt;
}

bool ContextModel::bound(const std::string& from, const std::string& to) const
{
    return facts_.count({PropKind::Bind, from, to}) > 0;
}

std::vector<std::string> ContextModel::in_bindings(const std::string& id) const
{
    if (!exists(id))
        throw NotFound("no component or connector '" + id + "'");
    std::vector<std::string> out;
    for (auto it = reverse_binds_.lower_bound({id, {}}); it != reverse_binds_.end() && it->first == id; ++it)
        out.push_back(it->second);
    return out;
}

std::vector<std::string> ContextModel::out_bindings(const std::string& id) const
{
    if (!exists(id))
        throw NotFound("no component or connector '" + id + "'");
    std::vector<std::string> out;
    for (auto it = facts_.lower_bound({PropKind::Bind, id, {}});
         it != facts_.end() && std::get<0>(it->first) == PropKind::Bind && std::get<1>(it->first) == id; ++it)
        out.push_back(it->second.b);
    return out;
}

std::optional<double> ContextModel::property_value(const std::string& name) const
{
    if (const auto* f = find({PropKind::PropertyValue, name, {}}))
        return f->value;
    return std::nullopt;
}

std::optional<QualityLevel> ContextModel::quality_level(const std::string& name) const
{
    if (const auto* f = find({PropKind::QualityLevel, name, {}}))
        return f->level;
    return std::nullopt;
}

bool ContextModel::assumption(const std::string& name) const
{
    const auto* f = find({PropKind::Assumption, name, {}});
    return f && f->flag;
}

std::vector<std::string> ContextModel::components() const
{
    std::vector<std::string> out;
    for (auto it = facts_.lower_bound({PropKind::IsComponent, {}, {}});
         it != facts_.end() && std::get<0>(it->first) == PropKind::IsComponent; ++it)
        out.push_back(it->second.a);
    return out;
}

std::vector<std::string> ContextModel::connectors() const
{
    std::vector<std::string> out;
    for (auto it = facts_.lower_bound({PropKind::IsConnector, {}, {}});
         it != facts_.end() && std::get<0>(it->first) == PropKind::IsConnector; ++it)
        out.push_back(it->second.a);
    return out;
}

std::vector<std::pair<std::string, std::string>> ContextModel::bindings() const
{
    std::vector<std::pair<std::string, std::string>> out;
    for (auto it = facts_.lower_bound({PropKind::Bind, {}, {}});
         it != facts_.end() && std::get<0>(it->first) == PropKind::Bind; ++it)
        out.emplace_back(it->second.a, it->second.b);
    return out;
}

std::vector<Proposition> ContextModel::facts() const
{
    std::vector<Proposition> out;
    out.reserve(facts_.size());
    for (const auto& [k, p] : facts_)
        out.push_back(p);
    return out;
}

std::string ContextModel::to_json_lines() const
{
    std::vector<std::string> lines;
    for (const auto& [k, p] : facts_)
        lines.push_back(fact_json(p).dump());
    std::sort(lines.begin(), lines.end());
    std::string out;
    for (const auto& l : lines)
        out += l + "\n";
    return out;
}

// ---- patterns ----

Atom Atom::is_component(Term t)
{
    return {AtomKind::IsComponent, {std::move(t)}};
}

Atom Atom::is_connector(Term t)
{
    return {AtomKind::IsConnector, {std::move(t)}};
}

Atom Atom::component_type_is(Term t, std::string sc_type)
{
    return {AtomKind::ComponentTypeIs, {std::move(t)}, std::move(sc_type)};
}

Atom Atom::same_component_type(Term a, Term b)
{
    return {AtomKind::SameComponentType, {std::move(a), std::move(b)}};
}

Atom Atom::connector_type_is(Term t, ConnectorType type)
{
    return {AtomKind::ConnectorTypeIs, {std::move(t)}, std::string(to_string(type))};
}

Atom Atom::bind(Term from, Term to)
{
    return {AtomKind::Bind, {std::move(from), std::move(to)}};
}

Atom Atom::assumption(std::string name, bool holds)
{
    Atom a{AtomKind::Assumption, {}, std::move(name)};
    a.flag = holds;
    return a;
}

Atom Atom::quality_is(std::string name, QualityLevel level)
{
    Atom a{AtomKind::QualityIs, {}, std::move(name)};
    a.level = level;
    return a;
}

Atom Atom::distinct(Term a, Term b)
{
    return {AtomKind::Distinct, {std::move(a), std::move(b)}};
}

Atom Atom::isolated(Term t)
{
    return {AtomKind::Isolated, {std::move(t)}};
}

namespace {

Term bind_term(const Term& t, const Assignment& a)
{
    if (t.is_var)
        if (auto it = a.find(t.name); it != a.end())
            return Term::id(it->second);
    return t;
}

Atom bind_atom(const Atom& atom, const Assignment& a)
{
    Atom out = atom;
    for (auto& t : out.terms)
        t = bind_term(t, a);
    return out;
}

std::string term_text(const Term& t)
{
    return t.is_var ? "?" + t.name : t.name;
}

} // namespace

StatePattern bind_pattern(const StatePattern& pattern, const Assignment& assignment)
{
    StatePattern out;
    for (const auto& v : pattern.vars)
        if (!assignment.count(v.name))
            out.vars.push_back(v);
    for (const auto& atom : pattern.atoms)
        out.atoms.push_back(bind_atom(atom, assignment));
    for (const auto& clause : pattern.forall) {
        // The quantified variable shadows any outer binding of the same name.
        Assignment inner = assignment;
        inner.erase(clause.var.name);
        ForAllClause c{clause.var, bind_atom(clause.antecedent, inner), {}};
        for (const auto& cons : clause.consequents)
            c.consequents.push_back(bind_atom(cons, inner));
        out.forall.push_back(std::move(c));
    }
    return out;
}

std::string to_string(const Atom& atom)
{
    auto t = [&](std::size_t i) { return term_text(atom.terms.at(i)); };
    std::string s;
    switch (atom.kind) {
    case AtomKind::IsComponent: s = "component(" + t(0) + ")"; break;
    case AtomKind::IsConnector: s = "connector(" + t(0) + ")"; break;
    case AtomKind::ComponentTypeIs: s = "SCType(" + t(0) + ") = " + atom.text; break;
    case AtomKind::SameComponentType: s = "SCType(" + t(0) + ") = SCType(" + t(1) + ")"; break;
    case AtomKind::ConnectorTypeIs: s = "ConType(" + t(0) + ") = " + atom.text; break;
    case AtomKind::Bind: s = "bind(" + t(0) + ", " + t(1) + ")"; break;
    case AtomKind::Assumption: s = std::string(atom.flag ? "" : "not ") + "assumption(\"" + atom.text + "\")"; break;
    case AtomKind::QualityIs: s = "level(" + atom.text + ") = " + std::string(to_string(atom.level)); break;
    case AtomKind::Distinct: s = t(0) + " != " + t(1); break;
    case AtomKind::Isolated: s = "isolated(" + t(0) + ")"; break;
    }
    return atom.negated ? "¬" + s : s;
}

std::string to_string(const StatePattern& pattern)
{
    std::string s;
    if (!pattern.vars.empty()) {
        s += "exists";
        for (const auto& v : pattern.vars)
            s += " ?" + v.name;
        s += ": ";
    }
    for (std::size_t i = 0; i < pattern.atoms.size(); ++i)
        s += (i ? " & " : "") + to_string(pattern.atoms[i]);
    for (const auto& c : pattern.forall) {
        s += (s.empty() ? "" : " & ") + std::string("forall ?") + c.var.name + ": " + to_string(c.antecedent) + " -> ";
        for (std::size_t i = 0; i < c.consequents.size(); ++i)
            s += (i ? " & " : "") + to_string(c.consequents[i]);
    }
    return s;
}

bool eval_atom(const ContextModel& ctx, const Atom& atom, const Assignment& assignment)
{
    auto value = [&](std::size_t i) -> const std::string& {
        const Term& t = atom.terms.at(i);
        if (!t.is_var)
            return t.name;
        auto it = assignment.find(t.name);
        if (it == assignment.end())
            throw std::logic_error("unassigned pattern variable ?" + t.name);
        return it->second;
    };
    bool r = false;
    switch (atom.kind) {
    case AtomKind::IsComponent: r = ctx.is_component(value(0)); break;
    case AtomKind::IsConnector: r = ctx.is_connector(value(0)); break;
    case AtomKind::ComponentTypeIs: r = ctx.component_type(value(0)) == atom.text; break;
    case AtomKind::SameComponentType: {
        auto a = ctx.component_type(value(0));
        r = a && a == ctx.component_type(value(1));
        break;
    }
    case AtomKind::ConnectorTypeIs: r = ctx.connector_type(value(0)) == atom.text; break;
    case AtomKind::Bind: r = ctx.bound(value(0), value(1)); break;
    case AtomKind::Assumption: r = ctx.assumption(atom.text) == atom.flag; break;
    case AtomKind::QualityIs: r = ctx.quality_level(atom.text) == atom.level; break;
    case AtomKind::Distinct: r = value(0) != value(1); break;
    case AtomKind::Isolated: {
        const std::string& id = value(0);
        r = ctx.exists(id) && ctx.in_bindings(id).empty() && ctx.out_bindings(id).empty();
        break;
    }
    }
    return atom.negated ? !r : r;
}

namespace {

std::vector<std::string> domain(const ContextModel& ctx, VarType type)
{
    switch (type) {
    case VarType::Component: return ctx.components();
    case VarType::Connector: return ctx.connectors();
    case VarType::Any: {
        auto a = ctx.components();
        auto b = ctx.connectors();
        std::vector<std::string> out;
        std::merge(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
        return out;
    }
    }
    return {};
}

bool has_type(const ContextModel& ctx, const std::string& id, VarType type)
{
    switch (type) {
    case VarType::Component: return ctx.is_component(id);
    case VarType::Connector: return ctx.is_connector(id);
    case VarType::Any: return ctx.exists(id);
    }
    return false;
}

bool clause_holds(const ContextModel& ctx, const ContextModel& frame, const ForAllClause& clause, Assignment assignment)
{
    for (const auto& id : domain(frame, clause.var.type)) {
        assignment[clause.var.name] = id;
        if (!eval_atom(frame, clause.antecedent, assignment))
            continue;
        for (const auto& c : clause.consequents)
            if (!eval_atom(ctx, c, assignment))
                return false;
    }
    return true;
}

class Search
{
public:
    Search(const ContextModel& ctx, const StatePattern& p, const ContextModel& frame)
    : ctx_(ctx), p_(p), frame_(frame), at_depth_(p.vars.size() + 1)
    {
        std::map<std::string, std::size_t> index;
        for (std::size_t i = 0; i < p.vars.size(); ++i)
            index[p.vars[i].name] = i + 1;
        for (std::size_t a = 0; a < p.atoms.size(); ++a) {
            std::size_t depth = 0;
            for (const auto& t : p.atoms[a].terms)
                if (t.is_var) {
                    auto it = index.find(t.name);
                    if (it == index.end())
                        throw std::logic_error("undeclared pattern variable ?" + t.name);
                    depth = std::max(depth, it->second);
                }
            at_depth_[depth].push_back(a);
        }
    }

    EntailmentResult run()
    {
        EntailmentResult r;
        if (!check(0)) {
            r.failed_conjunct = failed_;
            return r;
        }
        if (!descend(1)) {
            r.failed_conjunct = failed_;
            return r;
        }
        r.holds = true;
        for (const auto& v : p_.vars)
            r.witness.emplace_back(v.name, assignment_.at(v.name));
        return r;
    }

private:
    bool check(std::size_t depth)
    {
        for (std::size_t a : at_depth_[depth])
            if (!eval_atom(ctx_, p_.atoms[a], assignment_)) {
                if (failed_.empty() || depth >= failed_depth_) {
                    failed_ = to_string(p_.atoms[a]);
                    failed_depth_ = depth;
                }
                return false;
            }
        return true;
    }

    // Narrows the candidates for the variable at `depth` through a bind atom
    // whose other end is already known.
    std::optional<std::vector<std::string>> narrowed(const PatternVar& v) const
    {
        for (const auto& atom : p_.atoms) {
            if (atom.kind != AtomKind::Bind || atom.negated)
                continue;
            for (int side = 0; side < 2; ++side) {
                const Term& self = atom.terms[side];
                const Term& other = atom.terms[1 - side];
                if (!self.is_var || self.name != v.name)
                    continue;
                std::string known;
                if (!other.is_var)
                    known = other.name;
                else if (auto it = assignment_.find(other.name); it != assignment_.end())
                    known = it->second;
                else
                    continue;
                if (!ctx_.exists(known))
                    return std::vector<std::string>{};
                auto ids = side == 0 ? ctx_.in_bindings(known) : ctx_.out_bindings(known);
                std::vector<std::string> out;
                for (auto& id : ids)
                    if (has_type(ctx_, id, v.type))
                        out.push_back(std::move(id));
                return out;
            }
        }
        return std::nullopt;
    }

    bool descend(std::size_t depth)
    {
        if (depth > p_.vars.size()) {
            for (const auto& clause : p_.forall)
                if (!clause_holds(ctx_, frame_, clause, assignment_)) {
                    if (failed_.empty() || depth >= failed_depth_) {
                        failed_ = "forall ?" + clause.var.name + ": " + to_string(clause.antecedent);
                        failed_depth_ = depth;
                    }
                    return false;
                }
            return true;
        }
        const PatternVar& v = p_.vars[depth - 1];
        auto candidates = narrowed(v);
        const auto& list = candidates ? *candidates : (cache_[depth] = domain(ctx_, v.type));
        if (list.empty() && (failed_.empty() || depth >= failed_depth_)) {
            failed_ = "no candidate for ?" + v.name;
            failed_depth_ = depth;
        }
        for (const auto& id : list) {
            assignment_[v.name] = id;
            if (check(depth) && descend(depth + 1))
                return true;
        }
        assignment_.erase(v.name);
        return false;
    }

    const ContextModel& ctx_;
    const StatePattern& p_;
    const ContextModel& frame_;
    std::vector<std::vector<std::size_t>> at_depth_;
    std::map<std::size_t, std::vector<std::string>> cache_;
    Assignment assignment_;
    std::string failed_;
    std::size_t failed_depth_ = 0;
};

} // namespace

EntailmentResult entails(const ContextModel& ctx, const StatePattern& pattern, const ContextModel* frame)
{
    return Search(ctx, pattern, frame ? *frame : ctx).run();
}

} // namespace adaptflow
