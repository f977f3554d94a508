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

#ifndef ADAPTFLOW_CONTEXT_HPP
#define ADAPTFLOW_CONTEXT_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "adaptflow/connector.hpp"
#include "adaptflow/model.hpp"

namespace adaptflow {

/*
    The context model: a closed-world store of propositions about the running
    system (components, connectors, bindings, measured values, requirement
    levels, named assumptions). A proposition absent from the store is false.
 */

enum class PropKind {
    IsComponent,
    ComponentType,
    IsConnector,
    ConnectorType,
    Bind,
    PropertyValue,
    QualityLevel,
    Assumption,
};

std::string_view to_string(PropKind kind);

struct Proposition
{
    PropKind kind = PropKind::IsComponent;
    // Subject: component, connector, property, requirement or assumption name.
    std::string a;
    // ComponentType: sc_type. ConnectorType: connector type name. Bind: target.
    std::string b;
    double value = 0.0;
    bool flag = true;
    QualityLevel level = QualityLevel::Acceptable;

    static Proposition is_component(std::string sc);
    static Proposition component_type(std::string sc, std::string sc_type);
    static Proposition is_connector(std::string con);
    static Proposition connector_type(std::string con, ConnectorType type);
    static Proposition bind(std::string from, std::string to);
    static Proposition property_value(std::string name, double value);
    static Proposition quality_level(std::string name, QualityLevel level);
    static Proposition assumption(std::string name, bool holds = true);

    bool operator==(const Proposition&) const = default;
};

std::string to_string(const Proposition& p);

class ContextModel
{
public:
    /// Store key: kind + subject, plus the target for Bind. Asserting a
    /// proposition replaces any fact with the same key.
    using Key = std::tuple<PropKind, std::string, std::string>;

    static Key key_of(const Proposition& p);

    /// Throws TypeError for a Bind between two service components.
    void assert_fact(const Proposition& p);
    /// Removes the fact with p's key; returns whether one existed.
    bool retract_fact(const Proposition& p);

    // Batch mutation: no revision bump per call, one bump at commit.
    void assert_unversioned(const Proposition& p);
    bool retract_unversioned(const Proposition& p);
    void bump_revision() { ++revision_; }

    std::uint64_t revision() const { return revision_; }

    bool holds(const Proposition& p) const;
    const Proposition* find(const Key& key) const;

    bool is_component(const std::string& id) const;
    bool is_connector(const std::string& id) const;
    bool exists(const std::string& id) const { return is_component(id) || is_connector(id); }
    std::optional<std::string> component_type(const std::string& sc) const;
    std::optional<std::string> connector_type(const std::string& con) const;
    bool bound(const std::string& from, const std::string& to) const;

    /// Sources X with bind(X, id), id-sorted. Throws NotFound for unknown ids.
    std::vector<std::string> in_bindings(const std::string& id) const;
    /// Targets Y with bind(id, Y), id-sorted. Throws NotFound for unknown ids.
    std::vector<std::string> out_bindings(const std::string& id) const;

    std::optional<double> property_value(const std::string& name) const;
    std::optional<QualityLevel> quality_level(const std::string& name) const;
    /// Closed world: unknown assumptions are false.
    bool assumption(const std::string& name) const;

    std::vector<std::string> components() const;
    std::vector<std::string> connectors() const;
    std::vector<std::pair<std::string, std::string>> bindings() const;
    std::vector<Proposition> facts() const;
    std::size_t size() const { return facts_.size(); }

    /// One JSON object per fact, sorted, newline-terminated.
    std::string to_json_lines() const;

    /// Fact-level equality; the revision counter is ignored.
    bool same_facts(const ContextModel& other) const { return facts_ == other.facts_; }

private:
    void check_typing(const Proposition& p) const;

    std::map<Key, Proposition> facts_;
    std::set<std::pair<std::string, std::string>> reverse_binds_; // (to, from)
    std::uint64_t revision_ = 0;
};

/*
    State patterns: conjunctions of atoms over typed variables, optionally
    followed by universally quantified clauses. A pattern is checked by
    searching for an assignment of its existential variables; the
    lowest-id assignment (variables in declaration order) is the witness.
 */

enum class VarType { Component, Connector, Any };

struct PatternVar
{
    std::string name;
    VarType type = VarType::Any;

    bool operator==(const PatternVar&) const = default;
};

/// Either a variable reference or a literal entity id.
struct Term
{
    bool is_var = false;
    std::string name;

    static Term var(std::string name) { return {true, std::move(name)}; }
    static Term id(std::string id) { return {false, std::move(id)}; }

    bool operator==(const Term&) const = default;
};

enum class AtomKind {
    IsComponent,       // t0
    IsConnector,       // t0
    ComponentTypeIs,   // t0, text
    SameComponentType, // t0, t1
    ConnectorTypeIs,   // t0, text
    Bind,              // t0 -> t1
    Assumption,        // text, flag
    QualityIs,         // text, level
    Distinct,          // t0 != t1
    Isolated,          // t0 has no bindings at all
};

struct Atom
{
    AtomKind kind = AtomKind::Bind;
    std::vector<Term> terms;
    std::string text;
    bool flag = true;
    QualityLevel level = QualityLevel::Acceptable;
    bool negated = false;

    static Atom is_component(Term t);
    static Atom is_connector(Term t);
    static Atom component_type_is(Term t, std::string sc_type);
    static Atom same_component_type(Term a, Term b);
    static Atom connector_type_is(Term t, ConnectorType type);
    static Atom bind(Term from, Term to);
    static Atom assumption(std::string name, bool holds = true);
    static Atom quality_is(std::string name, QualityLevel level);
    static Atom distinct(Term a, Term b);
    static Atom isolated(Term t);
    Atom operator!() const
    {
        Atom copy = *this;
        copy.negated = !copy.negated;
        return copy;
    }

    bool operator==(const Atom&) const = default;
};

/// forall var: antecedent (read in the frame context) -> every consequent (read in the current context).
struct ForAllClause
{
    PatternVar var;
    Atom antecedent;
    std::vector<Atom> consequents;

    bool operator==(const ForAllClause&) const = default;
};

struct StatePattern
{
    std::vector<PatternVar> vars;
    std::vector<Atom> atoms;
    std::vector<ForAllClause> forall;

    bool empty() const { return atoms.empty() && forall.empty(); }
    bool operator==(const StatePattern&) const = default;
};

using Assignment = std::map<std::string, std::string>;

/// Replaces every assigned variable by its value and drops it from `vars`.
StatePattern bind_pattern(const StatePattern& pattern, const Assignment& assignment);

std::string to_string(const Atom& atom);
std::string to_string(const StatePattern& pattern);

struct EntailmentResult
{
    bool holds = false;
    // Variable -> entity, in variable declaration order.
    std::vector<std::pair<std::string, std::string>> witness;
    // First atom with no satisfying assignment, for diagnostics.
    std::string failed_conjunct;

    Assignment assignment() const { return {witness.begin(), witness.end()}; }
};

/// Searches for the lowest-id witness. Universal clauses read their
/// antecedent in `frame` (defaults to `ctx`).
EntailmentResult entails(const ContextModel& ctx, const StatePattern& pattern, const ContextModel* frame = nullptr);

/// Truth of one atom under a complete assignment.
bool eval_atom(const ContextModel& ctx, const Atom& atom, const Assignment& assignment);

} // namespace adaptflow

#endif // ADAPTFLOW_CONTEXT_HPP
