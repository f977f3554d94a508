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

#ifndef ADAPTFLOW_TACTICS_HPP
#define ADAPTFLOW_TACTICS_HPP

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "adaptflow/change_action.hpp"
#include "adaptflow/context.hpp"
#include "adaptflow/model.hpp"

namespace adaptflow {

/*
    Adaptation tactic templates.

    Each template has six parts: the connectors that support it, a
    precondition, a pre-state, a parameterized batch of change actions, a
    post-state and the expected effect on QoS attributes. Variables in
    patterns and actions are written "?Name"; tactic arguments, precondition
    witnesses and fresh ids are substituted at instantiation.
 */

enum class ArgRole {
    Component,  // an active service component
    Anchor,     // a component or a process block (its start connector)
    NewService, // a catalog service, instantiated fresh
    Peer,       // a spare component of the same type
    Delegate,   // payload function
    Filter,     // cache filter
    Condition,  // re-execution condition
};

std::string_view to_string(ArgRole role);

struct ArgSpec
{
    std::string var;
    ArgRole role = ArgRole::Component;
    bool optional = false;
};

/// Attribute vector an effect formula reads and writes.
struct Attributes
{
    double response_time = 0.0;
    double cost = 0.0;
    double availability = 1.0;
    double reliability = 1.0;
    double payload_bytes = 0.0;
    // Link time of the element's output message at the current bandwidth.
    double transit_ms = 0.0;
    double battery = 0.0;
    double memory = 0.0;

    double get(std::string_view attribute) const;
    void set(std::string_view attribute, double value);
};

/// Inputs of a prediction. `block` is the affected block before adaptation,
/// `primary` the element the tactic acts on, `secondary` the peer or new service.
struct EffectInputs
{
    Attributes block;
    Attributes primary;
    Attributes secondary;
    std::map<std::string, double> params;

    double param(const std::string& key, double fallback = 0.0) const;
};

struct EffectFormula
{
    std::string attribute;
    std::string formula;
    std::function<double(const EffectInputs&)> fn;
};

struct FreshVar
{
    std::string var;
    // Id stem, e.g. "ParOutCon" or "SC".
    std::string stem;
};

struct TacticTemplate
{
    std::string kind;
    std::string category;
    std::string description;
    std::vector<ArgSpec> args;
    std::vector<ConnectorType> supporting_connectors;
    StatePattern precondition;
    StatePattern pre_state;
    std::vector<FreshVar> fresh;
    std::vector<ChangeAction> change_actions;
    StatePattern post_state;
    std::vector<EffectFormula> effects;
    // Defaults for connector parameters, overridable per instantiation.
    std::map<std::string, double> params;

    std::size_t min_arity() const;
    std::size_t max_arity() const { return args.size(); }
};

struct ConcreteTactic
{
    std::string kind;
    std::vector<std::string> args;
    Assignment binding;
    std::vector<ChangeAction> batch;
    StatePattern post_state;
    std::map<std::string, double> params;
    // Element acted on and its peer/new service, when the tactic has them.
    std::string primary;
    std::string secondary;
    std::string secondary_service;
};

/// Payload functions for aggregate/reduce.
struct PayloadDelegate
{
    double scale = 1.0;
    double cpu_ms = 0.0;
};

const std::map<std::string, PayloadDelegate>& payload_delegates();
/// Cache filters map to the fraction of requests they serve from cache.
const std::map<std::string, double>& cache_filters();
const std::vector<std::string>& retry_conditions();

class TacticLibrary
{
public:
    /// The ten built-in tactics plus the queue extension.
    static const TacticLibrary& builtin();

    /// Registers an additional template; its kind must be new.
    void register_tactic(TacticTemplate tactic);

    const TacticTemplate* find(std::string_view kind) const;
    const TacticTemplate& at(std::string_view kind) const;
    std::vector<std::string> kinds() const;

private:
    std::map<std::string, TacticTemplate, std::less<>> templates_;
};

TacticLibrary make_builtin_library();

/// What instantiation needs besides the context.
struct TacticEnv
{
    const std::vector<ServiceSpec>* catalog = nullptr;
    std::uint64_t* fresh_counter = nullptr;
    std::map<std::string, double> param_overrides;
    // Assumptions the invocation requires; checked as part of the precondition.
    std::vector<std::string> pre_assumptions;
};

/// Binds arguments and the lowest-id precondition witness into a concrete
/// batch. Throws ArityError or PreconditionFailed (naming the failed conjunct).
ConcreteTactic instantiate(const TacticTemplate& tactic, std::span<const std::string> args,
                           const ContextModel& ctx, TacticEnv& env);

/// Applies a batch atomically. On failure throws DanglingReference,
/// DuplicateBinding or TypeError and `ctx` is left untouched.
ContextModel apply(std::span<const ChangeAction> batch, const ContextModel& ctx);

/// Post-adaptation attributes of the affected block. Attributes the template
/// does not mention pass through unchanged.
Attributes predict_effect(const ConcreteTactic& tactic, const TacticLibrary& library, const EffectInputs& inputs);

nlohmann::ordered_json to_json(const TacticTemplate& tactic);
nlohmann::ordered_json to_json(const TacticLibrary& library);

} // namespace adaptflow

#endif // ADAPTFLOW_TACTICS_HPP
