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

#ifndef ADAPTFLOW_PLANNER_HPP
#define ADAPTFLOW_PLANNER_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "adaptflow/change_action.hpp"
#include "adaptflow/context.hpp"
#include "adaptflow/model.hpp"
#include "adaptflow/qos.hpp"
#include "adaptflow/runtime.hpp"
#include "adaptflow/tactics.hpp"

namespace adaptflow {

struct PlannerConfig
{
    // Weight of collateral worsening in the tradeoff score.
    double lambda = 1.0;
    int max_depth = 8;
};

enum class PlanOutcome { Enacted, RejectedByTradeoff, NoViableOption, Failed };

std::string_view to_string(PlanOutcome outcome);

struct TradeoffScore
{
    double score = 0.0;
    bool admissible = true;
    // Predicted value per requirement (property name).
    std::map<std::string, double> predicted;
};

/// Current value of every requirement, as the planner sees it.
struct QoSSnapshot
{
    std::map<std::string, double> values;
    double bandwidth = 0.0;
    // Live provider profiles; the model's profiles are used for any absent.
    std::map<std::string, ProviderProfile> providers;
};

struct PlanExecution
{
    std::string pattern_id;
    TriggerEvent trigger_event;
    std::vector<TacticInvocation> chosen_path;
    std::vector<ConcreteTactic> applied;
    std::vector<Falsification> emitted_falsifications;
    std::vector<std::string> emitted_triggers;
    PlanOutcome outcome = PlanOutcome::Failed;
    std::string reason;
    TradeoffScore tradeoff;

    // Combined batch and the models it produces. Only meaningful when enacted.
    std::vector<ChangeAction> batch;
    RuntimeModel runtime_after;
    ContextModel context_after;
};

/*
    Trigger chains. A chain records the (trigger, pattern) pairs that led to
    a queued trigger; a pair may not repeat and a chain may not grow past
    max_depth.
 */
using Chain = std::vector<std::pair<std::string, std::string>>;

class ChainGuard
{
public:
    explicit ChainGuard(int max_depth = 8) : max_depth_(max_depth) { }

    int max_depth() const { return max_depth_; }
    /// Empty when the pair may extend the chain, otherwise the reason.
    std::string blocks(const Chain& chain, const std::string& trigger, const std::string& pattern) const;

private:
    int max_depth_;
};

/// Hard falsifications become "Falsify: <assumption>" triggers; soft ones
/// produce nothing. Throws ChainDepthExceeded when the chain is full.
std::vector<TriggerEvent> handle_falsification(const Falsification& f, const ChainGuard& guard,
                                               const Chain& chain, std::int64_t now_ms);

class Planner
{
public:
    Planner(const AdaptiveProcessModel& model, const TacticLibrary& library, PlannerConfig config = {});

    const PlannerConfig& config() const { return config_; }

    /// Patterns matching the trigger whose pre-assumptions hold, in declaration order.
    std::vector<const AdaptationPattern*> candidates(const TriggerEvent& trigger, const RuntimeModel& runtime,
                                                     const ContextModel& ctx) const;

    /// Walks the flow on copies of the models. Alternatives are tried in
    /// priority order; the first variation whose assumptions and tactic
    /// preconditions all hold is committed.
    PlanExecution walk_flow(const AdaptationPattern& pattern, const TriggerEvent& trigger,
                            const RuntimeModel& runtime, const ContextModel& ctx) const;

    /// Predicts every requirement after the execution's tactics and scores
    /// the improvement on the triggering requirement against the rest.
    TradeoffScore score_tradeoff(const PlanExecution& execution, const RuntimeModel& runtime,
                                 const QoSSnapshot& now) const;

    /// Best candidate by (admissible, score, declaration order); nullopt when
    /// no pattern matches. Outcome is enacted, rejected_by_tradeoff or
    /// no_viable_option. Live models are never touched.
    std::optional<PlanExecution> select_pattern(const TriggerEvent& trigger, const RuntimeModel& runtime,
                                                const ContextModel& ctx, const QoSSnapshot& now) const;

    /// Attribute a requirement's value maps to, if any, and whether the
    /// value is its complement (failure indicator vs. availability).
    static std::optional<std::pair<std::string, bool>> requirement_attribute(const AdaptiveProcessModel& model,
                                                                             const QualityRequirement& qr);

private:
    Attributes element_attributes(const RuntimeModel& runtime, const std::string& id, const QoSSnapshot& now) const;
    Attributes service_attributes(const std::string& service, const QoSSnapshot& now) const;

    const AdaptiveProcessModel* model_;
    const TacticLibrary* library_;
    PlannerConfig config_;
    std::map<std::string, StructuralQoS> block_qos_;
};

} // namespace adaptflow

#endif // ADAPTFLOW_PLANNER_HPP
