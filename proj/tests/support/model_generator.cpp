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

#include "model_generator.hpp"

#include <algorithm>
#include <string>
#include <vector>

namespace oracle {

namespace af = adaptflow;

namespace {

class Generator
{
public:
    Generator(std::mt19937_64& rng, const GeneratorOptions& o) : rng_(rng), o_(o) { }

    af::AdaptiveProcessModel build()
    {
        af::AdaptiveProcessModel m;
        budget_ = 1 + static_cast<int>(pick(static_cast<std::size_t>(o_.max_services)));
        m.workflow = node(0);
        for (const auto& s : leaves_)
            m.services.push_back(service(s));
        int extras = 1 + static_cast<int>(pick(2));
        for (int i = 0; i < extras; ++i) {
            std::string name = "extra" + std::to_string(i);
            extras_.push_back(name);
            m.services.push_back(service(name));
        }
        if (o_.with_requirements)
            requirements(m);
        if (o_.with_plans)
            plans(m);
        if (o_.with_scenario)
            scenario(m);
        return m;
    }

private:
    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
    std::size_t pick(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_); }
    bool coin(double p = 0.5) { return uniform(0.0, 1.0) < p; }

    af::ProcessNode leaf()
    {
        af::ProcessNode n;
        n.service = "svc" + std::to_string(leaves_.size());
        leaves_.push_back(n.service);
        --budget_;
        maybe_label(n);
        return n;
    }

    void maybe_label(af::ProcessNode& n)
    {
        if (coin(0.4)) {
            n.label = "blk" + std::to_string(labels_.size());
            labels_.push_back(*n.label);
        }
    }

    af::ProcessNode node(int depth)
    {
        if (depth >= o_.max_depth || budget_ <= 1 || coin(0.25))
            return leaf();
        static const af::NodeKind kinds[] = {af::NodeKind::Seq, af::NodeKind::AndPar, af::NodeKind::Sel,
                                             af::NodeKind::Loop, af::NodeKind::Opt};
        af::ProcessNode n;
        n.kind = kinds[pick(5)];
        while (under_par_ > 0 && o_.deterministic_par_branches
               && (n.kind == af::NodeKind::Sel || n.kind == af::NodeKind::Opt))
            n.kind = kinds[pick(5)];
        std::size_t children = 1;
        if (n.kind == af::NodeKind::Seq)
            children = 1 + pick(3);
        else if (n.kind == af::NodeKind::AndPar || n.kind == af::NodeKind::Sel)
            children = 2 + pick(2);
        if (static_cast<int>(children) > budget_)
            children = static_cast<std::size_t>(budget_);
        if (children < 2 && (n.kind == af::NodeKind::AndPar || n.kind == af::NodeKind::Sel))
            n.kind = af::NodeKind::Seq;
        maybe_label(n);
        bool par = n.kind == af::NodeKind::AndPar;
        under_par_ += par ? 1 : 0;
        for (std::size_t i = 0; i < children && budget_ > 0; ++i)
            n.children.push_back(node(depth + 1));
        under_par_ -= par ? 1 : 0;
        if (n.children.size() < 2 && (n.kind == af::NodeKind::AndPar || n.kind == af::NodeKind::Sel))
            n.kind = af::NodeKind::Seq;
        if (n.kind == af::NodeKind::Loop)
            n.iterations = 1 + static_cast<int>(pick(3));
        if (n.kind == af::NodeKind::Sel) {
            double rest = 1.0;
            for (std::size_t i = 0; i + 1 < n.children.size(); ++i) {
                double p = uniform(0.1, 0.9) * rest / static_cast<double>(n.children.size() - i);
                n.probabilities.push_back(p);
                rest -= p;
            }
            n.probabilities.push_back(rest);
        }
        if (n.kind == af::NodeKind::Opt && coin(0.8))
            n.probabilities.push_back(uniform(0.05, 0.95));
        return n;
    }

    af::ServiceSpec service(const std::string& name)
    {
        af::ServiceSpec s;
        s.name = name;
        std::size_t providers = 1 + pick(2);
        for (std::size_t i = 0; i < providers; ++i) {
            af::ProviderProfile p;
            p.id = name + "_p" + std::to_string(i);
            double mean = uniform(20.0, 500.0);
            p.latency_mean_ms = mean;
            p.latency_stddev_ms = mean * (o_.low_variance ? 0.01 : 0.2);
            p.failure_probability = uniform(0.0, 0.05);
            p.cost = uniform(0.0, 5.0);
            p.payload_bytes = coin(0.3) ? uniform(10.0, 2000.0) : 0.0;
            s.providers.push_back(std::move(p));
        }
        return s;
    }

    std::string target()
    {
        if (labels_.empty() || coin(0.2))
            return std::string(af::kRootLabel);
        return labels_[pick(labels_.size())];
    }

    af::FuzzyMeasure fuzzy()
    {
        af::FuzzyMeasure f;
        f.orientation = coin() ? af::Orientation::LowerIsBetter : af::Orientation::HigherIsBetter;
        f.x1 = uniform(0.0, 100.0);
        f.x2 = coin(0.1) ? f.x1 : f.x1 + uniform(0.0, 100.0);
        if (coin(0.3))
            f.interval.window_ms = static_cast<std::int64_t>(1000 + pick(9000));
        return f;
    }

    void requirements(af::AdaptiveProcessModel& m)
    {
        std::size_t count = pick(5);
        std::vector<std::string> names;
        for (std::size_t i = 0; i < count; ++i) {
            af::QualityRequirement q;
            q.target = target();
            q.property.name = "prop" + std::to_string(i);
            switch (pick(7)) {
            case 0: q.property.kind = af::PropertyKind::Time; break;
            case 1: q.property.kind = af::PropertyKind::Failure; break;
            case 2: q.property.kind = af::PropertyKind::Count; break;
            case 3:
                q.property.kind = af::PropertyKind::Data;
                q.property.field = "elapsed_ms";
                break;
            case 4:
                q.property.kind = af::PropertyKind::Constraint;
                q.property.field = "payload_bytes";
                q.property.op = "<=";
                q.property.threshold = uniform(0.0, 1000.0);
                break;
            case 5: {
                q.property.kind = af::PropertyKind::Aggregated;
                q.property.function = "ratio";
                af::PropertySpec base;
                base.name = q.property.name + "_base";
                base.kind = af::PropertyKind::Failure;
                q.property.inline_base.push_back(base);
                q.property.window_ms = static_cast<std::int64_t>(1000 + pick(9000));
                break;
            }
            default:
                if (names.size() >= 2) {
                    q.property.kind = af::PropertyKind::Derived;
                    q.property.function = "sum";
                    q.property.args = {names[0], names[1]};
                } else {
                    q.property.kind = af::PropertyKind::Time;
                }
            }
            q.fuzzy = fuzzy();
            if (coin(0.7)) {
                q.trigger = "trigger " + std::to_string(i);
                triggers_.push_back(q.trigger);
            }
            names.push_back(q.property.name);
            m.quality_requirements.push_back(std::move(q));
        }
    }

    af::FlowNode tactic_step()
    {
        af::FlowNode f;
        f.kind = af::FlowKind::Tactic;
        switch (pick(4)) {
        case 0:
            f.tactic.tactic = "skip";
            f.tactic.args = {leaves_[pick(leaves_.size())]};
            break;
        case 1:
            f.tactic.tactic = "add";
            f.tactic.args = {target(), extras_[pick(extras_.size())]};
            break;
        case 2:
            f.tactic.tactic = "replace";
            f.tactic.args = {leaves_[pick(leaves_.size())], extras_[pick(extras_.size())]};
            break;
        default:
            f.tactic.tactic = "cache";
            f.tactic.args = {leaves_[pick(leaves_.size())], "recent"};
        }
        if (coin(0.3))
            f.tactic.pre_assumptions.push_back("assumption " + std::to_string(pick(3)));
        if (coin(0.3))
            f.tactic.false_assumptions.push_back(
                {coin() ? af::Severity::Soft : af::Severity::Hard, "effect " + std::to_string(pick(3))});
        return f;
    }

    void plans(af::AdaptiveProcessModel& m)
    {
        if (triggers_.empty())
            return;
        std::size_t count = 1 + pick(3);
        for (std::size_t i = 0; i < count; ++i) {
            af::AdaptationPlan p;
            p.trigger = triggers_[pick(triggers_.size())];
            p.flow.push_back(tactic_step());
            if (coin(0.4)) {
                af::FlowNode alt;
                alt.kind = af::FlowKind::Alternative;
                alt.alternatives.push_back({tactic_step()});
                alt.alternatives.push_back({tactic_step(), tactic_step()});
                p.flow.push_back(std::move(alt));
            }
            if (coin(0.2)) {
                af::FlowNode e;
                e.kind = af::FlowKind::Emit;
                e.emit = triggers_[pick(triggers_.size())];
                p.flow.push_back(std::move(e));
            }
            if (coin(0.3))
                p.pre_assumptions.push_back("assumption " + std::to_string(pick(3)));
            if (coin(0.3))
                p.false_assumptions.push_back({af::Severity::Soft, "plan effect " + std::to_string(i)});
            m.adaptation_plans.push_back(std::move(p));
        }
    }

    void scenario(af::AdaptiveProcessModel& m)
    {
        af::ScenarioScript s;
        s.seed = rng_();
        s.horizon_ms = static_cast<std::int64_t>(1000 + pick(99000));
        std::size_t count = pick(6);
        std::vector<std::int64_t> times;
        for (std::size_t i = 0; i < count; ++i)
            times.push_back(static_cast<std::int64_t>(pick(static_cast<std::size_t>(s.horizon_ms) + 1)));
        std::sort(times.begin(), times.end());
        for (auto t : times) {
            af::ScenarioEvent e;
            e.at_ms = t;
            switch (pick(5)) {
            case 0:
                e.action = af::ScenarioAction::StartInstances;
                e.value = uniform(0.1, 5.0);
                break;
            case 1: {
                e.action = af::ScenarioAction::SetProviderFailure;
                const auto& svc = m.services[pick(m.services.size())];
                e.target = svc.providers.front().id;
                e.value = uniform(0.0, 1.0);
                break;
            }
            case 2:
                e.action = af::ScenarioAction::SetBandwidth;
                if (coin(0.3))
                    e.unlimited = true;
                else
                    e.value = uniform(0.0, 100.0);
                break;
            case 3:
                e.action = af::ScenarioAction::SetProviderLatency;
                e.target = m.services[pick(m.services.size())].providers.front().id;
                e.value = uniform(10.0, 900.0);
                e.value2 = uniform(0.0, 50.0);
                break;
            default:
                e.action = coin() ? af::ScenarioAction::AssertAssumption : af::ScenarioAction::RetractAssumption;
                e.target = "assumption " + std::to_string(pick(3));
            }
            s.events.push_back(std::move(e));
        }
        m.scenario = std::move(s);
    }

    std::mt19937_64& rng_;
    GeneratorOptions o_;
    int budget_ = 0;
    int under_par_ = 0;
    std::vector<std::string> leaves_;
    std::vector<std::string> extras_;
    std::vector<std::string> labels_;
    std::vector<std::string> triggers_;
};

} // namespace

af::AdaptiveProcessModel random_model(std::mt19937_64& rng, const GeneratorOptions& options)
{
    return Generator(rng, options).build();
}

} // namespace oracle
