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

#include <gtest/gtest.h>

#include <random>

#include "adaptflow/errors.hpp"
#include "adaptflow/model_io.hpp"
#include "adaptflow/runtime.hpp"
#include "adaptflow/simulator.hpp"
#include "adaptflow/tactics.hpp"
#include "support/model_generator.hpp"

namespace af = adaptflow;

namespace {

const char* kSeq = R"({"workflow": {"kind": "seq", "children": [
    {"kind": "service", "service": "a"}, {"kind": "service", "service": "b"}]},
  "services": [{"name": "a", "providers": [{"id": "pa", "latency_mean_ms": 10}]},
               {"name": "b", "providers": [{"id": "pb", "latency_mean_ms": 20}, {"id": "pb2", "latency_mean_ms": 25}]}],
  "quality_requirements": [], "adaptation_plans": []})";

// One block per flow-object kind and one requirement per property kind.
const char* kKinds = R"({"workflow": {"kind": "seq", "children": [
  {"kind": "sel", "label": "S", "probabilities": [0.5, 0.5], "children": [{"kind": "service", "service": "a"}, {"kind": "service", "service": "b"}]},
  {"kind": "and_par", "label": "P", "children": [{"kind": "service", "service": "a"}, {"kind": "service", "service": "b"}]},
  {"kind": "loop", "label": "L", "k": 2, "children": [{"kind": "service", "service": "a"}]},
  {"kind": "opt", "label": "O", "children": [{"kind": "service", "service": "b"}]}]},
  "services": [{"name": "a", "providers": [{"id": "pa", "latency_mean_ms": 10}]},
               {"name": "b", "providers": [{"id": "pb", "latency_mean_ms": 20}]}],
  "quality_requirements": [
   {"target": "S", "property": {"name": "t", "kind": "time"}, "fuzzy": {"orientation": "-", "x1": 1, "x2": 2, "interval": "per_instance"}, "trigger": "slow"},
   {"target": "S", "property": {"name": "f", "kind": "failure"}, "fuzzy": {"orientation": "-", "x1": 0, "x2": 0.5, "interval": "per_instance"}, "trigger": ""},
   {"target": "P", "property": {"name": "c", "kind": "count"}, "fuzzy": {"orientation": "-", "x1": 1, "x2": 2, "interval": {"window_ms": 1000}}, "trigger": ""},
   {"target": "P", "property": {"name": "d", "kind": "data", "field": "payload_bytes"}, "fuzzy": {"orientation": "-", "x1": 1, "x2": 2, "interval": "per_instance"}, "trigger": ""},
   {"target": "L", "property": {"name": "k", "kind": "constraint", "field": "elapsed_ms", "op": "<=", "value": 5}, "fuzzy": {"orientation": "-", "x1": 0, "x2": 0.5, "interval": "per_instance"}, "trigger": ""},
   {"target": "L", "property": {"name": "dv", "kind": "derived", "function": "sum", "args": ["t", "d"]}, "fuzzy": {"orientation": "-", "x1": 1, "x2": 2, "interval": "per_instance"}, "trigger": ""},
   {"target": "O", "property": {"name": "ag", "kind": "aggregated", "function": "avg", "base": "t", "window_ms": 1000}, "fuzzy": {"orientation": "-", "x1": 1, "x2": 2, "interval": "per_instance"}, "trigger": ""}
  ], "adaptation_plans": []})";

bool has_binding(const af::RuntimeModel& rt, const std::string& from, const std::string& to)
{
    return std::find(rt.bindings.begin(), rt.bindings.end(), af::Binding{from, to}) != rt.bindings.end();
}

const af::CheckpointModel& checkpoint(const af::RuntimeModel& rt, const std::string& prop)
{
    for (const auto& c : rt.checkpoints)
        if (c.property_name == prop)
            return c;
    throw std::runtime_error("no checkpoint " + prop);
}

const af::ConnectorModel* holder(const af::RuntimeModel& rt, const std::string& interceptor)
{
    for (const auto& c : rt.connectors)
        for (const auto& i : c.interceptors)
            if (i.id == interceptor)
                return &c;
    return nullptr;
}

} // namespace

TEST(Runtime, SequenceShape)
{
    af::RuntimeModel rt = af::transform(af::parse_model(kSeq));
    EXPECT_TRUE(has_binding(rt, "root.0.SC:a", "root.SeqIn.1"));
    EXPECT_TRUE(has_binding(rt, "root.SeqIn.1", "root.SeqOut.1"));
    EXPECT_TRUE(has_binding(rt, "root.SeqOut.1", "root.1.SC:b"));
    EXPECT_EQ(rt.find_connector("root.SeqIn.1")->type, af::ConnectorType::SeqIn);
    EXPECT_EQ(rt.find_connector("root.SeqOut.1")->type, af::ConnectorType::SeqOut);
    EXPECT_EQ(rt.find_component("root.0.SC:a")->provider.id, "pa");
    EXPECT_EQ(rt.find_component("root.1.SC:b")->provider.id, "pb");
    EXPECT_TRUE(rt.find_component("standby.SC:b@pb2")->standby);
}

TEST(Runtime, SingleServiceHasOnlyRootBlock)
{
    const char* doc = R"({"workflow": {"kind": "service", "service": "s"},
      "services": [{"name": "s", "providers": [{"id": "p", "latency_mean_ms": 10}]}],
      "quality_requirements": [], "adaptation_plans": []})";
    af::RuntimeModel rt = af::transform(af::parse_model(doc));
    ASSERT_EQ(rt.components.size(), 1u);
    ASSERT_EQ(rt.connectors.size(), 2u);
    EXPECT_TRUE(rt.connectors[0].type == af::ConnectorType::BlockStart
                || rt.connectors[1].type == af::ConnectorType::BlockStart);
    EXPECT_TRUE(rt.checkpoints.empty());
    EXPECT_TRUE(rt.evaluation_units.empty());
    ASSERT_EQ(rt.process_blocks.size(), 1u);
    EXPECT_EQ(rt.process_blocks[0].label, "root");
}

TEST(Runtime, FlowObjectShapes)
{
    af::RuntimeModel rt = af::transform(af::parse_model(kKinds));
    // sel
    EXPECT_EQ(rt.out_targets("root.0.BlockStart"), std::vector<std::string>{"root.0.SelOut"});
    EXPECT_EQ(rt.out_targets("root.0.SelOut"), (std::vector<std::string>{"root.0.0.SC:a", "root.0.1.SC:b"}));
    EXPECT_EQ(rt.in_sources("root.0.SelIn").size(), 2u);
    // and_par
    EXPECT_EQ(rt.find_connector("root.1.ParOut")->type, af::ConnectorType::ParOut);
    EXPECT_EQ(rt.out_targets("root.1.ParOut").size(), 2u);
    EXPECT_EQ(rt.out_targets("root.1.ParIn"), std::vector<std::string>{"root.1.BlockEnd"});
    // loop: back edge first
    EXPECT_EQ(rt.out_targets("root.2.LoopOut"), (std::vector<std::string>{"root.2.LoopIn", "root.2.BlockEnd"}));
    EXPECT_EQ(rt.find_connector("root.2.LoopOut")->config.param("iterations", 0), 2.0);
    // opt: selection with an empty branch
    EXPECT_EQ(rt.out_targets("root.3.SelOut"), (std::vector<std::string>{"root.3.0.SC:b", "root.3.SelIn"}));
    // blocks
    for (const char* l : {"S", "P", "L", "O", "root"}) {
        const af::ProcessBlock* b = rt.find_block(l);
        ASSERT_NE(b, nullptr) << l;
        EXPECT_EQ(rt.find_connector(b->start)->type, af::ConnectorType::BlockStart);
        EXPECT_EQ(rt.find_connector(b->end)->type, af::ConnectorType::BlockEnd);
        EXPECT_EQ(rt.find_connector(b->start)->config.partner, b->end);
    }
}

TEST(Runtime, InterceptorPlacementPerPropertyKind)
{
    af::RuntimeModel rt = af::transform(af::parse_model(kKinds));
    const af::ProcessBlock* s = rt.find_block("S");
    for (const char* p : {"t", "f"}) {
        const auto& cp = checkpoint(rt, p);
        ASSERT_EQ(cp.source_interceptors.size(), 2u) << p;
        EXPECT_EQ(holder(rt, cp.source_interceptors[0])->id, s->start);
        EXPECT_EQ(holder(rt, cp.source_interceptors[1])->id, s->end);
    }
    for (const char* p : {"c", "d", "k"}) {
        const auto& cp = checkpoint(rt, p);
        ASSERT_EQ(cp.source_interceptors.size(), 1u) << p;
        EXPECT_EQ(holder(rt, cp.source_interceptors[0])->id, rt.find_block(cp.block)->end);
    }
    EXPECT_EQ(checkpoint(rt, "dv").inputs, (std::vector<std::string>{"t", "d"}));
    EXPECT_TRUE(checkpoint(rt, "dv").source_interceptors.empty());
    EXPECT_EQ(checkpoint(rt, "ag").inputs, std::vector<std::string>{"t"});
    EXPECT_EQ(rt.evaluation_units.size(), 7u);
    EXPECT_EQ(rt.evaluation_units[0].trigger, "slow");
}

TEST(Runtime, FixtureTimeRequirement)
{
    af::AdaptiveProcessModel m = af::load_model_file(std::string(ADAPTFLOW_FIXTURE_DIR) + "/emergency_call.json");
    af::RuntimeModel rt = af::transform(m);
    const auto& cp = checkpoint(rt, "location_time");
    EXPECT_EQ(cp.kind, af::PropertyKind::Time);
    EXPECT_EQ(cp.block, "finding_geographical_location");
    EXPECT_EQ(cp.source_interceptors.size(), 2u);
    ASSERT_EQ(rt.adaptation_patterns.size(), 5u);
    EXPECT_EQ(rt.adaptation_patterns[0].trigger, "Automatic call number detection failed");
    // Arguments are bound to runtime ids; catalog services pass through.
    const auto& alt = rt.adaptation_patterns[0].compiled_flow.at(0);
    ASSERT_EQ(alt.kind, af::FlowKind::Alternative);
    EXPECT_EQ(alt.alternatives[0][0].tactic.args,
              (std::vector<std::string>{"root.0.SC:identify_call_number", "input_call_number_manually"}));
}

TEST(Runtime, TransformIsDeterministic)
{
    std::mt19937_64 rng(3);
    for (int i = 0; i < 100; ++i) {
        af::AdaptiveProcessModel m = oracle::random_model(rng);
        EXPECT_EQ(af::transform(m), af::transform(m));
    }
}

TEST(Runtime, NoComponentToComponentBinding)
{
    std::mt19937_64 rng(4);
    for (int i = 0; i < 200; ++i) {
        af::RuntimeModel rt = af::transform(oracle::random_model(rng));
        for (const auto& b : rt.bindings) {
            ASSERT_TRUE(rt.exists(b.from) && rt.exists(b.to)) << b.from << " -> " << b.to;
            EXPECT_FALSE(rt.find_component(b.from) && rt.find_component(b.to)) << b.from << " -> " << b.to;
        }
    }
}

TEST(Runtime, UnbindableTacticArgument)
{
    af::AdaptiveProcessModel m = af::parse_model(kSeq);
    af::AdaptationPlan plan;
    plan.trigger = "x";
    af::FlowNode step;
    step.tactic.tactic = "skip";
    step.tactic.args = {"not_a_label_or_service"};
    plan.flow.push_back(step);
    m.adaptation_plans.push_back(plan);
    EXPECT_THROW(af::transform(m), af::TransformError);
}

TEST(Runtime, CausalConnection)
{
    af::RuntimeModel rt = af::transform(af::parse_model(kSeq));
    af::Simulator sim(rt, af::ScenarioScript{});
    EXPECT_TRUE(af::verify_causal_connection(rt, sim).empty());

    af::ContextModel ctx = af::context_from_runtime(rt);
    af::TacticEnv env{&rt.catalog, &rt.next_fresh, {}, {}};
    std::vector<std::string> args{"root.1.SC:b"};
    af::ConcreteTactic ct = af::instantiate(af::TacticLibrary::builtin().at("parallel"), args, ctx, env);
    af::apply_to_runtime(rt, ct.batch);
    sim.configure(ct.batch);
    EXPECT_TRUE(af::verify_causal_connection(rt, sim).empty());

    sim.find_node("root.SeqOut.1")->outs = {"root.0.SC:a"};
    auto diff = af::verify_causal_connection(rt, sim);
    ASSERT_FALSE(diff.empty());
    EXPECT_NE(diff[0].find("root.SeqOut.1"), std::string::npos) << diff[0];
}

TEST(Runtime, ApplyIsAllOrNothing)
{
    af::RuntimeModel rt = af::transform(af::parse_model(kSeq));
    af::RuntimeModel before = rt;
    std::vector<af::ChangeAction> batch{af::ChangeAction::add_connector("k", af::ConnectorType::Simple),
                                        af::ChangeAction::add_binding("k", "missing")};
    EXPECT_THROW(af::apply_to_runtime(rt, batch), af::DanglingReference);
    EXPECT_EQ(rt, before);
}

TEST(Runtime, BlockMembers)
{
    af::RuntimeModel rt = af::transform(af::parse_model(kKinds));
    auto members = af::block_members(rt, *rt.find_block("P"));
    EXPECT_TRUE(members.count("root.1.0.SC:a"));
    EXPECT_TRUE(members.count("root.1.ParIn"));
    EXPECT_FALSE(members.count("root.0.0.SC:a"));
    EXPECT_FALSE(members.count("root.2.0.SC:a"));
}
