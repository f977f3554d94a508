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

#include <algorithm>

#include "adaptflow/errors.hpp"
#include "adaptflow/model_io.hpp"
#include "adaptflow/qos.hpp"
#include "adaptflow/runtime.hpp"
#include "adaptflow/simulator.hpp"
#include "adaptflow/tactics.hpp"
#include "support/brute_force_entailment.hpp"

namespace af = adaptflow;
using CA = af::ChangeAction;

namespace {

const af::TacticLibrary& lib() { return af::TacticLibrary::builtin(); }

struct Fixture
{
    af::AdaptiveProcessModel model;
    af::RuntimeModel rt;
    af::ContextModel ctx;

    explicit Fixture(af::AdaptiveProcessModel m) : model(std::move(m)), rt(af::transform(model)), ctx(af::context_from_runtime(rt)) { }

    af::ConcreteTactic make(const std::string& kind, std::vector<std::string> args, std::vector<std::string> pre = {})
    {
        af::TacticEnv env{&rt.catalog, &rt.next_fresh, {}, std::move(pre)};
        return af::instantiate(lib().at(kind), args, ctx, env);
    }
};

Fixture emergency() { return Fixture(af::load_model_file(std::string(ADAPTFLOW_FIXTURE_DIR) + "/emergency_call.json")); }

std::size_t count_kind(const std::vector<CA>& batch, CA::Kind k)
{
    return static_cast<std::size_t>(std::count_if(batch.begin(), batch.end(), [&](const CA& a) { return a.kind == k; }));
}

// Single service S with providers p1 and p2, plus a catalog service X.
af::AdaptiveProcessModel two_provider_model(double a1, double a2)
{
    af::AdaptiveProcessModel m;
    m.workflow.service = "S";
    af::ServiceSpec s{"S", {{"p1", 100.0, 2.0, 1.0 - a1, 1.0, 0.0}, {"p2", 120.0, 2.0, 1.0 - a2, 2.0, 0.0}}};
    af::ServiceSpec x{"X", {{"px", 50.0, 1.0, 0.0, 0.5, 0.0}}};
    m.services = {s, x};
    return m;
}

struct SimStats
{
    double availability = 0;
    double mean_time = 0; // over all instances, failed ones included
    double cost = 0;
};

SimStats simulate(const af::RuntimeModel& rt, int n)
{
    af::ScenarioScript sc;
    sc.seed = 3;
    sc.horizon_ms = n;
    sc.events.push_back({0, af::ScenarioAction::StartInstances, "", 1000.0, 0.0, false});
    af::Simulator sim(rt, sc, {true});
    sim.run_until(sc.horizon_ms);
    sim.drain();
    SimStats s;
    for (const auto& r : sim.records())
        s.mean_time += static_cast<double>(r.end_ms - r.start_ms);
    double total = static_cast<double>(sim.records().size());
    s.mean_time /= total;
    s.availability = sim.completed() / total;
    s.cost = sim.total_cost() / total;
    return s;
}

af::EffectInputs inputs(double t1, double c1, double a1, double t2 = 0, double c2 = 0, double a2 = 1)
{
    af::EffectInputs in;
    in.block = {t1, c1, a1, a1};
    in.primary = in.block;
    in.secondary = {t2, c2, a2, a2};
    return in;
}

} // namespace

TEST(Tactics, LibraryHasElevenTemplates)
{
    auto kinds = lib().kinds();
    EXPECT_EQ(kinds, (std::vector<std::string>{"add", "add_queue", "aggregate", "cache", "compress", "parallel", "reduce",
                                               "reexecute", "replace", "serial", "skip"}));
    auto j = af::to_json(lib());
    ASSERT_EQ(j.size(), 11u);
    for (const auto& t : j)
        for (const char* part : {"supporting_connectors", "precondition", "pre_state", "change_actions", "post_state",
                                 "expected_effect"})
            EXPECT_TRUE(t.contains(part)) << t["kind"] << " " << part;
}

TEST(Tactics, ParallelBatchShape)
{
    Fixture f = emergency();
    auto ct = f.make("parallel", {"root.6.0.1.SC:map", "standby.SC:map@google_map"});
    EXPECT_EQ(count_kind(ct.batch, CA::Kind::AddConnector), 2u);
    EXPECT_EQ(count_kind(ct.batch, CA::Kind::AddBinding), 4u);
    EXPECT_EQ(count_kind(ct.batch, CA::Kind::ForEachInBinding), 1u);
    EXPECT_EQ(count_kind(ct.batch, CA::Kind::ForEachOutBinding), 1u);
    EXPECT_EQ(ct.primary, "root.6.0.1.SC:map");
    EXPECT_EQ(ct.secondary, "standby.SC:map@google_map");
}

TEST(Tactics, ParallelPeerFoundByPrecondition)
{
    Fixture f = emergency();
    auto ct = f.make("parallel", {"root.6.0.1.SC:map"});
    EXPECT_EQ(ct.secondary, "standby.SC:map@google_map");
    // No spare of the same type.
    EXPECT_THROW(f.make("parallel", {"root.2.SC:input_additional_information"}), af::PreconditionFailed);
}

TEST(Tactics, ReplaceNeedsItsAssumption)
{
    Fixture f = emergency();
    try {
        f.make("replace", {"root.1.0.SC:find_by_id", "find_on_map"}, {"map service is available"});
        FAIL() << "instantiated";
    } catch (const af::PreconditionFailed& e) {
        EXPECT_NE(std::string(e.what()).find("map service is available"), std::string::npos) << e.what();
    }
    f.ctx.assert_fact(af::Proposition::assumption("map service is available"));
    EXPECT_NO_THROW(f.make("replace", {"root.1.0.SC:find_by_id", "find_on_map"}, {"map service is available"}));
}

TEST(Tactics, SkipInstantiableOnActiveComponents)
{
    Fixture f = emergency();
    for (const auto& c : f.rt.components) {
        if (c.standby || c.id == "root.5.0.SC:request_police_support")
            continue;
        EXPECT_NO_THROW(f.make("skip", {c.id})) << c.id;
    }
    EXPECT_THROW(f.make("skip", {"root.99.SC:none"}), af::PreconditionFailed);
    // The sole service of an optional branch: its predecessor is already bound
    // to its successor by the empty branch, so the bypass would duplicate it.
    EXPECT_THROW(f.make("skip", {"root.5.0.SC:request_police_support"}), af::PreconditionFailed);
}

TEST(Tactics, Arity)
{
    Fixture f = emergency();
    EXPECT_THROW(f.make("skip", {}), af::ArityError);
    EXPECT_THROW(f.make("skip", {"root.0.SC:identify_call_number", "x"}), af::ArityError);
    EXPECT_THROW(f.make("compress", {"root.6.0.0.0.SC:send_vehicle_data"}), af::ArityError);
}

TEST(Tactics, ParallelPostStateBindings)
{
    Fixture f(two_provider_model(0.9, 0.8));
    auto before_in = f.ctx.in_bindings("root.SC:S");
    auto before_out = f.ctx.out_bindings("root.SC:S");
    auto ct = f.make("parallel", {"root.SC:S", "standby.SC:S@p2"});
    af::ContextModel after = af::apply(ct.batch, f.ctx);
    std::string pout, pin;
    for (const auto& c : after.connectors()) {
        if (after.connector_type(c) == "ParallelOut")
            pout = c;
        if (after.connector_type(c) == "ParallelIn")
            pin = c;
    }
    ASSERT_FALSE(pout.empty());
    ASSERT_FALSE(pin.empty());
    for (const auto& x : before_in)
        EXPECT_TRUE(after.bound(x, pout));
    for (const auto& y : before_out)
        EXPECT_TRUE(after.bound(pin, y));
    EXPECT_TRUE(after.bound(pout, "root.SC:S"));
    EXPECT_TRUE(after.bound(pout, "standby.SC:S@p2"));
    EXPECT_TRUE(after.bound("root.SC:S", pin));
    EXPECT_TRUE(after.bound("standby.SC:S@p2", pin));
    EXPECT_EQ(after.in_bindings("root.SC:S"), std::vector<std::string>{pout});
    EXPECT_TRUE(oracle::brute_force_entails(after, ct.post_state, &f.ctx));
    EXPECT_TRUE(af::entails(after, ct.post_state, &f.ctx).holds);
}

TEST(Tactics, EmptyBatchIsIdentity)
{
    Fixture f = emergency();
    af::ContextModel after = af::apply({}, f.ctx);
    EXPECT_TRUE(after.same_facts(f.ctx));
}

TEST(Tactics, FailingBatchLeavesContextUntouched)
{
    Fixture f = emergency();
    af::ContextModel copy = f.ctx;
    std::vector<CA> batch{CA::add_connector("fresh", af::ConnectorType::Simple),
                          CA::remove_binding("root.BlockStart", "nowhere")};
    EXPECT_THROW(af::apply(batch, f.ctx), af::Error);
    EXPECT_TRUE(f.ctx.same_facts(copy));
    EXPECT_EQ(f.ctx.revision(), copy.revision());

    auto existing = f.ctx.bindings().front();
    std::vector<CA> dup{CA::add_binding(existing.first, existing.second)};
    EXPECT_THROW(af::apply(dup, f.ctx), af::DuplicateBinding);
}

TEST(Tactics, FreshIdsNeverCollide)
{
    Fixture f = emergency();
    auto a = f.make("add", {"root.1.BlockStart", "find_on_map"});
    f.ctx = af::apply(a.batch, f.ctx);
    auto b = f.make("add", {"root.1.BlockStart", "find_on_map"});
    for (const auto& x : a.batch)
        for (const auto& y : b.batch)
            if ((x.kind == CA::Kind::AddConnector || x.kind == CA::Kind::AddComponent) && x.kind == y.kind) {
                EXPECT_NE(x.id, y.id);
            }
    EXPECT_NO_THROW(af::apply(b.batch, f.ctx));
}

TEST(Tactics, PredictParallel)
{
    Fixture f(two_provider_model(0.9, 0.8));
    auto ct = f.make("parallel", {"root.SC:S", "standby.SC:S@p2"});
    auto p = af::predict_effect(ct, lib(), inputs(100, 1, 0.9, 120, 2, 0.8));
    EXPECT_NEAR(p.availability, 0.98, 1e-12);
    EXPECT_DOUBLE_EQ(p.cost, 3);
    EXPECT_DOUBLE_EQ(p.response_time, 100);
    EXPECT_DOUBLE_EQ(p.memory, 0);
}

TEST(Tactics, PredictSerial)
{
    Fixture f(two_provider_model(0.9, 0.8));
    auto ct = f.make("serial", {"root.SC:S", "standby.SC:S@p2"});
    auto p = af::predict_effect(ct, lib(), inputs(100, 1, 0.9, 120, 2, 0.8));
    EXPECT_NEAR(p.availability, 0.98, 1e-12);
    EXPECT_NEAR(p.cost, 1.2, 1e-12);
    EXPECT_NEAR(p.response_time, 112, 1e-9);
}

TEST(Tactics, SerialMatchesSimulation)
{
    Fixture f(two_provider_model(0.9, 0.8));
    auto ct = f.make("serial", {"root.SC:S", "standby.SC:S@p2"});
    auto p = af::predict_effect(ct, lib(), inputs(100, 1, 0.9, 120, 2, 0.8));
    af::apply_to_runtime(f.rt, ct.batch);
    SimStats s = simulate(f.rt, 100000);
    EXPECT_NEAR(s.availability, p.availability, 0.02 * p.availability);
    EXPECT_NEAR(s.mean_time, p.response_time, 0.02 * p.response_time);
    EXPECT_NEAR(s.cost, p.cost, 0.02 * p.cost);
}

TEST(Tactics, ReexecuteMatchesSimulation)
{
    Fixture f(two_provider_model(0.5, 0.5));
    auto ct = f.make("reexecute", {"root.SC:S"});
    auto p = af::predict_effect(ct, lib(), inputs(100, 1, 0.5));
    EXPECT_NEAR(p.availability, 1 - std::pow(0.5, 5), 1e-12);
    af::apply_to_runtime(f.rt, ct.batch);
    SimStats s = simulate(f.rt, 100000);
    EXPECT_NEAR(s.availability, p.availability, 0.02 * p.availability);
    EXPECT_NEAR(s.mean_time, p.response_time, 0.02 * p.response_time);
}

TEST(Tactics, SkipMatchesStructuralRecomputation)
{
    const char* doc = R"({"workflow": {"kind": "seq", "children": [{"kind": "service", "service": "a"},
        {"kind": "service", "service": "b"}, {"kind": "service", "service": "c"}]},
      "services": [{"name": "a", "providers": [{"id": "pa", "latency_mean_ms": 10, "failure_probability": 0.1, "cost": 1}]},
                   {"name": "b", "providers": [{"id": "pb", "latency_mean_ms": 20, "failure_probability": 0.2, "cost": 2}]},
                   {"name": "c", "providers": [{"id": "pc", "latency_mean_ms": 30, "failure_probability": 0.3, "cost": 3}]}],
      "quality_requirements": [], "adaptation_plans": []})";
    Fixture f(af::parse_model(doc));
    auto leaves = af::catalog_leaf_values(f.model);
    auto whole = af::structural_qos(f.model.workflow, leaves);
    auto ct = f.make("skip", {"root.1.SC:b"});
    af::EffectInputs in;
    in.block = {whole.response_time, whole.cost, whole.availability, whole.reliability};
    in.primary = {20, 2, 0.8, 0.8};
    auto p = af::predict_effect(ct, lib(), in);
    af::ProcessNode post = f.model.workflow;
    post.children.erase(post.children.begin() + 1);
    auto want = af::structural_qos(post, leaves);
    EXPECT_NEAR(p.response_time, want.response_time, 1e-9);
    EXPECT_NEAR(p.cost, want.cost, 1e-9);
    EXPECT_NEAR(p.availability, want.availability, 1e-12);
    EXPECT_NEAR(p.reliability, want.reliability, 1e-12);

    af::apply_to_runtime(f.rt, ct.batch);
    SimStats s = simulate(f.rt, 20000);
    EXPECT_NEAR(s.availability, want.availability, 0.02 * want.availability);
}

TEST(Tactics, CompressPredictionUsesTransit)
{
    Fixture f = emergency();
    auto ct = f.make("compress", {"root.6.0.0.0.SC:send_vehicle_data", "root.6.0.0.1.SC:receive_vehicle_data"});
    af::EffectInputs in;
    in.block.response_time = 1100;
    in.primary.transit_ms = 1000;
    auto p = af::predict_effect(ct, lib(), in);
    EXPECT_NEAR(p.response_time, 1100 - 1000 * 0.7 + 10, 1e-9);
    EXPECT_GT(p.battery, 0.0);
}

TEST(Tactics, RegisterCustomTactic)
{
    af::TacticLibrary custom = af::make_builtin_library();
    af::TacticTemplate t = custom.at("skip");
    EXPECT_THROW(custom.register_tactic(t), af::Error);
    t.kind = "skip_again";
    custom.register_tactic(t);
    EXPECT_NE(custom.find("skip_again"), nullptr);
    EXPECT_EQ(lib().find("skip_again"), nullptr);
}
