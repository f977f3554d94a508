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

#include "adaptflow/trace.hpp"

#include <algorithm>
#include <map>

#include "adaptflow/errors.hpp"

namespace adaptflow {

namespace {

// Required payload fields per event kind.
const std::map<std::string, std::vector<std::string>, std::less<>>& required_fields()
{
    static const std::map<std::string, std::vector<std::string>, std::less<>> r{
        {"invoke", {"instance", "component", "provider"}},
        {"complete", {"instance"}},
        {"fail", {"instance", "reason"}},
        {"measure", {"property", "value", "measured_at"}},
        {"classify", {"property", "value", "level", "badness"}},
        {"trigger", {"name", "severity"}},
        {"plan_selected", {"pattern", "trigger", "score"}},
        {"tactic_applied", {"pattern", "tactic", "args"}},
        {"plan_rejected", {"trigger", "reason"}},
        {"falsification", {"assumption", "severity"}},
        {"reconfigure", {"actions"}},
        {"scenario_event", {"action"}},
    };
    return r;
}

} // namespace

const std::vector<std::string>& trace_kinds()
{
    static const std::vector<std::string> kinds = [] {
        std::vector<std::string> k;
        for (const auto& [name, fields] : required_fields())
            k.push_back(name);
        return k;
    }();
    return kinds;
}

void TraceWriter::emit(std::int64_t t, std::string_view kind, nlohmann::ordered_json fields)
{
    if (t < last_t_)
        throw Error("trace time went backwards: " + std::to_string(t) + " < " + std::to_string(last_t_));
    last_t_ = t;
    if (!filter_.empty() && std::find(filter_.begin(), filter_.end(), kind) == filter_.end())
        return;
    nlohmann::ordered_json line;
    line["t"] = t;
    line["kind"] = kind;
    for (auto& [k, v] : fields.items())
        line[k] = std::move(v);
    if (out_)
        *out_ << line.dump() << '\n';
    if (retain_)
        events_.push_back(std::move(line));
}

std::size_t TraceWriter::count(std::string_view kind) const
{
    return static_cast<std::size_t>(
        std::count_if(events_.begin(), events_.end(), [&](const auto& e) { return e["kind"] == kind; }));
}

std::string check_trace_event(const nlohmann::json& event)
{
    if (!event.is_object())
        return "not an object";
    if (!event.contains("t") || !event["t"].is_number_integer())
        return "missing integer 't'";
    if (event["t"].get<std::int64_t>() < 0)
        return "negative 't'";
    if (!event.contains("kind") || !event["kind"].is_string())
        return "missing 'kind'";
    auto kind = event["kind"].get<std::string>();
    auto it = required_fields().find(kind);
    if (it == required_fields().end())
        return "unknown kind '" + kind + "'";
    for (const auto& f : it->second)
        if (!event.contains(f))
            return kind + ": missing '" + f + "'";
    return {};
}

} // namespace adaptflow
